import pytest

from ampsizer.config import flatten, get_number, load_config, parse_config
from ampsizer.exceptions import ConfigError
from ampsizer.library import config_path


class DescribeParseConfig:
    def it_groups_dotted_keys(self):
        data = parse_config("name = T180\nnmos.mu0cox = 300u\nnmos.vth0 = .45")
        assert data.name == 'T180'
        assert data.nmos.mu0cox == pytest.approx(300e-6)
        assert data.nmos.vth0 == pytest.approx(0.45)

    def it_lowercases_keys(self):
        assert parse_config("GBW = 100meg").gbw == pytest.approx(1e8)

    def it_skips_comments_and_blank_lines(self):
        data = parse_config("# header\n\nav = 60  # dB\n")
        assert dict(data) == {'av': 60.0}

    def it_coerces_booleans(self):
        data = parse_config("a = yes\nb = off")
        assert data.a is True
        assert data.b is False

    def it_reports_line_of_malformed_entries(self):
        with pytest.raises(ConfigError) as e:
            parse_config("av = 60\ngbw 100meg", source='t.cfg')
        assert str(e.value).startswith('t.cfg:2:')

    def it_rejects_keys_that_are_values_and_groups(self):
        with pytest.raises(ConfigError):
            parse_config("nmos = 1\nnmos.vth0 = .45")
        with pytest.raises(ConfigError):
            parse_config("nmos.vth0 = .45\nnmos = 1")


class DescribeLoadConfig:
    def it_loads_shipped_files(self):
        data = load_config(config_path('t180'))
        assert data.gbw == pytest.approx(100e6)

    def it_raises_config_error_for_missing_files(self, tmpdir):
        with pytest.raises(ConfigError):
            load_config(str(tmpdir.join('absent.cfg')))


class DescribeFlatten:
    def it_returns_dotted_keys(self):
        data = parse_config("provider.name = http\nprovider.timeout = 30")
        assert flatten(data) == {'provider.name': 'http',
                                 'provider.timeout': 30.0}


class DescribeGetNumber:
    def it_looks_up_dotted_keys(self):
        data = parse_config("margin.db_cap = 12")
        assert get_number(data, 'margin.db_cap') == 12.0

    def it_returns_default_when_missing(self):
        assert get_number(parse_config(""), 'x.y', default=3.0) == 3.0

    def it_raises_when_required_key_is_missing(self):
        with pytest.raises(ConfigError):
            get_number(parse_config(""), 'x', required=True)

    def it_rejects_non_numeric_values(self):
        with pytest.raises(ConfigError):
            get_number(parse_config("x = abc"), 'x')
        with pytest.raises(ConfigError):
            get_number(parse_config("x = true"), 'x')
