import json
import math

import pytest

from ampsizer.utils import (
    ObjDict,
    dumps,
    format_eng,
    format_value,
    loads_float,
    parallel,
    parse_value,
)


class DescribeParseValue:
    def it_parses_plain_numbers(self):
        assert parse_value('42') == 42.0
        assert parse_value('-1.5e3') == -1500.0
        assert parse_value('.5') == 0.5

    def it_applies_spice_suffixes(self):
        assert parse_value('0.7u') == pytest.approx(0.7e-6)
        assert parse_value('1p') == pytest.approx(1e-12)
        assert parse_value('100meg') == pytest.approx(1e8)
        assert parse_value('20k') == pytest.approx(2e4)

    def it_reads_m_as_milli(self):
        assert parse_value('5m') == pytest.approx(5e-3)

    def it_ignores_suffix_case(self):
        assert parse_value('100MEG') == pytest.approx(1e8)
        assert parse_value('2U') == pytest.approx(2e-6)

    def it_rejects_garbage(self):
        with pytest.raises(ValueError) as e:
            parse_value('12 volts')
        assert 'Invalid numeric value' in str(e.value)


class DescribeFormatValue:
    def it_round_trips_exactly(self):
        for value in (0.1, 1e-12, 3.0000000000000004e-6, 123456.789):
            assert float(format_value(value)) == value


class DescribeFormatEng:
    def it_picks_the_engineering_suffix(self):
        assert format_eng(3.14159e-4) == '314.16u'
        assert format_eng(100e6) == '100meg'
        assert format_eng(1e-12) == '1p'
        assert format_eng(2.5) == '2.5'

    def it_keeps_the_sign(self):
        assert format_eng(-0.9) == '-900m'

    def it_passes_zero_and_infinity_through(self):
        assert format_eng(0.0) == '0'
        assert format_eng(math.inf) == 'inf'


class DescribeParallel:
    def it_combines_finite_values(self):
        assert parallel(2.0, 2.0) == 1.0

    def it_drops_infinite_operands(self):
        assert parallel(math.inf, 5.0) == 5.0
        assert parallel(5.0, math.inf) == 5.0


class DescribeObjDict:
    def it_exposes_keys_as_attributes(self):
        d = ObjDict(a=1, nested={'b': 2})
        assert d.a == 1
        assert d.nested.b == 2

    def it_raises_attribute_error_for_missing_keys(self):
        with pytest.raises(AttributeError):
            ObjDict().missing


class DescribeDumps:
    def it_writes_non_finite_values_as_strings(self):
        doc = json.loads(dumps({'gbw': math.inf, 'pm': -math.inf}))
        assert doc == {'gbw': 'inf', 'pm': '-inf'}
        assert loads_float(doc['gbw']) == math.inf

    def it_calls_json_protocol(self):
        class Thing(object):
            def __json__(self):
                return {'value': math.nan}
        doc = json.loads(dumps([Thing()]))
        assert doc == [{'value': 'nan'}]

    def it_sorts_keys(self):
        assert dumps({'b': 1, 'a': 2}).index('"a"') < \
            dumps({'b': 1, 'a': 2}).index('"b"')
