"""Provider backed by a remote model behind a JSON endpoint.

Wire contract: POST ``{"prompt": "..."}`` and read ``{"text": "..."}``.
The plan is the first fenced block labeled ``plan``; round-0 answers also
carry a fenced ``estimates`` block, one device per line::

    M1 mu_cox=300u agm=0.7 lambda=0.1 vth=0.45

"""
import logging
import os
import re

import requests

from ampsizer.calibration import estimate_record
from ampsizer.exceptions import (
    ConfigError,
    NoPlanBlockError,
    PlanRejectedError,
    ResponseError,
    UnknownDeviceError,
)
from ampsizer.prompt import DEFAULT_VERSION, RuleSet
from ampsizer.prompt.build import (
    assemble_round0,
    assemble_round_n,
    retry_prompt,
)
from ampsizer.provider import Provider, ProviderResponse, check_plan
from ampsizer.utils import parse_value

__all__ = [
    'ENDPOINT_VARIABLE',
    'TOKEN_VARIABLE',
    'HttpProvider',
    'extract_block',
    'parse_estimates',
]

log = logging.getLogger(__name__)

ENDPOINT_VARIABLE = 'AMPSIZER_ENDPOINT'
TOKEN_VARIABLE = 'AMPSIZER_TOKEN'

_ESTIMATE_KEYS = ('mu_cox', 'agm', 'lambda', 'vth')


def extract_block(text, label):
    """Body of the first fenced block with this label, or None."""
    match = re.search(r'^```[ \t]*' + re.escape(label) + r'[ \t]*\n(.*?)^```',
                      text, re.MULTILINE | re.DOTALL)
    if match is None:
        return None
    return match.group(1)


def parse_estimates(text, net):
    """Return (device -> CalibrationRecord, diagnostics) of an estimates
    block.  Every MOSFET of net needs all four parameters."""
    estimates, diagnostics = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            inst = net.get(tokens[0])
        except UnknownDeviceError:
            diagnostics.append("estimates line {0}: unknown device {1}".format(
                lineno, tokens[0]))
            continue
        if not inst.is_mosfet:
            diagnostics.append("estimates line {0}: {1} is not a MOSFET"
                               .format(lineno, inst.name))
            continue
        values = {}
        for token in tokens[1:]:
            key, sep, value = token.partition('=')
            key = key.lower()
            try:
                if not sep or key not in _ESTIMATE_KEYS:
                    raise ValueError(token)
                values[key] = parse_value(value)
            except ValueError:
                diagnostics.append("estimates line {0}: bad entry {1!r}"
                                   .format(lineno, token))
        missing = [k for k in _ESTIMATE_KEYS if k not in values]
        if missing:
            diagnostics.append("estimates line {0}: {1} lacks {2}".format(
                lineno, inst.name, ', '.join(missing)))
            continue
        estimates[inst.name] = estimate_record(
            inst, mu_cox=values['mu_cox'], agm=values['agm'],
            lam=values['lambda'], vth=values['vth'])
    for inst in net.mosfets:
        if inst.name not in estimates and not any(
                inst.name in d for d in diagnostics):
            diagnostics.append("estimates: no entry for {0}".format(
                inst.name))
    return estimates, diagnostics


class HttpProvider(Provider):
    """Send assembled prompts to a model endpoint.

        endpoint: URL taking the JSON prompt, $AMPSIZER_ENDPOINT when None
        token: bearer token, $AMPSIZER_TOKEN when None
        max_retries: extra attempts after a rejected plan
        timeout: request timeout in seconds
        rules_version: prompt rule-set version
        session_factory: callable returning a requests.Session; one
            session per request so no state is shared between rounds

    """
    name = 'http'
    settings = ('endpoint', 'max_retries', 'timeout', 'rules_version')

    def __init__(self, endpoint=None, token=None, max_retries=2, timeout=120,
                 rules_version=DEFAULT_VERSION,
                 session_factory=requests.session):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_VARIABLE)
        if not self.endpoint:
            raise ConfigError(
                "The http provider needs an endpoint: set provider.endpoint "
                "or ${0}".format(ENDPOINT_VARIABLE))
        self.token = token or os.environ.get(TOKEN_VARIABLE)
        self.max_retries = int(max_retries)
        if self.max_retries < 0:
            raise ConfigError("max_retries must not be negative")
        self.timeout = float(timeout)
        self.rules = RuleSet(rules_version)
        self.session_factory = session_factory

    def _send_request(self, prompt):
        headers = {}
        if self.token:
            headers['Authorization'] = 'Bearer ' + self.token
        session = self.session_factory()
        try:
            return session.post(self.endpoint, json={'prompt': prompt},
                                headers=headers, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ResponseError("Request to the plan endpoint failed.",
                                response=str(exc))
        finally:
            session.close()

    def process_request(self, prompt):
        """Send one prompt and return the response text."""
        response = self._send_request(prompt)
        if response.status_code != 200:
            raise ResponseError(response='HTTP {0}'.format(
                response.status_code))
        try:
            data = response.json()
        except ValueError:
            raise ResponseError("The plan endpoint did not return JSON.")
        if not isinstance(data, dict) or not isinstance(data.get('text'), str):
            raise ResponseError("The plan endpoint response has no text.",
                                response=data)
        return data['text']

    def _converse(self, bundle, request):
        found_block = False
        diagnostics = []
        attempts = self.max_retries + 1
        for attempt in range(1, attempts + 1):
            log.info("Round %d: plan request %d/%d to %s",
                     request.round_index, attempt, attempts, self.endpoint)
            text = self.process_request(bundle.text)
            block = extract_block(text, 'plan')
            if block is None:
                diagnostics = ["No fenced block labeled plan in the response."]
            else:
                found_block = True
                plan, diagnostics = check_plan(block, request.netlist,
                                               request.design_targets)
                estimates = None
                if request.initial and not diagnostics:
                    body = extract_block(text, 'estimates')
                    if body is None:
                        diagnostics = ["No fenced block labeled estimates in "
                                       "the response."]
                    else:
                        estimates, diagnostics = parse_estimates(
                            body, request.netlist)
                if not diagnostics:
                    return ProviderResponse(plan, estimates, attempt,
                                            bundle.text)
            log.warning("Round %d: response %d rejected: %s",
                        request.round_index, attempt, '; '.join(diagnostics))
            bundle = retry_prompt(bundle, diagnostics)
        if not found_block:
            raise NoPlanBlockError(
                "No fenced plan block found after {0} attempt(s).".format(
                    attempts))
        raise PlanRejectedError(diagnostics=diagnostics, attempts=attempts)

    def round0(self, request):
        bundle = assemble_round0(request.netlist, request.targets, self.rules)
        return self._converse(bundle, request)

    def round_n(self, request):
        bundle = assemble_round_n(request, self.rules)
        return self._converse(bundle, request)
