"""On-disk record of a campaign.

Layout::

    <run>/campaign.json        every input needed to replay the campaign
    <run>/result.json          CampaignResult, written at the end
    <run>/round_NN/plan.dsl
                   design.json       DesignVariables
                   netlist.sp        sized netlist as simulated
                   op.json           OperatingPoint
                   metrics.json      MetricSet
                   calibration.txt   aligned calibration table
                   calibration.json
                   errors.json       errors, predicted, verdict, design
                                     targets and warnings of the round
                   prompt.txt        http provider only
                   estimates.json    round 0 only
                   failure.txt       only when the round aborted

"""
import io
import json
import os
import re

from ampsizer.calibration import CalibrationRecord, CalibrationTable
from ampsizer.exceptions import FeedbackError, RunDirectoryError
from ampsizer.feedback import (
    PredictionError,
    RoundHistory,
    RoundRecord,
    Verdict,
)
from ampsizer.netlist import DesignVariables
from ampsizer.plan import DesignTargets, PredictedMetrics
from ampsizer.simulator import MetricSet, OperatingPoint
from ampsizer.utils import dumps

__all__ = [
    'CAMPAIGN_FILE',
    'RESULT_FILE',
    'RunDirectory',
    'next_free_directory',
]

CAMPAIGN_FILE = 'campaign.json'
RESULT_FILE = 'result.json'

_ROUND_RE = re.compile(r'^round_(\d+)$')


def next_free_directory(root, stem):
    """First ``<root>/<stem>-NNN`` that does not exist yet."""
    index = 1
    while True:
        path = os.path.join(root, '{0}-{1:03d}'.format(stem, index))
        if not os.path.exists(path):
            return path
        index += 1


class RunDirectory(object):
    """Reader and writer of one campaign directory.

        path: directory of the campaign

    """

    def __init__(self, path):
        self.path = path

    def __repr__(self):
        return 'RunDirectory({0!r})'.format(self.path)

    def create(self):
        """Make the directory; an existing campaign is never overwritten."""
        if os.path.exists(os.path.join(self.path, CAMPAIGN_FILE)):
            raise RunDirectoryError(
                "Run directory already holds a campaign", path=self.path)
        try:
            os.makedirs(self.path, exist_ok=True)
        except OSError as exc:
            raise RunDirectoryError(
                "Cannot create run directory: {0}".format(exc),
                path=self.path)
        return self

    def round_path(self, index):
        return os.path.join(self.path, 'round_{0:02d}'.format(index))

    # writing

    def _write(self, path, text):
        directory = os.path.dirname(path)
        try:
            os.makedirs(directory, exist_ok=True)
            with io.open(path, 'w', encoding='utf-8') as f:
                f.write(text)
        except OSError as exc:
            raise RunDirectoryError(
                "Cannot write run file: {0}".format(exc), path=path)

    def write_text(self, index, name, text):
        """Store a text artifact of a round."""
        self._write(os.path.join(self.round_path(index), name), text)

    def write_json(self, index, name, obj):
        """Store a JSON artifact of a round (objects with __json__ too)."""
        self.write_text(index, name, dumps(obj) + '\n')

    def write_campaign(self, data):
        self._write(os.path.join(self.path, CAMPAIGN_FILE), dumps(data) + '\n')

    def write_result(self, data):
        self._write(os.path.join(self.path, RESULT_FILE), dumps(data) + '\n')

    def write_errors(self, record):
        """errors.json of a finished round."""
        self.write_json(record.index, 'errors.json', {
            'errors': [e.__json__() for e in record.errors],
            'predicted': record.predicted,
            'verdict': record.verdict,
            'design_targets': record.design_targets,
            'warnings': list(record.warnings),
        })

    def write_failure(self, index, exc):
        self.write_text(index, 'failure.txt', '{0}: {1}\n'.format(
            type(exc).__name__, exc))

    # reading

    def _read(self, path):
        try:
            with io.open(path, encoding='utf-8') as f:
                return f.read()
        except (IOError, OSError):
            raise RunDirectoryError("Missing run file", path=path)

    def _read_json(self, path):
        text = self._read(path)
        try:
            return json.loads(text)
        except ValueError:
            raise RunDirectoryError("Corrupt run file", path=path)

    def read_text(self, index, name):
        return self._read(os.path.join(self.round_path(index), name))

    def read_json(self, index, name):
        return self._read_json(os.path.join(self.round_path(index), name))

    def has(self, index, name):
        return os.path.isfile(os.path.join(self.round_path(index), name))

    def round_indices(self):
        """Indices of the round directories present, ascending."""
        if not os.path.isdir(self.path):
            raise RunDirectoryError("No such run directory", path=self.path)
        indices = []
        for name in os.listdir(self.path):
            match = _ROUND_RE.match(name)
            if match and os.path.isdir(os.path.join(self.path, name)):
                indices.append(int(match.group(1)))
        return sorted(indices)

    def read_campaign(self):
        return self._read_json(os.path.join(self.path, CAMPAIGN_FILE))

    def read_result(self):
        return self._read_json(os.path.join(self.path, RESULT_FILE))

    def read_plan(self, index):
        return self.read_text(index, 'plan.dsl')

    def load_operating_point(self, index):
        return self._decode(index, 'op.json', OperatingPoint.from_json)

    def load_calibration(self, index):
        return self._decode(index, 'calibration.json',
                            CalibrationTable.from_json)

    def load_estimates(self):
        data = self.read_json(0, 'estimates.json')
        try:
            return dict((k, CalibrationRecord.from_json(v))
                        for k, v in data.items())
        except (KeyError, TypeError, ValueError, AttributeError):
            raise RunDirectoryError(
                "Corrupt run file", path=os.path.join(
                    self.round_path(0), 'estimates.json'))

    def _decode(self, index, name, decoder):
        data = self.read_json(index, name)
        try:
            return decoder(data)
        except (KeyError, TypeError, ValueError, AttributeError):
            raise RunDirectoryError("Corrupt run file", path=os.path.join(
                self.round_path(index), name))

    def load_round(self, index):
        """RoundRecord of a finished round."""
        design = self.read_json(index, 'design.json')
        metrics = self.read_json(index, 'metrics.json')
        errors = self.read_json(index, 'errors.json')
        try:
            return RoundRecord(
                index=index,
                design_targets=DesignTargets.from_json(
                    errors['design_targets']),
                design_variables=DesignVariables.from_json(design),
                predicted=PredictedMetrics.from_json(errors['predicted']),
                measured=MetricSet.from_json(metrics),
                errors=tuple(PredictionError.from_json(e)
                             for e in errors['errors']),
                verdict=Verdict.from_json(errors['verdict']),
                warnings=tuple(errors.get('warnings', ())),
            )
        except (KeyError, TypeError, ValueError, AttributeError):
            raise RunDirectoryError("Corrupt round", path=self.round_path(
                index))

    def load_history(self):
        """RoundHistory of every finished round; an aborted last round is
        left out."""
        history = RoundHistory()
        for index in self.round_indices():
            if not self.has(index, 'errors.json'):
                continue
            try:
                history.append(self.load_round(index))
            except FeedbackError:
                raise RunDirectoryError("Rounds are not contiguous",
                                        path=self.round_path(index))
        if not len(history):
            raise RunDirectoryError("No finished round", path=self.path)
        return history
