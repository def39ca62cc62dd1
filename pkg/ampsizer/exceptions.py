"""Exceptions for ampsizer library."""

__all__ = [
    'AmpsizerError',
    'ConfigError',
    'NetlistError',
    'NetlistSyntaxError',
    'UnknownDeviceError',
    'ArityError',
    'DuplicateInstanceError',
    'DesignVariableError',
    'SimulationError',
    'ConvergenceError',
    'SingularMatrixError',
    'NoCrossingError',
    'TransientError',
    'PlanError',
    'PlanSyntaxError',
    'CircularReferenceError',
    'UnclassifiedDeviceError',
    'MirrorLengthError',
    'PlanExecutionError',
    'FeedbackError',
    'ProviderError',
    'NoReferencePlanError',
    'ResponseError',
    'NoPlanBlockError',
    'PlanRejectedError',
    'PromptAssemblyError',
    'CampaignError',
    'RunDirectoryError',
]


class AmpsizerError(Exception):
    msg = "An error occured in ampsizer."

    def __init__(self, msg=None):
        super(AmpsizerError, self).__init__()
        if msg is not None:
            self.msg = msg

    def __str__(self):
        return self.msg


class ConfigError(AmpsizerError):
    msg = "The configuration is invalid."


class _PositionedError(AmpsizerError):
    """Error tied to a line/column of some source text.

        msg: description of the problem
        line: 1-based line number
        column: 1-based column number

    """

    def __init__(self, msg=None, line=None, column=None):
        super(_PositionedError, self).__init__(msg)
        self.line = line
        self.column = column
        if line is not None:
            self.msg = '{0} (line {1}, column {2})'.format(
                self.msg, line, column if column is not None else 1)


class NetlistError(AmpsizerError):
    msg = "The netlist is invalid."


class NetlistSyntaxError(_PositionedError, NetlistError):
    msg = "Netlist syntax error."


class ArityError(NetlistSyntaxError):
    msg = "Wrong number of terminals for device."


class UnknownDeviceError(NetlistError):
    msg = "Unknown device."

    def __init__(self, name=None):
        super(UnknownDeviceError, self).__init__()
        self.name = name
        if name is not None:
            self.msg = "Unknown device {0}.".format(name)


class DuplicateInstanceError(NetlistSyntaxError):
    msg = "Duplicate instance name."


class DesignVariableError(NetlistError):
    msg = "Invalid design variable value."


class SimulationError(AmpsizerError):
    msg = "The simulation failed."


class ConvergenceError(SimulationError):
    msg = "Newton iteration did not converge."

    def __init__(self, msg=None, residual=None):
        super(ConvergenceError, self).__init__(msg)
        self.residual = residual
        if residual is not None:
            self.msg = '{0} Final residual {1:.3e}.'.format(self.msg, residual)


class SingularMatrixError(SimulationError):
    msg = "The circuit matrix is singular."

    def __init__(self, msg=None, node=None):
        super(SingularMatrixError, self).__init__(msg)
        self.node = node
        if node is not None:
            self.msg = '{0} Node {1} has no DC path to ground.'.format(
                self.msg, node)


class NoCrossingError(SimulationError):
    msg = "Loop gain never crosses unity."

    def __init__(self, msg=None, f_start=None, f_stop=None):
        super(NoCrossingError, self).__init__(msg)
        self.f_start = f_start
        self.f_stop = f_stop
        if f_start is not None:
            self.msg = '{0} Sweep {1:g} Hz to {2:g} Hz.'.format(
                self.msg, f_start, f_stop)


class TransientError(SimulationError):
    msg = "Transient timestep did not converge."

    def __init__(self, msg=None, time=None):
        super(TransientError, self).__init__(msg)
        self.time = time
        if time is not None:
            self.msg = '{0} t = {1:.4e} s.'.format(self.msg, time)


class PlanError(AmpsizerError):
    msg = "The sizing plan is invalid."


class PlanSyntaxError(_PositionedError, PlanError):
    msg = "Plan syntax error."


class CircularReferenceError(PlanSyntaxError):
    msg = "Reference to a name that is not bound yet."


class UnclassifiedDeviceError(PlanError):
    msg = "Device is not classified."

    def __init__(self, msg=None, device=None):
        super(UnclassifiedDeviceError, self).__init__(msg)
        self.device = device
        if msg is None and device is not None:
            self.msg = "Device {0} has no classification.".format(device)


class MirrorLengthError(PlanError):
    msg = "Mirror device length differs from its reference."

    def __init__(self, device=None, reference=None):
        super(MirrorLengthError, self).__init__()
        self.device = device
        self.reference = reference
        if device is not None:
            self.msg = ("Mirror {0} must use the channel length of its "
                        "reference {1}.".format(device, reference))


class PlanExecutionError(PlanError):
    msg = "Sizing plan execution failed."

    def __init__(self, msg=None, binding=None):
        super(PlanExecutionError, self).__init__(msg)
        self.binding = binding
        if binding is not None:
            self.msg = '{0} [{1}]'.format(self.msg, binding)


class FeedbackError(AmpsizerError):
    msg = "Predicted and measured metrics cannot be compared."


class ProviderError(AmpsizerError):
    msg = "The plan provider failed."


class NoReferencePlanError(ProviderError):
    msg = "No reference plan ships for this topology."

    def __init__(self, topology=None):
        super(NoReferencePlanError, self).__init__()
        self.topology = topology
        if topology is not None:
            self.msg = ("No reference plan ships for topology {0}; use the "
                        "http provider.".format(topology))


class ResponseError(ProviderError):
    """Exception for a plan endpoint response.

        msg: optional message to pass along w/ stacktrace
        response: decoded json response or status information

    """
    msg = "An error occured in the response from the plan endpoint."

    def __init__(self, msg=None, response=None):
        super(ResponseError, self).__init__(msg)
        self.response = response
        if response is not None:
            self.msg = '{0} {1}'.format(self.msg, response)


class NoPlanBlockError(ProviderError):
    msg = "No fenced plan block found in the response."


class PlanRejectedError(ProviderError):
    msg = "The provider plan failed validation."

    def __init__(self, msg=None, diagnostics=None, attempts=None):
        super(PlanRejectedError, self).__init__(msg)
        self.diagnostics = list(diagnostics or [])
        self.attempts = attempts
        if self.diagnostics:
            self.msg = '{0} After {1} attempt(s): {2}'.format(
                self.msg, attempts, '; '.join(self.diagnostics))


class PromptAssemblyError(AmpsizerError):
    msg = "The prompt could not be assembled."


class CampaignError(AmpsizerError):
    msg = "The campaign was aborted."

    def __init__(self, msg=None, round_index=None):
        super(CampaignError, self).__init__(msg)
        self.round_index = round_index
        if round_index is not None:
            self.msg = 'Round {0}: {1}'.format(round_index, self.msg)


class RunDirectoryError(AmpsizerError):
    msg = "The run directory is missing or corrupt."

    def __init__(self, msg=None, path=None):
        super(RunDirectoryError, self).__init__(msg)
        self.path = path
        if path is not None:
            self.msg = '{0} ({1})'.format(self.msg, path)
