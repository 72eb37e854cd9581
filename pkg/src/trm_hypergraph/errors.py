"""Exception hierarchy shared by every module of the package."""


class TRMError(Exception):
    """Base class for all errors raised by trm_hypergraph."""

    #: CLI exit status used when this error escapes to the command line.
    exit_code = 1


class ZeroDistance(TRMError):
    exit_code = 10


class UnsupportedTaskType(TRMError):
    exit_code = 11


class DuplicateDeviceId(TRMError):
    exit_code = 12


class NoCandidates(TRMError):
    exit_code = 13

    def __init__(self, subtask: int, message: str | None = None):
        self.subtask = subtask
        super().__init__(message or f"no candidate match for subtask {subtask}")


class DegeneratePopulation(TRMError):
    exit_code = 14


class EmptyCluster(TRMError):
    exit_code = 15


class UnassignedSubtask(TRMError):
    exit_code = 16

    def __init__(self, subtask: int, message: str | None = None):
        self.subtask = subtask
        super().__init__(message or f"subtask {subtask} could not be assigned")


class InstanceTooLarge(TRMError):
    exit_code = 17


class Infeasible(TRMError):
    exit_code = 18


class ParseError(TRMError):
    exit_code = 2


class ValidationError(TRMError):
    exit_code = 3
