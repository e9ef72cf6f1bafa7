import logging
import blinker

__version__ = "0.1.0"

ERROR = {
    "UNDEFINED_SIMILARITY": lambda measure: (1, "Similarity {} is undefined for empty input".format(measure)),
    "THRESHOLD_ORDER": lambda s1, s2: (2, "Thresholds must satisfy 0 < s2 < s1 < 1, got s1={} s2={}".format(s1, s2)),
    "OUT_OF_RANGE": lambda name, value, low, high: (3, "{} = {} outside of [{}, {}]".format(name, value, low, high)),
    "UNSUPPORTED_PARAMETRIZATION": lambda measure, beta: (
        4, "{} is only defined for equal set sizes, got beta={}".format(measure, beta)),
    "EMPTY_POINT": lambda point_id: (5, "Point {} is empty".format(point_id)),
    "FRONTIER_BLOWUP": lambda size, cap, level: (
        6, "Frontier of {} paths at level {} exceeds the cap of {}".format(size, level, cap)),
    "INFEASIBLE_THRESHOLD": lambda s1, best: (7, "Threshold {} unattainable, best similarity is {}".format(s1, best)),
    "MALFORMED_LINE": lambda lineno, reason: (8, "Line {}: {}".format(lineno, reason)),
    "NO_POINTS": (9, "no points"),
    "BAD_SNAPSHOT": lambda reason: (10, "Invalid snapshot: {}".format(reason)),
    "CHECK_FAILED": lambda names: (11, "Failed checks: {}".format(", ".join(names))),
    "INVALID_PARAMETER": lambda name, value: (12, "Invalid value for {}: {}".format(name, value)),
}

# Setup Blinker namespace
notification_signals = blinker.Namespace()

# Setup logger namespace
logger = logging.getLogger('chosenpath')


class ChosenPathError(Exception):
    """Base class of all errors raised by this package

    Args:
        code (int): Numeric error code, see ERROR
        message (str): Human readable description
    """

    def __init__(self, code, message):
        Exception.__init__(self, message)
        self.code = code
        self.message = message


class ParameterError(ChosenPathError):
    """Throw this error when thresholds or construction parameters are invalid"""
    pass


class RangeError(ChosenPathError):
    """Throw this error when a similarity value lies outside its attainable range"""
    pass


class UnsupportedParametrizationError(ChosenPathError):
    """Throw this error when a measure can not be expressed for the requested size ratio"""
    pass


class UndefinedSimilarityError(ChosenPathError):
    """Throw this error when a similarity is requested for empty sets"""
    pass


class EmptyPointError(ChosenPathError):
    """Throw this error when an empty set is inserted into or queried against an index"""

    def __init__(self, code, message, point_id=None):
        ChosenPathError.__init__(self, code, message)
        self.point_id = point_id


class FrontierBlowupError(ChosenPathError):
    """Throw this error when a single map evaluation exceeds the frontier cap"""
    pass


class InfeasibleThresholdError(ChosenPathError):
    """Throw this error when a similarity threshold can not be reached by any intersection size"""
    pass


class MalformedInputError(ChosenPathError):
    """Throw this error when a set file, bit-vector file or query line can not be parsed"""

    def __init__(self, code, message, lineno=None):
        ChosenPathError.__init__(self, code, message)
        self.lineno = lineno


class SnapshotError(ChosenPathError):
    """Throw this error when an index snapshot is truncated or has the wrong format"""
    pass


class VerificationError(ChosenPathError):
    """Throw this error when a verification or dominance check fails"""
    pass


def fail(exc_class, error, *args, **kwargs):
    """Raise exc_class with the code and message registered under `error`

    Args:
        exc_class (type): Subclass of ChosenPathError
        error (str): Key into ERROR
        *args: Arguments for the ERROR entry if it is a lambda
        **kwargs: Extra keyword arguments for the exception constructor

    Raises:
        ChosenPathError: Always
    """
    entry = ERROR[error]
    code, message = entry(*args) if callable(entry) else entry
    raise exc_class(code, message, **kwargs)
