"""
Exception hierarchy shared by every analysis module.

Each class carries the exit code the CLI returns for it.
"""


class EvasionError(Exception):
    exit_code = 1


class UsageError(EvasionError):
    """Arguments that are well-typed but make no sense together."""
    exit_code = 2


class ScenarioFormatError(EvasionError):
    exit_code = 3


class AssumptionViolation(EvasionError):
    exit_code = 4


class DegeneratePositionError(EvasionError):
    exit_code = 5


class NonGenericEventError(EvasionError):
    exit_code = 6


class MalformedComplexError(EvasionError):
    exit_code = 7


class ConnectivityViolation(EvasionError):
    exit_code = 8


class EventMismatchError(EvasionError):
    exit_code = 9


class SizeLimitExceeded(EvasionError):
    exit_code = 10


class EmptyFenceError(EvasionError):
    exit_code = 11


EXIT_CODES = {
    "usage error": UsageError.exit_code,
    "unexpected error": 1,
    **{cls.__name__: cls.exit_code for cls in (
        ScenarioFormatError, AssumptionViolation, DegeneratePositionError,
        NonGenericEventError, MalformedComplexError, ConnectivityViolation,
        EventMismatchError, SizeLimitExceeded, EmptyFenceError,
    )},
}
