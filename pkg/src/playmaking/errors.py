"""Exception hierarchy shared across modules."""


class PlaymakingError(Exception):
    """Base class for every error raised by this package."""


class DataError(PlaymakingError, ValueError):
    """Input files or records violate the schema or its invariants."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class UnknownPlayerError(PlaymakingError, KeyError):
    def __str__(self):
        return f"unknown player {self.args[0]!r}"


class UnknownGameError(PlaymakingError, KeyError):
    def __str__(self):
        return f"unknown game {self.args[0]!r}"


class UndefinedRateError(PlaymakingError, ArithmeticError):
    """A per-60 rate was requested over zero seconds."""


class NoSharedTimeError(UndefinedRateError):
    """Every teammate has zero shared time with the player."""


class NoOffIceTimeError(UndefinedRateError):
    """Every teammate who shared ice with the player never played apart from the player."""


class InsufficientSamplesError(PlaymakingError, ValueError):
    pass


class RankDeficientError(PlaymakingError, ValueError):
    pass


class UndefinedStatisticError(PlaymakingError, ArithmeticError):
    """A statistic is undefined for the inputs (zero RSS, zero variance, ...)."""


class DegenerateSplitError(PlaymakingError, ValueError):
    pass
