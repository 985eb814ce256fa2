"""Exception types raised by coneproj."""


class ConeProjError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ConeProjError, ValueError):
    pass


class TooShort(ValidationError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"TooShort({n}): at least 3 points are required")


class NotIncreasing(ValidationError):
    """Abscissae fail strict monotonicity; ``index`` is 1-based."""

    def __init__(self, index, line=None):
        self.index = index
        self.line = line
        msg = f"NotIncreasing({index}): x[{index}] <= x[{index - 1}]"
        if line is not None:
            msg += f" (line {line})"
        super().__init__(msg)


class DimensionMismatch(ConeProjError, ValueError):
    pass


class InvalidConfig(ConeProjError, ValueError):
    pass


class EmptyBasis(ConeProjError):
    """All candidate columns were linearly dependent."""


class TooLarge(ConeProjError):
    def __init__(self, m, limit):
        self.m = m
        super().__init__(f"TooLarge({m}): exhaustive oracle limited to {limit} constraints")


class NoCertificate(ConeProjError):
    """No subset produced a KKT certificate; signals a tolerance bug."""


class KktReject(ConeProjError):
    REASONS = ("Infeasible", "NegativeMultiplier", "BadRepresentation")

    def __init__(self, reason, detail=""):
        assert reason in self.REASONS
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class EngineUnavailable(ConeProjError):
    pass


class ParseError(ConeProjError, ValueError):
    def __init__(self, line, column, reason):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")


class SchemaError(ConeProjError, ValueError):
    pass
