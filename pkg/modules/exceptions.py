"""Error types shared by every module.

All of them derive from ``ValueError`` so callers that only care about
"bad input" can keep catching that.
"""


class ModuliError(ValueError):
    """Base class for every error raised by the toolkit."""


class DomainError(ModuliError):
    """A parameter lies outside the range an operation is defined on."""


class SpaceMismatchError(ModuliError):
    """Points or distributions do not belong to the expected space."""


class DegenerateRatioError(ModuliError):
    """A ratio was requested with a vanishing denominator."""

    def __init__(self, name, numerator, denominator):
        self.name = name
        self.numerator = numerator
        self.denominator = denominator
        super().__init__(
            f'{name}: degenerate ratio (numerator={numerator!r}, denominator={denominator!r})'
        )


class SerializationError(ModuliError):
    """Malformed JSON or command-line input; ``field`` names the offending path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f'{field}: {message}')


class InternalConsistencyError(ModuliError):
    """Two independent evaluations of the same closed form disagree."""
