"""Exception types shared across the package."""


class SomLogicError(Exception):
    """Base class for all errors raised by this library."""


class ConfigError(SomLogicError, ValueError):
    """Invalid configuration: map dimensions, schedule bounds, seeds."""


class InputError(SomLogicError, ValueError):
    """Invalid runtime input: dimension mismatch, empty data, unknown ids."""


class DatasetError(InputError):
    """Malformed dataset content. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(SomLogicError, ValueError):
    """Concept or inclusion syntax error. Carries the character position."""

    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


class UnknownCategoryError(InputError):
    """A concept name does not resolve to any learned category."""


class SpecificityCycleError(SomLogicError):
    """The strict inclusions between categories form a cycle, so no
    specificity ordering exists."""

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__(
            "specificity relation is cyclic: " + " > ".join(self.cycle + [self.cycle[0]])
        )


class ConsistencyError(SomLogicError):
    """An internal invariant failed, e.g. the combined preference relation
    broke a strict-order axiom. Always a bug, never user error."""
