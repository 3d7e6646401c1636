"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A parameter set or configuration violates its invariants."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain of a function."""


class ContractError(ValueError):
    """Inputs or outputs of a component break its interface contract."""


class ParseError(ValueError):
    """A serialized file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(RuntimeError):
    """A computation produced non-finite values or diverged."""


class InputError(ValueError):
    """A required input file is missing or empty."""
