"""Exception hierarchy shared by the algebra engine, the harness and the CLI."""

from typing import Any, Dict, Optional


class LadError(Exception):
    """Base class for every error raised by the engine.

    Keyword arguments are kept as structured context (for example the
    iterate index ``n`` at which a length computation failed) so the CLI and
    the JSON log formatter can report them.
    """

    def __init__(self, message: str = "", **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = dict(context)

    def with_context(self, **context: Any) -> "LadError":
        """Return a copy of this error carrying extra context."""
        merged = {**self.context, **context}
        prefix = ", ".join(f"{key}={value}" for key, value in context.items())
        clone = type(self).__new__(type(self))
        LadError.__init__(clone, f"{prefix}: {self.message}" if prefix else self.message, **merged)
        for attr, value in vars(self).items():
            if attr not in ("message", "context"):
                setattr(clone, attr, value)
        return clone


class DivisionByZero(LadError, ArithmeticError):
    """Raised when inverting zero in a prime field."""


class ResourceExceeded(LadError):
    """Raised when an exponent, basis-size or degree cap is hit."""


class UndefinedDimension(LadError):
    """Raised when asking for the Krull dimension of the unit ideal."""


class NotFiniteColength(LadError):
    """Raised when a truncation loop reaches its cap without stabilizing."""


class ValidationFailed(LadError):
    """Raised when a declared object violates a checked precondition."""


class UnstableIdeal(ValidationFailed):
    """Raised when inducing an endomorphism on a quotient by a non-stable ideal."""


class FixtureError(LadError):
    """Base class for fixture-file errors; always position-tagged."""

    def __init__(
        self,
        message: str,
        *,
        line: int = 0,
        column: int = 0,
        token: Optional[str] = None,
    ) -> None:
        location = f"line {line}, column {column}"
        if token:
            location += f" near {token!r}"
        super().__init__(f"{location}: {message}", line=line, column=column, token=token)
        self.line = line
        self.column = column
        self.token = token
        self.reason = message


class FixtureSyntaxError(FixtureError):
    """Raised when a fixture line does not match the grammar."""


class FixtureSemanticError(FixtureError):
    """Raised for undeclared names, wrong-ring variables and non-prime fields."""
