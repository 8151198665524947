"""Exception types shared across the engine."""


class SlopelabError(Exception):
    """Base class for engine errors."""


class FalsificationError(SlopelabError):
    """A checked mathematical invariant failed.

    This is never a user error: it means either an encoding bug or a genuine
    counterexample to a property the engine asserts, and must surface loudly.
    """


class ExpressionError(SlopelabError):
    """Syntax or semantic error in the module expression language."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None, expected=None):
        self.line = line
        self.column = column
        self.expected = tuple(expected) if expected else ()
        loc = f" at line {line}, column {column}" if line is not None else ""
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message}{loc}{hint}")


class ScriptError(SlopelabError):
    """Malformed or inadmissible blow-up script / model file."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        prefix = f"step {step}: " if step is not None else ""
        super().__init__(f"{prefix}{message}")
