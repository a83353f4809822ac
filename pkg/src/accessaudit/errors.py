class InputError(ValueError):
    """Bad input data or configuration (CLI exit code 2)."""


class InvariantError(RuntimeError):
    """An internal consistency check failed (CLI exit code 3)."""
