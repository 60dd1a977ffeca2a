"""Error classes shared across the toolkit.

Each class carries the CLI exit code it maps to.
"""


class ShtvolError(Exception):
    exit_code = 1


class SchemaError(ShtvolError):
    """Malformed input: bad JSON, unknown family, unparsable expression."""
    exit_code = 1


class PreconditionError(ShtvolError):
    """Well-formed input that violates a mathematical precondition."""
    exit_code = 2


class InconsistencyError(ShtvolError):
    """An internal cross-check failed (nonzero remainder, mismatched routes)."""
    exit_code = 3
