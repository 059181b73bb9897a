"""Exception types shared across the package."""


class MonrexError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(MonrexError):
    """A file could not be parsed as its documented format."""


class ValidationError(MonrexError):
    """A structural invariant was violated.

    Carries optional location context so callers can point at the offending
    layer/field or row/column.
    """

    def __init__(self, message, *, layer=None, field=None, row=None, col=None):
        parts = [message]
        where = []
        if layer is not None:
            where.append(f"layer {layer}")
        if field is not None:
            where.append(f"field '{field}'")
        if row is not None:
            where.append(f"row {row}")
        if col is not None:
            where.append(f"col {col}")
        if where:
            parts.append(f"({', '.join(where)})")
        super().__init__(" ".join(parts))
        self.layer = layer
        self.field = field
        self.row = row
        self.col = col


class BudgetError(MonrexError):
    """An exhaustive enumeration would exceed its configured budget."""
