"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a numerical invariant (positivity, trace, norm...)."""


class DimensionError(ValueError):
    """Operands have structurally incompatible dimensions."""
