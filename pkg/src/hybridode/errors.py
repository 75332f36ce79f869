"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class ConfigurationError(ValueError):
    """A run configuration is inconsistent (grid, step size, flags)."""


class CflViolationError(RuntimeError):
    """The requested time step exceeds the stability bound."""

    def __init__(self, dt: float, bound: float):
        super().__init__(
            f"CFL violation: dt={dt:g} exceeds the stability bound {bound:g}"
        )
        self.dt = dt
        self.bound = bound


class DivergenceError(RuntimeError):
    """Training blew up; usually the learning rate is too large."""
