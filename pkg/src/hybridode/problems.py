"""Initial value problems and their analytic reference solutions.

Two concrete problems are provided: a scalar decay with sinusoidal
forcing, and the heat equation on [0, 10] semi-discretised by the
method of lines.  Both fit the common form

    dy/dt = A y + F(y, u(t), t),    y(0) = y0,

where A is a dense matrix and F collects everything the linear
propagator does not handle (forcing, genuine nonlinearity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DimensionError
from .linalg import as_matrix, as_vector, expm, matvec

DECAY_LAMBDA = -0.1

# (state, input, time) -> vector
NonlinearTerm = Callable[[np.ndarray, np.ndarray, float], np.ndarray]
# time -> vector
InputSignal = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class IvpProblem:
    """dy/dt = linear @ y + nonlinear(y, u(t), t) on [0, horizon]."""

    dim: int
    linear: np.ndarray
    nonlinear: Optional[NonlinearTerm]
    input: Optional[InputSignal]
    y0: np.ndarray
    horizon: float
    cfl_limit: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        linear = as_matrix(self.linear)
        y0 = as_vector(self.y0)
        if linear.shape != (self.dim, self.dim):
            raise DimensionError(
                f"linear operator is {linear.shape}, expected ({self.dim}, {self.dim})"
            )
        if y0.shape[0] != self.dim:
            raise DimensionError(
                f"y0 has length {y0.shape[0]}, expected {self.dim}"
            )
        if self.horizon <= 0:
            raise ConfigurationError(f"horizon must be positive, got {self.horizon}")
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "y0", y0)

    def input_at(self, t: float) -> np.ndarray:
        if self.input is None:
            return np.empty(0)
        return as_vector(self.input(t))

    def rhs_nonlinear(self, y: np.ndarray, t: float) -> np.ndarray:
        if self.nonlinear is None:
            return np.zeros(self.dim)
        out = as_vector(self.nonlinear(y, self.input_at(t), t))
        if out.shape[0] != self.dim:
            raise DimensionError(
                f"nonlinear term returned length {out.shape[0]}, expected {self.dim}"
            )
        return out


@dataclass(frozen=True)
class SdeProblem:
    """Ito SDE: dy = (A y) dt + diffusion(y, u(t), t) dW."""

    base: IvpProblem
    diffusion: NonlinearTerm

    def diffusion_at(self, y: np.ndarray, t: float) -> np.ndarray:
        out = as_vector(self.diffusion(y, self.base.input_at(t), t))
        if out.shape[0] != self.base.dim:
            raise DimensionError(
                f"diffusion returned length {out.shape[0]}, expected {self.base.dim}"
            )
        return out


@dataclass(frozen=True)
class HeatConfig:
    """Heat equation setup: y_t = D y_xx with homogeneous Dirichlet ends."""

    diffusivity: float = 0.1
    x_lo: float = 0.0
    x_hi: float = 10.0
    dx: float = 0.1
    horizon: float = 1.0

    def __post_init__(self):
        if self.dx <= 0:
            raise ConfigurationError(f"dx must be positive, got {self.dx}")
        if self.x_hi <= self.x_lo:
            raise ConfigurationError(
                f"domain is empty: [{self.x_lo}, {self.x_hi}]"
            )
        if self.diffusivity <= 0:
            raise ConfigurationError(
                f"diffusivity must be positive, got {self.diffusivity}"
            )


def linear_decay_forced() -> IvpProblem:
    """Scalar dy/dt = lambda*y + sin(2*pi*t), lambda=-0.1, y(0)=1, T=1.

    The forcing is routed through the nonlinear slot so the splitting
    steppers treat it uniformly.
    """

    def forcing(y, u, t):
        return u

    def signal(t):
        return np.array([math.sin(2.0 * math.pi * t)])

    return IvpProblem(
        dim=1,
        linear=np.array([[DECAY_LAMBDA]]),
        nonlinear=forcing,
        input=signal,
        y0=np.array([1.0]),
        horizon=1.0,
        cfl_limit=1.0 / abs(DECAY_LAMBDA),
        name="decay",
    )


def decay_sde(sigma: float = 0.1) -> SdeProblem:
    """Scalar Ornstein-Uhlenbeck style SDE: dy = lambda*y dt + sigma dW."""
    base = IvpProblem(
        dim=1,
        linear=np.array([[DECAY_LAMBDA]]),
        nonlinear=None,
        input=None,
        y0=np.array([1.0]),
        horizon=1.0,
        cfl_limit=1.0 / abs(DECAY_LAMBDA),
        name="decay-sde",
    )
    return SdeProblem(base=base, diffusion=lambda y, u, t: np.full(1, sigma))


def heat_grid(cfg: HeatConfig) -> np.ndarray:
    """Interior grid nodes of the heat discretisation."""
    span = cfg.x_hi - cfg.x_lo
    cells = span / cfg.dx
    n_cells = round(cells)
    if n_cells < 3 or abs(n_cells * cfg.dx - span) > 1e-9 * span:
        raise ConfigurationError(
            f"dx={cfg.dx} does not tile [{cfg.x_lo}, {cfg.x_hi}] into >=3 cells"
        )
    return cfg.x_lo + cfg.dx * np.arange(1, n_cells)


def heat_mol(cfg: HeatConfig = HeatConfig()) -> IvpProblem:
    """Method-of-lines heat equation on the interior nodes.

    A = (D/dx^2) * tridiag(1, -2, 1); the initial state is the indicator
    of [4.5, 5.5] sampled at the interior nodes.  Homogeneous Dirichlet
    boundaries contribute nothing, so no affine correction is needed.
    """
    nodes = heat_grid(cfg)
    m = nodes.shape[0]
    scale = cfg.diffusivity / cfg.dx**2
    a = np.zeros((m, m))
    np.fill_diagonal(a, -2.0 * scale)
    idx = np.arange(m - 1)
    a[idx, idx + 1] = scale
    a[idx + 1, idx] = scale

    y0 = np.where((nodes >= 4.5) & (nodes <= 5.5), 1.0, 0.0)

    return IvpProblem(
        dim=m,
        linear=a,
        nonlinear=None,
        input=None,
        y0=y0,
        horizon=cfg.horizon,
        cfl_limit=cfg.dx**2 / (2.0 * cfg.diffusivity),
        name="heat",
    )


def analytic_decay(lam: float, y0: float, t: float) -> float:
    """Unforced decay: y(t) = exp(lam*t) * y0."""
    return math.exp(lam * t) * y0


def analytic_linear_system(a: np.ndarray, y0: np.ndarray, t: float) -> np.ndarray:
    """Linear flow exp(A t) @ y0."""
    a = as_matrix(a)
    return matvec(expm(a * t, tol=1e-12), y0)


def analytic_decay_forced(t: float) -> float:
    """Closed form for dy/dt = lambda*y + sin(2*pi*t), y(0)=1.

    Variation of constants gives

        y(t) = e^{lt} + (w e^{lt} - w cos(wt) - l sin(wt)) / (l^2 + w^2)

    with l = -0.1 and w = 2*pi.
    """
    lam = DECAY_LAMBDA
    omega = 2.0 * math.pi
    elt = math.exp(lam * t)
    particular = (
        omega * elt - omega * math.cos(omega * t) - lam * math.sin(omega * t)
    ) / (lam**2 + omega**2)
    return elt + particular
