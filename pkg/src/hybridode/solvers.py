"""Classical time integrators producing trajectories.

Methods: forward Euler, exponential linear-nonlinear (Lie) splitting,
Strang splitting, and Euler-Maruyama for the stochastic form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import CflViolationError, ConfigurationError, DimensionError
from .linalg import as_vector, expm, matvec
from .problems import IvpProblem, SdeProblem

METHODS = ("euler", "exp_split", "strang", "euler_maruyama")


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus one state vector per grid point."""

    times: np.ndarray
    states: np.ndarray  # shape (len(times), m)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        states = np.asarray(self.states, dtype=np.float64)
        if times.ndim != 1 or states.ndim != 2:
            raise DimensionError(
                f"trajectory arrays have shapes {times.shape}, {states.shape}"
            )
        if times.shape[0] != states.shape[0] or times.shape[0] < 1:
            raise DimensionError(
                f"{times.shape[0]} times vs {states.shape[0]} states"
            )
        if times.shape[0] > 1 and not np.all(np.diff(times) > 0):
            raise ConfigurationError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.times.shape[0]


@dataclass(frozen=True)
class StepConfig:
    dt: float
    method: str = "euler"
    cfl_check: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.method not in METHODS:
            raise ConfigurationError(
                f"unknown method {self.method!r}; choose from {METHODS}"
            )


def euler_step(p: IvpProblem, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Forward Euler: y + dt*(A y + F(y, u(t), t))."""
    y = as_vector(y)
    return y + dt * (matvec(p.linear, y) + p.rhs_nonlinear(y, t))


def exp_split_step(
    p: IvpProblem, y: np.ndarray, t: float, dt: float, e_a_dt: np.ndarray
) -> np.ndarray:
    """Lie splitting: exp(A dt) y + dt * exp(A dt) F(y, u(t), t)."""
    y = as_vector(y)
    return matvec(e_a_dt, y + dt * p.rhs_nonlinear(y, t))


def strang_step(
    p: IvpProblem, y: np.ndarray, t: float, dt: float, e_a_dt2: np.ndarray
) -> np.ndarray:
    """Strang splitting: half linear step, Euler substep for F at the
    midpoint, half linear step."""
    y = as_vector(y)
    z = matvec(e_a_dt2, y)
    mid = t + 0.5 * dt
    return matvec(e_a_dt2, z + dt * p.rhs_nonlinear(z, mid))


def euler_maruyama_step(
    p: SdeProblem, y: np.ndarray, t: float, dt: float, xi: np.ndarray
) -> np.ndarray:
    """One Euler-Maruyama step with increment sqrt(dt)*xi."""
    y = as_vector(y)
    xi = as_vector(xi)
    drift = y + dt * matvec(p.base.linear, y)
    return drift + p.diffusion_at(y, t) * (np.sqrt(dt) * xi)


def _step_count(horizon: float, dt: float) -> int:
    k = round(horizon / dt)
    if k < 1 or abs(k * dt - horizon) > 1e-9 * horizon:
        raise ConfigurationError(
            f"dt={dt:g} does not divide the horizon {horizon:g}"
        )
    return k


def _check_cfl(p: IvpProblem, cfg: StepConfig) -> None:
    if cfg.cfl_check and p.cfl_limit is not None:
        if cfg.dt > p.cfl_limit * (1.0 + 1e-12):
            raise CflViolationError(cfg.dt, p.cfl_limit)


def integrate(p: Union[IvpProblem, SdeProblem], cfg: StepConfig) -> Trajectory:
    """Run the configured method from y0 over the whole horizon."""
    if isinstance(p, SdeProblem):
        if cfg.method != "euler_maruyama":
            raise ConfigurationError(
                f"stochastic problems need euler_maruyama, got {cfg.method!r}"
            )
        return _integrate_sde(p, cfg, path_index=0)
    if cfg.method == "euler_maruyama":
        raise ConfigurationError("euler_maruyama needs an SdeProblem")

    _check_cfl(p, cfg)
    k = _step_count(p.horizon, cfg.dt)
    times = cfg.dt * np.arange(k + 1)
    states = np.empty((k + 1, p.dim))
    states[0] = p.y0

    if cfg.method == "euler":
        for i in range(k):
            states[i + 1] = euler_step(p, states[i], times[i], cfg.dt)
    elif cfg.method == "exp_split":
        e_a_dt = expm(p.linear * cfg.dt)
        for i in range(k):
            states[i + 1] = exp_split_step(p, states[i], times[i], cfg.dt, e_a_dt)
    else:  # strang
        e_a_dt2 = expm(p.linear * (0.5 * cfg.dt))
        for i in range(k):
            states[i + 1] = strang_step(p, states[i], times[i], cfg.dt, e_a_dt2)

    return Trajectory(times=times, states=states)


def _path_rng(seed: int, path_index: int) -> np.random.Generator:
    # one independent stream per (base seed, path index)
    return np.random.default_rng(np.random.SeedSequence([seed, path_index]))


def _integrate_sde(p: SdeProblem, cfg: StepConfig, path_index: int) -> Trajectory:
    base = p.base
    _check_cfl(base, cfg)
    k = _step_count(base.horizon, cfg.dt)
    rng = _path_rng(cfg.seed, path_index)
    xi_all = rng.standard_normal((k, base.dim))
    times = cfg.dt * np.arange(k + 1)
    states = np.empty((k + 1, base.dim))
    states[0] = base.y0
    for i in range(k):
        states[i + 1] = euler_maruyama_step(p, states[i], times[i], cfg.dt, xi_all[i])
    return Trajectory(times=times, states=states)


def integrate_paths(p: SdeProblem, cfg: StepConfig, paths: int) -> np.ndarray:
    """Euler-Maruyama ensemble; returns states of shape (paths, K+1, m).

    Path j uses the noise stream derived from (cfg.seed, j), so results
    do not depend on evaluation order.
    """
    if paths < 1:
        raise ConfigurationError(f"paths must be >= 1, got {paths}")
    base = p.base
    _check_cfl(base, cfg)
    k = _step_count(base.horizon, cfg.dt)
    out = np.empty((paths, k + 1, base.dim))
    for j in range(paths):
        out[j] = _integrate_sde(p, cfg, path_index=j).states
    return out
