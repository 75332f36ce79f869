"""Hybrid stepping: exact exponential propagation of the known linear
part, learned correction for the rest.

The network sits in the F slot of the exponential splitting step, so
with an all-zero network the stepper reduces to the pure linear flow
and never has to re-learn the known physics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DimensionError
from .linalg import expm, matvec
from .neuralnet import FeedForwardNet, forward
from .problems import IvpProblem
from .solvers import Trajectory
from .training import Dataset


@dataclass(frozen=True)
class HybridStepper:
    propagator: np.ndarray  # expm(A * dt), m x m
    correction_net: FeedForwardNet  # (y || u) -> increment of length m
    dt: float

    def __post_init__(self):
        p = np.asarray(self.propagator, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionError(f"propagator must be square, got {p.shape}")
        if self.correction_net.output_dim != p.shape[0]:
            raise DimensionError(
                f"network emits {self.correction_net.output_dim}, "
                f"state has dimension {p.shape[0]}"
            )
        object.__setattr__(self, "propagator", p)


def make_hybrid(p: IvpProblem, net: FeedForwardNet, dt: float) -> HybridStepper:
    return HybridStepper(propagator=expm(p.linear * dt), correction_net=net, dt=dt)


def hybrid_step(
    h: HybridStepper, y: np.ndarray, t: float, u: np.ndarray
) -> np.ndarray:
    """exp(A dt) y + dt * exp(A dt) * net(y || u)."""
    x = np.concatenate([np.asarray(y, dtype=np.float64), np.asarray(u, dtype=np.float64)])
    correction = forward(h.correction_net, x)
    return matvec(h.propagator, np.asarray(y, dtype=np.float64) + h.dt * correction)


def make_residual_dataset(p: IvpProblem, reference: Trajectory) -> Dataset:
    """Targets for the F slot, recovered by inverting the splitting step.

    For each consecutive pair the target is
    (expm(A dt)^{-1} y_k - y_{k-1}) / dt, computed by a linear solve.
    """
    dt = float(reference.times[1] - reference.times[0])
    e_a_dt = expm(p.linear * dt)
    k = len(reference) - 1
    u0 = p.input_at(reference.times[0])
    x = np.empty((k, reference.dim + u0.shape[0]))
    targets = np.empty((k, reference.dim))
    for i in range(k):
        try:
            z = np.linalg.solve(e_a_dt, reference.states[i + 1])
        except np.linalg.LinAlgError as exc:  # pragma: no cover - expm is invertible
            raise DimensionError(f"singular propagator: {exc}") from exc
        targets[i] = (z - reference.states[i]) / dt
        x[i] = np.concatenate([reference.states[i], p.input_at(reference.times[i])])
    return Dataset(inputs=x, targets=targets, source="residual")


def hybrid_rollout(
    h: HybridStepper,
    y0: np.ndarray,
    inputs: Optional[Callable[[float], np.ndarray]],
    horizon: float,
) -> Trajectory:
    """Iterate hybrid_step over round(horizon/dt) steps."""
    y0 = np.asarray(y0, dtype=np.float64)
    k = round(horizon / h.dt)
    if k < 1 or abs(k * h.dt - horizon) > 1e-9 * horizon:
        raise ConfigurationError(
            f"dt={h.dt:g} does not divide the horizon {horizon:g}"
        )
    times = h.dt * np.arange(k + 1)
    states = np.empty((k + 1, y0.shape[0]))
    states[0] = y0
    for i in range(k):
        u = inputs(times[i]) if inputs is not None else np.empty(0)
        states[i + 1] = hybrid_step(h, states[i], times[i], np.asarray(u, dtype=np.float64))
    return Trajectory(times=times, states=states)
