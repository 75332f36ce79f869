"""Dataset construction and the two trainers: evolution strategy and
single-sample stochastic gradient descent.

Both minimize the mean squared error of one-step predictions: input
(y(t_{k-1}) || u(t_{k-1})), target y(t_k).  Evaluation uses free
rollout, where the network consumes its own outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DimensionError, DivergenceError
from .neuralnet import FeedForwardNet, backprop, forward, init_weights, kernels
from .solvers import Trajectory


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray  # (K, d_in)
    targets: np.ndarray  # (K, m)
    source: str = "numerical"

    def __post_init__(self):
        inputs = np.ascontiguousarray(self.inputs, dtype=np.float64)
        targets = np.ascontiguousarray(self.targets, dtype=np.float64)
        if inputs.ndim != 2 or targets.ndim != 2:
            raise DimensionError(
                f"dataset arrays have shapes {inputs.shape}, {targets.shape}"
            )
        if inputs.shape[0] != targets.shape[0] or inputs.shape[0] < 1:
            raise DimensionError(
                f"{inputs.shape[0]} inputs vs {targets.shape[0]} targets"
            )
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class EsConfig:
    population: int = 250
    iterations: int = 100
    noise_scale: float = 0.05
    seed: int = 0
    # elite fraction is fixed at 1/5 of the population

    def __post_init__(self):
        if self.population < 5:
            raise ConfigurationError(f"population must be >= 5, got {self.population}")
        if self.iterations < 1:
            raise ConfigurationError(f"iterations must be >= 1, got {self.iterations}")
        if self.noise_scale < 0:
            raise ConfigurationError(f"noise_scale must be >= 0, got {self.noise_scale}")


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float = 0.1
    epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ConfigurationError(
                f"learning_rate must be non-negative, got {self.learning_rate}"
            )
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")


@dataclass(frozen=True)
class StepReport:
    """Rollout-vs-reference comparison: per-step errors plus summary."""

    times: np.ndarray
    reference: np.ndarray
    predicted: np.ndarray
    abs_errors: np.ndarray  # max-norm error per time
    mse: float
    max_error: float


def make_dataset(
    traj: Trajectory,
    inputs: Optional[Callable[[float], np.ndarray]] = None,
    source: str = "numerical",
) -> Dataset:
    """One-step pairs from consecutive trajectory points.

    The constant 1 the network appends internally is not stored.
    """
    if len(traj) < 2:
        raise ConfigurationError("need at least 2 trajectory points")
    k = len(traj) - 1
    u0 = inputs(traj.times[0]) if inputs is not None else np.empty(0)
    d_in = traj.dim + np.asarray(u0).shape[0]
    x = np.empty((k, d_in))
    for i in range(k):
        u = inputs(traj.times[i]) if inputs is not None else np.empty(0)
        x[i] = np.concatenate([traj.states[i], np.asarray(u, dtype=np.float64)])
    return Dataset(inputs=x, targets=traj.states[1:].copy(), source=source)


def mse(net: FeedForwardNet, ds: Dataset) -> float:
    """Mean over samples of ||f(input) - target||^2."""
    if len(ds) == 0:
        raise ConfigurationError("empty dataset")
    if ds.inputs.shape[1] != net.input_dim or ds.targets.shape[1] != net.output_dim:
        raise DimensionError(
            f"dataset ({ds.inputs.shape[1]} -> {ds.targets.shape[1]}) does not "
            f"match network ({net.input_dim} -> {net.output_dim})"
        )
    return kernels.dataset_sse(net.weights, ds.inputs, ds.targets) / len(ds)


def train_es(ds: Dataset, layer_dims, cfg: EsConfig):
    """Population search: keep the fittest fifth, refill the rest with
    noisy elite copies.

    Returns (best_net, history) where history[m] is the best one-step
    MSE seen at iteration m.  Elites are never perturbed, so the
    history is non-increasing.  Noise streams derive from
    (seed, iteration, individual), making the run order-independent.
    """
    n = cfg.population
    n_elite = math.ceil(n / 5)
    dims = tuple(int(d) for d in layer_dims)
    population = [init_weights(dims, seed=[cfg.seed, i]).weights for i in range(n)]

    inv_k = 1.0 / len(ds)
    history = np.empty(cfg.iterations)
    for m in range(cfg.iterations):
        fitness = np.array(
            [kernels.dataset_sse(w, ds.inputs, ds.targets) * inv_k for w in population]
        )
        order = np.argsort(fitness, kind="stable")
        population = [population[i] for i in order]
        history[m] = fitness[order[0]]
        for i in range(n_elite, n):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, m, i]))
            parent = population[i % n_elite]
            population[i] = [
                w + cfg.noise_scale * rng.standard_normal(w.shape) for w in parent
            ]
    best = FeedForwardNet(dims, [w.copy() for w in population[0]])
    return best, history


def train_sgd(ds: Dataset, net: FeedForwardNet, cfg: SgdConfig):
    """Per-sample gradient steps w <- w - lr * grad ||f(x) - y||^2.

    Samples are visited in a freshly shuffled order each epoch; returns
    (trained_net, per_epoch_mse).
    """
    net = net.copy()
    rng = np.random.default_rng(cfg.seed)
    history = np.empty(cfg.epochs)
    for epoch in range(cfg.epochs):
        for k in rng.permutation(len(ds)):
            _, grads = backprop(net, ds.inputs[k], ds.targets[k])
            for w, g in zip(net.weights, grads):
                w -= cfg.learning_rate * g
        history[epoch] = mse(net, ds)
        if history[epoch] > 1e6:
            raise DivergenceError(
                f"training MSE exceeded 1e6 at epoch {epoch}; "
                f"learning_rate={cfg.learning_rate} is likely too large"
            )
    return net, history


def rollout(
    net: FeedForwardNet,
    y0: np.ndarray,
    inputs: Optional[Callable[[float], np.ndarray]],
    dt: float,
    horizon: float,
) -> Trajectory:
    """Free-running prediction: the network consumes its own output."""
    y0 = np.asarray(y0, dtype=np.float64)
    k = round(horizon / dt)
    if k < 1 or abs(k * dt - horizon) > 1e-9 * horizon:
        raise ConfigurationError(f"dt={dt:g} does not divide the horizon {horizon:g}")
    times = dt * np.arange(k + 1)
    states = np.empty((k + 1, y0.shape[0]))
    states[0] = y0
    for i in range(k):
        u = inputs(times[i]) if inputs is not None else np.empty(0)
        x = np.concatenate([states[i], np.asarray(u, dtype=np.float64)])
        states[i + 1] = forward(net, x)
    return Trajectory(times=times, states=states)


def validate(
    net: FeedForwardNet,
    reference: Trajectory,
    inputs: Optional[Callable[[float], np.ndarray]] = None,
) -> StepReport:
    """Roll the network out on the reference grid and score it."""
    if reference.dim != net.output_dim:
        raise DimensionError(
            f"reference dimension {reference.dim} vs network output {net.output_dim}"
        )
    dt = float(reference.times[1] - reference.times[0])
    pred = rollout(net, reference.states[0], inputs, dt, float(reference.times[-1]))
    diff = pred.states - reference.states
    abs_errors = np.max(np.abs(diff), axis=1)
    # score the K predicted steps; the shared initial state is exact
    per_step = np.sum(diff[1:] ** 2, axis=1)
    return StepReport(
        times=reference.times,
        reference=reference.states,
        predicted=pred.states,
        abs_errors=abs_errors,
        mse=float(np.mean(per_step)),
        max_error=float(np.max(abs_errors)),
    )
