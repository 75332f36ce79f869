"""Feedforward network with bias-augmented layers.

Weight matrix l has shape (d_{l+1}, d_l + 1); the extra column
multiplies an appended constant 1 (the bias).  Hidden layers use the
sigmoid, the output layer is linear.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DimensionError
from ._backend import kernels


def sigmoid(x):
    """Logistic function 1/(1+exp(-x)); scalar in, scalar out."""
    if np.isscalar(x):
        return float(kernels.sigmoid(np.array([float(x)]))[0])
    return kernels.sigmoid(x)


@dataclass(frozen=True)
class FeedForwardNet:
    layer_dims: tuple
    weights: list  # list of (d_out, d_in + 1) float64 arrays

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise DimensionError(f"bad layer dims {dims}")
        ws = [np.ascontiguousarray(w, dtype=np.float64) for w in self.weights]
        if len(ws) != len(dims) - 1:
            raise DimensionError(
                f"{len(ws)} weight matrices for {len(dims)} layers"
            )
        for l, w in enumerate(ws):
            want = (dims[l + 1], dims[l] + 1)
            if w.shape != want:
                raise DimensionError(
                    f"layer {l} weights are {w.shape}, expected {want}"
                )
        object.__setattr__(self, "layer_dims", dims)
        object.__setattr__(self, "weights", ws)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    def copy(self) -> "FeedForwardNet":
        return FeedForwardNet(self.layer_dims, [w.copy() for w in self.weights])


def _check_input(net: FeedForwardNet, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise DimensionError(
            f"input has shape {x.shape}, network expects ({net.input_dim},)"
        )
    return x


def forward(net: FeedForwardNet, x) -> np.ndarray:
    """Evaluate the network on one input vector."""
    return kernels.forward(net.weights, _check_input(net, x))


def forward_cached(net: FeedForwardNet, x):
    """Forward pass plus per-layer pre-activations and activations."""
    return kernels.forward_cached(net.weights, _check_input(net, x))


def backprop(net: FeedForwardNet, x, target):
    """Sum-of-squares loss ||f(x) - target||^2 and its gradient.

    Returns (loss, grads) with grads shaped like net.weights.
    """
    x = _check_input(net, x)
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (net.output_dim,):
        raise DimensionError(
            f"target has shape {target.shape}, network emits ({net.output_dim},)"
        )
    return kernels.backprop(net.weights, x, target)


def init_weights(layer_dims: Sequence[int], seed) -> FeedForwardNet:
    """Standard-normal weights with zero bias columns, seeded."""
    rng = np.random.default_rng(seed)
    dims = tuple(int(d) for d in layer_dims)
    weights = []
    for l in range(len(dims) - 1):
        w = np.empty((dims[l + 1], dims[l] + 1))
        w[:, :-1] = rng.standard_normal((dims[l + 1], dims[l]))
        w[:, -1] = 0.0
        weights.append(w)
    return FeedForwardNet(dims, weights)


def permute_hidden(net: FeedForwardNet, layer: int, perm: Sequence[int]) -> FeedForwardNet:
    """Reorder the neurons of one hidden layer.

    ``layer`` indexes into layer_dims (1 <= layer <= L-1).  Rows of the
    incoming weight matrix and the matching non-bias columns of the
    outgoing one are permuted together, so the network function is
    unchanged.
    """
    n_layers = len(net.layer_dims)
    if not 1 <= layer <= n_layers - 2:
        raise DimensionError(f"layer {layer} is not a hidden layer")
    perm = np.asarray(perm, dtype=np.intp)
    n = net.layer_dims[layer]
    if sorted(perm.tolist()) != list(range(n)):
        raise ValueError(f"not a permutation of {n} neurons: {perm.tolist()}")

    weights = [w.copy() for w in net.weights]
    weights[layer - 1] = weights[layer - 1][perm, :]
    out = weights[layer]
    out[:, :n] = out[:, perm]
    return FeedForwardNet(net.layer_dims, weights)


def save_model(net: FeedForwardNet, path) -> None:
    """Plain-text serialization: dims header, then one block per layer.

    Values use 17 significant digits so the round trip is bit exact.
    """
    with open(path, "w") as fh:
        fh.write(" ".join(str(d) for d in net.layer_dims) + "\n")
        for w in net.weights:
            for row in w:
                fh.write(" ".join(format(v, ".17g") for v in row) + "\n")
            fh.write("\n")


def load_model(path) -> FeedForwardNet:
    with open(path) as fh:
        dims = tuple(int(d) for d in fh.readline().split())
        weights = []
        for l in range(len(dims) - 1):
            rows = []
            for _ in range(dims[l + 1]):
                rows.append([float(v) for v in fh.readline().split()])
            fh.readline()  # blank separator
            weights.append(np.array(rows))
    return FeedForwardNet(dims, weights)
