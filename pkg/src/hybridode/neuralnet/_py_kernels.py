"""Pure numpy implementation of the network kernels.

Fallback for environments without the compiled extension; also the
reference the Cython kernels are checked against.  Layers are weight
matrices of shape (d_out, d_in + 1); the last column multiplies an
appended constant 1 and acts as the bias.  Hidden layers apply the
sigmoid, the final layer is linear.
"""

from __future__ import annotations

import numpy as np


def sigmoid(x):
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def forward(weights, x):
    h = np.asarray(x, dtype=np.float64)
    last = len(weights) - 1
    for l, w in enumerate(weights):
        z = w[:, :-1] @ h + w[:, -1]
        h = z if l == last else sigmoid(z)
    return h


def forward_cached(weights, x):
    """Forward pass retaining per-layer (pre-activation, activation)."""
    h = np.asarray(x, dtype=np.float64)
    pre = []
    act = []
    last = len(weights) - 1
    for l, w in enumerate(weights):
        z = w[:, :-1] @ h + w[:, -1]
        h = z if l == last else sigmoid(z)
        pre.append(z)
        act.append(h)
    return h, pre, act


def backprop(weights, x, target):
    """Sum-of-squares loss and its exact gradient per layer."""
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    out, _, act = forward_cached(weights, x)
    resid = out - target
    loss = float(resid @ resid)

    grads = [np.empty_like(w) for w in weights]
    delta = 2.0 * resid
    for l in range(len(weights) - 1, -1, -1):
        h_in = x if l == 0 else act[l - 1]
        grads[l][:, :-1] = np.outer(delta, h_in)
        grads[l][:, -1] = delta
        if l > 0:
            a = act[l - 1]
            delta = (weights[l][:, :-1].T @ delta) * a * (1.0 - a)
    return loss, grads


def dataset_sse(weights, inputs, targets):
    """Sum over samples of the squared prediction error."""
    h = np.asarray(inputs, dtype=np.float64)
    last = len(weights) - 1
    for l, w in enumerate(weights):
        z = h @ w[:, :-1].T + w[:, -1]
        h = z if l == last else sigmoid(z)
    resid = h - np.asarray(targets, dtype=np.float64)
    return float(np.sum(resid * resid))
