"""Minimal dense linear algebra: matvec, axpy-style combination, expm.

Vectors are 1-d float64 numpy arrays, matrices 2-d.  The matrix
exponential uses scaling-and-squaring with a truncated Taylor series
whose length adapts to the scaled norm; this is plenty for the small
dense and tridiagonal operators handled here.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError

_MAX_TAYLOR_TERMS = 64


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got array of shape {v.shape}")
    return v


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {m.shape}")
    return m


def matvec(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Matrix-vector product A @ x with shape checking."""
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[1] != x.shape[0]:
        raise DimensionError(
            f"matvec shape mismatch: matrix {a.shape} vs vector ({x.shape[0]},)"
        )
    return a @ x


def scale_add(a: float, x: np.ndarray, b: float, y: np.ndarray) -> np.ndarray:
    """Elementwise a*x + b*y."""
    x = as_vector(x)
    y = as_vector(y)
    if x.shape != y.shape:
        raise DimensionError(
            f"scale_add shape mismatch: ({x.shape[0]},) vs ({y.shape[0]},)"
        )
    return a * x + b * y


def expm(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Matrix exponential by scaling and squaring.

    The input is scaled by a power of two so its 1-norm is at most 1/2,
    the Taylor series is summed until the term falls below ``tol``
    relative to the running sum, and the result is squared back up.
    exp(0) is exactly the identity.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionError(f"expm needs a square matrix, got {a.shape}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    norm = np.linalg.norm(a, 1)
    if norm == 0.0:
        return np.eye(n)

    n_square = max(0, int(math.ceil(math.log2(norm))) + 1)
    scaled = a / (2.0 ** n_square)

    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, _MAX_TAYLOR_TERMS + 1):
        term = term @ scaled / k
        result += term
        if np.linalg.norm(term, 1) <= tol * np.linalg.norm(result, 1):
            break

    for _ in range(n_square):
        result = result @ result
    return result
