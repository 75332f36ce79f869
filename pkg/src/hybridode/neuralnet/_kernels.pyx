# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled network kernels: forward pass, backprop, dataset error.

Same contract as _py_kernels; plain C loops over the small dense
layers, which removes the per-call numpy overhead that dominates the
training loops.
"""

from libc.math cimport exp

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


def sigmoid(x):
    """Elementwise logistic function (scalar or array input)."""
    arr = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = np.empty_like(flat)
    cdef double[::1] fv = flat
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(fv.shape[0]):
        ov[i] = _sigmoid(fv[i])
    return out.reshape(arr.shape)


cdef void _layer(const double[:, ::1] w, const double[::1] h,
                 double[::1] z, bint squash) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef Py_ssize_t rows = w.shape[0]
    cdef Py_ssize_t d = w.shape[1] - 1
    cdef double s
    for i in range(rows):
        s = w[i, d]
        for j in range(d):
            s += w[i, j] * h[j]
        z[i] = _sigmoid(s) if squash else s


def forward(list weights, x):
    cdef Py_ssize_t n_layers = len(weights)
    cdef Py_ssize_t l
    h = np.ascontiguousarray(x, dtype=np.float64)
    for l in range(n_layers):
        w = np.ascontiguousarray(weights[l], dtype=np.float64)
        z = np.empty(w.shape[0])
        _layer(w, h, z, l < n_layers - 1)
        h = z
    return h


def forward_cached(list weights, x):
    cdef Py_ssize_t n_layers = len(weights)
    cdef Py_ssize_t l, i
    h = np.ascontiguousarray(x, dtype=np.float64)
    pre = []
    act = []
    cdef double[::1] hv, zv, av
    for l in range(n_layers):
        w = np.ascontiguousarray(weights[l], dtype=np.float64)
        z = np.empty(w.shape[0])
        _layer(w, h, z, False)
        pre.append(z)
        if l < n_layers - 1:
            a = np.empty_like(z)
            zv = z
            av = a
            for i in range(zv.shape[0]):
                av[i] = _sigmoid(zv[i])
            act.append(a)
            h = a
        else:
            act.append(z)
            h = z
    return h, pre, act


def backprop(list weights, x, target):
    cdef Py_ssize_t n_layers = len(weights)
    cdef Py_ssize_t l, i, j
    out, pre, act = forward_cached(weights, x)

    t = np.ascontiguousarray(target, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double[::1] tv = t
    cdef double loss = 0.0
    cdef double r
    delta = np.empty(ov.shape[0])
    cdef double[::1] dv = delta
    for i in range(ov.shape[0]):
        r = ov[i] - tv[i]
        loss += r * r
        dv[i] = 2.0 * r

    x_arr = np.ascontiguousarray(x, dtype=np.float64)
    grads = [np.empty_like(np.asarray(w)) for w in weights]
    cdef double[:, ::1] gv
    cdef double[:, ::1] wv
    cdef double[::1] hv, av, ndv
    cdef Py_ssize_t d
    for l in range(n_layers - 1, -1, -1):
        h_in = x_arr if l == 0 else act[l - 1]
        hv = h_in
        gv = grads[l]
        d = gv.shape[1] - 1
        for i in range(gv.shape[0]):
            for j in range(d):
                gv[i, j] = dv[i] * hv[j]
            gv[i, d] = dv[i]
        if l > 0:
            wv = np.ascontiguousarray(weights[l], dtype=np.float64)
            av = act[l - 1]
            new_delta = np.empty(av.shape[0])
            ndv = new_delta
            for j in range(ndv.shape[0]):
                r = 0.0
                for i in range(wv.shape[0]):
                    r += wv[i, j] * dv[i]
                ndv[j] = r * av[j] * (1.0 - av[j])
            delta = new_delta
            dv = delta
    return loss, grads


def dataset_sse(list weights, inputs, targets):
    cdef Py_ssize_t n_layers = len(weights)
    cdef Py_ssize_t k, l, i
    x_all = np.ascontiguousarray(inputs, dtype=np.float64)
    y_all = np.ascontiguousarray(targets, dtype=np.float64)
    cdef double[:, ::1] xv = x_all
    cdef double[:, ::1] yv = y_all

    ws = [np.ascontiguousarray(w, dtype=np.float64) for w in weights]
    # one scratch buffer per layer, reused across samples
    bufs = [np.empty(w.shape[0]) for w in ws]

    cdef double total = 0.0
    cdef double r
    cdef double[::1] h, z
    for k in range(xv.shape[0]):
        h = xv[k]
        for l in range(n_layers):
            z = bufs[l]
            _layer(ws[l], h, z, l < n_layers - 1)
            h = z
        for i in range(h.shape[0]):
            r = h[i] - yv[k, i]
            total += r * r
    return total
