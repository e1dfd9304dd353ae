# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled float64 kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np


def fisher_eval(const double[::1] w, const double[::1] x, const double[::1] y):
    cdef Py_ssize_t i, m = w.shape[0]
    cdef double acc = 0.0
    for i in range(m):
        acc += x[i] * y[i] / w[i]
    return acc


def lm_eval(const double[::1] w, const double[::1] x, const double[::1] y,
            double lam, double mu):
    cdef Py_ssize_t i, m = w.shape[0]
    cdef double rx, ry, diag = 0.0, sx = 0.0, sy = 0.0
    for i in range(m):
        rx = x[i] / w[i]
        ry = y[i] / w[i]
        diag += rx * ry
        sx += rx
        sy += ry
    return lam * diag + mu * sx * sy


def fisher_eval_batch(const double[:, ::1] W, const double[:, ::1] X,
                      const double[:, ::1] Y):
    cdef Py_ssize_t r, i, rows = W.shape[0], m = W.shape[1]
    out = np.empty(rows)
    cdef double[::1] o = out
    cdef double acc
    for r in range(rows):
        acc = 0.0
        for i in range(m):
            acc += X[r, i] * Y[r, i] / W[r, i]
        o[r] = acc
    return out


def lm_eval_batch(const double[:, ::1] W, const double[:, ::1] X,
                  const double[:, ::1] Y, double lam, double mu):
    cdef Py_ssize_t r, i, rows = W.shape[0], m = W.shape[1]
    out = np.empty(rows)
    cdef double[::1] o = out
    cdef double rx, ry, diag, sx, sy
    for r in range(rows):
        diag = 0.0
        sx = 0.0
        sy = 0.0
        for i in range(m):
            rx = X[r, i] / W[r, i]
            ry = Y[r, i] / W[r, i]
            diag += rx * ry
            sx += rx
            sy += ry
        o[r] = lam * diag + mu * sx * sy
    return out


def stoch_apply(const double[:, ::1] M, const double[::1] v):
    cdef Py_ssize_t i, k, rows = M.shape[0], cols = M.shape[1]
    out = np.empty(rows)
    cdef double[::1] o = out
    cdef double acc
    for i in range(rows):
        acc = 0.0
        for k in range(cols):
            acc += M[i, k] * v[k]
        o[i] = acc
    return out


def stoch_apply_batch(const double[:, ::1] M, const double[:, ::1] V):
    cdef Py_ssize_t r, i, k, n = V.shape[0], rows = M.shape[0], cols = M.shape[1]
    out = np.empty((n, rows))
    cdef double[:, ::1] o = out
    cdef double acc
    for r in range(n):
        for i in range(rows):
            acc = 0.0
            for k in range(cols):
                acc += M[i, k] * V[r, k]
            o[r, i] = acc
    return out


def cone_terms(const double[::1] x, const double[::1] U, const double[::1] V):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef double h = 0.0, diag = 0.0, su = 0.0, sv = 0.0
    for i in range(m):
        h += x[i]
    for i in range(m):
        diag += h / x[i] * U[i] * V[i]
        su += U[i]
        sv += V[i]
    return h, diag, su, sv
