"""Reference float64 kernels in numpy.

Same signatures and semantics as the compiled ``_ckernels`` module; this one
is used when the extension is not built or ``SIMPLEXGEOM_PURE_PYTHON=1``.
"""

import numpy as np


def fisher_eval(w, x, y):
    return float(np.sum(x * y / w))


def lm_eval(w, x, y, lam, mu):
    rx = x / w
    ry = y / w
    return float(lam * np.dot(rx, ry) + mu * rx.sum() * ry.sum())


def fisher_eval_batch(W, X, Y):
    return np.sum(X * Y / W, axis=1)


def lm_eval_batch(W, X, Y, lam, mu):
    RX = X / W
    RY = Y / W
    return lam * np.einsum("ij,ij->i", RX, RY) + mu * RX.sum(axis=1) * RY.sum(axis=1)


def stoch_apply(M, v):
    return M @ v


def stoch_apply_batch(M, V):
    return V @ M.T


def cone_terms(x, U, V):
    h = float(x.sum())
    return h, float(np.sum(h / x * U * V)), float(U.sum()), float(V.sum())
