"""Numpy implementation of the batched log-kernel (fallback for the compiled core)."""

import math

import numpy as np

_LOG2 = math.log(2.0)


def _F(kind: int, lam: float, rate: float, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        if kind == 1:
            return lam * np.log(np.abs(np.sin(rate * x)))
        if kind == 2:
            return lam * np.log(np.abs(x))
        if kind == 3:
            t = np.abs(rate * x)
            return lam * (t + np.log(-np.expm1(-2.0 * t)) - _LOG2)
        if kind == 4:
            t = np.abs(rate * x)
            return lam * (t + np.log1p(np.exp(-2.0 * t)) - _LOG2)
    return rate * np.abs(x)


def _pair_sum(kind, lam, rate, Y):
    # Σ_{i<j} F(Y_i - Y_j) over the last axis
    n = Y.shape[-1]
    if n < 2:
        return np.zeros(Y.shape[:-1])
    i, j = np.triu_indices(n, 1)
    return _F(kind, lam, rate, Y[..., i] - Y[..., j]).sum(axis=-1)


def log_kernel_batch(kind, lam, rate, X, XP):
    """Same contract as the compiled ``log_kernel_batch``."""
    X = np.asarray(X, dtype=float)
    XP = np.asarray(XP, dtype=float)
    if X.shape[0] != XP.shape[0]:
        raise ValueError("X and XP disagree on the batch size")
    base = -_pair_sum(kind, lam, rate, X)
    cross = _F(kind, lam, rate, X[:, None, :, None] - XP[:, :, None, :]).sum(axis=(-1, -2))
    return base[:, None] + cross - _pair_sum(kind, lam, rate, XP)
