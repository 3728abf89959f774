"""Variance inflation factors from auxiliary regressions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import ValidationError
from .ols import RANK_TOL


@dataclass(frozen=True)
class VifReport:
    """``values[j]`` is ``inf`` when column j is an exact linear combination of the others."""

    names: list
    values: np.ndarray

    @property
    def infinite(self):
        return [n for n, v in zip(self.names, self.values) if np.isinf(v)]

    def as_dict(self):
        return dict(zip(self.names, (float(v) for v in self.values)))

    def max(self):
        j = int(np.argmax(self.values))
        return self.names[j], float(self.values[j])


def _residual(A, y, tol=RANK_TOL):
    """Least-squares residual of y on A, dropping numerically dependent columns of A."""
    scale = np.linalg.norm(A, axis=0)
    keep = scale > 0
    A = A[:, keep] / scale[keep]
    Q, R, piv = linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > tol * diag[0]))
    Qr = Q[:, :rank]
    return y - Qr @ (Qr.T @ y)


def unexplained_fraction(X, j):
    """1 - R_j^2 for column j regressed on the remaining columns plus an intercept."""
    n = X.shape[0]
    y = X[:, j]
    A = np.column_stack([np.ones(n), np.delete(X, j, axis=1)])
    centered = y - y.mean()
    tss = float(centered @ centered)
    if tss == 0:
        return 0.0
    r = _residual(A, y)
    rss = float(r @ r)
    # a residual at rounding level means an exact linear dependence
    if rss <= (RANK_TOL ** 2) * tss:
        return 0.0
    return rss / tss


def vif(X, names=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValidationError(f"VIF needs at least 2 predictor columns, got shape {X.shape}")
    p = X.shape[1]
    names = [f"x{j + 1}" for j in range(p)] if names is None else list(names)
    values = np.empty(p)
    for j in range(p):
        u = unexplained_fraction(X, j)
        values[j] = np.inf if u == 0.0 else 1.0 / u
    return VifReport(names, values)


def vif_frame(frame, names):
    if len(names) == 1:
        return VifReport(list(names), np.ones(1))
    return vif(frame.matrix(names), names)
