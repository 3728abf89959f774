"""Ordinary least squares by pivoted QR, with the usual coefficient diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import RankError, ValidationError
from .tdist import t_quantile_two_sided, two_sided_p

RANK_TOL = 1e-10
INTERCEPT = "const"


@dataclass(frozen=True)
class OlsFit:
    """Coefficient arrays are aligned with ``terms``: the intercept (if any) first."""

    names: list
    has_intercept: bool
    params: np.ndarray
    bse: np.ndarray
    tvalues: np.ndarray
    pvalues: np.ndarray
    conf_int: np.ndarray
    residuals: np.ndarray
    r_squared: float
    adjusted_r_squared: float
    sigma2: float
    n: int
    p: int

    @property
    def terms(self):
        return ([INTERCEPT] if self.has_intercept else []) + list(self.names)

    @property
    def df_resid(self):
        return self.n - self.p - int(self.has_intercept)

    def _slice(self, arr):
        return arr[1:] if self.has_intercept else arr

    @property
    def coef(self):
        """Slope coefficients only, aligned with ``names``."""
        return self._slice(self.params)

    @property
    def intercept(self):
        return float(self.params[0]) if self.has_intercept else 0.0

    def predictor_pvalues(self):
        return dict(zip(self.names, self._slice(self.pvalues)))

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        return self.intercept + X @ self.coef


def design(X, include_intercept=True):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if include_intercept:
        X = np.column_stack([np.ones(len(X)), X])
    return X


def qr_solve(A, y, names, tol=RANK_TOL):
    """Least-squares solve of ``A b = y``; returns (b, (A^T A)^-1).

    Columns are scaled to unit norm before a column-pivoted QR; a diagonal
    entry of R below ``tol`` times the largest one means rank deficiency,
    reported with the names of the columns pivoted past the rank.
    """
    n, k = A.shape
    scale = np.linalg.norm(A, axis=0)
    zero = [names[j] for j in range(k) if scale[j] == 0]
    if zero:
        raise RankError(f"all-zero design column(s) {zero}", zero)
    Q, R, piv = linalg.qr(A / scale, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > tol * diag[0]))
    if rank < k:
        dependent = [names[j] for j in piv[rank:]]
        raise RankError(f"design matrix is rank deficient ({rank} < {k}); "
                        f"dependent column(s): {dependent}", dependent)
    b_piv = linalg.solve_triangular(R, Q.T @ y)
    Rinv = linalg.solve_triangular(R, np.eye(k))
    cov_piv = Rinv @ Rinv.T
    b = np.empty(k)
    b[piv] = b_piv
    cov = np.empty((k, k))
    cov[np.ix_(piv, piv)] = cov_piv
    return b / scale, cov / np.outer(scale, scale)


def adjusted_r2(r2, n, p):
    if not n > p + 1:
        raise ValidationError(f"adjusted R^2 needs n > p + 1 (n={n}, p={p})")
    return 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)


def fit_ols(X, y, names=None, include_intercept=True, alpha=0.05):
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    names = [f"x{j + 1}" for j in range(p)] if names is None else list(names)
    if len(names) != p:
        raise ValidationError(f"{len(names)} names for {p} columns")
    if y.shape != (n,):
        raise ValidationError(f"response has shape {y.shape}, expected ({n},)")
    k = p + int(include_intercept)
    if not n > k:
        raise ValidationError(f"insufficient observations: n={n} must exceed {k} "
                              f"(p={p} predictors{' plus intercept' if include_intercept else ''})")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValidationError("design or response contains NaN or infinite values")
    A = design(X, include_intercept)
    terms = ([INTERCEPT] if include_intercept else []) + names
    params, xtx_inv = qr_solve(A, y, terms)

    resid = y - A @ params
    rss = float(resid @ resid)
    df = n - k
    sigma2 = rss / df
    bse = np.sqrt(np.maximum(np.diag(xtx_inv), 0.0) * sigma2)
    with np.errstate(divide="ignore", invalid="ignore"):
        tvalues = params / bse
    pvalues = np.array([two_sided_p(t, df) for t in tvalues])
    crit = t_quantile_two_sided(alpha, df)
    conf_int = np.column_stack([params - crit * bse, params + crit * bse])

    if include_intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    adj = adjusted_r2(r2, n, p) if include_intercept else 1.0 - (1.0 - r2) * n / df
    return OlsFit(names, include_intercept, params, bse, tvalues, pvalues, conf_int,
                  resid, r2, adj, sigma2, n, p)


def fit_frame(frame, names, include_intercept=True):
    return fit_ols(frame.matrix(names), frame.label, names, include_intercept)


def evaluate(fit, test):
    """Out-of-sample R^2 (against the test label's own variance) and its adjusted form.

    The adjusted value is ``None`` when the test segment is too short for
    the fit's predictor count.
    """
    missing = [n for n in fit.names if n not in test.columns]
    if missing:
        raise ValidationError(f"test frame lacks predictor column(s) {missing}")
    y = test.label
    pred = fit.predict(test.matrix(fit.names))
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    n = len(y)
    adj = adjusted_r2(r2, n, fit.p) if n > fit.p + 1 else None
    return {"r_squared": r2, "adjusted_r_squared": adj, "n": n, "p": fit.p}
