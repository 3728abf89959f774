"""Deterministic synthetic benchmarks with known answers."""

from __future__ import annotations

import datetime as dt

import numpy as np

from .frame import PRICE, FeatureFrame

SINUSOID = dict(n=120, period=20.0, base=100.0, amplitude=50.0)


def sinusoid_prices(n=SINUSOID["n"], period=SINUSOID["period"], base=SINUSOID["base"],
                    amplitude=SINUSOID["amplitude"]):
    t = np.arange(n)
    return base + amplitude * np.sin(2 * np.pi * t / period)


def sinusoid_frame(n=SINUSOID["n"], period=SINUSOID["period"], base=SINUSOID["base"],
                   amplitude=SINUSOID["amplitude"], start=dt.date(2022, 1, 3), extra=()):
    """Noiseless price sinusoid on consecutive days; label is the next day's price.

    ``extra`` names additional feature columns, each a phase-shifted copy
    of the price curve (useful for multivariate runs).
    """
    prices = sinusoid_prices(n + 1, period, base, amplitude)
    dates = tuple(start + dt.timedelta(days=i) for i in range(n))
    cols = {PRICE: prices[:n]}
    for k, name in enumerate(extra, start=1):
        cols[name] = base + amplitude * np.sin(2 * np.pi * (np.arange(n) + k) / period + k)
    return FeatureFrame(dates, cols, prices[1:])


def _frame_from(X, y, names, start=dt.date(2020, 1, 1)):
    dates = tuple(start + dt.timedelta(days=i) for i in range(len(y)))
    return FeatureFrame(dates, {n: X[:, j] for j, n in enumerate(names)}, y)


def collinear_frame(seed=0, n=200, eps=1e-6, noise=1.0):
    """x3 = x1 + x2 + eps-noise; the response uses x1 and x2 only."""
    rng = np.random.default_rng(seed)
    x1 = rng.normal(size=n)
    x2 = rng.normal(size=n)
    x3 = x1 + x2 + eps * rng.normal(size=n)
    y = 1.0 + 2.0 * x1 + 3.0 * x2 + noise * rng.normal(size=n)
    return _frame_from(np.column_stack([x1, x2, x3]), y, ["x1", "x2", "x3"])


def linear_frame(seed=0, n=200, coef=(2.0, 3.0), sigma=0.01, intercept=0.0):
    """Response ``intercept + X @ coef + N(0, sigma^2)`` with standard-normal predictors."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, len(coef)))
    y = intercept + X @ np.asarray(coef) + sigma * rng.normal(size=n)
    return _frame_from(X, y, [f"x{j + 1}" for j in range(len(coef))])
