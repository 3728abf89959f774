"""Windowing, full-batch gradient descent, evaluation and forecasting."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergenceError, ValidationError
from ..frame import PRICE, apply_normalizer
from .model import backward, check_shapes, forward, init_params

MODES = ("univariate", "multivariate")


@dataclass(frozen=True)
class SequenceSample:
    window: np.ndarray   # (seq_len, input_dim)
    target: float
    date: object         # date of the target row


def input_columns(frame, mode):
    if mode == "univariate":
        return [PRICE]
    if mode == "multivariate":
        return frame.names
    raise ValidationError(f"unknown mode {mode!r}; expected one of {MODES}")


def make_windows(frame, seq_len, mode="univariate"):
    """Every run of ``seq_len`` consecutive rows, targeting the price of the next row."""
    cols = input_columns(frame, mode)
    if PRICE not in frame.columns:
        raise ValidationError(f"frame has no {PRICE!r} column")
    n = len(frame)
    if not n > seq_len:
        raise ValidationError(f"frame of {n} rows is too short for windows of length {seq_len}")
    X = frame.matrix(cols)
    price = frame.columns[PRICE]
    return [SequenceSample(X[i:i + seq_len].copy(), float(price[i + seq_len]), frame.dates[i + seq_len])
            for i in range(n - seq_len)]


def stack(samples):
    if not samples:
        raise ValidationError("empty batch")
    return np.stack([s.window for s in samples]), np.array([s.target for s in samples])


def loss_and_grads(config, params, batch):
    """Mean squared error over the batch and its gradient by BPTT."""
    X, y = stack(batch) if isinstance(batch, list) else batch
    pred, state = forward(config, params, X)
    r = pred - y
    loss = float(np.mean(r * r))
    if not np.isfinite(loss):
        raise DivergenceError(f"non-finite loss {loss}", epoch=None)
    return loss, backward(config, params, state, 2.0 * r / len(y))


def clip_gradients(grads, clip_norm):
    norm = grads.norm()
    if norm > clip_norm:
        scale = clip_norm / norm
        for k in grads:
            grads[k] = grads[k] * scale
    return grads


def average_percent_error(pred, truth):
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise ValidationError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValidationError("no values to compare")
    if np.any(truth == 0):
        raise ValidationError("average percent error is undefined when a true value is 0")
    return float(np.mean(np.abs(pred - truth) / np.abs(truth)) * 100.0)


def _to_usd(values, normalizer):
    return values if normalizer is None else normalizer.denormalize(PRICE, values)


def segment_ape(config, params, batch, normalizer):
    X, y = batch
    pred, _ = forward(config, params, X)
    return average_percent_error(_to_usd(pred, normalizer), _to_usd(y, normalizer))


@dataclass
class TrainReport:
    train_loss: list = field(default_factory=list)
    val_ape: list = field(default_factory=list)
    final_train_ape: float = float("nan")
    final_val_ape: float = float("nan")
    final_test_ape: float | None = None
    best_epoch: int = 0
    elapsed: float = field(default=0.0, compare=False)

    @property
    def epochs(self):
        return len(self.train_loss)


def train(config, train_frame, val_frame, normalizer=None, mode="univariate"):
    """Fit a network on normalized frames; returns the best-validation parameters.

    ``normalizer`` converts normalized prices back to USD for the percent
    errors. Epoch e computes the loss and gradient at the current
    parameters, takes one clipped step, then scores the validation windows.
    """
    started = time.perf_counter()
    train_batch = stack(make_windows(train_frame, config.seq_len, mode))
    val_batch = stack(make_windows(val_frame, config.seq_len, mode))
    if train_batch[0].shape[2] != config.input_dim:
        raise ValidationError(f"{mode} windows have {train_batch[0].shape[2]} features "
                              f"but input_dim={config.input_dim}")
    params = init_params(config)
    best = params.copy()
    report = TrainReport()
    best_val = float("inf")
    for epoch in range(1, config.epochs + 1):
        try:
            loss, grads = loss_and_grads(config, params, train_batch)
        except DivergenceError as exc:
            raise DivergenceError(f"{exc} at epoch {epoch}", epoch, report) from None
        clip_gradients(grads, config.clip_norm)
        for k in params:
            params[k] = params[k] - config.learning_rate * grads[k]
        val = segment_ape(config, params, val_batch, normalizer)
        if not np.isfinite(val):
            raise DivergenceError(f"non-finite validation error at epoch {epoch}", epoch, report)
        report.train_loss.append(loss)
        report.val_ape.append(val)
        if val < best_val:
            best_val, best, report.best_epoch = val, params.copy(), epoch
    report.final_train_ape = segment_ape(config, best, train_batch, normalizer)
    report.final_val_ape = segment_ape(config, best, val_batch, normalizer)
    report.elapsed = time.perf_counter() - started
    return best, report


@dataclass(frozen=True)
class ForecastSeries:
    dates: tuple
    true_price: np.ndarray
    predicted_price: np.ndarray

    def __len__(self):
        return len(self.dates)

    def rows(self):
        return zip(self.dates, self.true_price, self.predicted_price)


def forecast(params, config, frame, normalizer=None, mode="univariate"):
    """Predict the price after every window of a raw (USD) frame."""
    check_shapes(config, params)
    scaled = apply_normalizer(normalizer, frame) if normalizer is not None else frame
    samples = make_windows(scaled, config.seq_len, mode)
    X, _ = stack(samples)
    pred, _ = forward(config, params, X)
    truth = frame.columns[PRICE][config.seq_len:]
    return ForecastSeries(tuple(s.date for s in samples), np.array(truth), _to_usd(pred, normalizer))
