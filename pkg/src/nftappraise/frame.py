"""Calendar alignment, the labeled feature matrix, chronological splits and scaling."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ParseError, ValidationError

PRICE = "average_volume_quote_day"
SOLD = "unique_token_ids_sold_count_day"
GAS = "gas_quote_rate_day"
TRENDS = "relative_search_volume"
EVENTS = "events"
DAYS = "days_since_release"
LABEL = "label"

DEFAULT_TICKERS = (
    "ETH-USD", "BTC-USD", "GC=F", "^GSPC", "^DJI", "^NDX",
    "MSFT", "AAPL", "NFLX", "TSLA", "AMZN", "FB",
)

# data-dictionary row order, with days_since_release appended
CANONICAL_COLUMNS = (PRICE, SOLD, *DEFAULT_TICKERS, TRENDS, EVENTS, GAS, DAYS)

DISPLAY_NAMES = {
    DAYS: "Days since release",
    PRICE: "Avg. NFT price",
    SOLD: "# of NFTs sold",
    GAS: "Gas",
    "GC=F": "Gold",
    "^GSPC": "S&P",
    "^DJI": "Dow Jones",
    "^NDX": "NASDAQ",
    TRENDS: "Relative Search Volume",
    EVENTS: "Events",
}


def is_crypto(ticker):
    return ticker.upper().endswith("-USD")


def canonical_order(names):
    """Known columns in data-dictionary order, then unknown ones sorted."""
    rank = {name: i for i, name in enumerate(CANONICAL_COLUMNS)}
    known = sorted((n for n in names if n in rank), key=rank.__getitem__)
    return known + sorted(n for n in names if n not in rank)


def preset_columns(preset, tickers=DEFAULT_TICKERS):
    """Predictor names for the ``initial`` and ``extended`` regression presets."""
    initial = [DAYS, PRICE, SOLD, GAS, *tickers]
    if preset == "initial":
        return canonical_order(initial)
    if preset == "extended":
        return canonical_order(initial + [EVENTS, TRENDS])
    raise ValidationError(f"unknown preset {preset!r}; expected 'initial' or 'extended'")


def _frozen(values):
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FeatureFrame:
    """One row per retained trading date; ``label`` is the next retained date's price."""

    dates: tuple
    columns: dict
    label: np.ndarray

    def __post_init__(self):
        dates = tuple(self.dates)
        n = len(dates)
        for a, b in zip(dates, dates[1:]):
            if not a < b:
                raise ValidationError(f"dates not strictly ascending at {a} -> {b}")
        names = list(self.columns)
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate column names in {names}")
        cols = {}
        for name in canonical_order(names):
            arr = _frozen(self.columns[name])
            if arr.shape != (n,):
                raise ValidationError(f"column {name!r} has shape {arr.shape}, expected ({n},)")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"column {name!r} contains NaN or infinite values")
            cols[name] = arr
        label = _frozen(self.label)
        if label.shape != (n,):
            raise ValidationError(f"label has shape {label.shape}, expected ({n},)")
        if not np.all(np.isfinite(label)):
            raise ValidationError("label contains NaN or infinite values")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "label", label)

    def __len__(self):
        return len(self.dates)

    def __eq__(self, other):
        if not isinstance(other, FeatureFrame):
            return NotImplemented
        return (self.dates == other.dates
                and list(self.columns) == list(other.columns)
                and all(np.array_equal(self.columns[k], other.columns[k]) for k in self.columns)
                and np.array_equal(self.label, other.label))

    @property
    def names(self):
        return list(self.columns)

    def matrix(self, names=None):
        names = self.names if names is None else list(names)
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise ValidationError(f"frame has no column(s) {missing}")
        if not names:
            return np.empty((len(self), 0))
        return np.column_stack([self.columns[n] for n in names])

    def select(self, names):
        self.matrix(names)
        return FeatureFrame(self.dates, {n: self.columns[n] for n in names}, self.label)

    def rows(self, start, stop):
        return FeatureFrame(self.dates[start:stop],
                            {k: v[start:stop] for k, v in self.columns.items()},
                            self.label[start:stop])

    def with_column(self, name, values):
        return FeatureFrame(self.dates, {**self.columns, name: values}, self.label)


def concat(frames):
    frames = list(frames)
    names = frames[0].names
    for f in frames[1:]:
        if f.names != names:
            raise ValidationError("cannot concatenate frames with different columns")
    return FeatureFrame(
        tuple(d for f in frames for d in f.dates),
        {n: np.concatenate([f.columns[n] for f in frames]) for n in names},
        np.concatenate([f.label for f in frames]),
    )


# -- alignment --------------------------------------------------------------

def _index_by_date(records, source):
    out = {}
    for rec in records:
        if rec.date in out:
            raise ValidationError(f"duplicate date {rec.date} in {source}")
        out[rec.date] = rec
    return out


def _coverage(dates):
    if not dates:
        return "no dates"
    return f"{len(dates)} dates, {min(dates)} .. {max(dates)}"


def align(nft, quotes, trends=(), events=()):
    """Join the four raw series on the trading calendar and attach next-day labels.

    A date is kept only if the NFT series and every ticker in ``quotes``
    have an observation on it. Missing search-trend points and event
    annotations on kept dates become 0. The label of row i is the NFT
    average price on kept date i+1, so the final kept date yields no row.
    """
    nft_by_date = _index_by_date(nft, "nft_market")
    quote_by_date = {t: _index_by_date(qs, f"public_market:{t}") for t, qs in quotes.items()}
    trend_by_date = _index_by_date(trends, "search_trends")
    event_by_date = _index_by_date(events, "events")

    retained = set(nft_by_date)
    for ticker, by_date in quote_by_date.items():
        retained &= set(by_date)
    retained = sorted(retained)
    if len(retained) < 3:
        coverage = [f"nft_market: {_coverage(list(nft_by_date))}"]
        coverage += [f"{t}: {_coverage(list(d))}" for t, d in quote_by_date.items()]
        what = "empty intersection" if not retained else f"only {len(retained)} common dates"
        raise AlignmentError(
            f"{what} across sources (need >= 3); coverage:\n  " + "\n  ".join(coverage))

    rows = retained[:-1]
    cols = {
        PRICE: [nft_by_date[d].average_price_quote for d in rows],
        SOLD: [nft_by_date[d].tokens_sold_count for d in rows],
        GAS: [nft_by_date[d].gas_quote_rate for d in rows],
        TRENDS: [trend_by_date[d].relative_volume if d in trend_by_date else 0 for d in rows],
        EVENTS: [event_by_date[d].polarity if d in event_by_date else 0 for d in rows],
    }
    for ticker, by_date in quote_by_date.items():
        cols[ticker] = [by_date[d].close for d in rows]
    label = [nft_by_date[d].average_price_quote for d in retained[1:]]
    return FeatureFrame(tuple(rows), cols, label)


def add_days_since_release(frame, release_date):
    if not frame.dates:
        raise ValidationError("frame is empty")
    if release_date > frame.dates[0]:
        raise ValidationError(
            f"release date {release_date} is after the first frame date {frame.dates[0]}")
    return frame.with_column(DAYS, [(d - release_date).days for d in frame.dates])


# -- splitting --------------------------------------------------------------

@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.6
    val_fraction: float = 0.2
    test_fraction: float = 0.2

    def __post_init__(self):
        fracs = (self.train_fraction, self.val_fraction, self.test_fraction)
        if not all(0 < f < 1 for f in fracs):
            raise ValidationError(f"split fractions must lie in (0, 1), got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-12:
            raise ValidationError(f"split fractions must sum to 1, got {sum(fracs)!r}")


def split_sizes(n, config):
    # the small epsilon keeps e.g. 1325 * 0.2 from flooring to 264 on representation error
    val = math.floor(n * config.val_fraction + 1e-9)
    test = math.floor(n * config.test_fraction + 1e-9)
    return n - val - test, val, test


def split(frame, config=SplitConfig()):
    """Chronological train/val/test split; rounding remainder goes to train."""
    n = len(frame)
    if n == 0:
        raise ValidationError("cannot split an empty frame")
    sizes = split_sizes(n, config)
    if min(sizes) == 0:
        raise ValidationError(f"split of {n} rows by {config} leaves an empty segment {sizes}")
    a, b = sizes[0], sizes[0] + sizes[1]
    return frame.rows(0, a), frame.rows(a, b), frame.rows(b, n)


# -- normalization ----------------------------------------------------------

@dataclass(frozen=True)
class NormalizationStats:
    """Per-column z-score parameters (population sd), fitted on training rows."""

    mean: dict
    std: dict
    label_mean: float
    label_std: float

    def to_dict(self):
        return {"mean": dict(self.mean), "std": dict(self.std),
                "label_mean": self.label_mean, "label_std": self.label_std}

    @classmethod
    def from_dict(cls, d):
        return cls({k: float(v) for k, v in d["mean"].items()},
                   {k: float(v) for k, v in d["std"].items()},
                   float(d["label_mean"]), float(d["label_std"]))

    def denormalize(self, column, values):
        return np.asarray(values) * self.std[column] + self.mean[column]


def fit_normalizer(train, columns=None):
    if len(train) == 0:
        raise ValidationError("cannot fit a normalizer on an empty frame")
    columns = train.names if columns is None else list(columns)
    mean, std = {}, {}
    for name in columns:
        v = train.columns[name]
        sd = float(np.std(v))
        if not sd > 0:
            raise ValidationError(f"column {name!r} is constant on the training segment")
        mean[name], std[name] = float(np.mean(v)), sd
    return NormalizationStats(mean, std, float(np.mean(train.label)), float(np.std(train.label)))


def apply_normalizer(stats, frame, label=False):
    """Standardize the columns ``stats`` knows; others pass through unchanged."""
    cols = {k: (v - stats.mean[k]) / stats.std[k] if k in stats.mean else v
            for k, v in frame.columns.items()}
    y = frame.label
    if label:
        if not stats.label_std > 0:
            raise ValidationError("label is constant on the training segment")
        y = (y - stats.label_mean) / stats.label_std
    return FeatureFrame(frame.dates, cols, y)


# -- persistence ------------------------------------------------------------

def to_csv(frame, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *frame.names, LABEL])
        for i, d in enumerate(frame.dates):
            w.writerow([d.isoformat(), *(repr(float(frame.columns[n][i])) for n in frame.names),
                        repr(float(frame.label[i]))])


def from_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file, header row is mandatory")
    header = rows[0]
    if not header or header[0] != "date":
        raise ParseError(f"{path}:1: first column must be 'date', got {header[:1]}")
    if LABEL not in header:
        raise ParseError(f"{path}:1: missing '{LABEL}' column")
    if len(set(header)) != len(header):
        raise ParseError(f"{path}:1: duplicate column names")
    names = [h for h in header[1:] if h != LABEL]
    dates, values = [], {h: [] for h in header[1:]}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            dates.append(dt.date.fromisoformat(row[0]))
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad date {row[0]!r}") from None
        for h, cell in zip(header[1:], row[1:]):
            try:
                x = float(cell)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: column {h!r} is not numeric: {cell!r}") from None
            if not math.isfinite(x):
                raise ParseError(f"{path}:{lineno}: column {h!r} is {cell!r}")
            values[h].append(x)
    try:
        return FeatureFrame(tuple(dates), {n: values[n] for n in names}, values[LABEL])
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None
