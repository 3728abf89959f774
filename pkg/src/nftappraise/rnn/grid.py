"""Exhaustive hyperparameter search with per-config derived seeds."""

from __future__ import annotations

import hashlib
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import DivergenceError, ValidationError
from .model import RnnConfig, expected_shapes
from .train import train

GRID_KEYS = ("cell", "num_blocks", "hidden_dim", "learning_rate", "seq_len", "epochs", "clip_norm")


def _identity(config):
    d = config.to_dict()
    d.pop("seed")
    return json.dumps(d, sort_keys=True)


def derive_seed(base_seed, config):
    digest = hashlib.sha256(f"{int(base_seed)}|{_identity(config)}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def expand(grid, base):
    """Cartesian product of ``grid`` over ``base``; unknown keys are rejected."""
    unknown = sorted(set(grid) - set(GRID_KEYS))
    if unknown:
        raise ValidationError(f"unsupported grid key(s) {unknown}; allowed: {GRID_KEYS}")
    keys = [k for k in GRID_KEYS if k in grid]
    if not keys or any(len(grid[k]) == 0 for k in keys):
        raise ValidationError("grid must have at least one candidate per listed hyperparameter")
    configs = []
    for values in itertools.product(*(grid[k] for k in keys)):
        cfg = base.replace(**dict(zip(keys, values)))
        configs.append(cfg.replace(seed=derive_seed(base.seed, cfg)))
    return configs


@dataclass
class GridResult:
    config: RnnConfig
    report: object          # TrainReport, or None if training diverged
    params: object
    error: str | None = None

    @property
    def val_ape(self):
        return self.report.final_val_ape if self.report is not None else float("inf")


def parameter_count(config):
    return int(sum(np.prod(shape) for shape in expected_shapes(config).values()))


def _sort_key(result):
    return (result.val_ape, parameter_count(result.config), _identity(result.config))


def grid_search(grid, train_frame, val_frame, normalizer=None, mode="univariate",
                base=None, workers=1):
    """Train every configuration; the winner has the lowest validation percent error.

    Ties go to fewer parameters, then the lexicographically smaller config.
    Results come back in grid order whatever ``workers`` is.
    """
    base = base or RnnConfig()
    configs = expand(grid, base)

    def run(cfg):
        try:
            params, report = train(cfg, train_frame, val_frame, normalizer, mode)
            return GridResult(cfg, report, params)
        except DivergenceError as exc:
            return GridResult(cfg, None, None, str(exc))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, configs))
    else:
        results = [run(c) for c in configs]
    ok = [r for r in results if r.report is not None]
    if not ok:
        raise DivergenceError("every grid configuration diverged", epoch=None, report=results)
    best = min(ok, key=_sort_key)
    return best, results
