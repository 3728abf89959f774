"""Checkpoints and CSV exports for trained networks."""

from __future__ import annotations

import csv
import json

import numpy as np

from ..errors import ParseError, ValidationError
from ..frame import NormalizationStats
from .model import Parameters, RnnConfig, check_shapes

FORMAT = "nftappraise-rnn/1"


def save_checkpoint(path, config, params, normalizer=None, mode="univariate", extra=None):
    doc = {
        "format": FORMAT,
        "config": config.to_dict(),
        "mode": mode,
        "normalizer": normalizer.to_dict() if normalizer is not None else None,
        "tensors": {k: {"shape": list(v.shape), "data": v.ravel().tolist()} for k, v in params.items()},
    }
    if extra:
        doc["extra"] = extra
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_checkpoint(path):
    """Returns ``(config, params, normalizer, mode, extra)``; shapes are validated."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise ParseError(f"{path}: not a checkpoint: {exc}") from None
    if doc.get("format") != FORMAT:
        raise ParseError(f"{path}: unsupported checkpoint format {doc.get('format')!r}")
    config = RnnConfig(**doc["config"])
    tensors = {}
    for name, t in doc["tensors"].items():
        data = np.array(t["data"], dtype=np.float64)
        if data.size != int(np.prod(t["shape"])):
            raise ValidationError(f"{path}: tensor {name} has {data.size} values for shape {t['shape']}")
        tensors[name] = data.reshape(t["shape"])
    params = Parameters(tensors)
    check_shapes(config, params)
    norm = doc.get("normalizer")
    normalizer = NormalizationStats.from_dict(norm) if norm else None
    return config, params, normalizer, doc.get("mode", "univariate"), doc.get("extra", {})


def write_report_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "val_ape"])
        for i, (loss, ape) in enumerate(zip(report.train_loss, report.val_ape), start=1):
            w.writerow([i, repr(float(loss)), repr(float(ape))])


def write_forecast_csv(series, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "true_price", "predicted_price"])
        for d, t, p in series.rows():
            w.writerow([d.isoformat(), repr(float(t)), repr(float(p))])
