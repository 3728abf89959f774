"""Command-line pipeline: ingest -> build -> regress / train / gridsearch -> evaluate."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import config as cfgmod
from . import frame as fr
from .errors import AppraisalError, ConfigError, ValidationError
from .ingest import DataClient, HttpClient, load_events
from .ingest import rawfiles
from .regress import evaluate, fit_frame, report, stepwise_eliminate, vif_frame
from .rnn import (
    average_percent_error, forecast, grid_search, load_checkpoint, save_checkpoint, train,
    write_forecast_csv, write_report_csv,
)
from .rnn.grid import GRID_KEYS, parameter_count

log = logging.getLogger("nftappraise")


def _out(config, *parts):
    path = config.path(config.out).joinpath(*parts)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# -- ingest -----------------------------------------------------------------

def cmd_ingest(config, http=None):
    client = DataClient(config.data.mode, fixtures=config.path(config.data.fixtures),
                        http=http or HttpClient(rate=config.data.rate_limit),
                        tickers=config.data.tickers)
    start, end = config.data.start, config.data.end
    raw = _out(config, "raw", "x").parent
    status = {}

    def attempt(label, fn):
        try:
            fn()
            status[label] = "ok"
        except AppraisalError as exc:
            status[label] = f"FAILED: {type(exc).__name__}: {exc}"

    attempt("nft_market", lambda: rawfiles.write_nft(
        client.fetch_nft_daily(config.collection.contract, start, end), raw / "nft.csv"))

    quotes = {}

    def fetch_quotes():
        failed = []
        for ticker in config.data.tickers:
            try:
                quotes[ticker] = client.fetch_market_quotes(ticker, start, end)
            except AppraisalError as exc:
                failed.append(f"{ticker}: {exc}")
        if failed:
            raise AppraisalError("; ".join(failed))
        rawfiles.write_quotes(quotes, raw / "market.csv")

    attempt("public_market", fetch_quotes)
    attempt("search_trends", lambda: rawfiles.write_trends(
        client.fetch_trends(config.collection.search_term, start, end), raw / "trends.csv"))

    for source, state in status.items():
        print(f"{source:15s} {state}")
    if any(s != "ok" for s in status.values()):
        raise AppraisalError("one or more sources failed")


# -- build ------------------------------------------------------------------

def build_frame(config):
    raw = config.path(config.out) / "raw"
    missing = [p for p in ("nft.csv", "market.csv", "trends.csv") if not (raw / p).is_file()]
    if missing:
        raise ConfigError(f"raw file(s) {missing} not found under {raw}; run 'ingest' first")
    nft = rawfiles.read_nft(raw / "nft.csv")
    quotes = rawfiles.read_quotes(raw / "market.csv")
    absent = [t for t in config.data.tickers if t not in quotes]
    if absent:
        raise ConfigError(f"no quotes on disk for ticker(s) {absent}")
    quotes = {t: quotes[t] for t in config.data.tickers}
    trends = rawfiles.read_trends(raw / "trends.csv")
    events = []
    events_path = config.path(config.data.events) if config.data.events else None
    if config.frame.preset == "extended":
        if events_path is None or not events_path.is_file():
            raise ConfigError(f"preset 'extended' needs an events file; {events_path or 'none configured'}")
    if events_path is not None and events_path.is_file():
        events = load_events(events_path)
    frame = fr.align(nft, quotes, trends, events)
    return fr.add_days_since_release(frame, config.collection.release_date)


def cmd_build(config):
    frame = build_frame(config)
    path = _out(config, "frame.csv")
    fr.to_csv(frame, path)
    print(f"wrote {path}")
    print(f"rows {len(frame)}  span {frame.dates[0]} .. {frame.dates[-1]}")
    width = max(len(n) for n in frame.names + [fr.LABEL])
    for name in frame.names:
        v = frame.columns[name]
        print(f"  {name:{width}s}  min {v.min():.6g}  max {v.max():.6g}")
    print(f"  {fr.LABEL:{width}s}  min {frame.label.min():.6g}  max {frame.label.max():.6g}")
    return frame


def _load_frame(config, frame_path=None):
    path = Path(frame_path) if frame_path else config.path(config.out) / "frame.csv"
    if not path.is_file():
        raise ConfigError(f"frame {path} not found; run 'build' first or pass --frame")
    return fr.from_csv(path)


# -- regression -------------------------------------------------------------

def regression_columns(config, frame):
    wanted = fr.preset_columns(config.frame.preset, config.data.tickers)
    cols = [c for c in wanted if c in frame.columns]
    if len(cols) < len(wanted):
        # frames that are not built from market data (e.g. synthetic ones) use every column
        cols = [c for c in frame.names]
    return cols


def cmd_regress(config, frame_path=None):
    frame = _load_frame(config, frame_path)
    names = regression_columns(config, frame)
    if len(frame) <= len(names) + 1:
        raise ValidationError(f"insufficient observations: {len(frame)} rows for "
                              f"{len(names)} predictors plus intercept")
    train_f, val_f, test_f = fr.split(frame, config.split_config())
    fit_on = fr.concat([train_f, val_f])
    if len(fit_on) <= len(names) + 1:
        raise ValidationError(f"insufficient observations: {len(fit_on)} fitting rows for "
                              f"{len(names)} predictors plus intercept")
    out = _out(config, "regress", "x").parent

    initial_vif = vif_frame(fit_on, names)
    try:
        initial = fit_frame(fit_on, names)
        (out / "initial_table.csv").write_text(report.table_csv(initial, initial_vif))
        (out / "initial_table.txt").write_text(report.table_text(initial, initial_vif, "Initial model"))
    except AppraisalError as exc:
        (out / "initial_table.txt").write_text(f"Initial model could not be fitted: {exc}\n")

    trace = stepwise_eliminate(fit_on, names, config.regress.vif_threshold, config.regress.p_threshold)
    (out / "trace.json").write_text(report.trace_json(trace))
    final, final_vif = trace.final_fit, trace.final_vif
    (out / "final_table.csv").write_text(report.table_csv(final, final_vif))
    final_text = report.table_text(final, final_vif, "Final model")
    (out / "final_table.txt").write_text(final_text)

    ev = evaluate(final, test_f)
    _write_json(out / "evaluation.json", {
        "fit_rows": len(fit_on), "test_rows": len(test_f),
        "final_predictors": final.names,
        "train_r_squared": final.r_squared, "train_adjusted_r_squared": final.adjusted_r_squared,
        "test_r_squared": ev["r_squared"], "test_adjusted_r_squared": ev["adjusted_r_squared"],
    })
    print(final_text, end="")
    adj = ev["adjusted_r_squared"]
    print(f"held-out R^2 = {ev['r_squared']:.4f}   adjusted = "
          f"{'n/a (too few test rows)' if adj is None else f'{adj:.4f}'}")
    return trace, ev


# -- recurrent models -------------------------------------------------------

def _rnn_inputs(config, frame):
    """Split, fit the normalizer on train and return everything training needs."""
    mode = config.rnn.mode
    segments = fr.split(frame, config.split_config())
    columns = [fr.PRICE] if mode == "univariate" else frame.names
    stats = fr.fit_normalizer(segments[0], columns)
    scaled = [fr.apply_normalizer(stats, s) for s in segments]
    return segments, scaled, stats, mode, len(columns)


def _segment_metrics(config_rnn, params, segments, stats, mode):
    out = {}
    for name, seg in zip(("train", "val", "test"), segments):
        series = forecast(params, config_rnn, seg, stats, mode)
        out[name] = (average_percent_error(series.predicted_price, series.true_price), series)
    return out


def _write_rnn_artifacts(out, rnn_cfg, params, report_, stats, mode, segments, config):
    metrics = _segment_metrics(rnn_cfg, params, segments, stats, mode)
    report_.final_test_ape = metrics["test"][0]
    summary = {
        "config": rnn_cfg.to_dict(), "mode": mode, "best_epoch": report_.best_epoch,
        "epochs": report_.epochs,
        "train_ape": metrics["train"][0], "val_ape": metrics["val"][0], "test_ape": metrics["test"][0],
        "split": [config.frame.train, config.frame.val, config.frame.test],
    }
    save_checkpoint(out / "checkpoint.json", rnn_cfg, params, stats, mode, extra=summary)
    write_report_csv(report_, out / "train_report.csv")
    write_forecast_csv(metrics["train"][1], out / "forecast_train.csv")
    _write_json(out / "metrics.json", summary)
    return summary


def cmd_train(config, frame_path=None):
    frame = _load_frame(config, frame_path)
    segments, scaled, stats, mode, dim = _rnn_inputs(config, frame)
    rnn_cfg = config.rnn_config(input_dim=dim)
    params, rep = train(rnn_cfg, scaled[0], scaled[1], stats, mode)
    summary = _write_rnn_artifacts(_out(config, "rnn", "x").parent, rnn_cfg, params, rep, stats,
                                   mode, segments, config)
    print(f"{rnn_cfg.cell} blocks={rnn_cfg.num_blocks} hidden={rnn_cfg.hidden_dim} "
          f"lr={rnn_cfg.learning_rate} seq={rnn_cfg.seq_len}: best epoch {rep.best_epoch}/{rep.epochs}")
    print(f"average percent error  train {summary['train_ape']:.3f}%  "
          f"val {summary['val_ape']:.3f}%  test {summary['test_ape']:.3f}%")
    return summary


def cmd_gridsearch(config, frame_path=None):
    frame = _load_frame(config, frame_path)
    segments, scaled, stats, mode, dim = _rnn_inputs(config, frame)
    grid = {k: v for k, v in config.gridsearch.items() if k in GRID_KEYS}
    workers = int(config.gridsearch.get("workers", 1))
    base = config.rnn_config(input_dim=dim)
    best, results = grid_search(grid, scaled[0], scaled[1], stats, mode, base=base, workers=workers)
    out = _out(config, "gridsearch", "x").parent
    with open(out / "grid.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*GRID_KEYS, "seed", "parameters", "best_epoch", "train_ape", "val_ape", "best"])
        for r in results:
            c = r.config.to_dict()
            rep = r.report
            w.writerow([*(c[k] for k in GRID_KEYS), c["seed"], parameter_count(r.config),
                        rep.best_epoch if rep else "", repr(rep.final_train_ape) if rep else "",
                        repr(rep.final_val_ape) if rep else "diverged", int(r is best)])
    summary = _write_rnn_artifacts(out, best.config, best.params, best.report, stats, mode,
                                   segments, config)
    for r in results:
        mark = "*" if r is best else " "
        val = f"{r.val_ape:.3f}%" if r.report else "diverged"
        print(f"{mark} {r.config.cell:7s} blocks={r.config.num_blocks} hidden={r.config.hidden_dim:<3d} "
              f"lr={r.config.learning_rate:<6g} val {val}")
    return best, results, summary


def cmd_evaluate(config, frame_path=None, checkpoint=None):
    ckpt = Path(checkpoint) if checkpoint else config.path(config.out) / "rnn" / "checkpoint.json"
    if not ckpt.is_file():
        raise ConfigError(f"checkpoint {ckpt} not found; run 'train' first or pass --checkpoint")
    rnn_cfg, params, stats, mode, stored = load_checkpoint(ckpt)
    frame = _load_frame(config, frame_path)
    split_cfg = fr.SplitConfig(*stored.get("split", [config.frame.train, config.frame.val,
                                                      config.frame.test]))
    segments = fr.split(frame, split_cfg)
    metrics = _segment_metrics(rnn_cfg, params, segments, stats, mode)
    out = _out(config, "evaluate", "x").parent
    doc = {"checkpoint": ckpt.name, "mode": mode}
    mismatches = []
    for name, (ape, series) in metrics.items():
        write_forecast_csv(series, out / f"forecast_{name}.csv")
        doc[f"{name}_ape"] = ape
        ref = stored.get(f"{name}_ape")
        if ref is not None and abs(ref - ape) > 1e-9:
            mismatches.append(f"{name}: stored {ref!r}, recomputed {ape!r}")
    doc["matches_stored_report"] = not mismatches
    _write_json(out / "evaluation.json", doc)
    print(f"average percent error  train {doc['train_ape']:.3f}%  val {doc['val_ape']:.3f}%  "
          f"test {doc['test_ape']:.3f}%")
    if mismatches:
        raise AppraisalError("recomputed errors differ from the checkpoint: " + "; ".join(mismatches))
    return doc


# -- entry point ------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="nftappraise", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ingest", "build", "regress", "train", "gridsearch", "evaluate"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="pipeline TOML file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int)
        p.add_argument("--preset", choices=("initial", "extended"))
        p.add_argument("--fixtures", help="fixture directory; implies replay mode")
        if name in ("regress", "train", "gridsearch", "evaluate"):
            p.add_argument("--frame", help="frame CSV (default: <out>/frame.csv)")
        if name in ("train", "gridsearch"):
            p.add_argument("--epochs", type=int)
        if name == "evaluate":
            p.add_argument("--checkpoint")
    return parser


def apply_overrides(config, args):
    if args.out:
        config.out = str(Path(args.out).resolve())
    if args.seed is not None:
        config.seed = args.seed
    if args.preset:
        config.frame.preset = args.preset
    if args.fixtures:
        config.data.fixtures = str(Path(args.fixtures).resolve())
        config.data.mode = "replay"
    if getattr(args, "epochs", None) is not None:
        config.rnn.epochs = args.epochs
        if "epochs" in config.gridsearch:
            config.gridsearch["epochs"] = [args.epochs]
    return config.validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = apply_overrides(cfgmod.load(args.config), args)
        if args.command == "ingest":
            cmd_ingest(config)
        elif args.command == "build":
            cmd_build(config)
        elif args.command == "regress":
            cmd_regress(config, args.frame)
        elif args.command == "train":
            cmd_train(config, args.frame)
        elif args.command == "gridsearch":
            cmd_gridsearch(config, args.frame)
        elif args.command == "evaluate":
            cmd_evaluate(config, args.frame, args.checkpoint)
    except AppraisalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(exc, "trace", None) is not None:
            print(report.trace_json(exc.trace), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
