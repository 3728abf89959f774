"""Coefficient tables and elimination-trace serialization."""

from __future__ import annotations

import csv
import io
import json
import math

from ..frame import DISPLAY_NAMES

COLUMNS = ["Predictor", "Coeff", "VIF", "t", "P>|t|", "CI-low", "CI-high"]


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def table_rows(fit, vifs=None):
    """One row per predictor (in ``fit.names`` order), then the intercept."""
    vif_map = vifs.as_dict() if vifs is not None else {}
    rows = []
    for i, term in enumerate(fit.terms):
        if term == "const":
            continue
        rows.append([term, fit.params[i], vif_map.get(term), fit.tvalues[i], fit.pvalues[i],
                     fit.conf_int[i, 0], fit.conf_int[i, 1]])
    if fit.has_intercept:
        rows.append(["const", fit.params[0], None, fit.tvalues[0], fit.pvalues[0],
                     fit.conf_int[0, 0], fit.conf_int[0, 1]])
    return rows


def table_csv(fit, vifs=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in table_rows(fit, vifs):
        w.writerow([row[0]] + ["" if v is None else repr(float(v)) for v in row[1:]])
    return buf.getvalue()


def _fmt(v):
    if v is None:
        return ""
    v = float(v)
    if math.isinf(v):
        return "inf"
    if v != 0 and (abs(v) >= 1e6 or abs(v) < 1e-3):
        return f"{v:.3e}"
    return f"{v:.4f}"


def table_text(fit, vifs=None, title=None):
    body = [[DISPLAY_NAMES.get(r[0], r[0])] + [_fmt(v) for v in r[1:]] for r in table_rows(fit, vifs)]
    widths = [max(len(str(x)) for x in col) for col in zip(COLUMNS, *body)]
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(h.ljust(w) if i == 0 else h.rjust(w)
                           for i, (h, w) in enumerate(zip(COLUMNS, widths))))
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                               for i, (c, w) in enumerate(zip(row, widths))))
    lines.append(f"n = {fit.n}   p = {fit.p}   R^2 = {fit.r_squared:.4f}   "
                 f"adjusted R^2 = {fit.adjusted_r_squared:.4f}")
    return "\n".join(lines) + "\n"


def fit_summary(fit):
    if fit is None:
        return None
    return {
        "n": fit.n, "p": fit.p,
        "r_squared": _num(fit.r_squared), "adjusted_r_squared": _num(fit.adjusted_r_squared),
        "max_p": _num(max(fit.predictor_pvalues().values())),
    }


def trace_records(trace):
    out = []
    for i, step in enumerate(trace.steps, start=1):
        name, worst = step.vif.max()
        out.append({
            "step": i,
            "removed": step.removed,
            "reason": step.reason,
            "value": _num(step.value),
            "remaining": list(step.remaining),
            "max_vif": _num(worst),
            "max_vif_predictor": name,
            "fit": fit_summary(step.fit),
        })
    return out


def trace_json(trace):
    doc = {
        "vif_threshold": trace.vif_threshold,
        "p_threshold": trace.p_threshold,
        "initial_predictors": trace.initial_predictors,
        "steps": trace_records(trace),
        "final_predictors": trace.predictors,
    }
    return json.dumps(doc, indent=2) + "\n"
