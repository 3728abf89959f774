"""Two-phase backward elimination: multicollinearity first, then significance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EliminationError, RankError, ValidationError
from .ols import fit_frame
from .vif import vif_frame


@dataclass(frozen=True)
class Step:
    removed: str
    reason: str        # "vif" or "pvalue"
    value: float       # the offending VIF or p value
    remaining: list
    fit: object        # OlsFit after removal, None if still rank deficient
    vif: object        # VifReport after removal


@dataclass
class EliminationTrace:
    initial_predictors: list
    initial_fit: object
    initial_vif: object
    vif_threshold: float
    p_threshold: float
    steps: list = field(default_factory=list)

    @property
    def predictors(self):
        return list(self.steps[-1].remaining) if self.steps else list(self.initial_predictors)

    @property
    def final_fit(self):
        return self.steps[-1].fit if self.steps else self.initial_fit

    @property
    def final_vif(self):
        return self.steps[-1].vif if self.steps else self.initial_vif


def _try_fit(frame, names):
    try:
        return fit_frame(frame, names)
    except RankError:
        return None


def stepwise_eliminate(frame, predictors=None, vif_threshold=10.0, p_threshold=0.10):
    """Drop the worst-VIF predictor until all VIFs are within threshold, then
    drop the least significant predictor until all p values are.

    VIF ties go to the larger p value, then the alphabetically first name.
    """
    names = list(frame.names if predictors is None else predictors)
    if len(names) < 2:
        raise ValidationError(f"stepwise elimination needs >= 2 predictors, got {names}")
    fit = _try_fit(frame, names)
    vifs = vif_frame(frame, names)
    trace = EliminationTrace(list(names), fit, vifs, vif_threshold, p_threshold)

    def remove(name, reason, value):
        remaining = [n for n in names if n != name]
        if not remaining:
            raise EliminationError(
                f"removing {name!r} ({reason}={value:.4g}) would leave no predictors", trace)
        new_fit = _try_fit(frame, remaining)
        new_vif = vif_frame(frame, remaining)
        trace.steps.append(Step(name, reason, float(value), remaining, new_fit, new_vif))
        return remaining, new_fit, new_vif

    while np.max(vifs.values) > vif_threshold:
        pvals = fit.predictor_pvalues() if fit is not None else {}

        def rank(j):
            p = pvals.get(names[j], np.nan)
            return (-vifs.values[j], -(p if np.isfinite(p) else -1.0), names[j])

        j = min(range(len(names)), key=rank)
        names, fit, vifs = remove(names[j], "vif", vifs.values[j])

    if fit is None:
        fit = fit_frame(frame, names)  # raises RankError with the dependent columns
    while True:
        pvals = fit.predictor_pvalues()
        worst = min(names, key=lambda n: (-pvals[n], n))
        if not pvals[worst] > p_threshold:
            break
        names, fit, vifs = remove(worst, "pvalue", pvals[worst])
        if fit is None:
            fit = fit_frame(frame, names)
    return trace
