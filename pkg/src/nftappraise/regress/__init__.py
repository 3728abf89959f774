from .ols import OlsFit, adjusted_r2, evaluate, fit_frame, fit_ols
from .stepwise import EliminationTrace, Step, stepwise_eliminate
from .tdist import t_cdf, t_quantile_two_sided, two_sided_p
from .vif import VifReport, vif, vif_frame

__all__ = [
    "OlsFit", "adjusted_r2", "evaluate", "fit_frame", "fit_ols", "EliminationTrace", "Step",
    "stepwise_eliminate", "t_cdf", "t_quantile_two_sided", "two_sided_p", "VifReport", "vif",
    "vif_frame",
]
