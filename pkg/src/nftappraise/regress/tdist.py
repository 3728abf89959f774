"""Student-t distribution through the regularized incomplete beta function."""

import math

from scipy import special

from ..errors import ValidationError


def _check(dof):
    if not dof >= 1:
        raise ValidationError(f"degrees of freedom must be >= 1, got {dof}")


def t_cdf(x, dof):
    """P(T <= x) for T ~ Student-t(dof).

    Uses P(|T| > |x|) = I_{dof/(dof+x^2)}(dof/2, 1/2), so both tails come
    from the same beta evaluation and t_cdf(x) + t_cdf(-x) == 1 exactly.
    """
    _check(dof)
    x = float(x)
    if math.isnan(x):
        return math.nan
    tail = 0.5 * two_sided_p(x, dof)
    return 1.0 - tail if x > 0 else tail


def two_sided_p(t, dof):
    """P(|T| >= |t|)."""
    _check(dof)
    t = float(t)
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    return float(special.betainc(0.5 * dof, 0.5, dof / (dof + t * t)))


def t_quantile_two_sided(alpha, dof):
    """Critical value c with P(|T| > c) = alpha, e.g. alpha=0.05 for a 95% interval."""
    _check(dof)
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    x = float(special.betaincinv(0.5 * dof, 0.5, alpha))
    return math.sqrt(dof * (1.0 - x) / x)
