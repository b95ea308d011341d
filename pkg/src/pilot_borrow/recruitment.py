"""Trial duration and recruitment feasibility under a Gamma-Poisson accrual model.

Monthly accrual is Poisson with a Gamma-distributed rate centered on the
pilot-observed value (shape 2*lambda0, rate 2, so mean lambda0 and variance
lambda0/2). Marginally the number recruited in m months is Negative Binomial,
whose survival function answers "what is the chance of reaching n recruits
within m months".
"""

import math
from dataclasses import dataclass

from .special import reg_inc_beta


@dataclass(frozen=True)
class RecruitmentModel:
    """Gamma prior on the true recruitment rate, anchored at the pilot rate."""

    lambda0: float

    def __post_init__(self):
        if self.lambda0 <= 0.0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")

    @property
    def gamma_shape(self) -> float:
        return 2.0 * self.lambda0

    @property
    def gamma_rate(self) -> float:
        return 2.0


def expected_duration(n: int, rate: float) -> float:
    """Expected months to recruit n participants at `rate` recruits per month.

    Returns the exact quotient; use :func:`round_months` for display.
    """
    if rate <= 0.0:
        raise ValueError(f"recruitment rate must be positive, got {rate}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return n / rate


def round_months(months: float) -> int:
    """Display rounding for durations: nearest integer, half away from zero."""
    return int(math.floor(months + 0.5)) if months >= 0 else -int(math.floor(-months + 0.5))


def negbin_params(model: RecruitmentModel, m: float) -> tuple[float, float]:
    """(r, p) of the Negative Binomial count of recruits in m months."""
    if m <= 0.0:
        raise ValueError(f"months must be positive, got {m}")
    return model.gamma_shape, 2.0 / (2.0 + m)


def recruitment_probability(model: RecruitmentModel, n: int, m: float) -> float:
    """P(at least n recruits within m months).

    Uses the survival identity P(N >= n) = I_{1-p}(n, r) for the Negative
    Binomial; the identity is cross-checked against direct pmf summation in
    the test suite.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 1.0
    r, p = negbin_params(model, m)
    return reg_inc_beta(1.0 - p, float(n), r)


_MONTH_RESOLUTION = 0.01


def months_for_probability(model: RecruitmentModel, n: int, target: float) -> float:
    """Smallest duration (0.01-month resolution) meeting a recruitment probability.

    A solution always exists because the probability increases to 1 as the
    window grows.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target probability must lie in (0, 1), got {target}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")

    def prob_at(hundredths: int) -> float:
        return recruitment_probability(model, n, hundredths * _MONTH_RESOLUTION)

    lo = 1  # resolution floor: durations below 0.01 months are not resolved
    if n == 0 or prob_at(lo) >= target:
        return lo * _MONTH_RESOLUTION
    hi = 2
    while prob_at(hi) < target:
        lo = hi
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if prob_at(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi * _MONTH_RESOLUTION
