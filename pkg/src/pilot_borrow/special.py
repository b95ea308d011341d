"""Log-scale special functions and the binomial sampler used throughout.

Everything that can overflow for trial-scale counts (totals up to a few
thousand) is kept on the natural-log scale; callers exponentiate only after
normalizing. Scalar wrappers validate their domains; the ``*_arr`` variants
skip validation and broadcast, for use on hot paths.
"""

import math

import numpy as np
from scipy import special as sp

# A plain float carrying a natural-log-scale magnitude.
LogValue = float


def log_gamma(x: float) -> LogValue:
    """ln Gamma(x) for x > 0."""
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def log_beta_fn(a: float, b: float) -> LogValue:
    """ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).

    Composed from lgamma rather than a dedicated lbeta so that the result
    is exactly symmetric in (a, b).
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"log_beta_fn requires positive arguments, got ({a}, {b})")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b), i.e. the Beta(a, b) CDF at x."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"reg_inc_beta requires positive shapes, got ({a}, {b})")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"reg_inc_beta requires 0 <= x <= 1, got {x}")
    return float(sp.betainc(a, b, x))


def log_beta_binomial_pmf(y: int, n: int, a: float, b: float) -> LogValue:
    """ln P(Y = y) for Y ~ BetaBinomial(n, a, b).

    This is the log marginal likelihood of y successes in n Bernoulli trials
    when the success probability carries a Beta(a, b) prior; the binomial
    coefficient is included so the value is a true log probability.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"log_beta_binomial_pmf requires positive shapes, got ({a}, {b})")
    if not 0 <= y <= n:
        raise ValueError(f"log_beta_binomial_pmf requires 0 <= y <= n, got y={y}, n={n}")
    return float(log_beta_binomial_pmf_arr(y, n, a, b))


def log_beta_binomial_pmf_arr(y, n, a, b):
    """Broadcasting, non-validating form of :func:`log_beta_binomial_pmf`."""
    y = np.asarray(y, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    log_choose = sp.gammaln(n + 1.0) - sp.gammaln(y + 1.0) - sp.gammaln(n - y + 1.0)
    log_beta_post = sp.gammaln(a + y) + sp.gammaln(b + n - y) - sp.gammaln(a + b + n)
    log_beta_prior = sp.gammaln(a) + sp.gammaln(b) - sp.gammaln(a + b)
    return log_choose + log_beta_post - log_beta_prior


def sample_binomial(n: int, p: float, rng: np.random.Generator) -> int:
    """One Binomial(n, p) draw from the caller's stream.

    Deterministic given the stream state; numpy's sampler switches between
    inversion (small n*p) and a rejection scheme internally.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"sample_binomial requires 0 <= p <= 1, got {p}")
    if n < 0:
        raise ValueError(f"sample_binomial requires n >= 0, got {n}")
    return int(rng.binomial(n, p))
