import math

import numpy as np
import pytest

from pilot_borrow.special import (
    log_beta_binomial_pmf,
    log_beta_fn,
    log_gamma,
    reg_inc_beta,
    sample_binomial,
)

from oracles import beta_binomial_marginal_quad


class TestLogGamma:
    def test_exact_values(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), abs=1e-12)
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 7, 20, 50, 170])
    def test_matches_log_factorial(self, n):
        expected = sum(math.log(k) for k in range(1, n))
        assert log_gamma(float(n)) == pytest.approx(expected, abs=max(1e-12, abs(expected) * 1e-14))

    def test_half_integer_identity(self):
        # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
        n = 10
        expected = (
            sum(math.log(k) for k in range(1, 2 * n + 1))
            + 0.5 * math.log(math.pi)
            - n * math.log(4.0)
            - sum(math.log(k) for k in range(1, n + 1))
        )
        assert log_gamma(n + 0.5) == pytest.approx(expected, abs=1e-11)

    def test_stirling_at_large_argument(self):
        x = 1e6
        stirling = (x - 0.5) * math.log(x) - x + 0.5 * math.log(2 * math.pi) + 1 / (12 * x)
        assert log_gamma(x) == pytest.approx(stirling, rel=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
    def test_domain_error(self, bad):
        with pytest.raises(ValueError):
            log_gamma(bad)


class TestLogBetaFn:
    def test_exact_values(self):
        assert log_beta_fn(1.0, 1.0) == 0.0
        assert log_beta_fn(2.0, 3.0) == pytest.approx(math.log(1.0 / 12.0), abs=1e-12)
        assert log_beta_fn(0.5, 0.5) == pytest.approx(math.log(math.pi), abs=1e-12)

    def test_symmetry_is_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a, b = rng.uniform(1e-3, 2000.0, 2)
            assert log_beta_fn(a, b) == log_beta_fn(b, a)

    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 0.0), (-2.0, 3.0)])
    def test_domain_error(self, a, b):
        with pytest.raises(ValueError):
            log_beta_fn(a, b)


class TestRegIncBeta:
    def test_boundaries(self):
        assert reg_inc_beta(0.0, 3.0, 4.0) == 0.0
        assert reg_inc_beta(1.0, 3.0, 4.0) == 1.0

    @pytest.mark.parametrize("x", [0.0, 0.1, 0.25, 0.5, 0.9, 1.0])
    def test_uniform_cdf(self, x):
        assert reg_inc_beta(x, 1.0, 1.0) == pytest.approx(x, abs=1e-14)

    def test_beta22_closed_form(self):
        # CDF of Beta(2, 2) is 3x^2 - 2x^3
        assert reg_inc_beta(0.25, 2.0, 2.0) == pytest.approx(0.15625, abs=1e-12)

    @pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 3.0), (3.5, 40.0), (700.0, 700.0)])
    def test_complement_identity(self, a, b):
        for x in np.linspace(0.01, 0.99, 21):
            total = reg_inc_beta(x, a, b) + reg_inc_beta(1.0 - x, b, a)
            assert total == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("a,b", [(0.5, 2.0), (2.0, 5.0), (40.0, 70.0), (900.0, 1100.0)])
    def test_nondecreasing_in_x(self, a, b):
        grid = np.linspace(0.0, 1.0, 101)
        values = [reg_inc_beta(float(x), a, b) for x in grid]
        assert all(v2 >= v1 for v1, v2 in zip(values, values[1:]))

    @pytest.mark.parametrize(
        "a,b,x",
        [(2.0, 5.0, 0.3), (0.5, 0.5, 0.2), (30.0, 70.0, 0.35), (700.0, 700.0, 0.51)],
    )
    def test_against_pdf_quadrature(self, a, b, x):
        from scipy import integrate, stats

        expected, _ = integrate.quad(
            lambda t: stats.beta.pdf(t, a, b), 0.0, x, epsabs=1e-13, epsrel=1e-12, limit=200
        )
        assert reg_inc_beta(x, a, b) == pytest.approx(expected, abs=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            reg_inc_beta(-0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            reg_inc_beta(1.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            reg_inc_beta(0.5, 0.0, 1.0)


class TestLogBetaBinomialPmf:
    def test_uniform_prior_makes_counts_equally_likely(self):
        n = 7
        for y in range(n + 1):
            assert log_beta_binomial_pmf(y, n, 1.0, 1.0) == pytest.approx(
                -math.log(n + 1), abs=1e-12
            )

    def test_empty_experiment(self):
        assert log_beta_binomial_pmf(0, 0, 2.5, 7.0) == 0.0

    def test_frozen_quadrature_value(self):
        # oracle: quadrature of C(10,3) p^3 (1-p)^7 * Beta(p; 6, 16) over [0, 1]
        assert log_beta_binomial_pmf(3, 10, 6.0, 16.0) == pytest.approx(
            -1.5355717840988203, abs=1e-10
        )
        live = math.log(beta_binomial_marginal_quad(3, 10, 6.0, 16.0))
        assert log_beta_binomial_pmf(3, 10, 6.0, 16.0) == pytest.approx(live, abs=1e-10)

    @pytest.mark.parametrize("a,b,n", [(1.0, 1.0, 10), (0.5, 0.5, 50), (6.0, 16.0, 30), (40.0, 2.0, 50)])
    def test_pmf_sums_to_one(self, a, b, n):
        total = sum(math.exp(log_beta_binomial_pmf(y, n, a, b)) for y in range(n + 1))
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            log_beta_binomial_pmf(5, 4, 1.0, 1.0)
        with pytest.raises(ValueError):
            log_beta_binomial_pmf(-1, 4, 1.0, 1.0)
        with pytest.raises(ValueError):
            log_beta_binomial_pmf(1, 4, 0.0, 1.0)


class TestSampleBinomial:
    def test_degenerate_probabilities(self):
        rng = np.random.default_rng(0)
        assert sample_binomial(50, 0.0, rng) == 0
        assert sample_binomial(50, 1.0, rng) == 50
        assert sample_binomial(0, 0.3, rng) == 0

    def test_deterministic_given_stream(self):
        draws_a = [sample_binomial(100, 0.3, np.random.default_rng(42)) for _ in range(1)]
        draws_b = [sample_binomial(100, 0.3, np.random.default_rng(42)) for _ in range(1)]
        assert draws_a == draws_b
        rng1 = np.random.default_rng(7)
        rng2 = np.random.default_rng(7)
        seq1 = [sample_binomial(n, 0.4, rng1) for n in (5, 50, 500)]
        seq2 = [sample_binomial(n, 0.4, rng2) for n in (5, 50, 500)]
        assert seq1 == seq2

    def test_law_of_large_numbers(self):
        rng = np.random.default_rng(2024)
        draws = 1_000_000
        mean = sum(sample_binomial(100, 0.25, rng) for _ in range(draws)) / draws
        assert abs(mean - 25.0) < 0.05

    def test_domain_errors(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_binomial(10, -0.1, rng)
        with pytest.raises(ValueError):
            sample_binomial(10, 1.1, rng)
        with pytest.raises(ValueError):
            sample_binomial(-1, 0.5, rng)
