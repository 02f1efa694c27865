import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bitdensity.quantizer import (
    ComparatorConfig,
    alt_success_rate,
    null_success_rate,
    quantize,
    quantize_block,
    variance_ratio,
)


def _two_sided_tail(threshold):
    """P(|Z| > threshold) by quadrature of the standard normal density."""
    f = lambda t: mpmath.exp(-t * t / 2) / mpmath.sqrt(2 * mpmath.pi)  # noqa: E731
    return float(2 * mpmath.quad(f, [threshold, mpmath.inf]))


class TestComparatorConfig:
    def test_window(self):
        cfg = ComparatorConfig(c=1.6, sigma0=2.0)
        assert cfg.upper == pytest.approx(3.2)
        assert cfg.lower == pytest.approx(-3.2)

    @pytest.mark.parametrize("c,s", [(-0.1, 1.0), (1.0, 0.0), (1.0, -2.0), (math.inf, 1.0)])
    def test_invalid(self, c, s):
        with pytest.raises(ValueError):
            ComparatorConfig(c=c, sigma0=s)


class TestQuantize:
    cfg = ComparatorConfig(c=1.6, sigma0=1.5)

    def test_inside(self):
        assert quantize(0.0, self.cfg) == 0

    def test_boundary_is_inside(self):
        assert quantize(self.cfg.half_width, self.cfg) == 0
        assert quantize(-self.cfg.half_width, self.cfg) == 0

    def test_outside(self):
        assert quantize(2 * self.cfg.half_width, self.cfg) == 1
        assert quantize(-2 * self.cfg.half_width, self.cfg) == 1

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            quantize(float("nan"), self.cfg)
        with pytest.raises(ValueError):
            quantize_block([0.0, float("inf")], self.cfg)

    @given(st.floats(-1e6, 1e6))
    def test_symmetric(self, a):
        assert quantize(a, self.cfg) == quantize(-a, self.cfg)

    def test_block(self):
        assert quantize_block([], self.cfg).shape == (0,)
        assert quantize_block(np.zeros(5), self.cfg).tolist() == [0, 0, 0, 0, 0]
        x = [-5.0, -2.4, 2.4, 2.41, 0.3]
        assert quantize_block(x, self.cfg).tolist() == [quantize(v, self.cfg) for v in x]

    def test_bit_density_of_null_noise(self):
        rng = np.random.default_rng(20240601)
        sigma0 = 0.7
        cfg = ComparatorConfig(c=1.6, sigma0=sigma0)
        bits = quantize_block(rng.normal(0.0, sigma0, 1_000_000), cfg)
        theta0 = null_success_rate(1.6)
        assert abs(bits.mean() - theta0) <= 3 * math.sqrt(theta0 * (1 - theta0) / 1_000_000)


class TestSuccessRates:
    def test_null_rate_at_1_6(self):
        assert null_success_rate(1.6) == pytest.approx(_two_sided_tail(1.6), rel=1e-12)
        assert null_success_rate(1.6) == pytest.approx(0.1096, abs=5e-5)

    def test_limits(self):
        assert null_success_rate(0.0) == 1.0
        assert null_success_rate(10.0) < 1e-20
        # 2 Q(1.6e-9) = 1 - 1.6e-9 * sqrt(2/pi) to first order
        assert alt_success_rate(1.6, 1e-9) == pytest.approx(1 - 1.6e-9 * math.sqrt(2 / math.pi), abs=1e-15)

    def test_alpha_one_matches_null(self):
        for c in (0.3, 1.6, 2.5):
            assert alt_success_rate(c, 1.0) == null_success_rate(c)

    def test_quadrature_reference(self):
        # 2 Q(1.6 / sqrt 2) by quadrature: 0.25789903529233951
        assert alt_success_rate(1.6, 1 / math.sqrt(2)) == pytest.approx(0.25789903529233951, rel=1e-12)
        assert alt_success_rate(1.6, 1 / math.sqrt(2)) == pytest.approx(_two_sided_tail(1.6 / math.sqrt(2)), rel=1e-12)

    def test_alt_exceeds_null(self):
        assert alt_success_rate(1.6, 0.9) > null_success_rate(1.6)

    def test_monotone_in_alpha(self):
        alphas = np.linspace(0.05, 1.0, 200)
        rates = [alt_success_rate(1.6, a) for a in alphas]
        assert all(b < a for a, b in zip(rates, rates[1:]))

    def test_null_rate_ignores_sigma0(self):
        # the firing probability for N(0, s^2) input and window c*s depends on c alone
        rng = np.random.default_rng(5)
        for s in (0.1, 3.0):
            bits = quantize_block(rng.normal(0, s, 400_000), ComparatorConfig(1.6, s))
            theta0 = null_success_rate(1.6)
            assert abs(bits.mean() - theta0) <= 3 * math.sqrt(theta0 * (1 - theta0) / 400_000)

    @pytest.mark.parametrize("alpha", [0.0, -0.5, 1.2])
    def test_rejects_alpha(self, alpha):
        with pytest.raises(ValueError):
            alt_success_rate(1.6, alpha)

    def test_rejects_negative_c(self):
        with pytest.raises(ValueError):
            null_success_rate(-1.0)

    def test_variance_ratio(self):
        assert variance_ratio(6.0, 12.0) == pytest.approx(1 / math.sqrt(2))
        with pytest.raises(ValueError):
            variance_ratio(2.0, 1.0)
