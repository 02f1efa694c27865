import math

import numpy as np
import pytest
from scipy import stats

from bitdensity.baseline import (
    ChiSquareTestParams,
    unquantized_decide,
    unquantized_detection_probability,
    unquantized_threshold,
)
from bitdensity.detector import Hypothesis, detection_probability

# 3 x the chi-square 0.95 quantiles frozen in test_numerics
GAMMA_UNQ = {320: 1088.1525122433100, 1280: 4093.035493278948, 2560: 8036.466472462460}


class TestThreshold:
    @pytest.mark.parametrize("dof", sorted(GAMMA_UNQ))
    def test_table_rows(self, dof):
        assert unquantized_threshold(0.05, dof, 6.0) == pytest.approx(GAMMA_UNQ[dof], rel=1e-11)

    def test_printed_values(self):
        for dof, printed in zip(sorted(GAMMA_UNQ), (1088.2, 4093.0, 8036.5)):
            assert unquantized_threshold(0.05, dof, 6.0) == pytest.approx(printed, rel=1e-3)

    def test_scipy_quantile(self):
        assert unquantized_threshold(0.01, 77, 2.0) == pytest.approx(stats.chi2.ppf(0.99, 77), rel=1e-10)

    def test_linear_in_variance(self):
        assert unquantized_threshold(0.05, 40, 10.0) == pytest.approx(5 * unquantized_threshold(0.05, 40, 2.0), rel=1e-14)

    @pytest.mark.parametrize("args", [(0.0, 10, 1.0), (0.05, 0, 1.0), (0.05, 10, 0.0), (0.05, 10, -1.0)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            unquantized_threshold(*args)


class TestDecision:
    def test_branches(self):
        params = ChiSquareTestParams.for_real_samples(0.05, 4, 1.0)
        assert unquantized_decide(np.zeros(4), params).hypothesis is Hypothesis.H0
        assert unquantized_decide(np.full(4, 10.0), params).hypothesis is Hypothesis.H1

    def test_shape_checked(self):
        params = ChiSquareTestParams.for_real_samples(0.05, 4, 1.0)
        with pytest.raises(ValueError):
            unquantized_decide(np.zeros(5), params)

    def test_real_sample_design(self):
        # real samples of variance v behave like a complex model with sigma0^2 = 2v
        assert ChiSquareTestParams.for_real_samples(0.05, 50, 0.7).threshold == pytest.approx(
            unquantized_threshold(0.05, 50, 1.4), rel=1e-15
        )

    def test_calibration(self):
        rng = np.random.default_rng(2024)
        trials, dof, v = 100_000, 60, 3.0
        params = ChiSquareTestParams.for_real_samples(0.05, dof, v)
        x = rng.normal(0, math.sqrt(v), (trials, dof))
        pf = params.energies_exceed(np.einsum("ij,ij->i", x, x)).mean()
        assert abs(pf - 0.05) <= 3 * math.sqrt(0.05 * 0.95 / trials)

    def test_power_monte_carlo(self):
        rng = np.random.default_rng(99)
        trials, dof = 100_000, 200
        params = ChiSquareTestParams.for_real_samples(0.05, dof, 1.0)
        x = rng.normal(0, math.sqrt(1.3), (trials, dof))
        pd = params.energies_exceed(np.einsum("ij,ij->i", x, x)).mean()
        theory = unquantized_detection_probability(0.05, dof, 2.0, 2.6)
        assert abs(pd - theory) <= 3 * math.sqrt(theory * (1 - theory) / trials)


class TestDetectionProbability:
    def test_equal_variance_is_size(self):
        assert unquantized_detection_probability(0.05, 320, 6.0, 6.0) == pytest.approx(0.05, abs=1e-10)

    def test_scipy_route(self):
        thr = unquantized_threshold(0.05, 200, 2.0)
        assert unquantized_detection_probability(0.05, 200, 2.0, 3.0) == pytest.approx(
            stats.chi2.sf(thr / 1.5, 200), rel=1e-9
        )

    def test_dominates_quantized(self):
        # the energy detector sees the full samples, so it is at least as powerful
        for n in (50, 200, 1000):
            for alpha in (0.7, 0.85, 0.95):
                unq = unquantized_detection_probability(0.05, n, 2.0, 2.0 / alpha**2)
                assert unq >= detection_probability(n, 0.05, 1.6, alpha)

    def test_monotone_in_variance(self):
        pds = [unquantized_detection_probability(0.05, 100, 1.0, s) for s in (1.0, 1.1, 1.3, 2.0, 5.0)]
        assert pds == sorted(pds)
