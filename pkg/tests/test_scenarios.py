import math

import numpy as np
import pytest

from bitdensity.detector import Hypothesis, detection_probability
from bitdensity.scenarios import (
    GaussianScenario,
    MimoScenario,
    WsnScenario,
    db_to_linear,
    generate_gaussian,
    simulate_mimo_block,
    simulate_wsn_probe,
    wsn_samples,
)

H0, H1 = Hypothesis.H0, Hypothesis.H1


def _draw(sc, hyp, size, seed=0):
    return sc.sample_batch(np.random.default_rng(seed), hyp, size)


def test_db_to_linear():
    assert db_to_linear(0) == 1.0
    assert db_to_linear(-4) == pytest.approx(0.3981071705534972)
    assert db_to_linear(10) == pytest.approx(10.0)


class TestGaussian:
    sc = GaussianScenario(sigma0_sq=2.0, delta_var=1.5, n=50)

    def test_alpha(self):
        assert self.sc.alpha == pytest.approx(math.sqrt(2.0 / 3.5))

    @pytest.mark.parametrize("hyp,var", [(H0, 2.0), (H1, 3.5)])
    def test_moments(self, hyp, var):
        x = _draw(self.sc, hyp, 20_000)
        assert x.shape == (20_000, 50)
        assert abs(x.mean()) < 4 * math.sqrt(var / x.size)
        assert x.var() == pytest.approx(var, rel=0.01)

    def test_single_draw(self):
        assert generate_gaussian(self.sc, 0, np.random.default_rng(1)).shape == (50,)

    def test_same_stream_same_background(self):
        # H1 is a rescaled copy of the H0 draw under a shared generator state
        a = _draw(self.sc, H0, 3, seed=5)
        b = _draw(self.sc, H1, 3, seed=5)
        np.testing.assert_allclose(b, a * math.sqrt(3.5 / 2.0))

    def test_rejects(self):
        with pytest.raises(ValueError):
            GaussianScenario(sigma0_sq=0.0)
        with pytest.raises(ValueError):
            GaussianScenario(delta_var=-1.0)
        with pytest.raises(ValueError):
            GaussianScenario(n=0)


class TestMimo:
    def test_table_setup(self):
        # K = tau = 5 unit-power users plus unit noise: sigma0^2 = 6, per real dimension 3
        for M, n in ((32, 320), (128, 1280), (256, 2560)):
            sc = MimoScenario(M=M)
            assert sc.n == n
            assert sc.sigma0_sq == 6.0
            assert sc.dim_variance == 3.0

    def test_pilots_orthogonal(self):
        S = MimoScenario().pilots()
        np.testing.assert_allclose(S @ S.conj().T, 5 * np.eye(5), atol=1e-12)
        np.testing.assert_allclose(np.abs(S), 1.0)

    def test_null_covariance_is_scaled_identity(self):
        sc = MimoScenario(M=2, N=2)
        x = _draw(sc, H0, 200_000)
        cov = np.cov(x, rowvar=False)
        np.testing.assert_allclose(np.diag(cov), 3.0, rtol=0.02)
        off = cov - np.diag(np.diag(cov))
        assert np.max(np.abs(off)) < 0.05

    def test_alternative_variance(self):
        sc = MimoScenario(M=4, jammer_power=2.0)
        x = _draw(sc, H1, 100_000)
        assert x.var() == pytest.approx(0.5 * (6.0 + 2.0), rel=0.01)
        assert sc.alpha == pytest.approx(math.sqrt(6.0 / 8.0))

    def test_spoofing_correlates_pilot_symbols(self):
        # the jammer channel is shared by every pilot symbol of a block
        sc = MimoScenario(M=1, jammer_power=4.0)
        assert not sc.iid
        x = _draw(sc, H1, 200_000)
        sq = x**2
        corr = np.corrcoef(sq[:, 0], sq[:, 1])[0, 1]
        assert corr > 0.05

    def test_single_pilot_is_iid(self):
        sc = MimoScenario(M=8, K=5, tau=5, use_all_pilots=False, jammer_power=1.0)
        assert sc.iid
        assert sc.n == 16

    def test_multi_antenna_jammer(self):
        sc = MimoScenario(M=4, jammer_power=0.5, jammer_antennas=3)
        assert sc.jammer_pilot == "random"
        assert sc.jamming_variance == pytest.approx(1.5)
        x = _draw(sc, H1, 100_000)
        assert x.var() == pytest.approx(0.5 * 7.5, rel=0.01)

    def test_power_grows_with_jammer_antennas(self):
        scs = [MimoScenario(M=32, jammer_power=0.1, jammer_antennas=nj) for nj in (1, 2, 4, 8)]
        pds = [detection_probability(sc.n, 0.05, 1.6, sc.alpha) for sc in scs]
        assert pds == sorted(pds)

    def test_no_jamming_means_h1_equals_h0(self):
        sc = MimoScenario(M=4, jammer_power=0.0)
        np.testing.assert_array_equal(_draw(sc, H0, 10, seed=3), _draw(sc, H1, 10, seed=3))

    def test_single_block(self):
        assert simulate_mimo_block(MimoScenario(M=8), 1, np.random.default_rng(0)).shape == (80,)

    def test_rejects(self):
        with pytest.raises(ValueError):
            MimoScenario(K=6, tau=5)
        with pytest.raises(ValueError):
            MimoScenario(K=3, tau=5)
        with pytest.raises(ValueError):
            MimoScenario(jammer_antennas=2, jammer_pilot="spoof")
        with pytest.raises(ValueError):
            MimoScenario(jammer_pilot="chirp")
        with pytest.raises(ValueError):
            MimoScenario(user_powers=(1.0, 1.0))
        with pytest.raises(ValueError):
            MimoScenario(noise_var=0.0)

    def test_describe(self):
        d = MimoScenario(M=32).describe()
        assert d["kind"] == "mimo" and d["M"] == 32 and d["jammer_pilot"] == "spoof"


class TestWsn:
    def test_dimensions(self):
        assert WsnScenario(tau=4).n == 160
        assert WsnScenario(tau=4, complex_model=False).n == 80

    def test_alpha(self):
        assert WsnScenario(snr=10 ** -0.4).alpha == pytest.approx(1 / math.sqrt(1 + 10 ** -0.4))

    @pytest.mark.parametrize("complex_model", [True, False])
    def test_variances(self, complex_model):
        sc = WsnScenario(snr=0.8, tau=2, complex_model=complex_model)
        v0 = sc.dim_variance
        assert _draw(sc, H0, 50_000).var() == pytest.approx(v0, rel=0.01)
        assert _draw(sc, H1, 50_000).var() == pytest.approx(v0 * 1.8, rel=0.015)

    def test_zero_snr(self):
        sc = WsnScenario(snr=0.0, tau=3)
        assert sc.alpha == 1.0 and sc.iid
        np.testing.assert_array_equal(_draw(sc, H0, 5, seed=2), _draw(sc, H1, 5, seed=2))

    def test_channel_shared_within_probe(self):
        sc = WsnScenario(snr=4.0, tau=2)
        assert not sc.iid
        x = _draw(sc, H1, 100_000)
        # sensor 0: columns 0,1 are the real parts of its two symbols
        assert np.corrcoef(x[:, 0], x[:, 1])[0, 1] > 0.5

    def test_probe_helpers(self):
        rng = np.random.default_rng(0)
        sc = WsnScenario(tau=2)
        assert wsn_samples(sc, 0, rng).shape == (80,)
        bits = simulate_wsn_probe(sc, 1, rng)
        assert bits.shape == (80,) and set(np.unique(bits)) <= {0, 1}

    def test_rejects(self):
        with pytest.raises(ValueError):
            WsnScenario(snr=-1.0)
        with pytest.raises(ValueError):
            WsnScenario(tau=2, probe=(1.0,))
        with pytest.raises(ValueError):
            WsnScenario(tau=1, probe=(2.0,))
