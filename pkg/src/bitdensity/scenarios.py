"""Generative models for the three experiment families.

Each scenario produces the real-valued sample vector that is fed to the
window comparators (and, for the benchmark, to the energy detector):

* :class:`GaussianScenario` - i.i.d. zero-mean normal samples whose variance
  grows by ``delta_var`` under H1.
* :class:`MimoScenario` - received uplink pilots at a multi-antenna base
  station, optionally contaminated by a (multi-antenna) jammer.
* :class:`WsnScenario` - one observation per sensor and symbol of a weak
  transmitter seen through independent Rayleigh channels.

All ``sample_batch`` methods draw the H0 background first and only then the
H1-specific extra terms, so two generators started from the same state yield
identical background draws for both hypotheses (common random numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .detector import Hypothesis
from .quantizer import ComparatorConfig, quantize_block

__all__ = [
    "db_to_linear",
    "GaussianScenario",
    "MimoScenario",
    "WsnScenario",
    "generate_gaussian",
    "simulate_mimo_block",
    "wsn_samples",
    "simulate_wsn_probe",
]

_QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / math.sqrt(2.0)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (float(value_db) / 10.0)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    # CN(0, 1): unit variance per complex entry
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * math.sqrt(0.5)


def _positive(name: str, value: float, *, allow_zero: bool = False) -> float:
    value = float(value)
    ok = value >= 0.0 if allow_zero else value > 0.0
    if not math.isfinite(value) or not ok:
        raise ValueError(f"{name} must be finite and {'>=' if allow_zero else '>'} 0, got {value!r}")
    return value


def _count(name: str, value: int, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


# ---------------------------------------------------------------------------
# Gaussian processes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianScenario:
    sigma0_sq: float = 1.0
    delta_var: float = 1.0
    n: int = 200

    kind = "gaussian"

    def __post_init__(self):
        _positive("sigma0_sq", self.sigma0_sq)
        _positive("delta_var", self.delta_var, allow_zero=True)
        _count("n", self.n)

    @property
    def sigma1_sq(self) -> float:
        return self.sigma0_sq + self.delta_var

    @property
    def alpha(self) -> float:
        return 1.0 / math.sqrt(1.0 + self.delta_var / self.sigma0_sq)

    @property
    def dim_variance(self) -> float:
        """Null variance of each real sample fed to the comparator."""
        return self.sigma0_sq

    @property
    def iid(self) -> bool:
        return True

    def comparator(self, c: float) -> ComparatorConfig:
        return ComparatorConfig(c=c, sigma0=math.sqrt(self.dim_variance))

    def sample_batch(self, rng: np.random.Generator, hypothesis: Hypothesis, size: int) -> np.ndarray:
        z = rng.standard_normal((size, self.n))
        var = self.sigma1_sq if hypothesis == Hypothesis.H1 else self.sigma0_sq
        return z * math.sqrt(var)

    def describe(self) -> dict:
        return {"kind": self.kind, "sigma0_sq": self.sigma0_sq, "delta_var": self.delta_var, "n": self.n}


def generate_gaussian(sc: GaussianScenario, hypothesis: Hypothesis, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. normal draws with the variance of the given hypothesis."""
    return sc.sample_batch(rng, Hypothesis(hypothesis), 1)[0]


# ---------------------------------------------------------------------------
# Massive MIMO uplink training
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MimoScenario:
    """Uplink pilot phase at an ``M``-antenna base station over ``N`` coherence blocks.

    ``jammer_power`` is the transmit power of *each* jammer antenna, so the
    jamming variance seen per receive antenna is
    ``jammer_antennas * jammer_power * jammer_beta``. A single-antenna jammer
    replays the pilot of ``spoofed_user`` by default; a multi-antenna jammer
    sends independent random QPSK symbols from every antenna.
    """

    M: int = 32
    N: int = 1
    K: int = 5
    tau: int = 5
    user_powers: tuple = ()
    user_betas: tuple = ()
    jammer_power: float = 1.0
    jammer_beta: float = 1.0
    jammer_antennas: int = 1
    noise_var: float = 1.0
    use_all_pilots: bool = True
    spoofed_user: int = 0
    jammer_pilot: str = "auto"

    kind = "mimo"

    def __post_init__(self):
        for name in ("M", "N", "K", "tau", "jammer_antennas"):
            _count(name, getattr(self, name))
        if not self.user_powers:
            object.__setattr__(self, "user_powers", (1.0,) * self.K)
        if not self.user_betas:
            object.__setattr__(self, "user_betas", (1.0,) * self.K)
        object.__setattr__(self, "user_powers", tuple(float(p) for p in self.user_powers))
        object.__setattr__(self, "user_betas", tuple(float(b) for b in self.user_betas))
        if len(self.user_powers) != self.K or len(self.user_betas) != self.K:
            raise ValueError("user_powers and user_betas must have K entries")
        for p in self.user_powers + self.user_betas:
            _positive("user power/beta", p, allow_zero=True)
        _positive("jammer_power", self.jammer_power, allow_zero=True)
        _positive("jammer_beta", self.jammer_beta, allow_zero=True)
        _positive("noise_var", self.noise_var)
        if self.K > self.tau:
            raise ValueError(f"K={self.K} users need at least K orthogonal pilot symbols, tau={self.tau}")
        if self.use_all_pilots and self.K != self.tau:
            raise ValueError("use_all_pilots requires K == tau (otherwise the samples are correlated)")
        if not 0 <= self.spoofed_user < self.K:
            raise ValueError(f"spoofed_user must index one of the K={self.K} users")
        mode = self.jammer_pilot
        if mode == "auto":
            mode = "spoof" if self.jammer_antennas == 1 else "random"
            object.__setattr__(self, "jammer_pilot", mode)
        if mode not in ("spoof", "random"):
            raise ValueError(f"jammer_pilot must be 'auto', 'spoof' or 'random', got {mode!r}")
        if mode == "spoof" and self.jammer_antennas != 1:
            raise ValueError("a pilot-spoofing jammer has a single antenna")

    @property
    def symbols_per_block(self) -> int:
        return self.tau if self.use_all_pilots else 1

    @property
    def n(self) -> int:
        return 2 * self.M * self.N * self.symbols_per_block

    @property
    def sigma0_sq(self) -> float:
        return sum(p * b for p, b in zip(self.user_powers, self.user_betas)) + self.noise_var

    @property
    def jamming_variance(self) -> float:
        return self.jammer_antennas * self.jammer_power * self.jammer_beta

    @property
    def sigma1_sq(self) -> float:
        return self.sigma0_sq + self.jamming_variance

    @property
    def alpha(self) -> float:
        return math.sqrt(self.sigma0_sq / self.sigma1_sq)

    @property
    def dim_variance(self) -> float:
        return 0.5 * self.sigma0_sq

    @property
    def iid(self) -> bool:
        # the jammer channel is shared by all pilot symbols of a block
        return self.symbols_per_block == 1 or self.jamming_variance == 0.0

    def comparator(self, c: float) -> ComparatorConfig:
        return ComparatorConfig(c=c, sigma0=math.sqrt(self.dim_variance))

    def pilots(self) -> np.ndarray:
        """``K x T`` unit-modulus pilot matrix with mutually orthogonal rows (DFT rows)."""
        k = np.arange(self.K)[:, None]
        t = np.arange(self.symbols_per_block)[None, :]
        return np.exp(-2j * np.pi * k * t / self.tau)

    def sample_batch(self, rng: np.random.Generator, hypothesis: Hypothesis, size: int) -> np.ndarray:
        T = self.symbols_per_block
        shape = (size, self.N)
        amp = np.sqrt(np.asarray(self.user_betas) * np.asarray(self.user_powers))
        S = self.pilots()
        H = _complex_normal(rng, shape + (self.M, self.K)) * amp
        W = _complex_normal(rng, shape + (self.M, T)) * math.sqrt(self.noise_var)
        Y = H @ S + W
        if hypothesis == Hypothesis.H1 and self.jamming_variance > 0.0:
            G = _complex_normal(rng, shape + (self.M, self.jammer_antennas))
            if self.jammer_pilot == "spoof":
                SJ = np.broadcast_to(S[self.spoofed_user], shape + (1, T))
            else:
                SJ = _QPSK[rng.integers(0, 4, size=shape + (self.jammer_antennas, T))]
            Y = Y + math.sqrt(self.jammer_beta * self.jammer_power) * (G @ SJ)
        # columns ordered (block, symbol), each column is the M antennas;
        # all real parts first, then all imaginary parts
        cols = np.swapaxes(Y, -1, -2).reshape(size, -1)
        return np.concatenate([cols.real, cols.imag], axis=1)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "M": self.M,
            "N": self.N,
            "K": self.K,
            "tau": self.tau,
            "user_powers": list(self.user_powers),
            "user_betas": list(self.user_betas),
            "jammer_power": self.jammer_power,
            "jammer_beta": self.jammer_beta,
            "jammer_antennas": self.jammer_antennas,
            "jammer_pilot": self.jammer_pilot,
            "noise_var": self.noise_var,
            "use_all_pilots": self.use_all_pilots,
        }


def simulate_mimo_block(sc: MimoScenario, hypothesis: Hypothesis, rng: np.random.Generator) -> np.ndarray:
    """One realisation of the stacked length-``n`` real pilot observation."""
    return sc.sample_batch(rng, Hypothesis(hypothesis), 1)[0]


# ---------------------------------------------------------------------------
# Wireless sensor network probing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WsnScenario:
    """Sensors observing a weak transmitter that sends ``tau`` known symbols.

    In the complex model the noise is ``CN(0, 1)`` and the transmitted
    symbols have unit modulus, so ``snr`` is the per-symbol receive SNR; the
    default probe is the constant ``(1 + j)/sqrt(2)``. In the real model the
    noise is ``N(0, 1)``, the fading gain is ``N(0, 1)`` and the probe is 1.
    The channel stays constant over the ``tau`` symbols of one probe.
    """

    n_sensors: int = 20
    snr: float = 10 ** -0.4
    tau: int = 1
    complex_model: bool = True
    probe: Optional[tuple] = field(default=None)

    kind = "wsn"

    def __post_init__(self):
        _count("n_sensors", self.n_sensors)
        _count("tau", self.tau)
        _positive("snr", self.snr, allow_zero=True)
        if self.probe is None:
            sym = (1 + 1j) / math.sqrt(2.0) if self.complex_model else 1.0
            object.__setattr__(self, "probe", (sym,) * self.tau)
        probe = tuple(complex(x) if self.complex_model else float(x) for x in self.probe)
        if len(probe) != self.tau:
            raise ValueError(f"probe must have tau={self.tau} symbols")
        if not all(abs(abs(x) - 1.0) < 1e-9 for x in probe):
            raise ValueError("probe symbols must have unit modulus")
        object.__setattr__(self, "probe", probe)

    @property
    def dims(self) -> int:
        return 2 if self.complex_model else 1

    @property
    def n(self) -> int:
        return self.n_sensors * self.dims * self.tau

    @property
    def sigma0_sq(self) -> float:
        return 1.0

    @property
    def sigma1_sq(self) -> float:
        return 1.0 + self.snr

    @property
    def alpha(self) -> float:
        return 1.0 / math.sqrt(1.0 + self.snr)

    @property
    def dim_variance(self) -> float:
        return 0.5 if self.complex_model else 1.0

    @property
    def iid(self) -> bool:
        return self.tau == 1 or self.snr == 0.0

    def comparator(self, c: float) -> ComparatorConfig:
        return ComparatorConfig(c=c, sigma0=math.sqrt(self.dim_variance))

    def sample_batch(self, rng: np.random.Generator, hypothesis: Hypothesis, size: int) -> np.ndarray:
        shape = (size, self.n_sensors)
        x = np.asarray(self.probe)
        if self.complex_model:
            w = _complex_normal(rng, shape + (self.tau,))
        else:
            w = rng.standard_normal(shape + (self.tau,))
        y = w
        if hypothesis == Hypothesis.H1 and self.snr > 0.0:
            h = _complex_normal(rng, shape) if self.complex_model else rng.standard_normal(shape)
            y = w + math.sqrt(self.snr) * h[..., None] * x
        if self.complex_model:
            # sensor-major: each sensor reports its tau real parts then its tau imaginary parts
            y = np.concatenate([y.real, y.imag], axis=-1)
        return y.reshape(size, self.n)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "n_sensors": self.n_sensors,
            "snr": self.snr,
            "tau": self.tau,
            "complex_model": self.complex_model,
        }


def wsn_samples(sc: WsnScenario, hypothesis: Hypothesis, rng: np.random.Generator) -> np.ndarray:
    """Unquantized sensor observations for one probe, sensor-major."""
    return sc.sample_batch(rng, Hypothesis(hypothesis), 1)[0]


def simulate_wsn_probe(sc: WsnScenario, hypothesis: Hypothesis, rng: np.random.Generator, c: float = 1.6) -> np.ndarray:
    """Bits reported by all sensors for one probe (each sensor quantizes locally)."""
    return quantize_block(wsn_samples(sc, hypothesis, rng), sc.comparator(c))
