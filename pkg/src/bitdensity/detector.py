"""Bit density detection: a randomized binomial Neyman-Pearson test.

The detector counts the ones in an observed bit sequence and compares the
count with an integer threshold ``gamma``. A count equal to ``gamma`` is
resolved by a biased coin with success probability ``zeta``, which makes the
false-alarm rate exactly the design value despite the discreteness of the
binomial law.

Everything is parameterised on the per-bit null success rate ``theta0`` so the
same machinery serves the error-free comparator output (``theta0 = 2Q(c)``) and
bits received through a binary symmetric channel.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .numerics import (
    NumericalError,
    binomial_inverse_cdf,
    binomial_pmf,
    binomial_sf,
    check_count,
    check_probability,
    q_function,
    q_inverse,
)
from .quantizer import alt_success_rate, null_success_rate

__all__ = [
    "Hypothesis",
    "Decision",
    "BscChannel",
    "DetectorParams",
    "threshold_for_rate",
    "zeta_for_rate",
    "detection_probability_for_rates",
    "compute_threshold",
    "approx_threshold",
    "compute_zeta",
    "decide",
    "decide_counts",
    "false_alarm_probability",
    "detection_probability",
    "detection_probability_limit_c",
    "bsc_success_rates",
    "detection_probability_bsc",
    "optimal_c",
]


class Hypothesis(enum.IntEnum):
    H0 = 0
    H1 = 1


@dataclass(frozen=True)
class Decision:
    hypothesis: Hypothesis
    randomized: bool = False


@dataclass(frozen=True)
class BscChannel:
    """Binary symmetric channel flipping each bit with probability ``epsilon``."""

    epsilon: float

    def __post_init__(self):
        eps = check_probability("epsilon", self.epsilon)
        if eps > 0.5:
            raise ValueError(f"epsilon must lie in [0, 0.5], got {eps!r}")

    def transmit_rate(self, theta: float) -> float:
        """Success rate after the channel for an input success rate ``theta``."""
        return self.epsilon * (1.0 - theta) + (1.0 - self.epsilon) * theta

    def transmit(self, bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.uint8)
        flips = rng.random(bits.shape) < self.epsilon
        return bits ^ flips.astype(np.uint8)


def _check_c(c: float, *, allow_zero: bool = False) -> float:
    c = float(c)
    if not math.isfinite(c) or c < 0.0 or (c == 0.0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"c must be finite and {bound}, got {c!r}")
    return c


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    return alpha


# ---------------------------------------------------------------------------
# Rate-level machinery
# ---------------------------------------------------------------------------

def threshold_for_rate(n: int, p_f: float, theta0: float) -> int:
    n = check_count("n", n, minimum=1)
    p_f = check_probability("p_f", p_f, open_low=True, open_high=True)
    return binomial_inverse_cdf(1.0 - p_f, n, theta0)


def zeta_for_rate(n: int, p_f: float, theta0: float, gamma: int) -> float:
    """Tie-break probability making ``P(S > g) + zeta P(S = g) = p_f`` under H0."""
    n = check_count("n", n, minimum=1)
    p_f = check_probability("p_f", p_f, open_low=True, open_high=True)
    gamma = check_count("gamma", gamma)
    if gamma > n:
        raise ValueError(f"gamma={gamma} exceeds n={n}")
    at = binomial_pmf(gamma, n, theta0)
    if at <= 0.0:
        raise NumericalError(f"P(S_n = {gamma} | H0) vanished; threshold inconsistent with (n={n}, theta0={theta0})")
    zeta = (p_f - binomial_sf(gamma, n, theta0)) / at
    if zeta < -1e-9 or zeta > 1.0 + 1e-9:
        raise NumericalError(f"zeta={zeta} outside [0, 1]; gamma={gamma} is not the design threshold")
    return min(1.0, max(0.0, zeta))


def detection_probability_for_rates(n: int, p_f: float, theta0: float, theta1: float) -> float:
    """Power of the randomized test designed for ``theta0`` when bits follow ``theta1``."""
    gamma = threshold_for_rate(n, p_f, theta0)
    zeta = zeta_for_rate(n, p_f, theta0, gamma)
    theta1 = check_probability("theta1", theta1)
    # zeta * P(S = g | H1); avoids the (theta0/theta1)^g ratio form, which overflows
    return min(1.0, binomial_sf(gamma, n, theta1) + zeta * binomial_pmf(gamma, n, theta1))


# ---------------------------------------------------------------------------
# Parameters of the comparator-driven detector
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetectorParams:
    """Offline design of the detector: everything the decision rule needs."""

    n: int
    p_f: float
    c: float
    gamma: int
    zeta: float
    theta0: float
    channel: Optional[BscChannel] = None

    @classmethod
    def design(cls, n: int, p_f: float, c: float, channel: Optional[BscChannel] = None) -> "DetectorParams":
        c = _check_c(c)
        theta0 = null_success_rate(c)
        if channel is not None:
            theta0 = channel.transmit_rate(theta0)
        gamma = threshold_for_rate(n, p_f, theta0)
        zeta = zeta_for_rate(n, p_f, theta0, gamma)
        return cls(n=int(n), p_f=float(p_f), c=c, gamma=gamma, zeta=zeta, theta0=theta0, channel=channel)

    @property
    def p_bar(self) -> float:
        return 1.0 - self.p_f

    def false_alarm(self) -> float:
        """Closed-form size of the test; equals ``p_f`` up to rounding."""
        return false_alarm_probability(self)

    def power(self, theta1: float) -> float:
        return binomial_sf(self.gamma, self.n, theta1) + self.zeta * binomial_pmf(self.gamma, self.n, theta1)


def compute_threshold(n: int, p_f: float, c: float) -> int:
    """Smallest ``gamma`` with ``P(S_n <= gamma | H0) >= 1 - p_f``."""
    return threshold_for_rate(n, p_f, null_success_rate(_check_c(c)))


def approx_threshold(n: int, p_f: float, c: float) -> int:
    """Normal-approximation threshold ``floor(sqrt(n t (1-t)) Q^-1(p_f) + n t)``, ``t = 2Q(c)``."""
    n = check_count("n", n, minimum=1)
    p_f = check_probability("p_f", p_f, open_low=True, open_high=True)
    c = _check_c(c)
    q = q_function(c)
    theta0 = 2.0 * q
    if n * theta0 * (1.0 - theta0) < 9.0:
        warnings.warn(
            f"normal approximation is poor for n*theta0*(1-theta0)={n * theta0 * (1 - theta0):.3g} < 9",
            stacklevel=2,
        )
    value = math.sqrt(2.0 * n * q * (1.0 - theta0)) * q_inverse(p_f) + 2.0 * n * q
    return int(math.floor(value))


def compute_zeta(n: int, p_f: float, c: float, gamma: int) -> float:
    return zeta_for_rate(n, p_f, null_success_rate(_check_c(c)), gamma)


def false_alarm_probability(params: DetectorParams) -> float:
    return binomial_sf(params.gamma, params.n, params.theta0) + params.zeta * binomial_pmf(
        params.gamma, params.n, params.theta0
    )


# ---------------------------------------------------------------------------
# Decision rule
# ---------------------------------------------------------------------------

def decide(bits: Iterable[int], params: DetectorParams, rng: np.random.Generator) -> Decision:
    """Run the detector on one observed sequence.

    A uniform variate is drawn from ``rng`` only when the count ties the
    threshold, so the random stream is consumed once per tie event.
    """
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.shape[0] != params.n:
        raise ValueError(f"expected {params.n} bits, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bits must be 0 or 1")
    s_n = int(arr.sum())
    if s_n > params.gamma:
        return Decision(Hypothesis.H1)
    if s_n < params.gamma:
        return Decision(Hypothesis.H0)
    x = rng.random()
    return Decision(Hypothesis.H1 if x < params.zeta else Hypothesis.H0, randomized=True)


def decide_counts(counts, params: DetectorParams, uniforms) -> np.ndarray:
    """Vectorised rule on precomputed counts; True where H1 is declared.

    ``uniforms`` supplies one ``U(0, 1)`` draw per count; only entries whose
    count ties ``gamma`` are looked at.
    """
    counts = np.asarray(counts)
    uniforms = np.asarray(uniforms)
    if counts.shape != uniforms.shape:
        raise ValueError("counts and uniforms must have the same shape")
    return (counts > params.gamma) | ((counts == params.gamma) & (uniforms < params.zeta))


# ---------------------------------------------------------------------------
# Closed-form performance
# ---------------------------------------------------------------------------

def detection_probability_limit_c(p_f: float) -> float:
    """Power of the detector when the window collapses (or grows without bound): ``p_f``."""
    return check_probability("p_f", p_f, open_low=True, open_high=True)


def detection_probability(n: int, p_f: float, c: float, alpha: float) -> float:
    alpha = _check_alpha(alpha)
    c = _check_c(c, allow_zero=True)
    if c == 0.0:
        return detection_probability_limit_c(p_f)
    return detection_probability_for_rates(n, p_f, null_success_rate(c), alt_success_rate(c, alpha))


def bsc_success_rates(c: float, alpha: float, channel: BscChannel) -> tuple[float, float]:
    """``(theta0', theta1')``: comparator success rates seen after the channel."""
    c = _check_c(c, allow_zero=True)
    alpha = _check_alpha(alpha)
    return channel.transmit_rate(null_success_rate(c)), channel.transmit_rate(alt_success_rate(c, alpha))


def detection_probability_bsc(n: int, p_f: float, c: float, alpha: float, channel: BscChannel) -> float:
    theta0, theta1 = bsc_success_rates(c, alpha, channel)
    if c == 0.0:
        return detection_probability_limit_c(p_f)
    return detection_probability_for_rates(n, p_f, theta0, theta1)


def optimal_c(n: int, p_f: float, alpha: float, grid) -> float:
    """Grid point maximising :func:`detection_probability`; ties go to the smaller ``c``."""
    values = sorted(float(c) for c in grid)
    if not values:
        raise ValueError("grid must not be empty")
    if values[0] < 0.1 or values[-1] > 4.0:
        raise ValueError("grid must lie within [0.1, 4]")
    best_c, best_pd = values[0], -1.0
    for c in values:
        pd = detection_probability(n, p_f, c, alpha)
        if pd > best_pd:
            best_c, best_pd = c, pd
    return best_c
