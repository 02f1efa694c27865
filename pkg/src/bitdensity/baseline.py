"""Unquantized energy detector used as the full-resolution benchmark.

Under H0 the stacked real samples are i.i.d. ``N(0, sigma0_sq / 2)``, so their
energy divided by ``sigma0_sq / 2`` is chi-square with one degree of freedom
per real dimension. The threshold is set on that law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detector import Decision, Hypothesis
from .numerics import check_count, check_probability, chi_square_inverse_cdf, chi_square_sf

__all__ = [
    "ChiSquareTestParams",
    "unquantized_threshold",
    "unquantized_decide",
    "unquantized_detection_probability",
]


def _check_variance(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")
    return value


def unquantized_threshold(p_f: float, dof: int, sigma0_sq: float) -> float:
    """Energy threshold exceeded under H0 with probability ``p_f``.

    ``sigma0_sq`` is the complex-model variance; each real dimension carries half of it.
    """
    p_f = check_probability("p_f", p_f, open_low=True, open_high=True)
    dof = check_count("dof", dof, minimum=1)
    sigma0_sq = _check_variance("sigma0_sq", sigma0_sq)
    return 0.5 * sigma0_sq * chi_square_inverse_cdf(1.0 - p_f, dof)


@dataclass(frozen=True)
class ChiSquareTestParams:
    dof: int
    threshold: float
    sigma0_sq: float
    p_f: float

    @classmethod
    def design(cls, p_f: float, dof: int, sigma0_sq: float) -> "ChiSquareTestParams":
        return cls(dof=int(dof), threshold=unquantized_threshold(p_f, dof, sigma0_sq), sigma0_sq=float(sigma0_sq), p_f=float(p_f))

    @classmethod
    def for_real_samples(cls, p_f: float, dof: int, variance: float) -> "ChiSquareTestParams":
        """Design for real samples with per-dimension null variance ``variance``."""
        return cls.design(p_f, dof, 2.0 * _check_variance("variance", variance))

    def energies_exceed(self, energies) -> np.ndarray:
        return np.asarray(energies) > self.threshold


def unquantized_decide(samples, params: ChiSquareTestParams) -> Decision:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != params.dof:
        raise ValueError(f"expected {params.dof} samples, got shape {arr.shape}")
    energy = float(np.dot(arr, arr))
    return Decision(Hypothesis.H1 if energy > params.threshold else Hypothesis.H0)


def unquantized_detection_probability(p_f: float, dof: int, sigma0_sq: float, sigma1_sq: float) -> float:
    """Power of the energy test when the true complex-model variance is ``sigma1_sq``."""
    thr = unquantized_threshold(p_f, dof, sigma0_sq)
    sigma1_sq = _check_variance("sigma1_sq", sigma1_sq)
    return chi_square_sf(thr / (0.5 * sigma1_sq), dof)
