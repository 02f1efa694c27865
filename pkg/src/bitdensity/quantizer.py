"""One-bit window comparator and the success rates it induces on Gaussian input."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import q_function

__all__ = [
    "ComparatorConfig",
    "quantize",
    "quantize_block",
    "null_success_rate",
    "alt_success_rate",
    "variance_ratio",
]


@dataclass(frozen=True)
class ComparatorConfig:
    """Window comparator with thresholds ``+/- c * sigma0``.

    ``sigma0`` is the standard deviation of the *real-valued* samples fed to
    the comparator under the null hypothesis. For complex baseband models that
    is the per-dimension value ``sqrt(sigma0_sq / 2)``.
    """

    c: float
    sigma0: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.c) or self.c < 0.0:
            raise ValueError(f"c must be finite and >= 0, got {self.c!r}")
        if not math.isfinite(self.sigma0) or self.sigma0 <= 0.0:
            raise ValueError(f"sigma0 must be finite and > 0, got {self.sigma0!r}")

    @property
    def half_width(self) -> float:
        return self.c * self.sigma0

    @property
    def upper(self) -> float:
        return self.half_width

    @property
    def lower(self) -> float:
        return -self.half_width


def quantize(sample: float, cfg: ComparatorConfig) -> int:
    """1 if ``|sample|`` is strictly outside the window, else 0."""
    sample = float(sample)
    if not math.isfinite(sample):
        raise ValueError(f"sample must be finite, got {sample!r}")
    return int(abs(sample) > cfg.half_width)


def quantize_block(samples, cfg: ComparatorConfig) -> np.ndarray:
    """Element-wise :func:`quantize`; returns a ``uint8`` array of the same shape."""
    arr = np.asarray(samples, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    return (np.abs(arr) > cfg.half_width).astype(np.uint8)


def null_success_rate(c: float) -> float:
    """Probability the comparator fires on ``N(0, sigma0^2)`` input: ``2 Q(c)``."""
    c = float(c)
    if not math.isfinite(c) or c < 0.0:
        raise ValueError(f"c must be finite and >= 0, got {c!r}")
    return min(1.0, 2.0 * q_function(c))


def alt_success_rate(c: float, alpha: float) -> float:
    """Firing probability on ``N(0, sigma1^2)`` input with ``alpha = sigma0/sigma1``."""
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    c = float(c)
    if not math.isfinite(c) or c < 0.0:
        raise ValueError(f"c must be finite and >= 0, got {c!r}")
    return min(1.0, 2.0 * q_function(alpha * c))


def variance_ratio(sigma0_sq: float, sigma1_sq: float) -> float:
    """``alpha = sigma0 / sigma1`` from the two variances (requires ``sigma1_sq >= sigma0_sq``)."""
    if sigma0_sq <= 0.0:
        raise ValueError(f"sigma0_sq must be > 0, got {sigma0_sq!r}")
    if sigma1_sq < sigma0_sq:
        raise ValueError("alternative variance must not be below the null variance")
    return math.sqrt(sigma0_sq / sigma1_sq)
