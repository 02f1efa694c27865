"""Monte-Carlo harness for the detector and the unquantized benchmark.

Trials are processed in fixed-size batches. Every batch owns private random
streams derived from ``(seed, batch index, purpose[, hypothesis])`` through
:class:`numpy.random.SeedSequence`, so a run is reproducible bit for bit and
does not depend on the order in which batches are evaluated. With
``paired=True`` (the default) both hypotheses draw their background samples
from the same stream and the benchmark consumes exactly the samples the
comparators see.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .baseline import ChiSquareTestParams, unquantized_detection_probability
from .detector import (
    BscChannel,
    DetectorParams,
    Hypothesis,
    decide_counts,
    detection_probability,
    detection_probability_bsc,
)

__all__ = ["TrialReport", "run_monte_carlo", "run_roc", "make_rng", "ci_halfwidth"]

_SAMPLES, _FLIPS, _TIES = 0, 1, 2


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def ci_halfwidth(p: float, trials: int) -> float:
    """Three-sigma binomial half-width ``3 sqrt(p (1 - p) / trials)``."""
    return 3.0 * math.sqrt(max(p * (1.0 - p), 0.0) / trials)


@dataclass
class TrialReport:
    scenario: dict
    seed: int
    trials: int
    p_f: float
    c: float
    gamma: int
    zeta: float
    empirical_pf: float
    pf_ci: float
    empirical_pd: float
    pd_ci: float
    theory_pd: Optional[float]
    theory_exact: bool
    epsilon: Optional[float] = None
    baseline_pf: Optional[float] = None
    baseline_pd: Optional[float] = None
    baseline_theory_pd: Optional[float] = None
    wall_time: float = field(default=0.0, compare=False)

    def as_record(self, *, timing: bool = False) -> dict:
        rec = asdict(self)
        if not timing:
            rec.pop("wall_time")
        return rec


def _default_batch_size(n: int) -> int:
    return max(1, (1 << 21) // n)


def run_roc(
    scenario,
    p_fs: Sequence[float],
    trials: int,
    seed: int,
    *,
    c: float = 1.6,
    channel: Optional[BscChannel] = None,
    baseline: bool = False,
    paired: bool = True,
    batch_size: Optional[int] = None,
) -> list[TrialReport]:
    """Simulate both hypotheses once and evaluate every false-alarm target on the same draws."""
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    trials = int(trials)
    p_fs = [float(p) for p in p_fs]
    if not p_fs:
        raise ValueError("at least one false-alarm target is required")
    start = time.perf_counter()

    n = scenario.n
    cfg = scenario.comparator(c)
    detectors = [DetectorParams.design(n, p, c, channel) for p in p_fs]
    benches = [ChiSquareTestParams.for_real_samples(p, n, scenario.dim_variance) for p in p_fs] if baseline else []
    bsize = batch_size or _default_batch_size(n)

    hits = np.zeros((2, len(p_fs)), dtype=np.int64)
    bench_hits = np.zeros((2, len(p_fs)), dtype=np.int64)
    for b, lo in enumerate(range(0, trials, bsize)):
        size = min(bsize, trials - lo)
        for hyp in (Hypothesis.H0, Hypothesis.H1):
            key = (b, _SAMPLES) if paired else (b, _SAMPLES, int(hyp))
            x = scenario.sample_batch(make_rng(seed, *key), hyp, size)
            bits = np.abs(x) > cfg.half_width
            if channel is not None and channel.epsilon > 0.0:
                bits ^= make_rng(seed, b, _FLIPS, int(hyp)).random(bits.shape) < channel.epsilon
            counts = bits.sum(axis=1)
            u = make_rng(seed, b, _TIES, int(hyp)).random(size)
            for i, det in enumerate(detectors):
                hits[hyp, i] += int(decide_counts(counts, det, u).sum())
            if benches:
                energy = np.einsum("ij,ij->i", x, x)
                for i, bench in enumerate(benches):
                    bench_hits[hyp, i] += int(bench.energies_exceed(energy).sum())

    elapsed = time.perf_counter() - start
    alpha = scenario.alpha
    sigma0_sq = 2.0 * scenario.dim_variance
    reports = []
    for i, det in enumerate(detectors):
        pf_hat = hits[0, i] / trials
        pd_hat = hits[1, i] / trials
        if channel is None:
            theory = detection_probability(n, det.p_f, c, alpha)
        else:
            theory = detection_probability_bsc(n, det.p_f, c, alpha, channel)
        rep = TrialReport(
            scenario=scenario.describe(),
            seed=seed,
            trials=trials,
            p_f=det.p_f,
            c=c,
            gamma=det.gamma,
            zeta=det.zeta,
            empirical_pf=pf_hat,
            pf_ci=ci_halfwidth(pf_hat, trials),
            empirical_pd=pd_hat,
            pd_ci=ci_halfwidth(pd_hat, trials),
            theory_pd=theory,
            theory_exact=bool(scenario.iid),
            epsilon=None if channel is None else channel.epsilon,
            wall_time=elapsed,
        )
        if benches:
            rep.baseline_pf = bench_hits[0, i] / trials
            rep.baseline_pd = bench_hits[1, i] / trials
            rep.baseline_theory_pd = unquantized_detection_probability(det.p_f, n, sigma0_sq, sigma0_sq / alpha**2)
        reports.append(rep)
    return reports


def run_monte_carlo(scenario, trials: int, seed: int, *, p_f: float = 0.05, **kwargs) -> TrialReport:
    """Single false-alarm target version of :func:`run_roc`."""
    return run_roc(scenario, [p_f], trials, seed, **kwargs)[0]
