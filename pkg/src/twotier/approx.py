"""Averaged-weight feasibility test and the Gaussian closed-form capacity.

Both rest on the per-user macrocell share ``r_i = T_Mi / (T_Mi + T_mui)``.
With ``A = sum r_i`` and ``B = N - A`` the averaged-weight test is
``A^2 + B^2 < N K'``.  Linearizing ``sqrt(A^2 + B^2)`` about its mean and
treating ``A`` as Gaussian gives a closed-form bound on ``N`` in terms of the
mean ``mu`` and standard deviation ``sigma`` of ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .exact import FeasibilityVerdict, GainTable
from .geometry import SystemParams, draw_gains, trial_rng

_STD_NORMAL = NormalDist()

# Users per moment-estimation chunk; each chunk owns a derived seed.
MOMENT_CHUNK = 100_000


@dataclass(frozen=True)
class MomentEstimate:
    mu: float
    sigma: float
    samples: int

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def macro_share(t_macro, t_micro):
    t_macro = np.asarray(t_macro, dtype=float)
    return t_macro / (t_macro + np.asarray(t_micro, dtype=float))


def approx1_feasible_batch(t_macro: np.ndarray, t_micro: np.ndarray, k_prime: float):
    """Returns ``(feasible, margin)`` for a ``(trials, n)`` batch."""
    t_macro = np.asarray(t_macro, dtype=float)
    t_micro = np.asarray(t_micro, dtype=float)
    total = t_macro + t_micro
    a = np.sum(t_macro / total, axis=-1)
    b = np.sum(t_micro / total, axis=-1)
    n = t_macro.shape[-1]
    margin = n * k_prime - (a * a + b * b)
    return margin > 0, margin


def approx1_feasible(gains: GainTable, k_prime: float) -> FeasibilityVerdict:
    feasible, margin = approx1_feasible_batch(gains.t_macro, gains.t_micro, k_prime)
    return FeasibilityVerdict(feasible=bool(feasible), diagnostic=float(margin))


def normal_quantile(alpha: float) -> float:
    """``alpha``-th percentile of the standard normal (Wichura's AS241 in the stdlib)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return _STD_NORMAL.inv_cdf(alpha)


def estimate_moments(params: SystemParams, sample_count: int, seed: int, *key: int) -> MomentEstimate:
    """Monte Carlo mean and (unbiased) standard deviation of the macrocell share.

    Samples are drawn in chunks of ``MOMENT_CHUNK`` users; chunk ``c`` uses the
    stream keyed ``(seed, *key, c)`` so the result is independent of how the
    chunks are scheduled.  Running sums are combined with Chan's update.
    """
    if sample_count < 2:
        raise ValueError("need at least two samples")
    count, mean, m2 = 0, 0.0, 0.0
    for c, start in enumerate(range(0, sample_count, MOMENT_CHUNK)):
        size = min(MOMENT_CHUNK, sample_count - start)
        r = macro_share(*draw_gains(params, size, trial_rng(seed, *key, c)))
        c_mean = float(r.mean())
        c_m2 = float(np.sum((r - c_mean) ** 2))
        delta = c_mean - mean
        total = count + size
        mean += delta * size / total
        m2 += c_m2 + delta * delta * count * size / total
        count = total
    return MomentEstimate(mu=mean, sigma=math.sqrt(m2 / (count - 1)), samples=count)


def _shape_terms(mu: float):
    spread = math.sqrt(1.0 - 2.0 * mu + 2.0 * mu * mu)  # |C| / N
    return spread, abs(2.0 * mu - 1.0)


def approx2_bound(moments: MomentEstimate, k_prime: float, alpha: float) -> float:
    """Real-valued upper bound on ``N`` before rounding down."""
    spread, skew = _shape_terms(moments.mu)
    numer = math.sqrt(k_prime) - normal_quantile(alpha) * moments.sigma * skew / spread
    if numer <= 0:
        return 0.0
    return (numer / spread) ** 2


def approx2_capacity(moments: MomentEstimate, k_prime: float, alpha: float) -> int:
    return max(0, math.floor(approx2_bound(moments, k_prime, alpha)))


def gaussian_feasibility_probability(moments: MomentEstimate, n: int, k_prime: float) -> float:
    """P(Z < sqrt(n K')) for the linearized statistic ``Z``.

    ``Z`` has mean ``|C| = n sqrt(1 - 2mu + 2mu^2)`` and standard deviation
    ``n^{3/2} sigma |2mu - 1| / |C|``.
    """
    spread, skew = _shape_terms(moments.mu)
    mean_z = n * spread
    std_z = n ** 1.5 * moments.sigma * skew / mean_z
    threshold = math.sqrt(n * k_prime)
    if std_z == 0:
        return 1.0 if mean_z < threshold else 0.0
    return _STD_NORMAL.cdf((threshold - mean_z) / std_z)
