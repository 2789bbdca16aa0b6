"""Monte Carlo feasibility probabilities and the capacity search over N.

Random streams
--------------
Trials are grouped in blocks of ``BLOCK_TRIALS``.  Within block ``k`` the
attributes of user ``j`` for every trial in the block come from one stream
keyed ``(seed, method, density, k, j)`` where ``density`` is
``round(P_h * 1e6)``.  Consequences:

* results do not depend on how blocks are spread over workers;
* methods never share random numbers;
* the trial with ``N + 1`` users is the trial with ``N`` users plus one more
  user, so the estimated feasibility probability is nonincreasing in ``N``
  whenever the test itself is monotone under user removal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .approx import approx1_feasible_batch, approx2_capacity, estimate_moments, normal_quantile
from .exact import exact_feasible_batch, hard_feasible_batch
from .geometry import SystemParams, draw_gains, trial_rng

METHODS = ("exact_soft", "hard", "approx1", "approx2")
SIMULATED = ("exact_soft", "hard", "approx1")
METHOD_INDEX = {m: i for i, m in enumerate(METHODS)}

BLOCK_TRIALS = 1000
MAX_USERS = 4096

GainSource = Callable[[SystemParams, int, np.random.Generator], tuple]


def density_key(p_h: float) -> int:
    return int(round(p_h * 1_000_000))


@dataclass(frozen=True)
class FeasibilityCurvePoint:
    n: int
    successes: int
    trials: int
    method: str
    indeterminate: int = 0

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials


@dataclass
class MethodCapacity:
    method: str
    capacity: int
    p_hat_at_n: Optional[float] = None
    p_hat_at_n_plus_1: Optional[float] = None
    trials: Optional[int] = None
    mu: Optional[float] = None
    sigma: Optional[float] = None
    indeterminate: int = 0
    wilson_half_width: Optional[float] = None
    curve: Dict[int, FeasibilityCurvePoint] = field(default_factory=dict, repr=False)


@dataclass
class CapacityResult:
    hotspot_density: float
    seed: int
    methods: Dict[str, MethodCapacity] = field(default_factory=dict)

    def __getitem__(self, method: str) -> MethodCapacity:
        return self.methods[method]


@dataclass
class CapacityCurve:
    params: SystemParams
    seed: int
    results: List[CapacityResult]

    def capacities(self, method: str) -> List[int]:
        return [r[method].capacity for r in self.results]

    @property
    def densities(self) -> List[float]:
        return [r.hotspot_density for r in self.results]


def wilson_half_width(successes: int, trials: int, confidence: float = 0.95) -> float:
    z = normal_quantile(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    return z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom


def _block_gains(params, n, seed, key, block, size, gain_source):
    tm = np.empty((size, n))
    tu = np.empty((size, n))
    for j in range(n):
        tm[:, j], tu[:, j] = gain_source(params, size, trial_rng(seed, *key, block, j))
    return tm, tu


def _block_tally(job):
    params, n, method, seed, key, block, size, gain_source = job
    tm, tu = _block_gains(params, n, seed, key, block, size, gain_source)
    k = params.k_prime
    if method == "exact_soft":
        ok, bad = exact_feasible_batch(tm, tu, k)
    elif method == "hard":
        ok, bad = hard_feasible_batch(tm, tu, k)
    elif method == "approx1":
        ok, _ = approx1_feasible_batch(tm, tu, k)
        bad = np.zeros_like(ok)
    else:
        raise ValueError(f"no simulation route for method {method!r}")
    return int(ok.sum()), int(bad.sum())


def feasibility_probability(params: SystemParams, n: int, method: str, trials: Optional[int] = None,
                            seed: int = 0, *, gain_source: GainSource = draw_gains,
                            executor=None) -> FeasibilityCurvePoint:
    """Fraction of ``trials`` random user sets of size ``n`` that are feasible."""
    if method not in SIMULATED:
        raise ValueError(f"method must be one of {SIMULATED}, got {method!r}")
    if n < 1:
        raise ValueError("n must be at least 1")
    trials = params.trials if trials is None else int(trials)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    key = (METHOD_INDEX[method], density_key(params.hotspot_density))
    jobs = [(params, n, method, seed, key, b, min(BLOCK_TRIALS, trials - start), gain_source)
            for b, start in enumerate(range(0, trials, BLOCK_TRIALS))]
    tallies = executor.map(_block_tally, jobs) if executor is not None else map(_block_tally, jobs)
    ok = bad = 0
    for s, i in tallies:
        ok += s
        bad += i
    return FeasibilityCurvePoint(n=n, successes=ok, trials=trials, method=method, indeterminate=bad)


def find_capacity(params: SystemParams, method: str, seed: int = 0, *, moment_samples: int = 100_000,
                  gain_source: GainSource = draw_gains, executor=None) -> MethodCapacity:
    """Largest N whose feasibility probability reaches ``params.confidence``.

    Doubling from N = 1 brackets the answer, bisection narrows it, and a scan
    of two users either side confirms it.
    """
    if method == "approx2":
        moments = estimate_moments(params, moment_samples, seed,
                                   METHOD_INDEX[method], density_key(params.hotspot_density))
        return MethodCapacity(method=method,
                              capacity=approx2_capacity(moments, params.k_prime, params.confidence),
                              mu=moments.mu, sigma=moments.sigma)

    curve: Dict[int, FeasibilityCurvePoint] = {}

    def passes(n: int) -> bool:
        if n not in curve:
            curve[n] = feasibility_probability(params, n, method, seed=seed,
                                               gain_source=gain_source, executor=executor)
        return curve[n].p_hat >= params.confidence

    if not passes(1):
        best = 0
    else:
        lo, hi = 1, 2
        while passes(hi):
            lo, hi = hi, hi * 2
            if hi > MAX_USERS:
                raise RuntimeError(f"capacity exceeds {MAX_USERS} users")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if passes(mid):
                lo = mid
            else:
                hi = mid
        window = range(max(1, lo - 2), lo + 3)
        confirmed = [n for n in window if passes(n) and not passes(n + 1)]
        best = max(confirmed) if confirmed else lo

    at_n = curve.get(best)
    at_next = curve.get(best + 1) or curve.setdefault(
        best + 1, feasibility_probability(params, best + 1, method, seed=seed,
                                          gain_source=gain_source, executor=executor))
    return MethodCapacity(
        method=method,
        capacity=best,
        p_hat_at_n=at_n.p_hat if at_n else None,
        p_hat_at_n_plus_1=at_next.p_hat,
        trials=params.trials,
        indeterminate=sum(p.indeterminate for p in curve.values()),
        wilson_half_width=wilson_half_width(at_n.successes, at_n.trials) if at_n else None,
        curve=curve,
    )


def sweep_hotspot_density(params: SystemParams, densities: Sequence[float], methods: Sequence[str],
                          seed: int = 0, *, moment_samples: int = 100_000, executor=None,
                          progress: Optional[Callable[[CapacityResult, MethodCapacity], None]] = None,
                          ) -> CapacityCurve:
    if not densities:
        raise ValueError("need at least one hotspot density")
    unknown = set(methods) - set(METHODS)
    if unknown or not methods:
        raise ValueError(f"methods must be a nonempty subset of {METHODS}, got {list(methods)}")
    results = []
    for p_h in sorted(densities):
        point = replace(params, hotspot_density=float(p_h))
        result = CapacityResult(hotspot_density=float(p_h), seed=seed)
        for method in (m for m in METHODS if m in methods):
            mc = find_capacity(point, method, seed, moment_samples=moment_samples, executor=executor)
            result.methods[method] = mc
            if progress is not None:
                progress(result, mc)
        results.append(result)
    return CapacityCurve(params=params, seed=seed, results=results)
