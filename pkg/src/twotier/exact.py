"""Exact power-control feasibility for soft and hard handoff.

Soft handoff: both bases despread every user and the two streams are
co-phased and combined with path-gain weights.  Fixing every user's SINR at
the target gives the linear system ``A P = (eta W / K') 1``.

``A = diag(1/a) M`` with ``a_i = T_Mi + T_mui`` and ``M`` a symmetric matrix
with nonpositive off-diagonal entries.  Positive powers exist iff ``M`` is
positive definite, i.e. iff every leading principal minor of ``A`` is
positive.  ``det(A) > 0`` alone is necessary but not sufficient: for large N
(roughly twice the pole capacity) two eigenvalues can go negative together.

Hard handoff: each user is served only by the base with the larger path gain.

Thermal noise ``eta W`` is 1 in internal units.  Functions with a ``_batch``
suffix take gain arrays of shape ``(trials, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

# Row-normalized |det| below this is treated as numerically singular.
SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class GainTable:
    t_macro: np.ndarray
    t_micro: np.ndarray

    def __post_init__(self):
        tm = np.asarray(self.t_macro, dtype=float).ravel()
        tu = np.asarray(self.t_micro, dtype=float).ravel()
        if tm.shape != tu.shape:
            raise ValueError("t_macro and t_micro must have the same length")
        if tm.size == 0:
            raise ValueError("empty gain table")
        if not (np.all(tm > 0) and np.all(tu > 0)):
            raise ValueError("path gains must be strictly positive")
        object.__setattr__(self, "t_macro", tm)
        object.__setattr__(self, "t_micro", tu)

    @property
    def n(self) -> int:
        return self.t_macro.size

    @classmethod
    def from_trial(cls, trial) -> "GainTable":
        return cls(trial.t_macro, trial.t_micro)

    def scaled(self, c: float) -> "GainTable":
        return GainTable(self.t_macro * c, self.t_micro * c)

    def permuted(self, order) -> "GainTable":
        return GainTable(self.t_macro[order], self.t_micro[order])


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of one feasibility test.

    ``diagnostic`` is det(A) for the matrix tests and the margin ``N K' - LHS``
    for the averaged-weight test.  ``log_magnitude`` is ``log|det(A)|`` where a
    determinant was formed.  Indeterminate outcomes are never feasible.
    """

    feasible: bool
    diagnostic: float
    powers: Optional[np.ndarray] = None
    log_magnitude: Optional[float] = None
    indeterminate: bool = False


def combining_weights(t_macro_i, t_micro_i):
    """Squared combiner magnitudes ``(T_M/(T_M+T_mu), T_mu/(T_M+T_mu))``."""
    tm = np.asarray(t_macro_i, dtype=float)
    tu = np.asarray(t_micro_i, dtype=float)
    if np.any(tm <= 0) or np.any(tu <= 0):
        raise ValueError("path gains must be strictly positive")
    total = tm + tu
    w_m, w_u = tm / total, tu / total
    if w_m.ndim == 0:
        return float(w_m), float(w_u)
    return w_m, w_u


def _symmetric_soft_matrix(tm: np.ndarray, tu: np.ndarray, k_prime: float) -> np.ndarray:
    total = tm + tu
    m = -(tm[..., :, None] * tm[..., None, :] + tu[..., :, None] * tu[..., None, :]) / k_prime
    n = tm.shape[-1]
    idx = np.arange(n)
    m[..., idx, idx] = total * total
    return m


def _positive_definite(m: np.ndarray) -> np.ndarray:
    """Cholesky test over a stack; per-matrix fallback only if the batch fails."""
    if m.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    # scale to unit diagonal so the test is insensitive to the gain scale
    d = 1.0 / np.sqrt(np.diagonal(m, axis1=-2, axis2=-1))
    m = m * d[..., :, None] * d[..., None, :]
    try:
        np.linalg.cholesky(m)
        return np.ones(m.shape[0], dtype=bool)
    except np.linalg.LinAlgError:
        pass
    out = np.ones(m.shape[0], dtype=bool)
    for i in range(m.shape[0]):
        try:
            np.linalg.cholesky(m[i])
        except np.linalg.LinAlgError:
            out[i] = False
    return out


def _soft_matrix(tm: np.ndarray, tu: np.ndarray, k_prime: float) -> np.ndarray:
    total = tm + tu
    cross = tm[..., :, None] * tm[..., None, :] + tu[..., :, None] * tu[..., None, :]
    a = -cross / (k_prime * total[..., :, None])
    n = tm.shape[-1]
    idx = np.arange(n)
    a[..., idx, idx] = total
    return a


def _hard_matrix(tm: np.ndarray, tu: np.ndarray, k_prime: float) -> np.ndarray:
    # serving-base gain seen by every interferer j, row i = user i's base
    macro = tm >= tu  # ties go to the macrocell
    t_serving_row = np.where(macro[..., :, None], tm[..., None, :], tu[..., None, :])
    a = -t_serving_row / k_prime
    n = tm.shape[-1]
    idx = np.arange(n)
    a[..., idx, idx] = np.where(macro, tm, tu)
    return a


def build_matrix_A(gains: GainTable, k_prime: float) -> np.ndarray:
    """Soft-handoff power-control matrix, ``n x n``."""
    if k_prime <= 0:
        raise ValueError("k_prime must be positive")
    return _soft_matrix(gains.t_macro, gains.t_micro, k_prime)


def build_matrix_hard(gains: GainTable, k_prime: float) -> np.ndarray:
    if k_prime <= 0:
        raise ValueError("k_prime must be positive")
    return _hard_matrix(gains.t_macro, gains.t_micro, k_prime)


def _signed_logdet(a: np.ndarray):
    """Sign, log|det|, and an indeterminacy flag for a stack of matrices.

    Singularity is judged on the row-normalized matrix (unit diagonal), which
    removes the arbitrary gain scale.
    """
    sign, logdet = np.linalg.slogdet(a)
    diag = np.diagonal(a, axis1=-2, axis2=-1)
    normalized = logdet - np.sum(np.log(np.abs(diag)), axis=-1)
    singular = (sign == 0) | ~np.isfinite(logdet) | (normalized < np.log(SINGULAR_RTOL))
    return sign, logdet, singular


def exact_feasible_batch(t_macro: np.ndarray, t_micro: np.ndarray, k_prime: float, det_only: bool = False):
    """Determinant-sign test on a ``(trials, n)`` batch.

    Unless ``det_only`` is set, matrices with ``det(A) > 0`` must also pass the
    leading-minor check.  Returns ``(feasible, indeterminate)`` boolean arrays.
    """
    t_macro = np.asarray(t_macro, dtype=float)
    t_micro = np.asarray(t_micro, dtype=float)
    sign, _, singular = _signed_logdet(_soft_matrix(t_macro, t_micro, k_prime))
    feasible = (sign > 0) & ~singular
    if not det_only:
        cand = np.flatnonzero(feasible)
        feasible[cand] = _positive_definite(_symmetric_soft_matrix(t_macro[cand], t_micro[cand], k_prime))
    return feasible, singular


def _positive_solve(a: np.ndarray, rhs_scale: float):
    """Solve a stack of systems ``a p = rhs_scale 1``; singular members get NaN."""
    _, _, singular = _signed_logdet(a)
    safe = np.where(singular[..., None, None], np.eye(a.shape[-1]), a)
    rhs = np.full(a.shape[:-1], rhs_scale)[..., None]
    p = np.linalg.solve(safe, rhs)[..., 0]
    p[singular] = np.nan
    feasible = ~singular & np.all(p > 0, axis=-1)
    return p, feasible, singular


def hard_feasible_batch(t_macro: np.ndarray, t_micro: np.ndarray, k_prime: float):
    """Hard-handoff test on a ``(trials, n)`` batch, decided by solving."""
    _, feasible, singular = _positive_solve(_hard_matrix(t_macro, t_micro, k_prime), 1.0 / k_prime)
    return feasible, singular


def solve_powers_batch(t_macro: np.ndarray, t_micro: np.ndarray, k_prime: float):
    """Soft-handoff powers for a batch; returns ``(powers, feasible, indeterminate)``."""
    return _positive_solve(_soft_matrix(t_macro, t_micro, k_prime), 1.0 / k_prime)


def exact_feasible(gains: GainTable, k_prime: float, det_only: bool = False) -> FeasibilityVerdict:
    """Soft-handoff feasibility from the sign of det(A).

    ``det_only=True`` gives the bare sign test, which can report large
    infeasible user sets as feasible (see the module docstring).
    """
    a = build_matrix_A(gains, k_prime)
    sign, logdet, singular = _signed_logdet(a)
    sign, logdet, singular = float(sign), float(logdet), bool(singular)
    with np.errstate(over="ignore"):
        det = sign * float(np.exp(logdet))
    feasible, _ = exact_feasible_batch(gains.t_macro[None], gains.t_micro[None], k_prime, det_only)
    return FeasibilityVerdict(
        feasible=bool(feasible[0]),
        diagnostic=det,
        log_magnitude=logdet,
        indeterminate=singular,
    )


def _verdict_from_solve(a: np.ndarray, k_prime: float) -> FeasibilityVerdict:
    p, feasible, singular = _positive_solve(a[None], 1.0 / k_prime)
    sign, logdet, _ = _signed_logdet(a)
    with np.errstate(over="ignore"):
        det = float(sign) * float(np.exp(logdet))
    return FeasibilityVerdict(
        feasible=bool(feasible[0]),
        diagnostic=det,
        powers=p[0] if feasible[0] else None,
        log_magnitude=float(logdet),
        indeterminate=bool(singular[0]),
    )


def solve_powers(gains: GainTable, k_prime: float) -> FeasibilityVerdict:
    """Transmit powers meeting the SINR target with equality, if all positive."""
    return _verdict_from_solve(build_matrix_A(gains, k_prime), k_prime)


def hard_feasible(gains: GainTable, k_prime: float) -> FeasibilityVerdict:
    """Hard handoff: each user is served by its stronger base only.

    The serving-base combiner weight is 1 and the other is 0, which turns the
    soft-handoff system into ``A_ii = T_s(i),i`` and
    ``A_ij = -T_s(i),j / K'``.  Ties go to the macrocell.
    """
    return _verdict_from_solve(build_matrix_hard(gains, k_prime), k_prime)


def soft_sinr(gains: GainTable, powers: np.ndarray, processing_gain: float) -> np.ndarray:
    """Per-user SINR after path-gain-weighted combining (noise = 1)."""
    tm, tu, p = gains.t_macro, gains.t_micro, np.asarray(powers, dtype=float)
    w_m, w_u = combining_weights(tm, tu)
    rx_m = p @ tm - p * tm  # interference at the macrocell, excluding self
    rx_u = p @ tu - p * tu
    return processing_gain * p * (tm + tu) / (w_m * rx_m + w_u * rx_u + 1.0)


def hard_sinr(gains: GainTable, powers: np.ndarray, processing_gain: float) -> np.ndarray:
    tm, tu, p = gains.t_macro, gains.t_micro, np.asarray(powers, dtype=float)
    macro = tm >= tu
    own = np.where(macro, tm, tu)
    interference = np.where(macro, p @ tm - p * tm, p @ tu - p * tu)
    return processing_gain * p * own / (interference + 1.0)
