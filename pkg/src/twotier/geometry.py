"""User placement and path gains for a macrocell with one embedded hotspot microcell.

The macrocell base sits at the origin of a square region of side ``region_side``.
The microcell base sits at ``(x0, 0)`` and is surrounded by a small hotspot
square of side ``hotspot_side``.  Gains are in relative units with the
microcell constant fixed to 1, so only ``h_ratio = H_M / H_mu`` is a parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

# Users closer than this to a base are pulled back to it (meters).
MIN_DISTANCE = 1.0


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Static configuration of the two-tier system.

    Defaults reproduce the reference deployment: W/R = 128, 7 dB SINR target,
    100 m breakpoints, H_M = 10 H_mu, microcell 300 m from the macrocell,
    8 dB / 4 dB shadowing, 200 m hotspot inside a 1 km square.
    """

    processing_gain: float = 128.0
    gamma_db: float = 7.0
    b_macro: float = 100.0
    b_micro: float = 100.0
    h_ratio: float = 10.0
    x0: float = 300.0
    sigma_macro_db: float = 8.0
    sigma_micro_db: float = 4.0
    region_side: float = 1000.0
    hotspot_side: float = 200.0
    hotspot_density: float = 0.5
    confidence: float = 0.95
    trials: int = 10_000

    def __post_init__(self):
        self.validate()

    @property
    def k_prime(self) -> float:
        """W / (R Gamma) with Gamma in linear units."""
        return self.processing_gain / float(db_to_linear(self.gamma_db))

    @property
    def gamma(self) -> float:
        return float(db_to_linear(self.gamma_db))

    def validate(self) -> None:
        positive = ("processing_gain", "b_macro", "b_micro", "h_ratio",
                    "region_side", "hotspot_side")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("sigma_macro_db", "sigma_micro_db"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)!r}")
        if not np.isfinite(self.gamma_db):
            raise ValueError(f"gamma_db must be finite, got {self.gamma_db!r}")
        if not 0.0 <= self.hotspot_density <= 1.0:
            raise ValueError(f"hotspot_density must lie in [0, 1], got {self.hotspot_density!r}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not self.hotspot_side < self.region_side:
            raise ValueError("hotspot_side must be smaller than region_side")
        half = self.region_side / 2
        if abs(self.x0) + self.hotspot_side / 2 > half:
            raise ValueError("hotspot square must lie inside the coverage region (check x0)")


class Population(str, Enum):
    LD = "LD"  # uniform over the whole region
    HD = "HD"  # uniform over the hotspot square


@dataclass(frozen=True)
class UserSample:
    position: Tuple[float, float]
    chi_macro_db: float
    chi_micro_db: float
    t_macro: float
    t_micro: float
    population: Population


@dataclass(frozen=True)
class TrialSet:
    users: Tuple[UserSample, ...]
    seed_info: Tuple[int, ...] = field(default=())

    def __len__(self):
        return len(self.users)

    @property
    def t_macro(self) -> np.ndarray:
        return np.array([u.t_macro for u in self.users])

    @property
    def t_micro(self) -> np.ndarray:
        return np.array([u.t_micro for u in self.users])


def path_gain(d, b, h, chi_db):
    """Dual-slope path gain with lognormal shadowing.

    ``h (b/d)^2 10^(chi/10)`` inside the breakpoint and ``h (b/d)^4 10^(chi/10)``
    beyond it.  Works elementwise on arrays.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    if b <= 0 or h <= 0:
        raise ValueError("breakpoint and gain constant must be positive")
    ratio = b / d
    slope = np.where(d <= b, ratio ** 2, ratio ** 4)
    out = h * slope * db_to_linear(chi_db)
    return out if out.ndim else float(out)


@dataclass
class UserDraw:
    """Columnar batch of users; the common currency of the samplers."""

    x: np.ndarray
    y: np.ndarray
    hd: np.ndarray
    chi_macro_db: np.ndarray
    chi_micro_db: np.ndarray
    t_macro: np.ndarray
    t_micro: np.ndarray


def draw_users(params: SystemParams, size: int, rng: np.random.Generator) -> UserDraw:
    """Draw ``size`` i.i.d. users.

    The order of draws from ``rng`` is fixed: population flags, unit-square
    positions, then the two shadowing normals.
    """
    hd = rng.random(size) < params.hotspot_density
    u = rng.random((size, 2)) - 0.5  # [-1/2, 1/2)
    side = np.where(hd, params.hotspot_side, params.region_side)
    x = np.where(hd, params.x0, 0.0) + u[:, 0] * side
    y = u[:, 1] * side
    z = rng.standard_normal((size, 2))
    chi_m = z[:, 0] * params.sigma_macro_db
    chi_u = z[:, 1] * params.sigma_micro_db

    d_macro = np.maximum(np.hypot(x, y), MIN_DISTANCE)
    d_micro = np.maximum(np.hypot(x - params.x0, y), MIN_DISTANCE)
    t_m = np.atleast_1d(path_gain(d_macro, params.b_macro, params.h_ratio, chi_m))
    t_u = np.atleast_1d(path_gain(d_micro, params.b_micro, 1.0, chi_u))
    return UserDraw(x, y, hd, chi_m, chi_u, t_m, t_u)


def draw_gains(params: SystemParams, size: int, rng: np.random.Generator):
    """``(t_macro, t_micro)`` arrays for ``size`` independent users."""
    users = draw_users(params, size, rng)
    return users.t_macro, users.t_micro


def _as_samples(users: UserDraw):
    for i in range(len(users.x)):
        yield UserSample(
            position=(float(users.x[i]), float(users.y[i])),
            chi_macro_db=float(users.chi_macro_db[i]),
            chi_micro_db=float(users.chi_micro_db[i]),
            t_macro=float(users.t_macro[i]),
            t_micro=float(users.t_micro[i]),
            population=Population.HD if users.hd[i] else Population.LD,
        )


def sample_user(params: SystemParams, rng: np.random.Generator) -> UserSample:
    return next(_as_samples(draw_users(params, 1, rng)))


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for an independent stream keyed by ``(seed, *key)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def sample_trial(params: SystemParams, n: int, rng: np.random.Generator | None = None,
                 *, seed: int | None = None, trial_index: int = 0) -> TrialSet:
    """Draw one Monte Carlo trial of ``n`` users.

    Either pass an explicit ``rng`` or a master ``seed``; with a seed the trial
    is a pure function of ``(seed, trial_index)``.
    """
    if n < 1:
        raise ValueError("a trial needs at least one user")
    seed_info: Tuple[int, ...] = ()
    if rng is None:
        if seed is None:
            raise ValueError("either rng or seed is required")
        rng = trial_rng(seed, trial_index)
        seed_info = (int(seed), int(trial_index))
    users = tuple(_as_samples(draw_users(params, n, rng)))
    return TrialSet(users=users, seed_info=seed_info)
