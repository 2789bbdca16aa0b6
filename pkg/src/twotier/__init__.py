"""Uplink user capacity of a CDMA macrocell with one embedded hotspot microcell."""

from .approx import (MomentEstimate, approx1_feasible, approx2_capacity, estimate_moments,
                     gaussian_feasibility_probability, normal_quantile)
from .exact import (FeasibilityVerdict, GainTable, build_matrix_A, combining_weights, exact_feasible,
                    hard_feasible, solve_powers)
from .geometry import SystemParams, TrialSet, UserSample, path_gain, sample_trial, sample_user
from .search import (METHODS, CapacityCurve, CapacityResult, FeasibilityCurvePoint, MethodCapacity,
                     feasibility_probability, find_capacity, sweep_hotspot_density)

__version__ = "0.1.0"
