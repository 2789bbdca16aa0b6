"""Recompute the frozen moment regression value used in tests/test_approx.py."""

from twotier.approx import estimate_moments
from twotier.geometry import SystemParams

m = estimate_moments(SystemParams(hotspot_density=0.5), 10 ** 6, 2024, 3, 500000)
print(f"mu={m.mu!r} sigma={m.sigma!r} samples={m.samples}")
