"""How far the closed-form capacity sits above the averaged-weight one.

Near P_h = 0.5 the macrocell share has mean close to 1/2 and a large spread,
so the quadratic term dropped by the closed form is not small.  This prints,
per density and seed, both capacities and the Monte Carlo versus Gaussian
feasibility probability one user above the averaged-weight capacity.
"""

import argparse

from twotier.approx import approx2_capacity, estimate_moments, gaussian_feasibility_probability
from twotier.geometry import SystemParams
from twotier.search import feasibility_probability, find_capacity

parser = argparse.ArgumentParser()
parser.add_argument("--trials", type=int, default=10_000)
parser.add_argument("--seeds", type=int, nargs="+", default=[2, 3, 4])
parser.add_argument("--densities", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
args = parser.parse_args()

print("p_h   seed  approx1  approx2  mu      sigma   p_mc(N1+1)  p_gauss(N1+1)")
for p_h in args.densities:
    params = SystemParams(hotspot_density=p_h, trials=args.trials)
    for seed in args.seeds:
        n1 = find_capacity(params, "approx1", seed).capacity
        m = estimate_moments(params, 10 ** 6, seed, 99)
        n2 = approx2_capacity(m, params.k_prime, params.confidence)
        mc = feasibility_probability(params, n1 + 1, "approx1", seed=seed).p_hat
        g = gaussian_feasibility_probability(m, n1 + 1, params.k_prime)
        print(f"{p_h:<5} {seed:<5} {n1:<8} {n2:<8} {m.mu:.4f}  {m.sigma:.4f}  {mc:<11.4f} {g:.4f}")
