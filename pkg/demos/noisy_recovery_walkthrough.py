"""
Walk through the bundled 4x5 noisy recovery instance.

The right-hand side is a 2-sparse signal plus noise, with the noise level
3.6 known.  We read off the residual staircase, compare the constrained
problem (fewest nonzeros with residual <= 3.6) with the least-squares penalty
family, and find the penalty weight beyond which the squared-hinge penalty
solves the constrained problem exactly.

Run:  python3 demos/noisy_recovery_walkthrough.py
"""

import numpy as np

from l0lab import (
    Identity,
    Power,
    SquaredHinge,
    breakpoints,
    classify,
    exact_penalty_threshold,
    levels,
    marginal_F,
    marginal_H,
    optimal_set_constrained,
    residual_staircase,
    verify_exactness,
)
from l0lab.datasets import noisy_recovery_instance, noisy_recovery_truth

np.set_printoptions(precision=4, suppress=True)

inst = noisy_recovery_instance()
x_true, sigma = noisy_recovery_truth()
print("A =\n", inst.A)
print("b =", inst.b, " true support:", np.flatnonzero(x_true), " noise level:", sigma)
print(f"||A x_true - b|| = {inst.residual(np.asarray(x_true, float)):.4f}")

# %% best residual for each sparsity budget
st = residual_staircase(inst)
for k, r in enumerate(st.best_r):
    print(f"  k = {k}: best residual {r:.4f}")

# %% levels with the identity penalty: where the staircase actually drops
ident = levels(st, Identity())
for lv in ident.levels:
    print(f"  level {lv.index}: s = {lv.s}, rho = {lv.rho:.4f}, supports {lv.supports}")

# the constrained problem at sigma = 3.6 lands between two levels
print("H(3.6) =", marginal_H(ident, sigma))
opt = optimal_set_constrained(ident, sigma)
print("constrained optimum on level", opt.k, "exact:", opt.exact)
print("  best 2-sparse fit:", opt.representatives[0])

# %% the least-squares penalty  ||x||_0 + lam * ||Ax - b||^2 / 2
quad = levels(st, Power(2))
bp = breakpoints(quad)
F = marginal_F(quad, bp)
print("breakpoints:", np.round(bp.lam, 4), " active levels:", bp.t)
for lo, hi, k, slope, icpt in F.pieces:
    print(f"  lam in ({lo:.4f}, {hi:.4f}]: F = {icpt} + {slope:.4f} lam")

# level 2 is skipped by the envelope, so no weight recovers the 2-sparse answer
rep = classify(quad, bp, sigma)
print("relation at sigma = 3.6:", rep.case.value, "-", rep.description)

# %% the squared hinge penalty vanishes up to sigma and is exact beyond a threshold
res = exact_penalty_threshold(inst, SquaredHinge(sigma), sigma)
print("hinge levels: s =", res.levels.s, " rho =", np.round(res.levels.rho, 4))
print(f"exact for lam > {res.lambda_star:.4f}")
check = verify_exactness(inst, SquaredHinge(sigma), sigma, [1.0, 5.0, 10.0, 20.0, 100.0])
for c in check.checks:
    side = "above" if c.above_threshold else "below"
    print(f"  lam = {c.lam:6.1f} ({side}): penalty supports {c.penalty_supports}, match = {c.passed}")
