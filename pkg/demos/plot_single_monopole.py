"""
Solving for one monopole
========================

Shoot from the origin for a single coupling pair and inspect the result.
"""

# %%
# A solution is fixed by the couplings (epsilon, lambda).  The unknowns are
# the two free Taylor coefficients at the origin, phi ~ a1 r and gamma ~ b2 r^2.
import numpy as np

from monopole import Params, SeedCoeffs, newton_solve

params = Params(epsilon=1.0, lam=0.0)
res = newton_solve(params, SeedCoeffs(1.5, -0.8))
print(f"a1 = {res.seed.a1:.10f}, b2 = {res.seed.b2:.10f}")
print(f"Newton residuals: {['%.1e' % x for x in res.residual_history]}")

# %%
# The profile holds the series segment on [0, 0.01) followed by the RK4
# trajectory; gamma runs from 0 to -1/2 and phi from 0 to 1.
prof = res.profile
for r in (0.0, 0.25, 0.5, 0.75, 1.0):
    i = np.searchsorted(prof.radii, r)
    print(f"r = {prof.radii[i]:.4f}  gamma = {prof.gamma[i]: .6f}  phi = {prof.phi[i]:.6f}")

# %%
# Diagnostics carried with every solution.
print(f"action = {res.action_value:.8f}")
print(f"max Euler-Lagrange residual on the interior = {res.el_residual_max:.2e}")
