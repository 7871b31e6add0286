"""
Profile families at fixed coupling
==================================

Write profile CSVs for families at fixed epsilon and at fixed lambda, the
data behind trajectory plots, and check the transition length scales.
"""

# %%
from pathlib import Path

import numpy as np

from monopole import ShootingConfig, continuation_sweep, length_scales
from monopole.io import atomic_write, profile_csv

out = Path("profiles")
out.mkdir(exist_ok=True)

fixed_eps = continuation_sweep([1.0], [0.0, 1.0, 3.0, 10.0, 30.0], ShootingConfig())
fixed_lam = continuation_sweep([0.1, 0.3, 1.0, 3.0, 10.0], [1.0], ShootingConfig())

# %%
# gamma is negative and phi positive throughout; both transitions sharpen as
# epsilon and 1/lambda shrink, following min(sqrt(eps), 1) and
# min(sqrt(eps), 1/sqrt(lam), 1).
for res in fixed_eps + fixed_lam:
    p = res.params
    prof = res.profile
    path = out / f"profile_eps{p.epsilon:g}_lam{p.lam:g}.csv"
    atomic_write(path, profile_csv(prof, sample=501))
    quarter = prof.radii[np.argmax(prof.gamma <= -0.25)]
    lg, lp = length_scales(p)
    print(f"eps={p.epsilon:5g} lam={p.lam:5g}  gamma=-1/4 at r={quarter:.3f}  "
          f"scales (gamma, phi) = ({lg:.3f}, {lp:.3f})  -> {path}")
