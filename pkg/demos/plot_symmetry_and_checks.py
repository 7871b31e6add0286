"""
Symmetries, fixed points and self-checks
========================================

The action is invariant under phi -> -phi and gamma -> -1 - gamma, the radial
system has five constant solutions, and the numerics can be checked against
closed forms and against themselves.
"""

# %%
from monopole import (
    FixedPointId,
    Params,
    action,
    apply_gauge_flip,
    apply_phi_flip,
    classify_stability,
    newton_solve,
)
from monopole.diagnostics import CHECKS

res = newton_solve(Params(1.0, 1.0))
s0 = action(res.profile)
for flip in (apply_phi_flip, apply_gauge_flip):
    flipped = flip(res.profile)
    print(f"{flip.__name__}: action change {abs(action(flipped) - s0):.1e}, "
          f"involution: {flip(flipped) == res.profile}")

# %%
# Near (gamma, phi) = (-1/2, 1) the gamma mode destabilises at r^2 = eps/4.
for r in (0.4, 0.6):
    rep = classify_stability(FixedPointId.HALF_PLUS, r, Params(1.0, 1.0))
    print(f"r = {r}: {rep.unstable_mode_count} unstable mode(s)")

# %%
# The same checks that ``monopole verify`` runs.
for name in ("series", "order", "fixed-points"):
    c = CHECKS[name]()
    print(f"{'PASS' if c.passed else 'FAIL'}  {name:12s} {c.value!r}")
