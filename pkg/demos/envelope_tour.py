"""
Envelopes of the absolute value
===============================

The p-envelope of |v| interpolates between a smooth power near the origin
and a shifted copy of |v| far away. This script tabulates it for a few
exponents and follows the values as eps shrinks.
"""

import numpy as np

from pmoreau import PowerParams, SpaceSpec, prox
from pmoreau.envelope import convergence_profile, eps_monotonicity_profile
from pmoreau.functions import one_norm

space = SpaceSpec.euclidean(1)
f = one_norm(1)

# values f_eps(u) on a small grid, p = 1.5, 2 and 3 with eps = 1
us = np.linspace(-3, 3, 7)
print("u     " + "".join(f"p={p:<10g}" for p in (1.5, 2.0, 3.0)))
for u in us:
    row = [prox(f, space, PowerParams(p, 1.0), [u]).envelope_value for p in (1.5, 2.0, 3.0)]
    print(f"{u:+.1f}  " + "".join(f"{v:<12.6f}" for v in row))

# for p = 2 and |u| > eps the proximal point is the soft threshold u - eps sgn(u)
sol = prox(f, space, PowerParams(2.0, 1.0), [3.0])
print("\nprox at u=3:", sol.minimizer, "value", sol.envelope_value, "derivative", sol.derivative,
      "solver", sol.solver)

# as eps decreases the envelope climbs toward f(u) and u_eps moves toward u
prof = eps_monotonicity_profile(f, space, 2.0, [3.0], [2.0, 1.0, 0.5, 0.25])
print("\neps    f_eps(3)   |u_eps - 3|")
for e, val, dist in prof.rows:
    print(f"{e:<6g} {val:<10.4f} {dist:.4f}")

# the gap to f(u) sits exactly on the Young bound eps/2 here
conv = convergence_profile(f, space, 2.0, [3.0], [1.0, 0.1, 0.01])
for e, gap, _, bound in conv.rows:
    print(f"eps={e:<5g} gap={gap:.6f} bound={bound:.6f}")
