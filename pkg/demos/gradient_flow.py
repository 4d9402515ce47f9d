"""
Minimizing movements
====================

Implicit Euler for the doubly nonlinear flow is a chain of proximal steps.
We compare the discrete flow with a fine ODE integrator and with the
exponential formula.
"""

import math

from pmoreau import SpaceSpec
from pmoreau.flow import exponential_formula_check, minimizing_movement, ode_reference_error
from pmoreau.functions import one_norm, quadratic

space = SpaceSpec.euclidean(1)
E = quadratic([[1.0]])

traj = minimizing_movement(E, space, 2.0, 0.1, 10, [1.0])
print("U^10 =", traj.states[-1][0], " 1.1^-10 =", 1.1**-10)

# |u| is absorbed at zero in finite time
ext = minimizing_movement(one_norm(1), space, 2.0, 0.3, 6, [1.0])
print("one-norm states:", [round(float(x[0]), 12) for x in ext.states])

# first order in tau against DOP853
for p in (2.0, 3.0):
    a = max(e for _, e in ode_reference_error(E, p, 0.1, 10, [1.0]))
    b = max(e for _, e in ode_reference_error(E, p, 0.05, 20, [1.0]))
    print(f"p={p:g}: max error {a:.3e} -> {b:.3e}, ratio {a / b:.3f}")

rows = exponential_formula_check(E, space, 1.0, [1, 4, 16, 64, 256, 1024], [1.0])
for n, err in rows:
    print(f"n={n:<5d} error {err:.6e}")
print("closed form at n=1024:", abs((1 + 1 / 1024) ** -1024 - math.exp(-1)))
