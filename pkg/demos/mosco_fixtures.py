"""
Mosco convergence on shipped fixtures
=====================================

Each fixture is a sequence f_n with a known limit. The liminf and recovery
checks probe the sequence itself; the other two follow the envelopes.
"""

from pmoreau import PowerParams, SpaceSpec
from pmoreau.mosco import FIXTURES, diagonal_convergence, envelope_preserves, fixture, liminf_check, recovery_check

space = SpaceSpec.euclidean(1)
params = PowerParams(2.0, 1.0)
n_max = 64

print(f"{'fixture':<24}{'liminf':<8}{'recovery':<10}{'env gap':<12}{'diag gap':<12}min outside")
for name in FIXTURES:
    seq = fixture(name)
    lim = liminf_check(seq, seq.grid, n_max)
    rec = recovery_check(seq, seq.grid, n_max)
    env = envelope_preserves(seq, space, params, seq.grid, n_max)
    diag = diagonal_convergence(seq, space, 2.0, n_max=n_max)
    print(f"{name:<24}{str(lim.ok):<8}{str(rec.ok):<10}{env.summary['final_gap']:<12.2e}"
          f"{diag.summary['final_gap']:<12.2e}{diag.summary['min_outside']:.3g}")

# indicator limits have no pointwise gap outside the box; there the diagonal
# envelopes must blow up instead, which is why the schedule shrinks fast
seq = fixture("shrinking_box")
rep = diagonal_convergence(seq, space, 2.0, n_max=n_max)
for row in rep.rows[::16]:
    print(row["n"], f"{row['eps']:.2e}", f"{row['min_outside']:.3e}")
