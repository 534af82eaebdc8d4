# The indicator of the perfect squares, w_k = 1 if k is a square else 0.
#
# It never settles down in the ordinary sense (a 1 keeps showing up), but
# the squares are so sparse that the set of "bad" indices has density zero.
# That is exactly the gap between ordinary and deferred statistical
# convergence.

import numpy as np

from defstat import ParamGrid, classical, phi0, test_dstat, test_phi
from defstat.sequences import SquareIndicator

w = SquareIndicator()
pn = phi0("absolute")          # phi(tau; eps) = eps / (eps + |tau|)
one_point = ParamGrid.single(eps=1.0, sigma=0.5)

# A term is "bad" when phi(w_k - 0; 1) <= 0.5, i.e. |w_k| >= 1: the squares.
v = test_dstat(w, pn, [0.0], classical(), one_point, horizon=10**6)
tr = v.traces[0]

print("    n     count      ratio")
for n, c, r in zip(tr.n_grid, tr.counts, tr.ratios):
    print(f"{n:>8} {c:>8} {r:>12.6f}")
print("verdict:", v.outcome.value)   # certified: ratio ~ 1/sqrt(n)

# Ordinary convergence fails: there is a bad index in every tail.
phi = test_phi(w, pn, [0.0], one_point, horizon=10**6)
print("phi-convergence:", phi.outcome.value, "last bad index", phi.points[0]["last_violation"])

# Over the whole default grid of (eps, sigma) the picture is the same.
full = test_dstat(w, pn, [0.0], classical(), horizon=1 << 18)
worst = max(full.points, key=lambda p: p["final_ratio"])
print("default grid:", full.outcome.value, "worst point", worst)

# Checking the count against the closed form isqrt(n).
assert tr.counts == [int(np.sqrt(n)) for n in tr.n_grid]
