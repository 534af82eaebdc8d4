# Sampled axiom checks for t-norms and probabilistic norms.
#
# The three standard t-norms pass; a couple of plausible impostors do not,
# and the report hands back a concrete counterexample.

from defstat import LUKASIEWICZ, MIN, PRODUCT, phi0
from defstat import tnorm
from defstat.pns import check_pn_axioms, custom, probe_distribution

for t in (MIN, PRODUCT, LUKASIEWICZ):
    rep = tnorm.check_tnorm_axioms(t, 10_000, seed=42, tol=1e-12)
    print(f"{t.name:12s} passed={rep.passed}")

mean = tnorm.custom(lambda a, b: (a + b) / 2, "mean")
rep = tnorm.check_tnorm_axioms(mean, 1000, seed=1)
for r in rep.failures:
    print(f"mean fails {r.name}: {r.counterexample}")

# lambda with (1 - lambda) * (1 - lambda) > 1 - sigma, used by the proofs
for sigma in (0.1, 0.5, 0.9):
    print(f"sigma={sigma}: lambda product={tnorm.choose_lambda(PRODUCT, sigma):.4f} "
          f"min={tnorm.choose_lambda(MIN, sigma):.4f}")

pn = phi0("euclidean")
for dim in (1, 4, 8):
    print(f"phi0 dim {dim}:", check_pn_axioms(pn, PRODUCT, dim, 1000, seed=42, tol=1e-12).passed)

# eps / (eps + ||tau||^2) looks similar but breaks the scaling axiom.
squared = custom(lambda tau, eps: eps / (eps + float(tau @ tau)) if eps > 0 else 0.0, name="squared")
rep = check_pn_axioms(squared, PRODUCT, 2, 500, seed=3)
print("squared norm failures:", [r.name for r in rep.failures])

probe = probe_distribution(pn, [3.0, 4.0], [0.5, 1, 5, 50])
print("phi([3, 4]; eps):", [round(v, 4) for v in probe.values], "monotone", probe.monotone)
