# Same sequence, different windows.
#
# Deferred density looks at (alpha(n), theta(n)] instead of (0, n].  The
# window choice matters: with theta(n) = n^2 and a window that hugs
# sqrt(theta), a sequence can be "large" on every window yet still
# deferred-statistically small.

from defstat import affine, classical, explicit, lacunary, lambda_window, phi0, test_dstat
from defstat import density as dn
from defstat import windows as wn
from defstat.sequences import Example31

windows = {
    "classical (0, n]": classical(),
    "lambda (n - ceil(n/2), n]": lambda_window(lambda n: (n + 1) // 2),
    "lacunary (T_{r-1}, T_r]": lacunary(lambda r: r * (r + 1) // 2),
    "affine (n, 2n + 4]": affine(1, 0, 2, 4),
}

print("square density on each window, n = 2^16")
for name, w in windows.items():
    tr = dn.deferred_density(dn.squares(), w, horizon=1 << 16)
    print(f"  {name:28s} ratio {tr.final_ratio:.5f}  {tr.verdict.value}")

# The lacunary blocks hold zero or one square each, so that trace flickers
# between 0 and 1/r.  The classifier only calls a tail "zero" when it is
# also not rising, so it reports a stable value near 0 instead.

# alpha(n) / (theta(n) - alpha(n)) bounded means ordinary statistical
# limits carry over to the window.  Here it is 1 for (n, 2n] and unbounded
# for (n^2 - n, n^2].
for name, w in [("(n, 2n]", affine(1, 0, 2, 0)),
                ("(n^2 - n, n^2]", explicit(lambda n: n * n - n, lambda n: n * n))]:
    rep = wn.ratio_sequence(w, 4000)
    print(f"ratio sequence on {name}: max {rep.maximum:.1f}, bounded={rep.bounded}")

# The window-local example: w_k = k^2 on the k0 indices just below
# sqrt(theta(n)), zero elsewhere.  With alpha = n // 2 and theta = n^2 each
# window meets at most k0 of them.
w = explicit(lambda n: n // 2, lambda n: n * n)
s = Example31(5, w)
print("gate holds from n =", s.gate_start)
v = test_dstat(s, phi0("absolute"), [0.0], w, n_grid=dn.geometric_grid(1000))
print("window-local example:", v.outcome.value, "worst final ratio", v.worst_final_ratio)

# Nested windows with bounded tails transfer convergence outward.
pair = wn.WindowPair(affine(1, 0, 2, 4), affine(1, 2, 2, 2))
print("tails at n = 100:", pair.tails(100))
