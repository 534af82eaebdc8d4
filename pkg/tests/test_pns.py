from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from defstat.errors import DimensionError
from defstat.pns import as_vec, check_pn_axioms, custom, evaluate, phi0, probe_distribution
from defstat.tnorm import LUKASIEWICZ, MIN, PRODUCT

coords = st.floats(-1e3, 1e3, allow_nan=False)
pos = st.floats(1e-3, 1e3, allow_nan=False)
vecs = st.lists(coords, min_size=3, max_size=3)


def oracle_phi(tau, eps, base):
    tau = [Fraction(x) for x in tau]
    if base == "absolute":
        n = sum(abs(x) for x in tau)
    elif base == "max":
        n = max(abs(x) for x in tau)
    else:
        n = sum(x * x for x in tau) ** 0.5
    return float(Fraction(eps) / (Fraction(eps) + Fraction(n)))


def test_spec_values():
    pn = phi0("euclidean")
    assert evaluate(pn, [0.0, 0.0], 1.0) == 1.0
    assert evaluate(pn, [3.0, 4.0], 0.0) == 0.0
    assert evaluate(pn, [3.0, 4.0], 5.0) == 0.5
    assert evaluate(phi0("absolute"), [3.0, -4.0], 7.0) == 0.5
    assert evaluate(phi0("max"), [3.0, -4.0], 4.0) == 0.5


def test_bad_inputs():
    with pytest.raises(ValueError):
        phi0("l3")
    with pytest.raises(DimensionError):
        as_vec([1.0, 2.0], 3)
    with pytest.raises(DimensionError):
        phi0("euclidean", dim=2)(np.zeros(3), 1.0)


@pytest.mark.parametrize("base", ["absolute", "max"])
@given(tau=vecs, eps=pos)
def test_matches_rational_oracle(base, tau, eps):
    assert evaluate(phi0(base), tau, eps) == pytest.approx(oracle_phi(tau, eps, base), rel=1e-12)


@given(tau=vecs, eps=pos, sigma=st.floats(0.01, 0.99))
def test_at_most_is_exact(tau, eps, sigma):
    pn = phi0("absolute")
    n = sum(abs(Fraction(x)) for x in tau)
    expected = Fraction(eps) * Fraction(sigma) <= (1 - Fraction(sigma)) * n
    assert bool(pn.at_most(np.array(tau), eps, sigma)) == expected


def test_at_most_on_the_boundary():
    # eps = 1, sigma = 0.5: the exceedance set is exactly ||tau|| >= 1
    pn = phi0("absolute")
    taus = np.array([[1.0], [1 - 2 ** -52], [1 + 2 ** -52]])
    assert pn.at_most(taus, 1.0, 0.5).tolist() == [True, False, True]
    e = phi0("euclidean")
    assert e.at_most(np.array([[0.6, 0.8]]), 1.0, 0.5).tolist() == [True]


@pytest.mark.parametrize("t", [PRODUCT, MIN])
@pytest.mark.parametrize("dim", [1, 2, 4, 8])
def test_phi0_axioms(t, dim):
    rep = check_pn_axioms(phi0("euclidean"), t, dim, 1000, seed=42, tol=1e-12)
    assert rep.passed, rep.failures


def test_phi0_under_lukasiewicz():
    assert check_pn_axioms(phi0("max"), LUKASIEWICZ, 3, 500, seed=7, tol=1e-12).passed


def test_broken_pn_is_caught():
    # eps / (eps + ||tau||^2) breaks the scaling axiom
    bad = custom(lambda tau, eps: eps / (eps + float(np.dot(tau, tau))) if eps > 0 else 0.0)
    rep = check_pn_axioms(bad, PRODUCT, 2, 200, seed=1, tol=1e-12)
    assert "scaling" in {r.name for r in rep.failures}
    assert rep["scaling"].counterexample is not None


def test_constant_one_fails_zero_vector_axiom():
    bad = custom(lambda tau, eps: 1.0 if eps > 0 else 0.0)
    rep = check_pn_axioms(bad, PRODUCT, 2, 100, seed=1)
    assert "zero_vector" in {r.name for r in rep.failures}


def test_probe():
    pn = phi0("euclidean")
    assert probe_distribution(pn, [0.0, 0.0], [0.1, 1, 10]).values == [1.0, 1.0, 1.0]
    p = probe_distribution(pn, [3.0, 4.0], [1, 5, 15])
    assert p.monotone and p.in_range
    assert p.values == pytest.approx([1 / 6, 0.5, 0.75])
    with pytest.raises(ValueError):
        probe_distribution(pn, [1.0], [1.0, 1.0])
    decreasing = custom(lambda tau, eps: 1.0 / (1.0 + eps) if eps > 0 else 0.0)
    q = probe_distribution(decreasing, [1.0], [1, 2, 3])
    assert not q.monotone and q.violation == 1


@given(tau=vecs, kappa=st.floats(-50, 50).filter(lambda k: abs(k) > 1e-3), eps=pos)
def test_scaling_property(tau, kappa, eps):
    pn = phi0("max")
    lhs = evaluate(pn, kappa * np.array(tau), eps)
    rhs = evaluate(pn, tau, eps / abs(kappa))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


@given(tau=vecs, zeta=vecs, eps=pos, lam=pos)
def test_triangle_property(tau, zeta, eps, lam):
    pn = phi0("euclidean")
    lhs = evaluate(pn, np.add(tau, zeta), eps + lam)
    assert lhs >= PRODUCT(evaluate(pn, tau, eps), evaluate(pn, zeta, lam)) - 1e-12
