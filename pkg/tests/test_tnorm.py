import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from defstat.tnorm import (
    LUKASIEWICZ,
    MIN,
    PRODUCT,
    UnitValue,
    apply,
    check_tnorm_axioms,
    choose_lambda,
    custom,
    get_tnorm,
    verify,
)

unit = st.floats(0.0, 1.0, allow_nan=False)
sigmas = st.floats(1e-6, 1 - 1e-6, allow_nan=False)
BUILTINS = [MIN, PRODUCT, LUKASIEWICZ]


def test_known_values():
    assert apply(MIN, 0.3, 0.7) == 0.3
    assert apply(PRODUCT, 0.5, 0.5) == 0.25
    assert apply(LUKASIEWICZ, 0.25, 0.5) == 0.0
    assert apply(LUKASIEWICZ, 0.75, 0.5) == 0.25


def test_unit_value_rejects_out_of_range():
    with pytest.raises(ValueError):
        UnitValue(1.5)
    with pytest.raises(ValueError):
        apply(PRODUCT, -0.1, 0.5)
    assert apply(MIN, UnitValue(0.2), UnitValue(0.9)) == 0.2


def test_lookup():
    assert get_tnorm("Product") is PRODUCT
    with pytest.raises(KeyError):
        get_tnorm("drastic")


@pytest.mark.parametrize("t,tol", [(MIN, 0.0), (PRODUCT, 1e-12), (LUKASIEWICZ, 0.0)])
def test_builtin_axioms(t, tol):
    rep = check_tnorm_axioms(t, 10_000, seed=42, tol=tol)
    assert rep.passed, rep.failures
    assert rep["associativity"].checked == 10_003


def test_report_is_seed_deterministic():
    a = check_tnorm_axioms(PRODUCT, 500, seed=3, tol=1e-12).to_dict()
    b = check_tnorm_axioms(PRODUCT, 500, seed=3, tol=1e-12).to_dict()
    assert a == b


def test_arithmetic_mean_is_not_a_tnorm():
    rep = check_tnorm_axioms(custom(lambda a, b: (a + b) / 2, "mean"), 200, seed=1)
    names = {r.name for r in rep.failures}
    assert "identity" in names and "associativity" in names
    assert rep["identity"].counterexample is not None


def test_max_fails_identity_only():
    rep = check_tnorm_axioms(custom(max, "max"), 200, seed=1)
    assert [r.name for r in rep.failures] == ["identity"]


def test_verify_custom():
    t = custom(lambda a, b: a * b, "product2")
    assert not t.verified
    assert verify(t).verified
    with pytest.raises(ValueError):
        verify(custom(lambda a, b: (a + b) / 2))


def test_continuity_probe_is_informational():
    drastic = custom(lambda a, b: min(a, b) if max(a, b) == 1.0 else 0.0, "drastic")
    rep = check_tnorm_axioms(drastic, 300, seed=0)
    assert rep["continuity_probe"].informational
    assert "continuity_probe" not in {r.name for r in rep.failures}


@given(unit, unit)
def test_commutative_and_bounded(a, b):
    for t in BUILTINS:
        v = t(a, b)
        assert v == t(b, a)
        assert 0.0 <= v <= min(a, b)


@given(unit, unit, unit)
def test_associative(a, b, c):
    for t in BUILTINS:
        assert math.isclose(t(t(a, b), c), t(a, t(b, c)), abs_tol=1e-12)


@given(unit, unit, unit, unit)
def test_monotone(a, b, c, d):
    lo_a, hi_a = sorted((a, b))
    lo_b, hi_b = sorted((c, d))
    for t in BUILTINS:
        assert t(lo_a, lo_b) <= t(hi_a, hi_b) + 1e-15


@given(sigmas)
def test_lambda_choice(sigma):
    for t in BUILTINS:
        lam = choose_lambda(t, sigma)
        assert 0.0 < lam < 1.0
        assert t(1 - lam, 1 - lam) > 1 - sigma


def test_lambda_closed_forms():
    assert choose_lambda(PRODUCT, 0.75) == pytest.approx(0.5 * 0.99)
    assert choose_lambda(MIN, 0.5) == pytest.approx(0.495)
    assert choose_lambda(LUKASIEWICZ, 0.5) == pytest.approx(0.2475)
    lam = choose_lambda(custom(lambda a, b: a * b), 0.75)
    assert lam == pytest.approx(0.495, rel=1e-6)
    with pytest.raises(ValueError):
        choose_lambda(PRODUCT, 1.0)


def test_vectorized_call():
    a = np.array([0.2, 0.8])
    assert np.array_equal(PRODUCT(a, a), a * a)
