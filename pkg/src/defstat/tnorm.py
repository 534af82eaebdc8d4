"""Continuous t-norms on the unit interval.

Three built-in t-norms are provided (minimum, product, Lukasiewicz) plus
user supplied ones wrapped with :func:`custom`.  Built-ins operate on
scalars and on numpy arrays alike.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "UnitValue",
    "TNorm",
    "MIN",
    "PRODUCT",
    "LUKASIEWICZ",
    "custom",
    "get_tnorm",
    "apply",
    "AxiomResult",
    "AxiomReport",
    "check_tnorm_axioms",
    "verify",
    "choose_lambda",
]


@dataclass(frozen=True, order=True)
class UnitValue:
    """A real number in [0, 1]."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"unit value out of range: {self.value!r}")
        object.__setattr__(self, "value", v)

    def __float__(self):
        return self.value


def _min(a, b):
    return np.minimum(a, b)


def _product(a, b):
    return np.multiply(a, b)


def _lukasiewicz(a, b):
    # a + b - 1 can round above min(a, b); clamp so the boundary laws hold exactly
    return np.maximum(np.minimum(np.add(a, b) - 1.0, np.minimum(a, b)), 0.0)


@dataclass(frozen=True)
class TNorm:
    """Binary operation on [0, 1].

    ``kind`` is one of ``"min"``, ``"product"``, ``"lukasiewicz"`` or
    ``"custom"``.  Custom t-norms start with ``verified=False``; see
    :func:`verify`.
    """

    kind: str
    func: Callable = field(repr=False, compare=False)
    verified: bool = True
    name: str = ""

    def __call__(self, a, b):
        out = self.func(a, b)
        if np.ndim(out) == 0:
            return float(out)
        return np.asarray(out, dtype=float)

    @property
    def builtin(self) -> bool:
        return self.kind != "custom"


MIN = TNorm("min", _min, name="min")
PRODUCT = TNorm("product", _product, name="product")
LUKASIEWICZ = TNorm("lukasiewicz", _lukasiewicz, name="lukasiewicz")

_BUILTINS = {t.kind: t for t in (MIN, PRODUCT, LUKASIEWICZ)}


def custom(func: Callable[[float, float], float], name: str = "custom") -> TNorm:
    """Wrap a scalar function ``(a, b) -> value`` as an unverified t-norm."""
    vec = np.frompyfunc(func, 2, 1)

    def wrapped(a, b):
        out = vec(a, b)
        if isinstance(out, np.ndarray):
            return out.astype(float)
        return float(out)

    return TNorm("custom", wrapped, verified=False, name=name)


def get_tnorm(key: str) -> TNorm:
    """Look up a built-in t-norm by its config key."""
    try:
        return _BUILTINS[key.lower()]
    except KeyError:
        raise KeyError(f"unknown t-norm {key!r}; expected one of {sorted(_BUILTINS)}") from None


def apply(t: TNorm, a, b) -> float:
    """Evaluate ``a ⊙ b`` for unit values ``a`` and ``b``."""
    a = float(a) if not isinstance(a, UnitValue) else a.value
    b = float(b) if not isinstance(b, UnitValue) else b.value
    UnitValue(a), UnitValue(b)
    out = float(t(a, b))
    if not (0.0 <= out <= 1.0):
        raise ValueError(f"{t.name} returned {out} outside [0, 1] for ({a}, {b})")
    return out


@dataclass
class AxiomResult:
    name: str
    passed: bool
    checked: int
    counterexample: Optional[dict] = None
    informational: bool = False
    detail: str = ""

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class AxiomReport:
    """Outcome of a sampled axiom check.

    Informational results (e.g. the continuity probe) never affect
    :attr:`passed`.
    """

    subject: str
    seed: int
    sample_count: int
    tol: float
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if not r.informational)

    def __getitem__(self, name) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def failures(self):
        return [r for r in self.results if not r.passed and not r.informational]

    def to_dict(self):
        return {
            "subject": self.subject,
            "seed": self.seed,
            "sample_count": self.sample_count,
            "tol": self.tol,
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
        }


def _first(mask):
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


_GRID = 2 ** 32


def _samples(rng, count):
    # Multiples of 2**-32: sums and differences of these are exact doubles, so
    # exact axiom checks do not trip on rounding.  Endpoints and the midpoint
    # are where clamping bugs show up.
    fixed = np.array([0.0, 0.5, 1.0])
    return np.concatenate([fixed, rng.integers(0, _GRID, size=count, endpoint=True) / _GRID])


def check_tnorm_axioms(t: TNorm, sample_count: int, seed: int = 0, tol: float = 0.0) -> AxiomReport:
    """Check commutativity, associativity, identity and monotonicity on samples.

    Commutativity and the identity law are checked exactly; associativity
    and monotonicity allow ``tol``.  Continuity is probed as a 1-Lipschitz
    bound in the first argument and reported as informational only.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    a = _samples(rng, sample_count)
    b = _samples(rng, sample_count)
    c = _samples(rng, sample_count)
    n = a.size
    report = AxiomReport(t.name, seed, sample_count, tol)

    def record(name, bad, witness, informational=False, detail=""):
        i = _first(bad)
        report.results.append(
            AxiomResult(
                name,
                i is None,
                n,
                None if i is None else witness(i),
                informational,
                detail,
            )
        )

    ab = np.asarray(t(a, b), dtype=float)
    ba = np.asarray(t(b, a), dtype=float)
    record("range", (ab < 0.0) | (ab > 1.0), lambda i: {"a": a[i], "b": b[i], "value": ab[i]})
    record("commutativity", ab != ba, lambda i: {"a": a[i], "b": b[i], "ab": ab[i], "ba": ba[i]})

    left = np.asarray(t(ab, c), dtype=float)
    right = np.asarray(t(a, t(b, c)), dtype=float)
    record(
        "associativity",
        np.abs(left - right) > tol,
        lambda i: {"a": a[i], "b": b[i], "c": c[i], "left": left[i], "right": right[i]},
    )

    a1 = np.asarray(t(a, np.ones_like(a)), dtype=float)
    record("identity", a1 != a, lambda i: {"a": a[i], "value": a1[i]})

    # Monotonicity on ordered quadruples (a <= a2, b <= b2).
    a2 = a + (1.0 - a) * rng.random(n)
    b2 = b + (1.0 - b) * rng.random(n)
    hi = np.asarray(t(a2, b2), dtype=float)
    record(
        "monotonicity",
        ab > hi + tol,
        lambda i: {"a": a[i], "b": b[i], "c": a2[i], "d": b2[i], "low": ab[i], "high": hi[i]},
    )

    h = 1e-6
    ah = np.minimum(a + h, 1.0)
    step = np.abs(np.asarray(t(ah, b), dtype=float) - ab)
    record(
        "continuity_probe",
        step > (ah - a) + 1e-12,
        lambda i: {"a": a[i], "b": b[i], "h": ah[i] - a[i], "jump": step[i]},
        informational=True,
        detail="1-Lipschitz probe in the first argument; sampled, not a proof",
    )
    return report


def verify(t: TNorm, sample_count: int = 10_000, seed: int = 0, tol: float = 1e-12) -> TNorm:
    """Return ``t`` marked verified if it passes :func:`check_tnorm_axioms`."""
    report = check_tnorm_axioms(t, sample_count, seed, tol)
    if not report.passed:
        names = ", ".join(r.name for r in report.failures)
        raise ValueError(f"{t.name} fails t-norm axioms: {names}")
    return dataclasses.replace(t, verified=True)


def choose_lambda(t: TNorm, sigma: float, shrink: float = 0.99) -> float:
    """Pick lambda in (0, 1) with ``(1 - lambda) ⊙ (1 - lambda) > 1 - sigma``.

    Closed forms for the built-ins; bisection for custom t-norms.
    """
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    if t.kind == "product":
        lam = (1.0 - np.sqrt(1.0 - sigma)) * shrink
    elif t.kind == "min":
        lam = sigma * shrink
    elif t.kind == "lukasiewicz":
        lam = sigma / 2.0 * shrink
    else:
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = (lo + hi) / 2.0
            if t(1.0 - mid, 1.0 - mid) > 1.0 - sigma:
                lo = mid
            else:
                hi = mid
        lam = lo * shrink
    lam = float(lam)
    if not (lam > 0.0 and t(1.0 - lam, 1.0 - lam) > 1.0 - sigma):
        raise ValueError(f"no admissible lambda found for sigma={sigma} under {t.name}")
    return lam
