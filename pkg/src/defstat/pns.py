"""Probabilistic norms over real vectors.

The workhorse is ``phi0(base_norm)``, the map ``(tau, eps) -> eps / (eps + ||tau||)``
built from an ordinary norm.  Arbitrary maps can be wrapped with
:func:`custom` and checked against the probabilistic-norm axioms with
:func:`check_pn_axioms`.

Vectors are plain 1-d numpy arrays; batches are 2-d arrays with one vector
per row.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError
from .tnorm import AxiomReport, AxiomResult, TNorm

__all__ = [
    "BASE_NORMS",
    "ProbabilisticNorm",
    "phi0",
    "custom",
    "as_vec",
    "evaluate",
    "check_pn_axioms",
    "DistributionProbe",
    "probe_distribution",
]

BASE_NORMS = ("euclidean", "absolute", "max")

# Relative band around the decision boundary inside which the float result
# is not trusted and the comparison is redone in exact rationals.
_EXACT_BAND = 1e-10


def as_vec(x, dim: Optional[int] = None) -> np.ndarray:
    """Coerce a scalar or sequence to a 1-d float vector."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.size}")
    return v


def _norm(rows: np.ndarray, base: str) -> np.ndarray:
    if base == "euclidean":
        return np.sqrt(np.einsum("...i,...i->...", rows, rows))
    if base == "absolute":
        return np.abs(rows).sum(axis=-1)
    if base == "max":
        return np.abs(rows).max(axis=-1)
    raise ValueError(f"unknown base norm {base!r}")


def _exact_at_most(row, eps: Fraction, sigma: Fraction, base: str) -> bool:
    """Exact test of ``eps / (eps + ||row||) <= 1 - sigma`` with eps > 0."""
    lhs = sigma * eps
    slack = 1 - sigma
    if base == "euclidean":
        sq = sum((Fraction(float(x)) ** 2 for x in row), Fraction(0))
        return lhs * lhs <= slack * slack * sq
    mags = [abs(Fraction(float(x))) for x in row]
    n = sum(mags, Fraction(0)) if base == "absolute" else max(mags)
    return lhs <= slack * n


@dataclass(frozen=True)
class ProbabilisticNorm:
    """A map ``(tau, eps) -> [0, 1]``.

    ``kind`` is ``"phi0"`` (with ``base_norm``) or ``"custom"`` (with
    ``func``).  ``dim`` pins the vector dimension when set.
    """

    kind: str
    base_norm: Optional[str] = None
    func: Optional[Callable] = field(default=None, repr=False, compare=False)
    dim: Optional[int] = None
    name: str = ""

    def _rows(self, tau) -> np.ndarray:
        rows = np.asarray(tau, dtype=float)
        if rows.ndim == 0:
            rows = rows.reshape(1)
        if self.dim is not None and rows.shape[-1] != self.dim:
            raise DimensionError(f"{self.name}: expected dimension {self.dim}, got {rows.shape[-1]}")
        return rows

    def norm(self, tau) -> np.ndarray:
        if self.kind != "phi0":
            raise TypeError("only phi0 norms carry a base norm")
        return _norm(self._rows(tau), self.base_norm)

    def __call__(self, tau, eps):
        """Evaluate ``phi(tau; eps)`` for one vector or a batch of rows."""
        rows = self._rows(tau)
        if self.kind == "phi0":
            n = _norm(rows, self.base_norm)
            eps = np.asarray(eps, dtype=float)
            with np.errstate(invalid="ignore", divide="ignore"):
                val = np.where(eps > 0, eps / (eps + n), 0.0)
        else:
            if rows.ndim == 1:
                val = np.asarray(self.func(rows, float(eps)), dtype=float)
            else:
                e = np.broadcast_to(np.asarray(eps, dtype=float), rows.shape[:-1])
                val = np.array([self.func(r, float(x)) for r, x in zip(rows, e)], dtype=float)
        return float(val) if np.ndim(val) == 0 else val

    def at_most(self, tau, eps, sigma) -> np.ndarray:
        """Boolean mask of ``phi(tau; eps) <= 1 - sigma`` per row.

        For ``phi0`` the decision is exact on the binary values of the
        inputs: rows near the boundary are re-decided in rational
        arithmetic, so set identities that hold in exact arithmetic hold
        here too.  ``eps`` may be a :class:`~fractions.Fraction`.
        """
        rows = self._rows(tau)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
            squeeze = True
        else:
            squeeze = False
        if self.kind != "phi0":
            level = float(1 - Fraction(sigma))
            out = np.atleast_1d(self(rows, float(eps)) <= level)
            return out[0] if squeeze else out
        e = Fraction(eps)
        s = Fraction(sigma)
        if e <= 0:
            out = np.full(rows.shape[0], s <= 1)
            return bool(out[0]) if squeeze else out
        n = _norm(rows, self.base_norm)
        lhs = float(s * e)
        rhs = float(1 - s) * n
        out = lhs <= rhs
        band = np.abs(lhs - rhs) <= _EXACT_BAND * np.maximum(lhs, rhs)
        if band.any():
            idx = np.flatnonzero(band)
            uniq, inverse = np.unique(rows[idx], axis=0, return_inverse=True)
            decided = np.array([_exact_at_most(r, e, s, self.base_norm) for r in uniq], dtype=bool)
            out[idx] = decided[np.ravel(inverse)]
        return bool(out[0]) if squeeze else out


def phi0(base_norm: str = "euclidean", dim: Optional[int] = None) -> ProbabilisticNorm:
    """``eps / (eps + ||tau||)`` for ``eps > 0``; 0 for ``eps <= 0``."""
    base_norm = base_norm.lower()
    if base_norm not in BASE_NORMS:
        raise ValueError(f"unknown base norm {base_norm!r}; expected one of {BASE_NORMS}")
    return ProbabilisticNorm("phi0", base_norm=base_norm, dim=dim, name=f"phi0[{base_norm}]")


def custom(func: Callable[[np.ndarray, float], float], dim: Optional[int] = None,
           name: str = "custom") -> ProbabilisticNorm:
    """Wrap ``func(vector, eps) -> value``.  No axioms are assumed."""
    return ProbabilisticNorm("custom", func=func, dim=dim, name=name)


def evaluate(pn: ProbabilisticNorm, tau, eps) -> float:
    return float(pn(as_vec(tau), eps))


def _sample_vectors(rng, count, dim):
    # Log-uniform magnitudes so both tiny and large vectors are exercised.
    scale = 10.0 ** rng.uniform(-3, 3, size=(count, 1))
    v = rng.standard_normal((count, dim)) * scale
    v[0] = 0.0
    return v


def _sample_positive(rng, count):
    return 10.0 ** rng.uniform(-3, 3, size=count)


def check_pn_axioms(pn: ProbabilisticNorm, t: TNorm, dim: int, sample_count: int,
                    seed: int = 0, tol: float = 0.0) -> AxiomReport:
    """Check the four probabilistic-norm axioms on seeded samples.

    1. ``phi(tau; 0) == 0``
    2. ``phi(0; eps) == 1`` for ``eps > 0``, and every sampled nonzero
       ``tau`` has ``phi(tau; eps) < 1`` for some sampled ``eps``
    3. ``phi(k tau; eps) == phi(tau; eps / |k|)`` for ``k != 0``; ``k == 0``
       is checked against axiom 2 instead
    4. ``phi(tau + zeta; eps + lam) >= phi(tau; eps) ⊙ phi(zeta; lam)``
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    tau = _sample_vectors(rng, sample_count + 1, dim)
    zeta = _sample_vectors(rng, sample_count + 1, dim)
    zeta = np.roll(zeta, 1, axis=0)
    eps = _sample_positive(rng, sample_count + 1)
    lam = _sample_positive(rng, sample_count + 1)
    # R_0^+ includes zero in axiom 4.
    eps0 = eps.copy()
    eps0[::17] = 0.0
    lam0 = lam.copy()
    lam0[::13] = 0.0
    kappa = rng.standard_normal(sample_count + 1) * 10.0 ** rng.uniform(-2, 2, size=sample_count + 1)
    kappa[kappa == 0] = 1.0
    m = tau.shape[0]
    zero = np.zeros(dim)
    report = AxiomReport(f"{pn.name} under {t.name}", seed, sample_count, tol)

    def record(name, bad, witness):
        idx = np.flatnonzero(bad)
        i = int(idx[0]) if idx.size else None
        report.results.append(AxiomResult(name, i is None, m, None if i is None else witness(i)))

    at0 = np.asarray(pn(tau, np.zeros(m)), dtype=float)
    record("zero_eps", np.abs(at0) > tol, lambda i: {"tau": tau[i].tolist(), "value": at0[i]})

    theta = np.asarray(pn(np.tile(zero, (m, 1)), eps), dtype=float)
    bad_theta = np.abs(theta - 1.0) > tol
    probes = np.sort(eps)[:16]
    nonzero = np.any(tau != 0, axis=1)
    below = np.zeros(m, dtype=bool)
    for e in probes:
        below |= np.asarray(pn(tau, np.full(m, e)), dtype=float) < 1.0
    bad_sep = nonzero & ~below
    zero_kappa = np.asarray(pn(0.0 * tau, eps), dtype=float)
    bad_zero_kappa = np.abs(zero_kappa - 1.0) > tol

    def witness_two(i):
        if bad_theta[i]:
            return {"tau": zero.tolist(), "eps": eps[i], "value": theta[i], "case": "zero vector"}
        if bad_zero_kappa[i]:
            return {"tau": (0.0 * tau[i]).tolist(), "eps": eps[i], "value": zero_kappa[i],
                    "case": "0 * tau"}
        return {"tau": tau[i].tolist(), "case": "nonzero vector never below 1",
                "eps_probed": probes.tolist()}

    record("zero_vector", bad_theta | bad_sep | bad_zero_kappa, witness_two)

    scaled = np.asarray(pn(kappa[:, None] * tau, eps), dtype=float)
    shifted = np.asarray(pn(tau, eps / np.abs(kappa)), dtype=float)
    record(
        "scaling",
        np.abs(scaled - shifted) > tol,
        lambda i: {"tau": tau[i].tolist(), "kappa": kappa[i], "eps": eps[i],
                   "left": scaled[i], "right": shifted[i]},
    )

    lhs = np.asarray(pn(tau + zeta, eps0 + lam0), dtype=float)
    a = np.asarray(pn(tau, eps0), dtype=float)
    b = np.asarray(pn(zeta, lam0), dtype=float)
    rhs = np.asarray(t(a, b), dtype=float)
    record(
        "triangle",
        lhs < rhs - tol,
        lambda i: {"tau": tau[i].tolist(), "zeta": zeta[i].tolist(), "eps": eps0[i],
                   "lam": lam0[i], "left": lhs[i], "right": rhs[i]},
    )
    return report


@dataclass
class DistributionProbe:
    """``phi(tau; .)`` sampled on a grid, with a monotonicity verdict."""

    sample_points: list
    values: list
    monotone: bool
    violation: Optional[int] = None
    in_range: bool = True

    def to_dict(self):
        return {
            "sample_points": list(self.sample_points),
            "values": list(self.values),
            "monotone": self.monotone,
            "violation": self.violation,
            "in_range": self.in_range,
        }


def probe_distribution(pn: ProbabilisticNorm, tau, eps_grid) -> DistributionProbe:
    """Sample ``eps -> phi(tau; eps)`` on a strictly increasing grid.

    Left continuity cannot be decided from samples; only monotonicity and
    range are reported.
    """
    grid = np.asarray(eps_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("eps_grid must be a nonempty strictly increasing sequence")
    tau = as_vec(tau)
    vals = np.array([pn(tau, e) for e in grid], dtype=float)
    drops = np.flatnonzero(np.diff(vals) < 0)
    violation = int(drops[0]) + 1 if drops.size else None
    return DistributionProbe(
        grid.tolist(),
        vals.tolist(),
        violation is None,
        violation,
        bool(vals[0] >= 0.0 and vals[-1] <= 1.0),
    )
