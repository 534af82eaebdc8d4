"""Finite-horizon testers for the four convergence modes.

Each tester sweeps a finite :class:`ParamGrid` of ``(eps, sigma)`` pairs in
place of "for every eps > 0 and sigma in (0, 1)" and returns a
:class:`Verdict`:

* ``Certified``: every grid point passes its criterion on the final segment
  of the trace;
* ``Refuted``: some grid point fails persistently (for density modes, the
  ratio stays at or above the schedule's refutation floor on the whole
  final segment);
* ``Inconclusive``: anything in between.

The exceedance test ``phi(w_k - xi; eps) <= 1 - sigma`` is non-strict.
"""
from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .density import (
    DensityTrace,
    IndexPredicate,
    ToleranceSchedule,
    TraceVerdict,
    classify,
    deferred_density,
    geometric_grid,
)
from .errors import AmbiguousLimit, DimensionError
from .pns import ProbabilisticNorm, as_vec
from .tnorm import PRODUCT, TNorm, choose_lambda
from .windows import DeferredWindow

__all__ = [
    "Mode",
    "Outcome",
    "ExceedanceParams",
    "ParamGrid",
    "Verdict",
    "exceedance_predicate",
    "test_dstat",
    "test_strong_deferred",
    "test_phi",
    "test_dstat_cauchy",
    "default_anchor_rule",
    "estimate_limit",
    "DEFAULT_HORIZON",
]

DEFAULT_HORIZON = 1 << 20


class Mode(str, enum.Enum):
    PHI = "phi"
    STRONG = "strong"
    DSTAT = "dstat"
    CAUCHY = "cauchy"


class Outcome(str, enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ExceedanceParams:
    eps: float
    sigma: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not 0.0 < self.sigma < 1.0:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma}")

    def to_dict(self):
        return {"eps": float(self.eps), "sigma": float(self.sigma)}


@dataclass(frozen=True)
class ParamGrid:
    eps_values: tuple = (0.1, 0.5, 1.0, 2.0)
    sigma_values: tuple = (0.1, 0.25, 0.5, 0.75, 0.9)

    def __post_init__(self):
        eps = tuple(sorted(float(e) for e in self.eps_values))
        sig = tuple(sorted(float(s) for s in self.sigma_values))
        if not eps or not sig:
            raise ValueError("parameter grid must be nonempty")
        object.__setattr__(self, "eps_values", eps)
        object.__setattr__(self, "sigma_values", sig)
        for e in eps:
            for s in sig:
                ExceedanceParams(e, s)

    @classmethod
    def single(cls, eps: float, sigma: float) -> "ParamGrid":
        return cls((eps,), (sigma,))

    def points(self):
        return [ExceedanceParams(e, s) for e in self.eps_values for s in self.sigma_values]

    def to_dict(self):
        return {"eps": list(self.eps_values), "sigma": list(self.sigma_values)}


@dataclass
class Verdict:
    mode: Mode
    outcome: Outcome
    limit: Optional[list] = None
    anchor: Optional[int] = None
    grid: Optional[ParamGrid] = None
    traces: list = field(default_factory=list)
    points: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.outcome is Outcome.CERTIFIED

    @property
    def refuted(self) -> bool:
        return self.outcome is Outcome.REFUTED

    @property
    def worst_final_ratio(self) -> Optional[float]:
        if not self.traces:
            return None
        return max(tr.final_ratio for tr in self.traces)

    def to_dict(self):
        return {
            "mode": self.mode.value,
            "outcome": self.outcome.value,
            "limit": self.limit,
            "anchor": self.anchor,
            "grid": None if self.grid is None else self.grid.to_dict(),
            "points": self.points,
            "traces": [tr.to_dict() for tr in self.traces],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _combine(outcomes) -> Outcome:
    if all(o is Outcome.CERTIFIED for o in outcomes):
        return Outcome.CERTIFIED
    if any(o is Outcome.REFUTED for o in outcomes):
        return Outcome.REFUTED
    return Outcome.INCONCLUSIVE


def _map(fn, items, jobs: int):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _check_dims(s, pn: ProbabilisticNorm, xi=None):
    if pn.dim is not None and pn.dim != s.dim:
        raise DimensionError(f"{pn.name} expects dimension {pn.dim}, sequence has {s.dim}")
    if xi is not None:
        return as_vec(xi, s.dim)


def exceedance_predicate(s, pn: ProbabilisticNorm, xi, p: ExceedanceParams) -> IndexPredicate:
    """Indices k with ``phi(w_k - xi; eps) <= 1 - sigma``."""
    xi = _check_dims(s, pn, xi)
    name = f"phi(w-xi;{p.eps})<=1-{p.sigma}"
    if not s.window_dependent:
        return IndexPredicate(lambda ks: pn.at_most(s.values(ks) - xi, p.eps, p.sigma), name,
                              max_index=s.max_index)
    segments = None
    if hasattr(s, "support"):
        bg = bool(pn.at_most(s.background - xi, p.eps, p.sigma))

        def segments(n):
            lo, hi = s.support(n)
            return lo, hi, bg

    return IndexPredicate(lambda ks, n: pn.at_most(s.values(ks, n) - xi, p.eps, p.sigma),
                          name, window_dependent=True, segments=segments)


def _density_outcome(trace: DensityTrace, schedule: ToleranceSchedule) -> Outcome:
    if trace.verdict is TraceVerdict.TENDS_TO_ZERO:
        return Outcome.CERTIFIED
    tail = np.asarray(trace.ratios[schedule.tail_start(len(trace.ratios)):])
    if np.all(tail >= schedule.refutation_floor):
        return Outcome.REFUTED
    return Outcome.INCONCLUSIVE


def _setup(n_grid, horizon, schedule, grid):
    n_grid = list(n_grid) if n_grid is not None else geometric_grid(horizon or DEFAULT_HORIZON)
    return n_grid, schedule or ToleranceSchedule(), grid or ParamGrid()


def test_dstat(s, pn: ProbabilisticNorm, xi, w: DeferredWindow, grid: Optional[ParamGrid] = None,
               n_grid=None, schedule: Optional[ToleranceSchedule] = None,
               horizon: Optional[int] = None, jobs: int = 1) -> Verdict:
    """Deferred statistical convergence of ``s`` to ``xi`` on window ``w``."""
    n_grid, schedule, grid = _setup(n_grid, horizon, schedule, grid)
    xi = _check_dims(s, pn, xi)

    def run(p):
        pred = exceedance_predicate(s, pn, xi, p)
        tr = deferred_density(pred, w, n_grid, schedule, label=p.to_dict())
        return tr, _density_outcome(tr, schedule)

    results = _map(run, grid.points(), jobs)
    traces = [tr for tr, _ in results]
    outcomes = [o for _, o in results]
    points = [dict(p.to_dict(), outcome=o.value, final_ratio=tr.final_ratio)
              for p, (tr, o) in zip(grid.points(), results)]
    return Verdict(Mode.DSTAT, _combine(outcomes), xi.tolist(), None, grid, traces, points)


def _phi_prefix(s, pn, xi, eps, upto):
    ks = np.arange(1, upto + 1, dtype=np.int64)
    vals = np.asarray(pn(s.values(ks) - xi, eps), dtype=float).reshape(-1)
    return np.concatenate([[0.0], np.cumsum(vals)])


def test_strong_deferred(s, pn: ProbabilisticNorm, xi, w: DeferredWindow,
                         grid: Optional[ParamGrid] = None, n_grid=None,
                         schedule: Optional[ToleranceSchedule] = None,
                         horizon: Optional[int] = None, jobs: int = 1) -> Verdict:
    """Windowed means of ``phi(w_k - xi; eps)`` must exceed ``1 - sigma``.

    The means are checked over the n grid; the final segment decides.
    """
    n_grid, schedule, grid = _setup(n_grid, horizon, schedule, grid)
    xi = _check_dims(s, pn, xi)
    alphas, thetas = w.bounds(n_grid)
    lengths = thetas - alphas
    start = schedule.tail_start(len(n_grid))

    def means_for(eps):
        if s.window_dependent:
            out = []
            for n, a, t in zip(n_grid, alphas, thetas):
                ks = np.arange(a + 1, t + 1, dtype=np.int64)
                v = np.asarray(pn(s.values(ks, n) - xi, eps), dtype=float).reshape(-1)
                out.append(float(v.sum()) / int(t - a))
            return out
        cum = _phi_prefix(s, pn, xi, eps, int(thetas.max()))
        return [float(cum[t] - cum[a]) / int(t - a) for a, t in zip(alphas, thetas)]

    by_eps = dict(zip(grid.eps_values, _map(means_for, grid.eps_values, jobs)))
    traces, outcomes, points = [], [], []
    for p in grid.points():
        means = by_eps[p.eps]
        tail = np.asarray(means[start:])
        level = 1.0 - p.sigma
        if np.all(tail > level):
            o = Outcome.CERTIFIED
        elif np.all(tail <= level):
            o = Outcome.REFUTED
        else:
            o = Outcome.INCONCLUSIVE
        verdict, value = classify(means, lengths, schedule)
        traces.append(DensityTrace(list(n_grid), alphas.tolist(), thetas.tolist(), None, means,
                                   verdict, value, dict(p.to_dict(), statistic="mean_phi")))
        outcomes.append(o)
        points.append(dict(p.to_dict(), outcome=o.value, final_mean=means[-1]))
    return Verdict(Mode.STRONG, _combine(outcomes), xi.tolist(), None, grid, traces, points)


def test_phi(s, pn: ProbabilisticNorm, xi, grid: Optional[ParamGrid] = None,
             horizon: int = DEFAULT_HORIZON, tail_fraction: float = 0.25, jobs: int = 1) -> Verdict:
    """Ordinary convergence w.r.t. ``phi``, judged on ``1..horizon``.

    For each grid point, ``n0`` is one past the last index violating
    ``phi(w_k - xi; eps) > 1 - sigma``.  The point is certified when
    ``n0 <= (1 - tail_fraction) * horizon`` and refuted when a violation
    occurs in the final ``tail_fraction`` of the horizon.
    """
    if horizon < 1 or not 0.0 < tail_fraction < 1.0:
        raise ValueError("need horizon >= 1 and 0 < tail_fraction < 1")
    if s.window_dependent:
        raise ValueError("test_phi needs an ordinary (window-independent) sequence")
    grid = grid or ParamGrid()
    xi = _check_dims(s, pn, xi)
    ks = np.arange(1, horizon + 1, dtype=np.int64)
    diff = s.values(ks) - xi
    cutoff = (1.0 - tail_fraction) * horizon

    def run(p):
        bad = np.flatnonzero(pn.at_most(diff, p.eps, p.sigma))
        last_bad = int(bad[-1]) + 1 if bad.size else 0
        n0 = last_bad + 1
        if n0 <= cutoff:
            o = Outcome.CERTIFIED
        elif last_bad > cutoff:
            o = Outcome.REFUTED
        else:
            o = Outcome.INCONCLUSIVE
        return dict(p.to_dict(), outcome=o.value, n0=n0 if n0 <= horizon else None,
                    last_violation=last_bad or None), o

    results = _map(run, grid.points(), jobs)
    points = [r for r, _ in results]
    outcome = _combine([o for _, o in results])
    anchor = None
    if outcome is Outcome.CERTIFIED:
        anchor = max(r["n0"] for r in points)
    return Verdict(Mode.PHI, outcome, xi.tolist(), anchor, grid, [], points)


@dataclass
class AnchorContext:
    s: object
    pn: ProbabilisticNorm
    w: DeferredWindow
    n_final: int
    params: ExceedanceParams
    xi_hint: Optional[np.ndarray]
    tnorm: TNorm


def default_anchor_rule(ctx: AnchorContext) -> int:
    """First index of the final window outside ``A(lambda, eps)`` for the
    hinted limit, i.e. with ``phi(w_k - xi; eps/2) > 1 - lambda``; the median
    index of the final window when no limit is hinted or none qualifies."""
    a, t = ctx.w.at(ctx.n_final)
    median = (a + 1 + t) // 2
    if ctx.xi_hint is None:
        return median
    lam = choose_lambda(ctx.tnorm, ctx.params.sigma)
    ks = np.arange(a + 1, t + 1, dtype=np.int64)
    outside = np.flatnonzero(~ctx.pn.at_most(ctx.s.values(ks) - ctx.xi_hint, ctx.params.eps / 2, lam))
    return int(ks[outside[0]]) if outside.size else median


def test_dstat_cauchy(s, pn: ProbabilisticNorm, w: DeferredWindow, grid: Optional[ParamGrid] = None,
                      n_grid=None, schedule: Optional[ToleranceSchedule] = None,
                      anchor_rule: Optional[Callable[[AnchorContext], int]] = None,
                      xi_hint=None, tnorm: TNorm = PRODUCT, horizon: Optional[int] = None,
                      jobs: int = 1) -> Verdict:
    """Deferred statistical Cauchy test.

    For each grid point an anchor ``n0`` is picked by ``anchor_rule`` and
    the set ``{k : phi(w_k - w_n0; eps) <= 1 - sigma}`` must have a trace
    tending to zero.
    """
    if s.window_dependent:
        raise ValueError("the Cauchy test needs an ordinary (window-independent) sequence")
    n_grid, schedule, grid = _setup(n_grid, horizon, schedule, grid)
    _check_dims(s, pn)
    hint = None if xi_hint is None else as_vec(xi_hint, s.dim)
    rule = anchor_rule or default_anchor_rule

    def run(p):
        n0 = int(rule(AnchorContext(s, pn, w, n_grid[-1], p, hint, tnorm)))
        ref = s.eval(n0)
        pred = exceedance_predicate(s, pn, ref, p)
        tr = deferred_density(pred, w, n_grid, schedule, label=dict(p.to_dict(), anchor=n0))
        return n0, tr, _density_outcome(tr, schedule)

    results = _map(run, grid.points(), jobs)
    points = [dict(p.to_dict(), anchor=n0, outcome=o.value, final_ratio=tr.final_ratio)
              for p, (n0, tr, o) in zip(grid.points(), results)]
    outcome = _combine([o for _, _, o in results])
    return Verdict(Mode.CAUCHY, outcome, None, results[0][0], grid,
                   [tr for _, tr, _ in results], points)


def estimate_limit(s, pn: ProbabilisticNorm, w: DeferredWindow, candidates,
                   grid: Optional[ParamGrid] = None, n_grid=None,
                   schedule: Optional[ToleranceSchedule] = None,
                   horizon: Optional[int] = None, jobs: int = 1):
    """Run :func:`test_dstat` for every candidate limit.

    Returns ``(best, scores)`` where ``best`` is the unique certified
    candidate (or None) and ``scores`` holds each candidate's worst final
    exceedance ratio.  Raises :class:`AmbiguousLimit` when two distinct
    candidates certify.
    """
    cands = [as_vec(c, s.dim) for c in candidates]
    if not cands:
        raise ValueError("need at least one candidate")
    certified, scores = [], []
    for c in cands:
        v = test_dstat(s, pn, c, w, grid, n_grid, schedule, horizon, jobs)
        scores.append(v.worst_final_ratio)
        if v.certified:
            certified.append(c)
    distinct = []
    for c in certified:
        if not any(np.array_equal(c, d) for d in distinct):
            distinct.append(c)
    if len(distinct) > 1:
        raise AmbiguousLimit(
            f"{len(distinct)} distinct candidates certified: {[d.tolist() for d in distinct]}; "
            "the parameter grid or schedule cannot separate them", distinct)
    return (distinct[0] if distinct else None), scores


# Keep pytest from collecting the testers when they are imported into test modules.
for _fn in (test_dstat, test_strong_deferred, test_phi, test_dstat_cauchy):
    _fn.__test__ = False
del _fn
