"""Executable checks of the deferred-statistical-convergence theorems.

Every check first evaluates its hypotheses on the concrete instance; if any
hypothesis fails the check is ``not_applicable`` and its conclusion is not
judged.  Otherwise it is ``pass`` or ``fail``.  Quantifiers over eps and
sigma are replaced by the instance's :class:`ParamGrid`, and limits by the
instance's :class:`ToleranceSchedule`; both are recorded in each report.

Named scenarios (``SCENARIOS``) bind checks to fixed instances;
``DEFAULT_MANIFEST`` lists them with the status each one is expected to
produce.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import yaml

from . import convergence as cv
from . import density as dn
from . import sequences as sq
from . import windows as wn
from .errors import AmbiguousLimit, ConfigError
from .pns import ProbabilisticNorm, as_vec, phi0
from .tnorm import PRODUCT, TNorm, choose_lambda

__all__ = [
    "CheckId",
    "Status",
    "Instance",
    "TheoremCheck",
    "check_uniqueness",
    "check_linearity",
    "check_linearity_sum",
    "check_linearity_scalar",
    "check_phi_implies_dstat",
    "check_ae_equality",
    "check_bounded_ratio_transfer",
    "check_nested_finite_tails",
    "check_window_ratio",
    "check_convergent_implies_cauchy",
    "check_lemma_equivalences",
    "scaling_identity_discrepancies",
    "window_split_discrepancies",
    "SCENARIOS",
    "DEFAULT_MANIFEST",
    "load_manifest",
    "run_manifest",
]

HARNESS_HORIZON = 1 << 16


class CheckId(str, enum.Enum):
    UNIQUENESS = "uniqueness"
    LINEARITY_SUM = "linearity_sum"
    LINEARITY_SCALAR = "linearity_scalar"
    PHI_IMPLIES_DSTAT = "phi_implies_dstat"
    AE_EQUALITY = "ae_equality"
    BOUNDED_RATIO = "stat_implies_dstat_bounded_ratio"
    NESTED_FINITE_TAILS = "nested_finite_tails"
    WINDOW_RATIO = "window_ratio"
    CONVERGENT_IMPLIES_CAUCHY = "convergent_implies_cauchy"
    LEMMA_EQUIVALENCES = "lemma_equivalences"


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"


@dataclass
class Instance:
    """A sequence with everything needed to run the testers on it."""

    name: str
    source: sq.SequenceSource
    xi: np.ndarray
    pn: ProbabilisticNorm = field(default_factory=lambda: phi0("absolute"))
    window: wn.DeferredWindow = field(default_factory=wn.classical)
    tnorm: TNorm = PRODUCT
    grid: cv.ParamGrid = field(default_factory=cv.ParamGrid)
    n_grid: list = field(default_factory=lambda: dn.geometric_grid(HARNESS_HORIZON))
    schedule: dn.ToleranceSchedule = field(default_factory=dn.ToleranceSchedule)
    horizon: int = HARNESS_HORIZON

    def __post_init__(self):
        self.xi = as_vec(self.xi, self.source.dim)

    def replace(self, **kw) -> "Instance":
        return dataclasses.replace(self, **kw)

    def dstat(self, window=None, xi=None, source=None, grid=None) -> cv.Verdict:
        return cv.test_dstat(source or self.source, self.pn, self.xi if xi is None else xi,
                             window or self.window, grid or self.grid, self.n_grid, self.schedule)

    def phi(self) -> cv.Verdict:
        return cv.test_phi(self.source, self.pn, self.xi, self.grid, self.horizon)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "sequence": self.source.describe(),
            "xi": self.xi.tolist(),
            "pn": self.pn.name,
            "window": self.window.describe(),
            "tnorm": self.tnorm.name,
            "grid": self.grid.to_dict(),
            "n_max": self.n_grid[-1],
            "schedule": self.schedule.to_dict(),
        }


@dataclass
class TheoremCheck:
    id: CheckId
    instance: dict
    status: Status
    hypotheses: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    scenario: str = ""

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_dict(self):
        return {
            "id": self.id.value,
            "scenario": self.scenario,
            "status": self.status.value,
            "hypotheses": self.hypotheses,
            "evidence": self.evidence,
            "instance": self.instance,
        }


def _gate(cid, instance, hypotheses, evidence=None):
    """Not-applicable report when some hypothesis fails, else None."""
    if all(hypotheses.values()):
        return None
    return TheoremCheck(cid, instance, Status.NOT_APPLICABLE, hypotheses, evidence or {})


def _conclude(cid, instance, hypotheses, ok, evidence):
    return TheoremCheck(cid, instance, Status.PASS if ok else Status.FAIL, hypotheses, evidence)


def _vals(s, ks, n):
    return s.values(ks, n) if s.window_dependent else s.values(ks)


def check_uniqueness(inst: Instance, candidates=None, delta_sep: float = 0.5) -> TheoremCheck:
    """At most one candidate limit certifies.

    Candidates default to the instance limit and its shifts by
    ``+-delta_sep`` along each coordinate axis.
    """
    if candidates is None:
        eye = np.eye(inst.source.dim)
        candidates = [inst.xi] + [inst.xi + sgn * delta_sep * e for e in eye for sgn in (1, -1)]
    candidates = [as_vec(c, inst.source.dim) for c in candidates]
    hyp = {"converges_to_xi": inst.dstat().certified}
    ev = {"candidates": [c.tolist() for c in candidates], "delta_sep": delta_sep}
    try:
        best, scores = cv.estimate_limit(inst.source, inst.pn, inst.window, candidates,
                                         inst.grid, inst.n_grid, inst.schedule)
    except AmbiguousLimit as exc:
        ev["ambiguous"] = [c.tolist() for c in exc.certified]
        ev["diagnostic"] = str(exc)
        gated = _gate(CheckId.UNIQUENESS, inst.describe(), hyp, ev)
        return gated or _conclude(CheckId.UNIQUENESS, inst.describe(), hyp, False, ev)
    ev["best"] = None if best is None else best.tolist()
    ev["scores"] = scores
    gated = _gate(CheckId.UNIQUENESS, inst.describe(), hyp, ev)
    if gated:
        return gated
    ok = best is not None and np.array_equal(best, inst.xi)
    return _conclude(CheckId.UNIQUENESS, inst.describe(), hyp, ok, ev)


def _sum_bound_violations(a: Instance, b: Instance, total, limit):
    """Indices in C(sigma, eps) outside A(lambda, eps) | B(lambda, eps)."""
    bad = 0
    checked = 0
    for p in a.grid.points():
        lam = choose_lambda(a.tnorm, p.sigma)
        for n in a.n_grid:
            lo, hi = a.window.at(n)
            ks = np.arange(lo + 1, hi + 1, dtype=np.int64)
            c = a.pn.at_most(_vals(total, ks, n) - limit, p.eps, p.sigma)
            in_a = a.pn.at_most(_vals(a.source, ks, n) - a.xi, p.eps / 2, lam)
            in_b = a.pn.at_most(_vals(b.source, ks, n) - b.xi, p.eps / 2, lam)
            bad += int(np.count_nonzero(c & ~(in_a | in_b)))
            checked += ks.size
    return bad, checked


def check_linearity_sum(a: Instance, b: Instance) -> TheoremCheck:
    """Limits add: ``w + l`` converges to ``xi + beta``."""
    hyp = {"first_converges": a.dstat().certified,
           "second_converges": a.dstat(source=b.source, xi=b.xi).certified}
    desc = {"first": a.describe(), "second": b.describe()}
    gated = _gate(CheckId.LINEARITY_SUM, desc, hyp)
    if gated:
        return gated
    total = sq.Sum(a.source, b.source)
    limit = a.xi + b.xi
    v = a.dstat(source=total, xi=limit)
    bad, checked = _sum_bound_violations(a, b, total, limit)
    ev = {"sum_limit": limit.tolist(), "sum_outcome": v.outcome.value,
          "sum_worst_final_ratio": v.worst_final_ratio,
          "union_bound_violations": bad, "union_bound_indices_checked": checked}
    return _conclude(CheckId.LINEARITY_SUM, desc, hyp, v.certified and bad == 0, ev)


def scaling_identity_discrepancies(s, pn: ProbabilisticNorm, xi, kappa: float, p: cv.ExceedanceParams,
                                   ks, n: Optional[int] = None) -> int:
    """Indices where ``phi(k w - k xi; eps) <= 1 - sigma`` and
    ``phi(w - xi; eps / |k|) <= 1 - sigma`` disagree."""
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    ks = np.asarray(ks, dtype=np.int64)
    xi = as_vec(xi, s.dim)
    scaled = _vals(sq.Scaled(kappa, s), ks, n) - kappa * xi
    left = pn.at_most(scaled, p.eps, p.sigma)
    right = pn.at_most(_vals(s, ks, n) - xi, Fraction(p.eps) / abs(Fraction(kappa)), p.sigma)
    return int(np.count_nonzero(left != right))


def check_linearity_scalar(inst: Instance, kappa: float) -> TheoremCheck:
    """``kappa * w`` converges to ``kappa * xi``."""
    kappa = float(kappa)
    hyp = {"converges_to_xi": inst.dstat().certified}
    desc = dict(inst.describe(), kappa=kappa)
    gated = _gate(CheckId.LINEARITY_SCALAR, desc, hyp)
    if gated:
        return gated
    scaled = sq.Scaled(kappa, inst.source)
    v = inst.dstat(source=scaled, xi=kappa * inst.xi)
    ev = {"scaled_limit": (kappa * inst.xi).tolist(), "scaled_outcome": v.outcome.value}
    ok = v.certified
    if kappa != 0 and inst.pn.kind == "phi0":
        bad = 0
        for p in inst.grid.points():
            for n in inst.n_grid:
                lo, hi = inst.window.at(n)
                bad += scaling_identity_discrepancies(inst.source, inst.pn, inst.xi, kappa, p,
                                                      np.arange(lo + 1, hi + 1), n)
        ev["exceedance_identity_discrepancies"] = bad
        ok = ok and bad == 0
    return _conclude(CheckId.LINEARITY_SCALAR, desc, hyp, ok, ev)


def check_linearity(a: Instance, b: Instance, kappa: float):
    """Both halves of the algebraic characterization: (sum check, scalar check)."""
    return check_linearity_sum(a, b), check_linearity_scalar(a, kappa)


def squares_instance(**kw) -> Instance:
    return Instance("squares", sq.SquareIndicator(), [0.0], **kw)


def check_phi_implies_dstat(inst: Instance, witness: Optional[Instance] = None) -> TheoremCheck:
    """phi-convergence implies deferred statistical convergence; the converse
    witness (square indicator) must certify deferred-statistically while
    failing ordinary convergence."""
    phi = inst.phi()
    hyp = {"phi_convergent": phi.certified}
    desc = inst.describe()
    gated = _gate(CheckId.PHI_IMPLIES_DSTAT, desc, hyp, {"phi_points": phi.points})
    if gated:
        return gated
    v = inst.dstat()
    witness = witness or squares_instance(n_grid=inst.n_grid, horizon=inst.horizon)
    w_dstat, w_phi = witness.dstat(), witness.phi()
    ev = {"phi_n0": phi.anchor, "dstat_outcome": v.outcome.value,
          "witness": witness.name, "witness_dstat": w_dstat.outcome.value,
          "witness_phi": w_phi.outcome.value}
    ok = v.certified and w_dstat.certified and w_phi.refuted
    return _conclude(CheckId.PHI_IMPLIES_DSTAT, desc, hyp, ok, ev)


def check_ae_equality(inst_w: Instance, inst_l: Instance) -> TheoremCheck:
    """If ``w`` and ``l`` differ on a deferred-density-zero set and ``l`` is
    phi-convergent to ``xi``, then ``w`` converges deferred-statistically to ``xi``."""
    w_src, l_src = inst_w.source, inst_l.source
    differ = dn.IndexPredicate(
        lambda ks: np.any(w_src.values(ks) != l_src.values(ks), axis=1), "w != l")
    trace = dn.deferred_density(differ, inst_w.window, inst_w.n_grid, inst_w.schedule)
    phi = inst_l.phi()
    hyp = {"disagreement_density_zero": trace.verdict is dn.TraceVerdict.TENDS_TO_ZERO,
           "l_phi_convergent": phi.certified}
    desc = {"w": inst_w.describe(), "l": inst_l.describe()}
    ev = {"disagreement_final_ratio": trace.final_ratio, "disagreement_verdict": trace.verdict.value}
    gated = _gate(CheckId.AE_EQUALITY, desc, hyp, ev)
    if gated:
        return gated
    v = inst_w.dstat(xi=inst_l.xi)
    ev["w_outcome"] = v.outcome.value
    return _conclude(CheckId.AE_EQUALITY, desc, hyp, v.certified, ev)


def check_bounded_ratio_transfer(inst: Instance, w: wn.DeferredWindow) -> TheoremCheck:
    """Statistical convergence transfers to window ``w`` when
    ``alpha(n) / (theta(n) - alpha(n))`` is bounded."""
    rep = wn.ratio_sequence(w, inst.n_grid[-1])
    classical = inst.dstat(window=wn.classical())
    hyp = {"ratio_bounded": rep.bounded, "statistically_convergent": classical.certified}
    desc = dict(inst.describe(), target_window=w.describe())
    ev = {"ratio": rep.to_dict()}
    gated = _gate(CheckId.BOUNDED_RATIO, desc, hyp, ev)
    if gated:
        return gated
    v = inst.dstat(window=w)
    ev["target_outcome"] = v.outcome.value
    ev["target_worst_final_ratio"] = v.worst_final_ratio
    return _conclude(CheckId.BOUNDED_RATIO, desc, hyp, v.certified, ev)


def window_split_discrepancies(pred: dn.IndexPredicate, pair: wn.WindowPair, ns) -> int:
    """Windows where the outer count differs from the three-part split
    ``(alpha, rho] + (rho, varsigma] + (varsigma, theta]``."""
    counter = dn.PrefixCounter(pred)
    bad = 0
    for n in ns:
        a, t = pair.outer.at(n)
        r, s = pair.inner.at(n)
        parts = counter.count(a, r) + counter.count(r, s) + counter.count(s, t)
        if parts != dn.naive_count(pred, pair.outer, n):
            bad += 1
    return bad


def _pair_desc(inst, pair):
    return dict(inst.describe(), outer=pair.outer.describe(), inner=pair.inner.describe())


def check_nested_finite_tails(inst: Instance, pair: wn.WindowPair, tail_bound: int) -> TheoremCheck:
    """Inner-window convergence transfers to the outer window when both
    tails ``(alpha, rho]`` and ``(varsigma, theta]`` stay bounded."""
    n_max = inst.n_grid[-1]
    worst = max(max(pair.tails(n)) for n in range(1, n_max + 1))
    inner = inst.dstat(window=pair.inner)
    hyp = {"tails_bounded": worst <= tail_bound, "inner_convergent": inner.certified}
    desc = dict(_pair_desc(inst, pair), tail_bound=tail_bound)
    ev = {"max_tail": worst}
    gated = _gate(CheckId.NESTED_FINITE_TAILS, desc, hyp, ev)
    if gated:
        return gated
    outer = inst.dstat(window=pair.outer)
    split_bad = 0
    for p in inst.grid.points():
        pred = cv.exceedance_predicate(inst.source, inst.pn, inst.xi, p)
        split_bad += window_split_discrepancies(pred, pair, inst.n_grid)
    ev.update(outer_outcome=outer.outcome.value, split_identity_discrepancies=split_bad)
    return _conclude(CheckId.NESTED_FINITE_TAILS, desc, hyp, outer.certified and split_bad == 0, ev)


def check_window_ratio(inst: Instance, pair: wn.WindowPair) -> TheoremCheck:
    """Outer-window convergence transfers to the inner window when
    ``(theta - alpha) / (varsigma - rho)`` converges to some beta > 0."""
    ratios = [pair.length_ratio(n) for n in inst.n_grid]
    tail = ratios[inst.schedule.tail_start(len(ratios)):]
    beta = tail[-1]
    stable = (max(tail) - min(tail)) <= inst.schedule.stability_tol * max(1.0, beta)
    outer = inst.dstat(window=pair.outer)
    hyp = {"length_ratio_converges": bool(stable and beta > 0), "outer_convergent": outer.certified}
    desc = _pair_desc(inst, pair)
    ev = {"beta": beta, "length_ratio_tail": tail}
    gated = _gate(CheckId.WINDOW_RATIO, desc, hyp, ev)
    if gated:
        return gated
    inner = inst.dstat(window=pair.inner)
    ev["inner_outcome"] = inner.outcome.value
    return _conclude(CheckId.WINDOW_RATIO, desc, hyp, inner.certified, ev)


def check_convergent_implies_cauchy(inst: Instance) -> TheoremCheck:
    """A deferred statistically convergent sequence is deferred statistically
    Cauchy.  Evidence: ``B(sigma, eps) ⊆ A(lambda, eps)`` on every grid window."""
    hyp = {"convergent": inst.dstat().certified}
    desc = inst.describe()
    gated = _gate(CheckId.CONVERGENT_IMPLIES_CAUCHY, desc, hyp)
    if gated:
        return gated
    v = cv.test_dstat_cauchy(inst.source, inst.pn, inst.window, inst.grid, inst.n_grid,
                             inst.schedule, xi_hint=inst.xi, tnorm=inst.tnorm)
    s = inst.source
    violations = 0
    for p, point in zip(inst.grid.points(), v.points):
        lam = choose_lambda(inst.tnorm, p.sigma)
        ref = s.eval(point["anchor"])
        for n in inst.n_grid:
            lo, hi = inst.window.at(n)
            vals = s.values(np.arange(lo + 1, hi + 1))
            b = inst.pn.at_most(vals - ref, p.eps, p.sigma)
            a = inst.pn.at_most(vals - inst.xi, p.eps / 2, lam)
            violations += int(np.count_nonzero(b & ~a))
    ev = {"cauchy_outcome": v.outcome.value, "anchors": sorted({pt["anchor"] for pt in v.points}),
          "inclusion_violations": violations}
    return _conclude(CheckId.CONVERGENT_IMPLIES_CAUCHY, desc, hyp, v.certified and violations == 0, ev)


def check_lemma_equivalences(inst: Instance, p: Optional[cv.ExceedanceParams] = None) -> TheoremCheck:
    """The four equivalent statements agree on the instance:

    1. the sequence converges deferred-statistically;
    2. every exceedance set has deferred density zero;
    3. every complement has deferred density one;
    4. each real sequence ``phi(w_k - xi; eps)`` converges deferred-statistically to 1.

    Also checks that exceedance and complement counts add up to the window
    length at every grid n.
    """
    grid = inst.grid
    if p is not None:
        grid = cv.ParamGrid(tuple(sorted(set(grid.eps_values) | {p.eps})),
                            tuple(sorted(set(grid.sigma_values) | {p.sigma})))
    stmt1 = inst.dstat(grid=grid)
    exc_zero, comp_one, identity_bad = [], [], 0
    for q, tr in zip(grid.points(), stmt1.traces):
        pred = cv.exceedance_predicate(inst.source, inst.pn, inst.xi, q)
        comp = dn.deferred_density(pred.complement(), inst.window, inst.n_grid, inst.schedule)
        identity_bad += sum(c1 + c2 != L for c1, c2, L in zip(tr.counts, comp.counts, tr.lengths))
        exc_zero.append(tr.verdict is dn.TraceVerdict.TENDS_TO_ZERO)
        comp_one.append(comp.verdict is dn.TraceVerdict.TENDS_TO_ONE)
    real_pn = phi0("absolute")
    phi_seq = []
    for eps in grid.eps_values:
        y = sq.Transformed(inst.source, lambda v, e=eps: inst.pn(v - inst.xi, e), 1, f"phi(.;{eps})")
        phi_seq.append(cv.test_dstat(y, real_pn, [1.0], inst.window, grid, inst.n_grid,
                                     inst.schedule).certified)
    statements = {"dstat_convergent": stmt1.certified, "exceedance_density_zero": all(exc_zero),
                  "complement_density_one": all(comp_one), "phi_values_converge_to_one": all(phi_seq)}
    agree = len(set(statements.values())) == 1
    ev = {"statements": statements, "count_identity_discrepancies": identity_bad,
          "grid": grid.to_dict()}
    return _conclude(CheckId.LEMMA_EQUIVALENCES, inst.describe(), {}, agree and identity_bad == 0, ev)


# Scenarios -----------------------------------------------------------------

def _constant(**kw):
    return Instance("constant", sq.Constant([2.0]), [2.0], **kw)


def _even_odd(**kw):
    return Instance("even_odd", sq.EvenOddOscillator([1.0], [0.0]), [0.0], **kw)


def _harmonic(**kw):
    return Instance("harmonic", sq.HarmonicApproach([0.0], [1.0]), [0.0], **kw)


def _spikes(cond, name):
    w = sq.Where(cond, sq.Ramp([1.0]), sq.Constant([0.0]))
    return Instance(name, w, [0.0]), Instance("zero", sq.Constant([0.0]), [0.0])


def _beta4_pair():
    return wn.WindowPair(wn.affine(0, 0, 2, 0), wn.explicit(lambda n: n // 2, lambda n: n, "half"))


SCENARIOS = {
    "uniqueness/squares": lambda: check_uniqueness(squares_instance(), [[0.0], [1.0], [-1.0]]),
    "uniqueness/constant": lambda: check_uniqueness(_constant(), [[2.0], [3.0]]),
    "uniqueness/even_odd": lambda: check_uniqueness(_even_odd(), [[0.0], [1.0]]),
    "linearity_sum/squares_twice": lambda: check_linearity_sum(squares_instance(),
                                                                 squares_instance()),
    "linearity_scalar/kappa_0": lambda: check_linearity_scalar(squares_instance(), 0.0),
    "linearity_scalar/kappa_3": lambda: check_linearity_scalar(squares_instance(), 3.0),
    "linearity_scalar/kappa_-2": lambda: check_linearity_scalar(squares_instance(), -2.0),
    "phi_implies_dstat/harmonic": lambda: check_phi_implies_dstat(_harmonic()),
    "phi_implies_dstat/constant": lambda: check_phi_implies_dstat(_constant()),
    "phi_implies_dstat/squares": lambda: check_phi_implies_dstat(squares_instance()),
    "ae_equality/square_spikes": lambda: check_ae_equality(*_spikes(dn.squares(), "square_spikes")),
    "ae_equality/identical": lambda: check_ae_equality(_constant(), _constant()),
    "ae_equality/even_disagreement": lambda: check_ae_equality(*_spikes(dn.evens(), "even_spikes")),
    "bounded_ratio/doubling": lambda: check_bounded_ratio_transfer(squares_instance(),
                                                                   wn.affine(1, 0, 2, 0)),
    "bounded_ratio/classical": lambda: check_bounded_ratio_transfer(squares_instance(), wn.classical()),
    "bounded_ratio/unbounded": lambda: check_bounded_ratio_transfer(
        squares_instance(), wn.explicit(lambda n: n * n - n, lambda n: n * n, "n^2-n")),
    "nested_tails/two_point_tails": lambda: check_nested_finite_tails(
        squares_instance(), wn.WindowPair(wn.affine(1, 0, 2, 4), wn.affine(1, 2, 2, 2)), 2),
    "nested_tails/empty_tails": lambda: check_nested_finite_tails(
        squares_instance(), wn.WindowPair(wn.classical(), wn.classical()), 0),
    "nested_tails/growing_tail": lambda: check_nested_finite_tails(
        squares_instance(), wn.WindowPair(wn.affine(1, 0, 2, 4), wn.affine(2, 0, 2, 2)), 2),
    "window_ratio/beta4": lambda: check_window_ratio(squares_instance(), _beta4_pair()),
    "window_ratio/identical": lambda: check_window_ratio(
        squares_instance(), wn.WindowPair(wn.affine(0, 0, 2, 0), wn.affine(0, 0, 2, 0))),
    "window_ratio/log_inner": lambda: check_window_ratio(
        squares_instance(),
        wn.WindowPair(wn.affine(0, 0, 2, 0),
                      wn.explicit(lambda n: n, lambda n: n + n.bit_length(), "log"))),
    "cauchy/squares": lambda: check_convergent_implies_cauchy(squares_instance()),
    "cauchy/constant": lambda: check_convergent_implies_cauchy(_constant()),
    "cauchy/even_odd": lambda: check_convergent_implies_cauchy(_even_odd()),
    "lemma/squares": lambda: check_lemma_equivalences(squares_instance(), cv.ExceedanceParams(1.0, 0.5)),
    "lemma/constant": lambda: check_lemma_equivalences(_constant(), cv.ExceedanceParams(1.0, 0.5)),
    "lemma/even_odd": lambda: check_lemma_equivalences(_even_odd(), cv.ExceedanceParams(1.0, 0.5)),
}

_EXPECT_NA = {
    "uniqueness/even_odd",
    "phi_implies_dstat/squares",
    "ae_equality/even_disagreement",
    "bounded_ratio/unbounded",
    "nested_tails/growing_tail",
    "window_ratio/log_inner",
    "cauchy/even_odd",
}

DEFAULT_MANIFEST = [
    {"scenario": name, "expect": (Status.NOT_APPLICABLE if name in _EXPECT_NA else Status.PASS).value}
    for name in SCENARIOS
]


def load_manifest(path) -> list:
    """Read a YAML manifest: ``{"checks": [{"scenario": ..., "expect": ...}, ...]}``."""
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    entries = doc.get("checks") if isinstance(doc, dict) else doc
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{path}: manifest needs a nonempty 'checks' list")
    out = []
    for i, e in enumerate(entries):
        if isinstance(e, str):
            e = {"scenario": e}
        if not isinstance(e, dict) or e.get("scenario") not in SCENARIOS:
            raise ConfigError(f"{path}: entry {i}: unknown scenario {e!r}")
        expect = e.get("expect", "pass")
        if expect not in {s.value for s in Status}:
            raise ConfigError(f"{path}: entry {i}: bad expect value {expect!r}")
        out.append({"scenario": e["scenario"], "expect": expect})
    return out


def _run_entry(entry):
    t0 = time.perf_counter()
    check = SCENARIOS[entry["scenario"]]()
    check.scenario = entry["scenario"]
    elapsed = time.perf_counter() - t0
    return check, check.status.value == entry["expect"], elapsed


def run_manifest(entries=None, jobs: int = 1):
    """Run every manifest entry; returns ``[(entry, check, as_expected, seconds)]``."""
    entries = entries or DEFAULT_MANIFEST
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_entry, entries))
    else:
        results = [_run_entry(e) for e in entries]
    return [(e, c, ok, t) for e, (c, ok, t) in zip(entries, results)]


def summary_table(results) -> str:
    width = max(len(e["scenario"]) for e, *_ in results)
    lines = [f"{'scenario':<{width}}  {'status':<15} {'expected':<15} ok"]
    for e, c, ok, _ in results:
        lines.append(f"{e['scenario']:<{width}}  {c.status.value:<15} {e['expect']:<15} {'yes' if ok else 'NO'}")
    return "\n".join(lines)


def report_json(results) -> str:
    recs = [dict(c.to_dict(), expect=e["expect"], as_expected=ok) for e, c, ok, _ in results]
    return json.dumps({"checks": recs, "all_as_expected": all(ok for *_, ok, _ in results)},
                      sort_keys=True, indent=1, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, enum.Enum):
        return o.value
    raise TypeError(type(o).__name__)
