"""Acceptance suite: one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends
with one PASS/FAIL line per criterion.
"""
import math
import time

import numpy as np
import pytest

from defstat import cli
from defstat import convergence as cv
from defstat import density as dn
from defstat import sequences as sq
from defstat import theorems as th
from defstat import windows as wn
from defstat.pns import check_pn_axioms, phi0
from defstat.tnorm import LUKASIEWICZ, MIN, PRODUCT, check_tnorm_axioms

ABS = phi0("absolute")
P_HALF = cv.ExceedanceParams(1.0, 0.5)


@pytest.mark.criterion(1, "square indicator: count 1000 and ratio 1e-3 at n = 10^6, dstat certified, phi refuted, < 2 s")
def test_criterion_1_square_indicator(record_property):
    t0 = time.perf_counter()
    grid = cv.ParamGrid.single(1.0, 0.5)
    v = cv.test_dstat(sq.SquareIndicator(), ABS, [0.0], wn.classical(), grid, horizon=10 ** 6)
    phi = cv.test_phi(sq.SquareIndicator(), ABS, [0.0], grid, horizon=10 ** 6)
    elapsed = time.perf_counter() - t0
    tr = v.traces[0]
    record_property("detail", f"count={tr.counts[-1]} ratio={tr.final_ratio!r} {elapsed:.2f}s")
    assert tr.n_grid[-1] == 10 ** 6
    assert tr.counts[-1] == 1000 == math.isqrt(10 ** 6)
    assert tr.final_ratio == 1e-3
    assert v.certified
    assert phi.refuted
    assert elapsed < 2.0


@pytest.mark.criterion(2, "window-local example (k0 = 5, theta = n^2, alpha = n // 2): counts <= 5 for n <= 1000, certified")
def test_criterion_2_window_local_example(record_property):
    k0 = 5
    w = wn.explicit(lambda n: n // 2, lambda n: n * n, "n//2,n^2")
    s = sq.Example31(k0, w)
    pred = cv.exceedance_predicate(s, ABS, [0.0], P_HALF)
    worst = 0
    for n in range(1, 1001):
        a, t = w.at(n)
        top = math.isqrt(t)
        # membership oracle: the window meets the support (top - k0, top] in an interval
        oracle = max(0, min(t, top) - max(a, top - k0))
        got = dn.deferred_count(pred, w, n)
        assert got == oracle <= k0
        assert got / (t - a) <= k0 / (n * n - n // 2)
        worst = max(worst, got)
    # full recount of every window for the smaller n
    for n in range(1, 120):
        assert dn.naive_count(pred, w, n) == dn.deferred_count(pred, w, n)
    v = cv.test_dstat(s, ABS, [0.0], w, n_grid=dn.geometric_grid(1000))
    record_property("detail", f"max count {worst}, worst final ratio {v.worst_final_ratio:.3g}")
    assert v.certified


@pytest.mark.criterion(3, "axiom suites: t-norms on 10^4 samples, phi0 under product and min in dims 1-8")
def test_criterion_3_axioms(record_property):
    for t, tol in ((MIN, 0.0), (PRODUCT, 1e-12), (LUKASIEWICZ, 0.0)):
        rep = check_tnorm_axioms(t, 10_000, seed=42, tol=tol)
        assert rep.passed, (t.name, [r.to_dict() for r in rep.failures])
    checked = 0
    for t in (PRODUCT, MIN):
        for dim in range(1, 9):
            rep = check_pn_axioms(phi0("euclidean"), t, dim, 1000, seed=42, tol=1e-12)
            assert rep.passed, (t.name, dim, [r.to_dict() for r in rep.failures])
            checked += 1
    record_property("detail", f"3 t-norms, {checked} pn suites")


def _acceptance_sources():
    linear = wn.explicit(lambda n: 1, lambda n: n + 40, "1,n+40")
    return [
        ("constant", sq.Constant([2.0]), None),
        ("squares", sq.SquareIndicator(), None),
        ("harmonic", sq.HarmonicApproach([0.0], [1.0]), None),
        ("even_odd", sq.EvenOddOscillator([1.0], [0.0]), None),
        ("ramp", sq.Ramp([0.001]), None),
        ("window_local", sq.Example31(5, linear), linear),
    ]


def _preset_windows():
    return [
        wn.classical(),
        wn.lambda_window(lambda n: (n + 1) // 2),
        wn.lacunary(lambda r: r * (r + 1) // 2),
        wn.affine(1, 0, 2, 4),
        wn.explicit(lambda n: n // 3, lambda n: 2 * n + 7),
    ]


@pytest.mark.criterion(4, "incremental counts equal a full recount for n <= 2000, all built-in sequences and presets")
def test_criterion_4_incremental_vs_naive(record_property):
    compared = 0
    params = (P_HALF, cv.ExceedanceParams(0.1, 0.1))
    for name, s, own_window in _acceptance_sources():
        windows = [own_window] if own_window is not None else _preset_windows()
        for w in windows:
            for p in params:
                pred = cv.exceedance_predicate(s, ABS, [0.0], p)
                counter = None if pred.window_dependent else dn.PrefixCounter(pred, chunk=4096)
                for n in range(1, 2001):
                    inc = dn.deferred_count(pred, w, n, counter)
                    assert inc == dn.naive_count(pred, w, n), (name, w.kind, p, n)
                    compared += 1
    record_property("detail", f"{compared} windows compared")


@pytest.mark.criterion(5, "classical window ratios equal natural density for squares, n <= 10^4")
def test_criterion_5_classical_reduction(record_property):
    ns = list(range(1, 10_001))
    tr = dn.deferred_density(dn.squares(), wn.classical(), ns)
    ks = np.arange(1, 10_001)
    running = np.cumsum(dn.is_square(ks))
    sq_pred = dn.squares()
    for n, r in zip(ns, tr.ratios):
        assert r == dn.natural_density_ratio(sq_pred, n)
        assert r == int(running[n - 1]) / n == math.isqrt(n) / n
    record_property("detail", f"{len(ns)} values of n")


@pytest.mark.criterion(6, "theorem manifest: all ten checks pass on the default instances, < 60 s")
def test_criterion_6_manifest(record_property):
    t0 = time.perf_counter()
    results = th.run_manifest()
    elapsed = time.perf_counter() - t0
    assert all(ok for *_, ok, _ in results), th.summary_table(results)
    passed_ids = {c.id for _, c, _, _ in results if c.passed}
    assert passed_ids == set(th.CheckId)
    kappas = {c.instance["kappa"] for _, c, _, _ in results
              if c.id is th.CheckId.LINEARITY_SCALAR and c.passed}
    assert kappas == {0.0, 3.0, -2.0}
    beta = [c.evidence["beta"] for e, c, _, _ in results if e["scenario"] == "window_ratio/beta4"]
    assert beta == [4.0]
    witness = [c for e, c, _, _ in results if e["scenario"] == "phi_implies_dstat/harmonic"][0]
    assert witness.evidence["witness_dstat"] == "certified" and witness.evidence["witness_phi"] == "refuted"
    record_property("detail", f"{len(results)} scenarios, {len(passed_ids)} check kinds passed, {elapsed:.1f}s")
    assert elapsed < 60.0


@pytest.mark.criterion(7, "scaling exceedance-set and window-split identities on 10^3 sampled (k, kappa, n)")
def test_criterion_7_exact_identities(record_property):
    rng = np.random.default_rng(2024)
    grid = cv.ParamGrid().points()
    sources = [sq.SquareIndicator(), sq.EvenOddOscillator([1.0], [0.0]), sq.HarmonicApproach([0.0], [1.0])]
    pair = wn.WindowPair(wn.affine(1, 0, 3, 5), wn.affine(1, 2, 2, 5))
    split_preds = [cv.exceedance_predicate(sq.SquareIndicator(), ABS, [0.0], p) for p in grid[:4]]
    scaling_bad = split_bad = 0
    for _ in range(1000):
        k = int(rng.integers(1, 10 ** 6))
        kappa = float(rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3))
        n = int(rng.integers(1, 10 ** 4))
        s = sources[int(rng.integers(len(sources)))]
        p = grid[int(rng.integers(len(grid)))]
        scaling_bad += th.scaling_identity_discrepancies(s, ABS, [0.0], kappa, p, [k])
        pred = split_preds[int(rng.integers(len(split_preds)))]
        split_bad += th.window_split_discrepancies(pred, pair, [n])
    record_property("detail", f"scaling {scaling_bad}, split {split_bad} discrepancies")
    assert scaling_bad == 0 and split_bad == 0


CONFIG = """
sequence: {kind: even_odd, even: [1.0], odd: [0.0]}
xi: [0.0]
pn: {kind: phi0, base_norm: euclidean}
window: {kind: affine, a: 1, b: 0, c: 2, d: 0}
mode: all
horizon: 100000
seed: 7
"""


@pytest.mark.criterion(8, "two analyze runs with the same config and seed give byte-identical artifacts")
def test_criterion_8_determinism(tmp_path, record_property):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(CONFIG)
    runs = []
    for i, jobs in enumerate(("1", "3")):
        out = tmp_path / f"run{i}"
        cli.main(["analyze", "--config", str(cfg), "--out", str(out), "--seed", "7", "--jobs", jobs])
        runs.append({p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    assert runs[0].keys() == runs[1].keys() and len(runs[0]) > 1
    assert runs[0] == runs[1]
    record_property("detail", f"{len(runs[0])} files identical")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
