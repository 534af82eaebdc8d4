import numpy as np
import pytest

from defstat import convergence as cv
from defstat import density as dn
from defstat import sequences as sq
from defstat import theorems as th
from defstat import windows as wn
from defstat.errors import ConfigError
from defstat.pns import phi0

SMALL_N = dn.geometric_grid(1 << 12)


def small(name, source, xi, **kw):
    return th.Instance(name, source, xi, n_grid=SMALL_N, horizon=1 << 12, **kw)


@pytest.mark.parametrize("entry", th.DEFAULT_MANIFEST, ids=lambda e: e["scenario"])
def test_default_scenarios(entry):
    check = th.SCENARIOS[entry["scenario"]]()
    assert check.status.value == entry["expect"], check.to_dict()


def test_manifest_covers_every_check():
    ids = {th.SCENARIOS[e["scenario"]]().id for e in th.DEFAULT_MANIFEST if e["expect"] == "pass"}
    assert ids == set(th.CheckId)


def test_not_applicable_skips_conclusion():
    eo = small("eo", sq.EvenOddOscillator([1.0], [0.0]), [0.0])
    c = th.check_convergent_implies_cauchy(eo)
    assert c.status is th.Status.NOT_APPLICABLE
    assert c.hypotheses == {"convergent": False}
    assert "cauchy_outcome" not in c.evidence


def test_bad_witness_fails_phi_check():
    harmonic = small("h", sq.HarmonicApproach([0.0], [1.0]), [0.0])
    # a phi-convergent "witness" cannot separate the two notions
    c = th.check_phi_implies_dstat(harmonic, witness=harmonic)
    assert c.status is th.Status.FAIL
    assert c.evidence["witness_phi"] == "certified"


def test_uniqueness_reports_ambiguity():
    coarse = cv.ParamGrid.single(2.0, 0.1)
    inst = small("c", sq.Constant([0.0]), [0.0], grid=coarse)
    c = th.check_uniqueness(inst, [[0.0], [0.1]])
    assert c.status is th.Status.FAIL
    assert c.evidence["ambiguous"] == [[0.0], [0.1]]


def test_scaling_identity_sampled():
    rng = np.random.default_rng(5)
    s = sq.HarmonicApproach([0.5], [3.0])
    bad = 0
    for kappa in (-7.0, -0.5, 0.25, 3.0, 1e3):
        for eps, sigma in [(0.1, 0.1), (1.0, 0.5), (2.0, 0.9)]:
            ks = rng.integers(1, 10 ** 6, size=200)
            bad += th.scaling_identity_discrepancies(s, phi0("absolute"), [0.5], kappa,
                                                     cv.ExceedanceParams(eps, sigma), ks)
    assert bad == 0
    with pytest.raises(ValueError):
        th.scaling_identity_discrepancies(s, phi0("absolute"), [0.5], 0.0,
                                          cv.ExceedanceParams(1.0, 0.5), [1])


def test_window_split_identity():
    pair = wn.WindowPair(wn.affine(1, 0, 3, 5), wn.affine(1, 2, 2, 5))
    assert th.window_split_discrepancies(dn.squares(), pair, range(1, 500)) == 0


def test_dimension_two_instance():
    inst = small("pair", sq.Where(dn.squares(), sq.Ramp([1.0, 1.0]), sq.Constant([0.0, 0.0])),
                 [0.0, 0.0], pn=phi0("euclidean"))
    assert th.check_uniqueness(inst).passed
    assert th.check_linearity_scalar(inst, -2.0).passed
    assert th.check_lemma_equivalences(inst).passed


def test_load_manifest(tmp_path):
    p = tmp_path / "m.yaml"
    p.write_text("checks:\n  - scenario: cauchy/even_odd\n    expect: not_applicable\n  - lemma/constant\n")
    assert th.load_manifest(p) == [
        {"scenario": "cauchy/even_odd", "expect": "not_applicable"},
        {"scenario": "lemma/constant", "expect": "pass"},
    ]
    p.write_text("checks:\n  - scenario: nope\n")
    with pytest.raises(ConfigError):
        th.load_manifest(p)
    p.write_text("checks: []\n")
    with pytest.raises(ConfigError):
        th.load_manifest(p)
    with pytest.raises(FileNotFoundError):
        th.load_manifest(tmp_path / "missing.yaml")


def test_run_manifest_flags_unexpected_status():
    entries = [{"scenario": "cauchy/even_odd", "expect": "pass"},
               {"scenario": "cauchy/constant", "expect": "pass"}]
    res = th.run_manifest(entries)
    assert [ok for _, _, ok, _ in res] == [False, True]
    assert '"all_as_expected": false' in th.report_json(res)
    assert "NO" in th.summary_table(res)
