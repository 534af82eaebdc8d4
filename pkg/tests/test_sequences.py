import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from defstat import density as dn
from defstat import sequences as sq
from defstat import windows as wn
from defstat.errors import DimensionError, DimError, GapError, IndexOutOfRange, ParseError


def test_builtin_values():
    ks = np.arange(1, 10)
    assert sq.SquareIndicator().values(ks)[:, 0].tolist() == [1, 0, 0, 1, 0, 0, 0, 0, 1]
    assert sq.Constant([1.0, 2.0]).values([3, 4]).tolist() == [[1, 2], [1, 2]]
    assert sq.HarmonicApproach([1.0], [2.0]).eval(4).tolist() == [1.5]
    assert sq.EvenOddOscillator([1.0], [0.0]).values([1, 2])[:, 0].tolist() == [0.0, 1.0]
    assert sq.Ramp([1.0, -1.0]).eval(3).tolist() == [3.0, -3.0]
    with pytest.raises(ValueError):
        sq.Ramp([1.0]).values([0])


def test_combinators():
    s = sq.SquareIndicator() + sq.SquareIndicator()
    assert s.values([4, 5])[:, 0].tolist() == [2.0, 0.0]
    t = 3 * sq.SquareIndicator()
    assert isinstance(t, sq.Scaled) and t.eval(9).tolist() == [3.0]
    w = sq.Where(dn.squares(), sq.Ramp([1.0]), sq.Constant([0.0]))
    assert w.values([3, 4, 9])[:, 0].tolist() == [0.0, 4.0, 9.0]
    f = sq.Transformed(sq.Ramp([1.0]), lambda v: v ** 2, 1, "sq")
    assert f.eval(5).tolist() == [25.0]
    with pytest.raises(DimensionError):
        sq.Constant([1.0]) + sq.Constant([1.0, 2.0])


def test_example31_support_and_gate():
    w = wn.explicit(lambda n: n // 2, lambda n: n * n)
    s = sq.Example31(5, w)
    assert s.gate_start == 9
    assert s.support(20) == (16, 20)
    vals = s.values(np.arange(1, 401), 20)[:, 0]
    assert np.flatnonzero(vals).tolist() == [15, 16, 17, 18, 19]
    assert vals[19] == 400.0
    with pytest.raises(ValueError):
        s.values([1])
    with pytest.raises(ValueError):
        sq.Example31(5, wn.explicit(lambda n: n, lambda n: n + 1))
    with pytest.raises(ValueError):
        sq.Example31(1, wn.explicit(lambda n: 1, lambda n: 100 - n if n < 50 else n * n))


@given(st.integers(1, 200), st.integers(1, 8))
def test_example31_window_count_oracle(n, k0):
    w = wn.explicit(lambda m: m // 2, lambda m: m * m)
    try:
        s = sq.Example31(k0, w, check_horizon=200)
    except ValueError:
        return
    a, t = w.at(n)
    top = math.isqrt(t)
    expected = sum(1 for k in range(a + 1, t + 1) if top - k0 < k <= top)
    vals = s.values(np.arange(a + 1, t + 1), n)[:, 0]
    assert int(np.count_nonzero(vals)) == expected <= k0


def test_ingest_csv(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("k,x,y\n1,0.5,1\n2,0.25,2\n3,0.125,3\n")
    s = sq.ingest(p)
    assert s.dim == 2 and s.record_count == 3
    assert s.values([2, 3]).tolist() == [[0.25, 2.0], [0.125, 3.0]]
    with pytest.raises(IndexOutOfRange):
        s.values([4])


def test_ingest_jsonl(tmp_path):
    p = tmp_path / "s.jsonl"
    p.write_text("\n".join(json.dumps({"k": k, "v": [k / 2]}) for k in range(1, 5)) + "\n")
    s = sq.ingest(p)
    assert s.values([4]).tolist() == [[2.0]]
    p.write_text('{"k": 1, "v": 3}\n')
    assert sq.ingest(p).eval(1).tolist() == [3.0]


@pytest.mark.parametrize("text,err,row", [
    ("1,0\n3,1\n", GapError, 2),
    ("2,0\n", GapError, 1),
    ("1,0\n2,1,5\n", DimError, 2),
    ("1,0\n2,abc\n", ParseError, 2),
    ("", ParseError, None),
])
def test_ingest_errors(tmp_path, text, err, row):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(err) as exc:
        sq.ingest(p)
    assert exc.value.row == row


def test_ingest_jsonl_errors(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"k": 1, "v": [1]}\n{"k": 2}\n')
    with pytest.raises(ParseError) as exc:
        sq.ingest(p)
    assert exc.value.row == 2


@given(st.lists(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=2),
                min_size=1, max_size=30))
def test_csv_roundtrip(tmp_path_factory, rows):
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    p.write_text("".join(f"{k},{repr(a)},{repr(b)}\n" for k, (a, b) in enumerate(rows, 1)))
    s = sq.ingest(p)
    assert s.values(np.arange(1, len(rows) + 1)).tolist() == rows
