"""Sequence sources: built-in examples, combinators and file-backed sequences.

Every source maps an int64 array of indices ``ks`` (all >= 1) to a float
array of shape ``(len(ks), dim)``.  Most sources are ordinary sequences.
:class:`Example31` is *window dependent*: its terms are defined relative to
the window index n, so ``values`` takes ``n`` as well.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .density import is_square
from .errors import DimError, DimensionError, GapError, IndexOutOfRange, ParseError
from .pns import as_vec
from .windows import DeferredWindow

__all__ = [
    "SequenceSource",
    "Constant",
    "SquareIndicator",
    "Example31",
    "HarmonicApproach",
    "EvenOddOscillator",
    "Ramp",
    "Where",
    "Scaled",
    "Sum",
    "Transformed",
    "FromFile",
    "ingest",
]


def _ks(ks) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    if ks.size and ks.min() < 1:
        raise ValueError("sequence indices start at 1")
    return ks


def _min_index(*sources):
    caps = [s.max_index for s in sources if s.max_index is not None]
    return min(caps) if caps else None


class SequenceSource:
    dim: int = 1
    window_dependent: bool = False
    kind: str = "source"
    # last valid index for finite (file-backed) sequences
    max_index: Optional[int] = None

    def values(self, ks, n: Optional[int] = None) -> np.ndarray:
        raise NotImplementedError

    def eval(self, k: int, n: Optional[int] = None) -> np.ndarray:
        return self.values(np.array([k]), n)[0]

    def describe(self) -> dict:
        return {"kind": self.kind}

    def __add__(self, other):
        return Sum(self, other)

    def __rmul__(self, kappa):
        return Scaled(kappa, self)

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"


class Constant(SequenceSource):
    kind = "constant"

    def __init__(self, c):
        self.c = as_vec(c)
        self.dim = self.c.size

    def values(self, ks, n=None):
        return np.tile(self.c, (_ks(ks).size, 1))

    def describe(self):
        return {"kind": self.kind, "value": self.c.tolist()}


class SquareIndicator(SequenceSource):
    """1 at perfect squares, 0 elsewhere."""

    kind = "square_indicator"

    def values(self, ks, n=None):
        return is_square(_ks(ks)).astype(float)[:, None]


class Example31(SequenceSource):
    """Terms equal to k**2 on the last ``k0`` indices up to ``isqrt(theta(n))``.

    The sequence is defined per window: for window n the nonzero terms sit
    at ``isqrt(theta(n)) - k0 < k <= isqrt(theta(n))`` and everything else
    is 0.  Construction checks that ``theta`` is nondecreasing on
    ``1..check_horizon`` and that ``0 < alpha(n) <= isqrt(theta(n)) - k0``
    holds from some ``gate_start`` on, which must lie in the first half of
    the checked range.
    """

    kind = "example31"
    window_dependent = True

    def __init__(self, k0: int, window: DeferredWindow, check_horizon: int = 1000):
        if k0 < 1:
            raise ValueError("k0 must be a positive integer")
        self.k0 = int(k0)
        self.window = window
        self.check_horizon = int(check_horizon)
        last_fail = 0
        prev = None
        for n in range(1, self.check_horizon + 1):
            a, t = window.at(n)
            if prev is not None and t < prev:
                raise ValueError(f"theta must be nondecreasing; theta({n}) < theta({n - 1})")
            prev = t
            if not (0 < a <= math.isqrt(t) - self.k0):
                last_fail = n
        if last_fail >= self.check_horizon // 2:
            raise ValueError(
                f"0 < alpha(n) <= isqrt(theta(n)) - k0 fails at n = {last_fail} "
                f"(checked up to {self.check_horizon})")
        self.gate_start = last_fail + 1

    def support(self, n: int):
        top = math.isqrt(self.window.theta(n))
        return top - self.k0 + 1, top

    def values(self, ks, n=None):
        if n is None:
            raise ValueError("Example31 terms depend on the window index n")
        ks = _ks(ks)
        lo, hi = self.support(n)
        on = (ks >= lo) & (ks <= hi)
        kf = ks.astype(float)
        return np.where(on, kf * kf, 0.0)[:, None]

    @property
    def background(self) -> np.ndarray:
        return np.zeros(1)

    def describe(self):
        return {"kind": self.kind, "k0": self.k0, "window": self.window.describe(),
                "gate_start": self.gate_start}


class HarmonicApproach(SequenceSource):
    """``xi + u / k``."""

    kind = "harmonic"

    def __init__(self, xi, u):
        self.xi = as_vec(xi)
        self.u = as_vec(u, self.xi.size)
        self.dim = self.xi.size

    def values(self, ks, n=None):
        ks = _ks(ks).astype(float)
        return self.xi + self.u / ks[:, None]

    def describe(self):
        return {"kind": self.kind, "xi": self.xi.tolist(), "u": self.u.tolist()}


class EvenOddOscillator(SequenceSource):
    """``even`` at even k, ``odd`` at odd k."""

    kind = "even_odd"

    def __init__(self, even, odd):
        self.even = as_vec(even)
        self.odd = as_vec(odd, self.even.size)
        self.dim = self.even.size

    def values(self, ks, n=None):
        ks = _ks(ks)
        return np.where((ks % 2 == 0)[:, None], self.even, self.odd)

    def describe(self):
        return {"kind": self.kind, "even": self.even.tolist(), "odd": self.odd.tolist()}


class Ramp(SequenceSource):
    """``k * u``."""

    kind = "ramp"

    def __init__(self, u):
        self.u = as_vec(u)
        self.dim = self.u.size

    def values(self, ks, n=None):
        return _ks(ks).astype(float)[:, None] * self.u

    def describe(self):
        return {"kind": self.kind, "u": self.u.tolist()}


class Where(SequenceSource):
    """``then_k`` where ``cond(k)`` holds, ``else_k`` elsewhere.

    ``cond`` is a vectorized index test, e.g. an
    :class:`~defstat.density.IndexPredicate` or a plain function.
    """

    kind = "where"

    def __init__(self, cond, then: SequenceSource, otherwise: SequenceSource, name: str = ""):
        if then.dim != otherwise.dim:
            raise DimensionError("branches of Where must share a dimension")
        if then.window_dependent or otherwise.window_dependent:
            raise ValueError("Where does not support window-dependent branches")
        self.cond = cond.mask if hasattr(cond, "mask") else cond
        self.then, self.otherwise = then, otherwise
        self.dim = then.dim
        self.name = name or getattr(cond, "name", "cond")
        self.max_index = _min_index(then, otherwise)

    def values(self, ks, n=None):
        ks = _ks(ks)
        c = np.asarray(self.cond(ks), dtype=bool)
        return np.where(c[:, None], self.then.values(ks), self.otherwise.values(ks))

    def describe(self):
        return {"kind": self.kind, "cond": self.name, "then": self.then.describe(),
                "else": self.otherwise.describe()}


class Scaled(SequenceSource):
    kind = "scaled"

    def __init__(self, kappa: float, base: SequenceSource):
        self.kappa = float(kappa)
        self.base = base
        self.dim = base.dim
        self.window_dependent = base.window_dependent
        self.max_index = base.max_index

    def values(self, ks, n=None):
        return self.kappa * self.base.values(ks, n)

    def describe(self):
        return {"kind": self.kind, "kappa": self.kappa, "base": self.base.describe()}


class Sum(SequenceSource):
    kind = "sum"

    def __init__(self, left: SequenceSource, right: SequenceSource):
        if left.dim != right.dim:
            raise DimensionError(f"cannot add sequences of dims {left.dim} and {right.dim}")
        self.left, self.right = left, right
        self.dim = left.dim
        self.window_dependent = left.window_dependent or right.window_dependent
        self.max_index = _min_index(left, right)

    def values(self, ks, n=None):
        return self.left.values(ks, n) + self.right.values(ks, n)

    def describe(self):
        return {"kind": self.kind, "left": self.left.describe(), "right": self.right.describe()}


class Transformed(SequenceSource):
    """Row-wise map of another source: ``fn(values) -> (m, dim)`` array."""

    kind = "transformed"

    def __init__(self, base: SequenceSource, fn: Callable, dim: int = 1, name: str = "fn"):
        self.base, self.fn, self.dim, self.name = base, fn, dim, name
        self.window_dependent = base.window_dependent
        self.max_index = base.max_index

    def values(self, ks, n=None):
        out = np.asarray(self.fn(self.base.values(ks, n)), dtype=float)
        return out.reshape(-1, self.dim)

    def describe(self):
        return {"kind": self.kind, "fn": self.name, "base": self.base.describe()}


class FromFile(SequenceSource):
    """Terms read from a CSV or JSON-lines file, total on ``1..record_count``."""

    kind = "file"

    def __init__(self, data: np.ndarray, path: str = "", fmt: str = "csv"):
        self._data = np.asarray(data, dtype=float)
        self._data.setflags(write=False)
        self.dim = self._data.shape[1]
        self.path, self.format = str(path), fmt

    @property
    def record_count(self) -> int:
        return self._data.shape[0]

    @property
    def max_index(self) -> int:
        return self.record_count

    def values(self, ks, n=None):
        ks = _ks(ks)
        if ks.size and ks.max() > self.record_count:
            raise IndexOutOfRange(f"index {int(ks.max())} beyond {self.record_count} records in {self.path}")
        return self._data[ks - 1]

    def describe(self):
        return {"kind": self.kind, "path": self.path, "format": self.format,
                "record_count": self.record_count}


def _parse_csv(fh):
    rows = []
    for row_no, row in enumerate(csv.reader(fh), start=1):
        if not row or not "".join(row).strip():
            continue
        if row_no == 1 and not rows:
            try:
                int(row[0])
            except ValueError:
                continue  # header line
        try:
            k = int(row[0])
            v = [float(x) for x in row[1:]]
        except ValueError as exc:
            raise ParseError(str(exc), row_no) from None
        yield row_no, k, v


def _parse_jsonl(fh):
    for row_no, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            k = int(rec["k"])
            v = rec["v"]
            v = [float(x) for x in (v if isinstance(v, list) else [v])]
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad record: {exc}", row_no) from None
        yield row_no, k, v


def ingest(path, fmt: Optional[str] = None) -> FromFile:
    """Load a sequence file.

    CSV rows are ``k, x_1, ..., x_d``; JSON-lines records are
    ``{"k": int, "v": [reals]}``.  Indices must run 1, 2, 3, ... without
    gaps and every record must have the dimension of the first.
    """
    path = Path(path)
    if fmt is None:
        fmt = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson", ".json") else "csv"
    fmt = fmt.lower()
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown sequence file format {fmt!r}")
    parse = _parse_csv if fmt == "csv" else _parse_jsonl
    data = []
    dim = None
    with open(path, newline="") as fh:
        for row_no, k, v in parse(fh):
            if k != len(data) + 1:
                raise GapError(f"expected index {len(data) + 1}, got {k}", row_no)
            if not v:
                raise DimError("record has no coordinates", row_no)
            if dim is None:
                dim = len(v)
            elif len(v) != dim:
                raise DimError(f"expected {dim} coordinates, got {len(v)}", row_no)
            data.append(v)
    if not data:
        raise ParseError(f"{path} holds no records")
    return FromFile(np.array(data), str(path), fmt)
