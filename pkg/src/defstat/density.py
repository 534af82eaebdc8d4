"""Deferred counting, deferred densities and deferred Cesàro means.

Counts over ``(alpha(n), theta(n)]`` are exact integers obtained from a
cached prefix-sum table (:class:`PrefixCounter`); ratios are floats.  Since
a density is a limit, :func:`deferred_density` samples the ratio on an
increasing grid of n and classifies the tail of that trace with an explicit
:class:`ToleranceSchedule`.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import IndexOutOfRange
from .windows import DeferredWindow

__all__ = [
    "IndexPredicate",
    "squares",
    "evens",
    "everything",
    "from_indices",
    "is_square",
    "PrefixCounter",
    "deferred_count",
    "naive_count",
    "natural_density_ratio",
    "TraceVerdict",
    "ToleranceSchedule",
    "DensityTrace",
    "geometric_grid",
    "classify",
    "deferred_density",
    "read_trace_csv",
    "deferred_cesaro_mean",
    "strong_deferred_deviation",
]


def is_square(ks) -> np.ndarray:
    """Exact perfect-square test for positive integers (no float sqrt errors)."""
    ks = np.asarray(ks, dtype=np.int64)
    r = np.floor(np.sqrt(ks.astype(np.float64))).astype(np.int64)
    # The float root can be off by one near 2**53; nudge it into place.
    # Compare via division so (r + 1)**2 cannot overflow int64.
    safe = np.maximum(r, 1)
    r = np.where(r > ks // safe, r - 1, r)
    r = np.where(r + 1 <= ks // (r + 1), r + 1, r)
    return (r > 0) & (ks % np.maximum(r, 1) == 0) & (ks // np.maximum(r, 1) == r)


class IndexPredicate:
    """Membership test for a set of positive integers.

    ``fn`` maps an int64 array of indices to a boolean array.  A
    window-dependent predicate takes the window index too (``fn(ks, n)``);
    such predicates may supply ``segments(n) -> (lo, hi, background)``
    saying the answer is ``background`` for every k outside ``[lo, hi]``,
    which lets counting skip the bulk of the window.
    """

    def __init__(self, fn: Callable, name: str = "predicate", window_dependent: bool = False,
                 segments: Optional[Callable] = None, max_index: Optional[int] = None):
        self.fn = fn
        self.name = name
        self.window_dependent = window_dependent
        self.segments = segments
        self.max_index = max_index

    def mask(self, ks, n: Optional[int] = None) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        if self.window_dependent:
            if n is None:
                raise ValueError(f"{self.name} depends on the window index; pass n")
            out = self.fn(ks, n)
        else:
            out = self.fn(ks)
        return np.asarray(out, dtype=bool)

    def __call__(self, k: int, n: Optional[int] = None) -> bool:
        return bool(self.mask(np.array([k]), n)[0])

    def complement(self) -> "IndexPredicate":
        seg = None
        if self.segments is not None:
            def seg(n, _s=self.segments):
                lo, hi, bg = _s(n)
                return lo, hi, not bg
        if self.window_dependent:
            fn = lambda ks, n: ~self.mask(ks, n)
        else:
            fn = lambda ks: ~self.mask(ks)
        return IndexPredicate(fn, f"not({self.name})", self.window_dependent, seg, self.max_index)

    def __repr__(self):
        return f"IndexPredicate({self.name!r})"


def squares() -> IndexPredicate:
    return IndexPredicate(is_square, "squares")


def evens() -> IndexPredicate:
    return IndexPredicate(lambda ks: ks % 2 == 0, "evens")


def everything() -> IndexPredicate:
    return IndexPredicate(lambda ks: np.ones(ks.shape, dtype=bool), "all")


def from_indices(indices, name: str = "finite set") -> IndexPredicate:
    members = np.unique(np.asarray(list(indices), dtype=np.int64))
    return IndexPredicate(lambda ks: np.isin(ks, members), name)


# Largest theta for which deferred_density builds a cumulative-count table.
PREFIX_LIMIT = 1 << 27


class PrefixCounter:
    """Cumulative counts ``C[j] = |{k <= j : p(k)}|``, grown on demand.

    The table only ever grows by appending, under a lock, so concurrent
    readers see the same counts as a fresh computation.
    """

    def __init__(self, predicate: IndexPredicate, chunk: int = 1 << 16):
        if predicate.window_dependent:
            raise ValueError("prefix sums need a window-independent predicate")
        self.predicate = predicate
        self.chunk = chunk
        self._cum = np.zeros(1, dtype=np.int64)
        self._lock = threading.Lock()

    @property
    def size(self) -> int:
        return self._cum.size - 1

    def _extend(self, upto: int):
        with self._lock:
            have = self.size
            if upto <= have:
                return
            target = max(upto, min(2 * have, have + 8 * self.chunk), have + self.chunk)
            cap = self.predicate.max_index
            if cap is not None:
                if upto > cap:
                    raise IndexOutOfRange(f"{self.predicate.name} is defined only up to index {cap}")
                target = min(target, cap)
            ks = np.arange(have + 1, target + 1, dtype=np.int64)
            inc = np.cumsum(self.predicate.mask(ks), dtype=np.int64) + self._cum[-1]
            self._cum = np.concatenate([self._cum, inc])

    def prefix(self, j: int) -> int:
        if j > self.size:
            self._extend(j)
        return int(self._cum[j])

    def count(self, lo: int, hi: int) -> int:
        """``|{lo < k <= hi : p(k)}|``."""
        if hi > self.size:
            self._extend(hi)
        cum = self._cum
        return int(cum[hi] - cum[lo])


def _segment_count(p: IndexPredicate, a: int, t: int, n: int) -> int:
    lo, hi, bg = p.segments(n)
    lo, hi = max(lo, a + 1), min(hi, t)
    inside = 0
    width = 0
    if lo <= hi:
        width = hi - lo + 1
        inside = int(np.count_nonzero(p.mask(np.arange(lo, hi + 1, dtype=np.int64), n)))
    return inside + (t - a - width) * int(bool(bg))


def deferred_count(p: IndexPredicate, w: DeferredWindow, n: int,
                   counter: Optional[PrefixCounter] = None) -> int:
    """``|{alpha(n) < k <= theta(n) : p(k)}|``."""
    a, t = w.at(n)
    if p.window_dependent:
        if p.segments is not None:
            return _segment_count(p, a, t, n)
        return naive_count(p, w, n)
    if counter is None:
        counter = PrefixCounter(p)
    return counter.count(a, t)


def naive_count(p: IndexPredicate, w: DeferredWindow, n: int) -> int:
    """Recount the whole window from scratch; the oracle for cached counting."""
    a, t = w.at(n)
    ks = np.arange(a + 1, t + 1, dtype=np.int64)
    return int(np.count_nonzero(p.mask(ks, n if p.window_dependent else None)))


def natural_density_ratio(p: IndexPredicate, n: int) -> float:
    """``|{k <= n : p(k)}| / n``."""
    ks = np.arange(1, n + 1, dtype=np.int64)
    return int(np.count_nonzero(p.mask(ks))) / n


class TraceVerdict(str, enum.Enum):
    TENDS_TO_ZERO = "tends_to_zero"
    TENDS_TO_ONE = "tends_to_one"
    TENDS_TO = "tends_to"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ToleranceSchedule:
    """Finite-horizon certification rule for a ratio trace.

    Only the last ``tail_fraction`` of the grid points is judged.  A trace
    tends to zero there if every ratio is at most
    ``zero_constant / sqrt(window length)`` and the last ratio does not
    exceed the first; tending to one is the mirror image.  A trace whose
    tail spread is within ``stability_tol`` tends to its last value.
    ``refutation_floor`` is used by the convergence testers: a tail that
    stays at or above it refutes a zero limit.
    """

    tail_fraction: float = 0.25
    zero_constant: float = 10.0
    stability_tol: float = 1e-3
    refutation_floor: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.tail_fraction <= 1.0:
            raise ValueError("tail_fraction must lie in (0, 1]")
        if self.zero_constant <= 0 or self.stability_tol < 0 or self.refutation_floor < 0:
            raise ValueError("schedule constants must be nonnegative (zero_constant positive)")

    def tail_start(self, size: int) -> int:
        return size - max(1, math.ceil(self.tail_fraction * size))

    def zero_threshold(self, lengths) -> np.ndarray:
        return self.zero_constant / np.sqrt(np.asarray(lengths, dtype=float))

    def to_dict(self):
        return dict(self.__dict__)


def geometric_grid(horizon: int, lo_exp: int = 4, hi_exp: int = 20) -> list:
    """Powers of two from ``2**lo_exp`` up to ``2**hi_exp`` clipped to ``horizon``,
    with ``horizon`` itself as the last point."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    grid = [2 ** j for j in range(lo_exp, hi_exp + 1) if 2 ** j <= horizon]
    if not grid or grid[-1] != horizon:
        grid.append(horizon)
    return grid


def classify(ratios, lengths, schedule: ToleranceSchedule):
    """Verdict and limiting value for the tail of a ratio trace."""
    r = np.asarray(ratios, dtype=float)
    if r.size == 0:
        return TraceVerdict.INCONCLUSIVE, None
    s = schedule.tail_start(r.size)
    tail = r[s:]
    thr = schedule.zero_threshold(np.asarray(lengths)[s:])
    if np.all(tail <= thr) and tail[-1] <= tail[0]:
        return TraceVerdict.TENDS_TO_ZERO, 0.0
    if np.all(1.0 - tail <= thr) and tail[-1] >= tail[0]:
        return TraceVerdict.TENDS_TO_ONE, 1.0
    if tail.max() - tail.min() <= schedule.stability_tol:
        return TraceVerdict.TENDS_TO, float(tail[-1])
    return TraceVerdict.INCONCLUSIVE, None


@dataclass
class DensityTrace:
    """Window ratios sampled on an n grid, plus the classified tail behaviour.

    ``counts`` is None for traces of windowed means rather than counts.
    """

    n_grid: list
    alphas: list
    thetas: list
    counts: Optional[list]
    ratios: list
    verdict: TraceVerdict = TraceVerdict.INCONCLUSIVE
    value: Optional[float] = None
    label: dict = field(default_factory=dict)

    @property
    def lengths(self):
        return [t - a for a, t in zip(self.alphas, self.thetas)]

    @property
    def final_ratio(self) -> float:
        return self.ratios[-1]

    def to_dict(self):
        return {
            "label": self.label,
            "n": list(self.n_grid),
            "alpha": list(self.alphas),
            "theta": list(self.thetas),
            "count": None if self.counts is None else list(self.counts),
            "ratio": list(self.ratios),
            "verdict": self.verdict.value,
            "value": self.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "alpha", "theta", "count", "ratio"])
        counts = self.counts if self.counts is not None else [""] * len(self.n_grid)
        for row in zip(self.n_grid, self.alphas, self.thetas, counts, self.ratios):
            wr.writerow([row[0], row[1], row[2], row[3], repr(float(row[4]))])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def read_trace_csv(path_or_text, schedule: Optional[ToleranceSchedule] = None) -> DensityTrace:
    """Inverse of :meth:`DensityTrace.to_csv` (verdict recomputed)."""
    text = path_or_text
    if "\n" not in str(path_or_text):
        with open(path_or_text, newline="") as fh:
            text = fh.read()
    rows = list(csv.DictReader(io.StringIO(text)))
    counts = [int(r["count"]) for r in rows] if rows and rows[0]["count"] != "" else None
    tr = DensityTrace(
        [int(r["n"]) for r in rows],
        [int(r["alpha"]) for r in rows],
        [int(r["theta"]) for r in rows],
        counts,
        [float(r["ratio"]) for r in rows],
    )
    tr.verdict, tr.value = classify(tr.ratios, tr.lengths, schedule or ToleranceSchedule())
    return tr


def deferred_density(p: IndexPredicate, w: DeferredWindow, n_grid=None,
                     schedule: Optional[ToleranceSchedule] = None, horizon: int = 1 << 20,
                     label: Optional[dict] = None) -> DensityTrace:
    """Deferred density ratios of ``p`` on ``n_grid`` with a tail verdict."""
    schedule = schedule or ToleranceSchedule()
    n_grid = list(n_grid) if n_grid is not None else geometric_grid(horizon)
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    alphas, thetas = w.bounds(n_grid)
    if p.window_dependent:
        counts = [deferred_count(p, w, n) for n in n_grid]
    elif thetas.size and int(thetas.max()) > PREFIX_LIMIT:
        # a prefix table up to theta would not fit; count each window directly
        counts = [naive_count(p, w, n) for n in n_grid]
    else:
        counter = PrefixCounter(p)
        if thetas.size:
            counter.prefix(int(thetas.max()))
        counts = [deferred_count(p, w, n, counter) for n in n_grid]
    lengths = thetas - alphas
    ratios = [c / int(L) for c, L in zip(counts, lengths)]
    verdict, value = classify(ratios, lengths, schedule)
    return DensityTrace(list(n_grid), alphas.tolist(), thetas.tolist(), counts, ratios,
                        verdict, value, dict(label or {}, predicate=p.name))


def _window_values(s, w: DeferredWindow, n: int):
    a, t = w.at(n)
    ks = np.arange(a + 1, t + 1, dtype=np.int64)
    vals = s.values(ks, n) if s.window_dependent else s.values(ks)
    if vals.shape[1] != 1:
        raise ValueError("deferred Cesàro means need a real-valued (dim 1) sequence")
    return vals[:, 0], t - a


def deferred_cesaro_mean(s, w: DeferredWindow, n: int) -> float:
    """``(1 / (theta - alpha)) * sum of w_k over the window``."""
    vals, length = _window_values(s, w, n)
    return math.fsum(vals.tolist()) / length


def strong_deferred_deviation(s, xi: float, w: DeferredWindow, n: int) -> float:
    """``(1 / (theta - alpha)) * sum of |w_k - xi|`` over the window."""
    vals, length = _window_values(s, w, n)
    return math.fsum(np.abs(vals - float(xi)).tolist()) / length
