"""Deferred windows ``(alpha(n), theta(n)]`` and nested window pairs.

A window is a pair of integer-valued maps on n >= 1 with
``0 <= alpha(n) < theta(n)``.  Presets cover the classical prefix window,
lambda windows, lacunary blocks, affine windows and explicit sequences.
Unboundedness of ``theta`` cannot be decided from a finite prefix; the
prefix validator checks ``theta`` is nondecreasing and actually grows.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ParseError, WindowOrderError

__all__ = [
    "DeferredWindow",
    "classical",
    "lambda_window",
    "lacunary",
    "affine",
    "explicit",
    "load_explicit_csv",
    "window_at",
    "ValidationReport",
    "validate_prefix",
    "RatioReport",
    "ratio_sequence",
    "WindowPair",
]

IntMap = Union[Callable[[int], int], Sequence[int]]


def _as_map(values: IntMap, offset: int = 1) -> Callable[[int], int]:
    """Callables pass through; sequences are indexed from ``offset``."""
    if callable(values):
        return values
    data = [int(v) for v in values]

    def lookup(n):
        i = n - offset
        if i < 0 or i >= len(data):
            raise IndexError(f"index {n} outside explicit sequence of length {len(data)}")
        return data[i]

    lookup.length = len(data)
    return lookup


@dataclass(frozen=True)
class DeferredWindow:
    kind: str
    alpha_fn: Callable[[int], int] = field(repr=False, compare=False)
    theta_fn: Callable[[int], int] = field(repr=False, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def alpha(self, n: int) -> int:
        return int(self.alpha_fn(int(n)))

    def theta(self, n: int) -> int:
        return int(self.theta_fn(int(n)))

    def at(self, n: int):
        """``(alpha(n), theta(n))``; raises :class:`WindowOrderError` if out of order."""
        if n < 1:
            raise ValueError("n must be >= 1")
        a, t = self.alpha(n), self.theta(n)
        if a < 0:
            raise WindowOrderError(f"{self.kind} window: alpha({n}) = {a} is negative")
        if a >= t:
            raise WindowOrderError(f"{self.kind} window: alpha({n}) = {a} >= theta({n}) = {t}")
        return a, t

    def length(self, n: int) -> int:
        a, t = self.at(n)
        return t - a

    def bounds(self, ns):
        """Arrays of alpha and theta over ``ns`` (each pair validated)."""
        pairs = [self.at(int(n)) for n in ns]
        if not pairs:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        a, t = zip(*pairs)
        return np.asarray(a, dtype=np.int64), np.asarray(t, dtype=np.int64)

    def describe(self) -> dict:
        return {"kind": self.kind, **{k: v for k, v in self.params.items() if _jsonable(v)}}


def _jsonable(v):
    return isinstance(v, (int, float, str, bool, list, tuple)) or v is None


def classical() -> DeferredWindow:
    """``(0, n]``: deferred density reduces to natural density."""
    return DeferredWindow("classical", lambda n: 0, lambda n: n)


def lambda_window(lam: IntMap) -> DeferredWindow:
    """``(n - lambda_n, n]`` for a nondecreasing ``lambda_n`` with ``1 <= lambda_n <= n``."""
    lam_fn = _as_map(lam)
    return DeferredWindow(
        "lambda",
        lambda n: n - int(lam_fn(n)),
        lambda n: n,
        {"lambda": list(lam) if not callable(lam) else None, "lambda_fn": lam_fn},
    )


def lacunary(k: IntMap) -> DeferredWindow:
    """Blocks ``(k_{r-1}, k_r]``; a sequence argument is indexed from ``k_0``."""
    k_fn = _as_map(k, offset=0)
    return DeferredWindow(
        "lacunary",
        lambda r: int(k_fn(r - 1)),
        lambda r: int(k_fn(r)),
        {"k": list(k) if not callable(k) else None},
    )


def affine(a: int, b: int, c: int, d: int) -> DeferredWindow:
    """``(a n + b, c n + d]`` with integer coefficients."""
    a, b, c, d = (int(x) for x in (a, b, c, d))
    return DeferredWindow(
        "affine", lambda n: a * n + b, lambda n: c * n + d, {"a": a, "b": b, "c": c, "d": d}
    )


def explicit(alpha: IntMap, theta: IntMap, name: str = "explicit") -> DeferredWindow:
    """Arbitrary maps; sequences are indexed from n = 1."""
    params = {"name": name}
    if not callable(alpha):
        params["alpha"] = [int(v) for v in alpha]
    if not callable(theta):
        params["theta"] = [int(v) for v in theta]
    return DeferredWindow("explicit", _as_map(alpha), _as_map(theta), params)


def _read_two_column(path) -> list:
    values = []
    with open(path, newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if row_no == 1 and not row[0].strip().lstrip("-").isdigit():
                continue  # header
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, got {len(row)}", row_no)
            try:
                n, v = int(row[0]), int(row[1])
            except ValueError as exc:
                raise ParseError(str(exc), row_no) from None
            if n != len(values) + 1:
                raise ParseError(f"expected n = {len(values) + 1}, got {n}", row_no)
            values.append(v)
    return values


def load_explicit_csv(alpha_path, theta_path) -> DeferredWindow:
    """Explicit window from two ``n,value`` CSV files."""
    w = explicit(_read_two_column(alpha_path), _read_two_column(theta_path),
                 name=f"{Path(alpha_path).name}/{Path(theta_path).name}")
    return w


def window_at(w: DeferredWindow, n: int):
    return w.at(n)


@dataclass
class ValidationReport:
    valid: bool
    horizon: int
    violation: Optional[dict] = None
    theta_first: Optional[int] = None
    theta_last: Optional[int] = None

    def to_dict(self):
        return dict(self.__dict__)


def validate_prefix(w: DeferredWindow, N: int) -> ValidationReport:
    """Check ``0 <= alpha(n) < theta(n)`` and ``theta`` nondecreasing for n <= N,
    plus ``theta(N) > theta(1)`` as a stand-in for ``theta -> infinity``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    prev = None
    first = None
    for n in range(1, N + 1):
        try:
            a, t = w.alpha(n), w.theta(n)
        except IndexError as exc:
            return ValidationReport(False, N, {"n": n, "reason": str(exc)}, first, prev)
        if first is None:
            first = t
        if a < 0:
            return ValidationReport(False, N, {"n": n, "reason": f"alpha = {a} < 0"}, first, t)
        if a >= t:
            return ValidationReport(False, N, {"n": n, "reason": f"alpha = {a} >= theta = {t}"}, first, t)
        if prev is not None and t < prev:
            return ValidationReport(False, N, {"n": n, "reason": f"theta decreased from {prev} to {t}"},
                                    first, t)
        prev = t
    if N > 1 and prev <= first:
        return ValidationReport(False, N, {"n": N, "reason": "theta does not grow on the prefix"},
                                first, prev)
    return ValidationReport(True, N, None, first, prev)


@dataclass
class RatioReport:
    """``alpha(n) / (theta(n) - alpha(n))`` over a prefix."""

    ratios: np.ndarray = field(repr=False)
    maximum: float
    bounded: bool
    trend_increasing: bool

    def to_dict(self):
        return {"maximum": self.maximum, "bounded": self.bounded,
                "trend_increasing": self.trend_increasing, "horizon": int(self.ratios.size)}


def ratio_sequence(w: DeferredWindow, N: int) -> RatioReport:
    """Ratios for n = 1..N with a boundedness verdict.

    The sequence is flagged unbounded when it is rising across the last
    decile and sets a new maximum there.
    """
    a, t = w.bounds(range(1, N + 1))
    r = a / (t - a)
    tail = max(2, N // 10)
    last = r[-tail:]
    head = r[:-tail]
    rising = bool(last[-1] > last[0])
    new_max = bool(head.size == 0 or last.max() > head.max())
    return RatioReport(r, float(r.max()), not (rising and new_max), rising)


@dataclass
class WindowPair:
    """Outer window ``(alpha, theta]`` containing inner ``(rho, varsigma]``.

    Construction validates ``alpha <= rho < varsigma <= theta`` for
    n <= ``horizon`` and raises :class:`WindowOrderError` otherwise.
    """

    outer: DeferredWindow
    inner: DeferredWindow
    horizon: int = 1000

    def __post_init__(self):
        for n in range(1, self.horizon + 1):
            a, t = self.outer.at(n)
            r, s = self.inner.at(n)
            if not (a <= r < s <= t):
                raise WindowOrderError(
                    f"nesting fails at n={n}: alpha={a}, rho={r}, varsigma={s}, theta={t}")

    def tails(self, n: int):
        a, t = self.outer.at(n)
        r, s = self.inner.at(n)
        return r - a, t - s

    def length_ratio(self, n: int) -> float:
        return self.outer.length(n) / self.inner.length(n)
