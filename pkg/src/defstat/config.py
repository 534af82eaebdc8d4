"""YAML run configuration for the command-line front end.

Schema (every key except ``sequence`` is optional)::

    sequence:                 # what to analyze
      kind: square_indicator  # constant | even_odd | harmonic | ramp | example31 | file
      value: [2.0]            # constant
      even: [1.0]             # even_odd
      odd: [0.0]
      xi: [0.0]               # harmonic: xi + u / k
      u: [1.0]                # harmonic, ramp
      k0: 5                   # example31 (uses the run window)
      path: data.csv          # file (csv or jsonl, picked by suffix unless format given)
    xi: [0.0]                 # candidate limit (not used by mode cauchy)
    pn: {kind: phi0, base_norm: absolute}    # euclidean | absolute | max
    tnorm: product            # min | product | lukasiewicz
    window:
      kind: classical         # lambda | lacunary | affine | explicit
      lambda: "n // 2"        # lambda window: expression in n or a list
      k: "r * (r + 1) // 2"   # lacunary: expression in r or a list from k_0
      a: 1                    # affine (a n + b, c n + d]
      b: 0
      c: 2
      d: 0
      alpha: "n // 2"         # explicit: expressions in n or lists
      theta: "n * n"
      alpha_csv: a.csv        # explicit from two-column CSV files
      theta_csv: t.csv
    mode: dstat               # phi | strong | dstat | cauchy | all
    grid: {eps: [0.1, 0.5, 1, 2], sigma: [0.1, 0.25, 0.5, 0.75, 0.9]}
    horizon: 1048576
    n_grid: [16, 32, 1000]    # overrides the geometric grid
    schedule: {tail_fraction: 0.25, zero_constant: 10, stability_tol: 0.001, refutation_floor: 0.01}
    validate_prefix: 10000    # window prefix checked before computing
    output: {dir: out}        # overridden by --out, defaults to $DEFSTAT_OUT
    seed: 0

Expressions are integer arithmetic in one variable with ``+ - * // % **``,
``isqrt``, ``log2`` (floor), ``min``, ``max`` and ``abs``.
"""
from __future__ import annotations

import ast
import math
import operator
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from . import sequences as sq
from . import windows as wn
from .convergence import DEFAULT_HORIZON, Mode, ParamGrid
from .density import ToleranceSchedule, geometric_grid
from .errors import ConfigError
from .pns import ProbabilisticNorm, as_vec, phi0
from .tnorm import TNorm, get_tnorm

__all__ = ["RunConfig", "load_config", "parse_config", "int_expr", "OUT_ENV", "default_out_dir"]

OUT_ENV = "DEFSTAT_OUT"

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}
_FUNCS = {
    "isqrt": math.isqrt,
    "log2": lambda x: int(x).bit_length() - 1,
    "min": min,
    "max": max,
    "abs": abs,
}


def int_expr(text: str, var: str = "n"):
    """Compile an integer expression in ``var`` into a callable."""
    try:
        tree = ast.parse(str(text), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad expression {text!r}: {exc.msg}") from None

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return check(node.left) and check(node.right)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            return check(node.operand)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return True
        if isinstance(node, ast.Name) and node.id == var:
            return True
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and not node.keywords):
            return all(check(a) for a in node.args)
        raise ConfigError(f"expression {text!r}: unsupported syntax {ast.dump(node)[:40]}")

    check(tree)

    def ev(node, x):
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left, x), ev(node.right, x))
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand, x)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return x
        return _FUNCS[node.func.id](*(ev(a, x) for a in node.args))

    body = tree.body
    return lambda x: int(ev(body, int(x)))


def _int_map(spec, var):
    if isinstance(spec, (list, tuple)):
        return [int(v) for v in spec]
    if isinstance(spec, (str, int)):
        return int_expr(str(spec), var)
    raise ConfigError(f"expected an expression or a list, got {spec!r}")


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}: missing key {key!r}")
    return d[key]


def build_window(spec: Optional[dict], base: Path = Path(".")) -> wn.DeferredWindow:
    w = _build_window(spec or {"kind": "classical"}, base)
    # keep expression strings so the window describes itself in reports
    w.params.update({k: v for k, v in (spec or {}).items() if k != "kind" and isinstance(v, str)})
    return w


def _build_window(spec: dict, base: Path) -> wn.DeferredWindow:
    kind = str(spec.get("kind", "classical")).lower()
    if kind == "classical":
        return wn.classical()
    if kind == "lambda":
        return wn.lambda_window(_int_map(_need(spec, "lambda", "window"), "n"))
    if kind == "lacunary":
        return wn.lacunary(_int_map(_need(spec, "k", "window"), "r"))
    if kind == "affine":
        return wn.affine(*(int(_need(spec, k, "window")) for k in "abcd"))
    if kind == "explicit":
        if "alpha_csv" in spec or "theta_csv" in spec:
            return wn.load_explicit_csv(base / _need(spec, "alpha_csv", "window"),
                                        base / _need(spec, "theta_csv", "window"))
        return wn.explicit(_int_map(_need(spec, "alpha", "window"), "n"),
                           _int_map(_need(spec, "theta", "window"), "n"))
    raise ConfigError(f"unknown window kind {kind!r}")


def build_sequence(spec: dict, window: wn.DeferredWindow, base: Path = Path(".")) -> sq.SequenceSource:
    if not isinstance(spec, dict):
        raise ConfigError("sequence must be a mapping with a 'kind' key")
    kind = str(_need(spec, "kind", "sequence")).lower()
    if kind == "square_indicator":
        return sq.SquareIndicator()
    if kind == "constant":
        return sq.Constant(_need(spec, "value", "sequence"))
    if kind == "even_odd":
        return sq.EvenOddOscillator(_need(spec, "even", "sequence"), _need(spec, "odd", "sequence"))
    if kind == "harmonic":
        return sq.HarmonicApproach(_need(spec, "xi", "sequence"), _need(spec, "u", "sequence"))
    if kind == "ramp":
        return sq.Ramp(_need(spec, "u", "sequence"))
    if kind == "example31":
        return sq.Example31(int(_need(spec, "k0", "sequence")), window,
                            int(spec.get("check_horizon", 1000)))
    if kind == "file":
        return sq.ingest(base / _need(spec, "path", "sequence"), spec.get("format"))
    raise ConfigError(f"unknown sequence kind {kind!r}")


def build_pn(spec) -> ProbabilisticNorm:
    spec = spec or {}
    if isinstance(spec, str):
        spec = {"kind": spec}
    if str(spec.get("kind", "phi0")).lower() != "phi0":
        raise ConfigError("only pn kind 'phi0' is available from a config file")
    return phi0(str(spec.get("base_norm", "euclidean")))


def default_out_dir() -> str:
    return os.environ.get(OUT_ENV, "defstat_out")


@dataclass
class RunConfig:
    sequence: sq.SequenceSource
    pn: ProbabilisticNorm
    window: wn.DeferredWindow
    tnorm: TNorm
    mode: str = "dstat"
    xi: Optional[list] = None
    grid: ParamGrid = field(default_factory=ParamGrid)
    horizon: int = DEFAULT_HORIZON
    n_grid: Optional[list] = None
    schedule: ToleranceSchedule = field(default_factory=ToleranceSchedule)
    out_dir: str = field(default_factory=default_out_dir)
    seed: int = 0
    validate_prefix: int = 10_000
    raw: dict = field(default_factory=dict)

    def grid_points(self) -> list:
        return list(self.n_grid) if self.n_grid else geometric_grid(self.horizon)

    def validate(self):
        """Cross-checks done before any computation."""
        if self.mode != "all" and self.mode not in {m.value for m in Mode}:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.pn.dim is not None and self.pn.dim != self.sequence.dim:
            raise ConfigError(f"pn dim {self.pn.dim} differs from sequence dim {self.sequence.dim}")
        if self.xi is not None:
            try:
                as_vec(self.xi, self.sequence.dim)
            except ValueError as exc:
                raise ConfigError(f"xi: {exc}") from None
        elif self.mode != "cauchy":
            raise ConfigError(f"mode {self.mode!r} needs a candidate limit 'xi'")
        ns = self.grid_points()
        if any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
            raise ConfigError("n_grid must be strictly increasing positive integers")
        top = min(self.validate_prefix, ns[-1])
        for n in range(1, top + 1):
            self.window.at(n)  # raises WindowOrderError
        rep = wn.validate_prefix(self.window, top)
        if not rep.valid and rep.violation["reason"] != "theta does not grow on the prefix":
            raise ConfigError(f"window invalid at n = {rep.violation['n']}: {rep.violation['reason']}")
        for n in ns:
            self.window.at(n)
        if isinstance(self.sequence, sq.FromFile):
            top = max(self.window.theta(n) for n in ns)
            if top > self.sequence.record_count:
                raise ConfigError(f"windows reach index {top} but {self.sequence.path} holds "
                                  f"{self.sequence.record_count} records")
        return self


_KNOWN = {"sequence", "xi", "pn", "tnorm", "window", "mode", "grid", "horizon", "n_grid",
          "schedule", "validate_prefix", "output", "seed"}


def parse_config(doc: dict, base: Path = Path(".")) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        window = build_window(doc.get("window"), base)
        seq = build_sequence(_need(doc, "sequence", "config"), window, base)
        grid = doc.get("grid") or {}
        cfg = RunConfig(
            sequence=seq,
            pn=build_pn(doc.get("pn")),
            window=window,
            tnorm=get_tnorm(str(doc.get("tnorm", "product"))),
            mode=str(doc.get("mode", "dstat")).lower(),
            xi=doc.get("xi"),
            grid=ParamGrid(tuple(grid.get("eps", ParamGrid.eps_values)),
                           tuple(grid.get("sigma", ParamGrid.sigma_values))),
            horizon=int(doc.get("horizon", DEFAULT_HORIZON)),
            n_grid=[int(n) for n in doc["n_grid"]] if doc.get("n_grid") else None,
            schedule=ToleranceSchedule(**(doc.get("schedule") or {})),
            seed=int(doc.get("seed", 0)),
            validate_prefix=int(doc.get("validate_prefix", 10_000)),
            raw=doc,
        )
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    out = (doc.get("output") or {}).get("dir")
    if out:
        cfg.out_dir = str(out)
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(doc, path.parent)
