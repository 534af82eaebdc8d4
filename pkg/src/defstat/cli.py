"""Command-line front end.

    defstat analyze --config run.yaml [--horizon N] [--out DIR] [--jobs J]
    defstat density --config run.yaml --predicate squares
    defstat check-axioms [--tnorm product] [--base-norm euclidean] [--seed 42]
    defstat verify-theorems [--manifest checks.yaml]

Exit codes: 0 certified / all checks as expected, 1 config or IO error,
2 axiom violations or unexpected theorem statuses, 3 refuted,
4 inconclusive.  Artifacts go to ``--out``, else the config's output dir,
else ``$DEFSTAT_OUT``, else ``./defstat_out``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from . import convergence as cv
from . import density as dn
from . import theorems
from .config import RunConfig, default_out_dir, load_config
from .errors import DefstatError
from .pns import check_pn_axioms, phi0
from .tnorm import check_tnorm_axioms, get_tnorm

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECKS = 2
EXIT_REFUTED = 3
EXIT_INCONCLUSIVE = 4

_OUTCOME_EXIT = {
    cv.Outcome.CERTIFIED: EXIT_OK,
    cv.Outcome.REFUTED: EXIT_REFUTED,
    cv.Outcome.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

PREDICATES = {"squares": dn.squares, "evens": dn.evens, "everything": dn.everything}


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=theorems._json_default) + "\n"


def _fmt(x) -> str:
    return repr(float(x))


def _trace_name(mode: str, label: dict) -> str:
    return f"{mode}_eps{_fmt(label['eps'])}_sigma{_fmt(label['sigma'])}.csv"


def _describe(cfg: RunConfig) -> dict:
    return {
        "sequence": cfg.sequence.describe(),
        "window": cfg.window.describe(),
        "pn": cfg.pn.name,
        "tnorm": cfg.tnorm.name,
        "xi": cfg.xi,
        "mode": cfg.mode,
        "grid": cfg.grid.to_dict(),
        "n_grid": cfg.grid_points(),
        "horizon": cfg.horizon,
        "schedule": cfg.schedule.to_dict(),
        "seed": cfg.seed,
    }


def _run_mode(cfg: RunConfig, mode: str, jobs: int) -> cv.Verdict:
    ns = cfg.grid_points()
    if mode == "dstat":
        return cv.test_dstat(cfg.sequence, cfg.pn, cfg.xi, cfg.window, cfg.grid, ns, cfg.schedule,
                             jobs=jobs)
    if mode == "strong":
        return cv.test_strong_deferred(cfg.sequence, cfg.pn, cfg.xi, cfg.window, cfg.grid, ns,
                                       cfg.schedule, jobs=jobs)
    if mode == "phi":
        return cv.test_phi(cfg.sequence, cfg.pn, cfg.xi, cfg.grid, ns[-1],
                           cfg.schedule.tail_fraction, jobs=jobs)
    return cv.test_dstat_cauchy(cfg.sequence, cfg.pn, cfg.window, cfg.grid, ns, cfg.schedule,
                                xi_hint=cfg.xi, tnorm=cfg.tnorm, jobs=jobs)


def _modes(cfg: RunConfig) -> list:
    if cfg.mode != "all":
        return [cfg.mode]
    modes = ["phi", "strong", "dstat", "cauchy"]
    if cfg.sequence.window_dependent:
        modes = ["strong", "dstat"]
    return modes


def cmd_analyze(args) -> int:
    cfg = _load(args)
    cfg.validate()
    out = Path(cfg.out_dir)
    verdicts = {}
    for mode in _modes(cfg):
        v = _run_mode(cfg, mode, args.jobs)
        verdicts[mode] = v
        for tr in v.traces:
            _write(out / "traces" / _trace_name(mode, tr.label), tr.to_csv())
    report = {"config": _describe(cfg), "verdicts": {}}
    for mode, v in verdicts.items():
        d = v.to_dict()
        d.pop("traces")
        report["verdicts"][mode] = d
    _write(out / "verdict.json", _dumps(report))
    for mode, v in verdicts.items():
        worst = v.worst_final_ratio
        extra = "" if worst is None else f"  worst final ratio {worst:.6g}"
        print(f"{mode:7s} {v.outcome.value}{extra}")
    print(f"artifacts in {out}")
    # with several modes the exit code follows the deferred statistical verdict
    key = "dstat" if "dstat" in verdicts else next(iter(verdicts))
    return _OUTCOME_EXIT[verdicts[key].outcome]


def cmd_density(args) -> int:
    cfg = _load(args)
    cfg.xi = cfg.xi if cfg.xi is not None else [0.0] * cfg.sequence.dim
    cfg.validate()
    pred = PREDICATES[args.predicate]()
    tr = dn.deferred_density(pred, cfg.window, cfg.grid_points(), cfg.schedule)
    out = Path(cfg.out_dir)
    _write(out / f"density_{args.predicate}.csv", tr.to_csv())
    _write(out / f"density_{args.predicate}.json", _dumps(tr.to_dict()))
    print(f"{args.predicate}: final ratio {tr.final_ratio!r} at n = {tr.n_grid[-1]}; "
          f"trace {tr.verdict.value}")
    return EXIT_OK


def cmd_check_axioms(args) -> int:
    report = {"tnorms": [], "pns": []}
    ok = True
    for key in args.tnorm:
        t = get_tnorm(key)
        tol = args.tol if args.tol is not None else (1e-12 if t.kind == "product" else 0.0)
        rep = check_tnorm_axioms(t, args.samples, args.seed, tol)
        ok &= rep.passed
        report["tnorms"].append(rep.to_dict())
        print(f"t-norm {t.name:12s} {'ok' if rep.passed else 'FAILED ' + ', '.join(r.name for r in rep.failures)}")
    pn = phi0(args.base_norm)
    tol = args.tol if args.tol is not None else 1e-12
    for key in args.tnorm:
        t = get_tnorm(key)
        for dim in args.dims:
            rep = check_pn_axioms(pn, t, dim, args.pn_samples, args.seed, tol)
            ok &= rep.passed
            report["pns"].append(dict(rep.to_dict(), tnorm=t.name, dim=dim))
            if not rep.passed:
                print(f"pn {pn.name} under {t.name}, dim {dim}: FAILED {', '.join(r.name for r in rep.failures)}")
    print(f"pn {pn.name}: {'ok' if ok else 'violations found'} "
          f"(t-norms {', '.join(args.tnorm)}; dims {args.dims})")
    out = Path(args.out or default_out_dir())
    _write(out / "axioms.json", _dumps(report))
    return EXIT_OK if ok else EXIT_CHECKS


def cmd_verify_theorems(args) -> int:
    entries = theorems.load_manifest(args.manifest) if args.manifest else None
    results = theorems.run_manifest(entries, jobs=args.jobs)
    out = Path(args.out or default_out_dir())
    _write(out / "theorems.json", theorems.report_json(results) + "\n")
    print(theorems.summary_table(results))
    bad = sum(1 for *_, ok, _ in results if not ok)
    print(f"{len(results) - bad}/{len(results)} checks as expected")
    return EXIT_OK if bad == 0 else EXIT_CHECKS


def _load(args) -> RunConfig:
    if not args.config:
        raise DefstatError("--config is required")
    cfg = load_config(args.config)
    if args.horizon is not None:
        cfg.horizon = args.horizon
        cfg.n_grid = None
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out:
        cfg.out_dir = args.out
    return cfg


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="YAML run configuration")
    p.add_argument("--horizon", type=int, help="largest window index n (replaces the config n grid)")
    p.add_argument("--seed", type=int, help="seed recorded in artifacts and used for sampling")
    p.add_argument("--out", metavar="DIR", help="output directory (default $DEFSTAT_OUT or ./defstat_out)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads across grid points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="defstat", description="Deferred statistical convergence diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run convergence testers from a config file")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("density", help="deferred density trace of an index predicate")
    _common(p)
    p.add_argument("--predicate", choices=sorted(PREDICATES), default="squares")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("check-axioms", help="sampled t-norm and probabilistic-norm axiom checks")
    _common(p)
    p.add_argument("--tnorm", action="append", choices=["min", "product", "lukasiewicz"])
    p.add_argument("--base-norm", default="euclidean", choices=["euclidean", "absolute", "max"])
    p.add_argument("--dims", type=int, nargs="+", default=[1, 2, 4, 8])
    p.add_argument("--samples", type=int, default=10_000, help="t-norm sample count")
    p.add_argument("--pn-samples", type=int, default=1000, help="vector pairs per dimension")
    p.add_argument("--tol", type=float, help="tolerance (default 1e-12 for product, exact otherwise)")
    p.set_defaults(func=cmd_check_axioms)

    p = sub.add_parser("verify-theorems", help="run the theorem manifest")
    _common(p)
    p.add_argument("--manifest", metavar="PATH", help="YAML manifest (default: built-in)")
    p.set_defaults(func=cmd_verify_theorems)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check-axioms":
        args.tnorm = args.tnorm or ["min", "product", "lukasiewicz"]
        if args.seed is None:
            args.seed = 42
    try:
        return args.func(args)
    except (DefstatError, ValueError, KeyError, OSError, yaml.YAMLError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"defstat: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
