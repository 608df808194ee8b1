"""Command line front end.

Exit status: 0 ok, 1 a comparison or verification failed, 2 error. On error
a single JSON line ``{"error": <code>, "message": <text>}`` goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import harness
from .datagen import CovarianceModel
from .errors import RankSpectraError

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with its own status
        raise CliError("UsageError", message)


def _config_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", type=Path, help="JSON config; flags below override it")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--model", choices=["identity", "tridiagonal"])
    sp.add_argument("--rho", type=float)
    sp.add_argument("--estimator", choices=list(harness.ALL_ESTIMATORS))
    sp.add_argument("--replications", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--data", choices=["gaussian", "cauchy"])
    sp.add_argument("--law", choices=["standard_mp", "generalized_mp", "kendall_identity"])
    sp.add_argument("--bins", type=int)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--grid-points", type=int)
    sp.add_argument("--grid-min", type=float)
    sp.add_argument("--grid-max", type=float)
    sp.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rankspectra", description="Spectra of rank correlation matrices vs Marcenko-Pastur theory")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("simulate", help="pooled ESD over replications")
    _config_args(sp)
    sp.add_argument("--out", type=Path, required=True, help="output directory")
    sp.add_argument("--dump-matrix", action="store_true", help="also write each estimator matrix as CSV")

    sp = sub.add_parser("theory", help="limiting spectral density")
    _config_args(sp)
    sp.add_argument("--out", type=Path, required=True, help="law CSV path (a .json sidecar is written next to it)")

    sp = sub.add_parser("compare", help="Levy and KS distance between two CDF files")
    sp.add_argument("esd", type=Path)
    sp.add_argument("law", type=Path)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--out", type=Path, help="write the report JSON here")

    sp = sub.add_parser("verify", help="Monte Carlo checks of the sign/rank identities")
    sp.add_argument("--suite", default="all", choices=["all", *harness.SUITES])
    sp.add_argument("--mc-samples", type=int, default=1_000_000)
    sp.add_argument("--prop-replications", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    sp.add_argument("--out", type=Path)

    for fig in (1, 2):
        sp = sub.add_parser(f"reproduce-fig{fig}", help=f"simulate+theory+compare for figure {fig}")
        sp.add_argument("--out", type=Path, required=True)
        sp.add_argument("--replications", type=int, default=10)
        sp.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--threshold", type=float)
        sp.add_argument("--bins", type=int)
    return ap


_OVERRIDES = ("n", "p", "estimator", "replications", "seed", "data", "law", "bins", "nu", "grid_points", "grid_min", "grid_max", "workers")


def _load_config(args: argparse.Namespace) -> harness.ExperimentConfig:
    base: dict[str, Any] = {}
    if args.config is not None:
        try:
            base = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError("ParseError", f"{args.config}: {exc}") from exc
    for key in _OVERRIDES:
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if "n" not in base or "p" not in base:
        raise CliError("UsageError", "n and p are required (flags or --config)")
    model = base.get("model")
    if args.model is not None or args.rho is not None or model is None:
        kind = args.model or (model or {}).get("kind", "identity")
        if kind == "identity":
            model = CovarianceModel.identity(base["p"])
        else:
            rho = args.rho if args.rho is not None else (model or {}).get("rho")
            if rho is None:
                raise CliError("UsageError", "--rho is required for the tridiagonal model")
            model = CovarianceModel.tridiagonal(base["p"], rho)
    base["model"] = model
    return harness.ExperimentConfig.from_dict(base)


def _emit(obj: Any) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _run(args: argparse.Namespace) -> int:
    cmd = args.command
    if cmd == "simulate":
        cfg = _load_config(args)
        res = harness.run_simulation(cfg, args.out, dump_matrix=args.dump_matrix)
        _emit({"eigenvalues": res.pooled.eigenvalues.size, "mean": res.pooled.mean(), "runtime": res.runtime, "out": str(args.out)})
        return EXIT_OK
    if cmd == "theory":
        cfg = _load_config(args)
        law = harness.run_theory(cfg, args.out)
        _emit({"mass": law.mass, "atom": law.atom, "atom_location": law.atom_location, "out": str(args.out)})
        return EXIT_OK
    if cmd == "compare":
        rep = harness.run_compare(args.esd, args.law, args.threshold)
        d = rep.to_dict()
        if args.out is not None:
            args.out.write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")
        _emit(d)
        return EXIT_OK if rep.passed else EXIT_FAIL
    if cmd == "verify":
        rows = harness.verify_lemmas(args.suite, args.mc_samples, args.seed, args.prop_replications)
        for row in rows:
            print(row.line())
        if args.out is not None:
            args.out.write_text(json.dumps([r.__dict__ for r in rows], indent=2) + "\n")
        return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL
    fig = 1 if cmd == "reproduce-fig1" else 2
    summary = harness.reproduce_figure(fig, args.out, args.replications, args.seed, args.workers, args.threshold, args.bins)
    for row in summary:
        print(f"{row['estimator']:<11s} n={row['n']:<4d} p={row['p']:<4d} levy={row['levy']:.4f} ks={row['ks']:.4f} vs {row['reference']}")
    return EXIT_OK if all(r["passed"] for r in summary) else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _run(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except RankSpectraError as exc:
        code, msg = exc.code, str(exc)
    except (ValueError, TypeError, KeyError, OSError) as exc:
        code, msg = type(exc).__name__, str(exc)
    print(json.dumps({"error": code, "message": msg}), file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
