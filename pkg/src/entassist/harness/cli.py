"""``entassist`` command line.

Exit codes: 0 all checks passed, 1 operational error, 2 a known discrepancy
was reproduced, 3 a check failed (the report is still written).
"""
from __future__ import annotations

import argparse
import json
import sys

from ..assistance import OptimizerConfig
from ..families import FamilySpec
from ..measures import MeasureSpec
from ..qcore import RngSeed
from .experiments import COMMANDS, EXIT_ERROR, OUT_DIR_ENV, RunConfig, run_experiment
from .verify import ALIASES, SUITES


def _measure(args) -> MeasureSpec:
    text = args.measure
    if ":" in text:
        return MeasureSpec.parse(text)
    if text == "tsallis":
        return MeasureSpec("tsallis", args.q)
    if text == "renyi":
        return MeasureSpec("renyi", args.alpha)
    return MeasureSpec(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entassist",
        description="Assisted entanglement measures and polygamy experiments.",
        epilog=f"Default output directory: ${OUT_DIR_ENV} or the current directory.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--measure", default="concurrence",
                        help="concurrence, tangle, tsallis, renyi, eof, negativity "
                             "(or kind:parameter, e.g. tsallis:2)")
    common.add_argument("--q", type=float, default=2.0, help="Tsallis q")
    common.add_argument("--alpha", type=float, default=2.0, help="Renyi alpha")
    common.add_argument("--mu", type=float, default=1.0, help="weight mu > 0")
    common.add_argument("--family", default="haar",
                        help="haar[:n], w[:n] or gsd[:constraint,...]")
    common.add_argument("--qubits", type=int, default=None)
    common.add_argument("--constraints", default="",
                        help="comma-separated gsd constraints")
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--seed", type=int, default=2024)
    common.add_argument("--restarts", type=int, default=8)
    common.add_argument("--ensemble-size", type=int, default=None)
    common.add_argument("--max-iterations", type=int, default=200)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--no-figures", action="store_true")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "power":
            p.add_argument("--division", default="one-to-one",
                           choices=("one-to-one", "one-to-group"))
        if name == "w-saturation":
            p.add_argument("--n-min", type=int, default=3)
            p.add_argument("--n-max", type=int, default=8)
        if name == "assist":
            p.add_argument("--state", default=None, help="state JSON file")
            p.add_argument("--keep", default="",
                           help="comma-separated qubit indices to keep")
            p.add_argument("--rank", type=int, default=None)
        if name == "verify":
            p.add_argument("suite", nargs="?", default="all",
                           choices=("all", *SUITES, *ALIASES))
    return parser


def config_from_args(args) -> RunConfig:
    fam = FamilySpec.parse(args.family)
    constraints = tuple(c for c in args.constraints.split(",") if c) or fam.constraints
    qubits = args.qubits or fam.num_qubits
    if args.command == "assist" and args.qubits is None:
        qubits = 2
    optimizer = OptimizerConfig(ensemble_size=args.ensemble_size,
                                restarts=args.restarts,
                                max_iterations=args.max_iterations,
                                rng=RngSeed(args.seed))
    return RunConfig(
        command=args.command, measure=_measure(args), mu=args.mu,
        family=fam.name, qubits=qubits, constraints=constraints,
        samples=args.samples, seed=args.seed, optimizer=optimizer,
        tolerance=args.tol, output_path=args.out, workers=args.workers,
        figures=not args.no_figures,
        division=getattr(args, "division", "one-to-one"),
        n_range=(getattr(args, "n_min", 3), getattr(args, "n_max", 8)),
        state_path=getattr(args, "state", None),
        keep=tuple(int(k) for k in getattr(args, "keep", "").split(",") if k),
        rank=getattr(args, "rank", None),
        suite=getattr(args, "suite", "all"))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run_experiment(cfg)
    except (ValueError, OSError) as exc:
        print(f"entassist: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.command != "verify":
        print(json.dumps(report.to_json()["summary"], indent=1))
    print(f"report written to {cfg.out_dir}/{cfg.command}.json "
          f"(exit {report.exit_code})")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
