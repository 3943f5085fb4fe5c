"""Command-line entry point: ``unate <subcommand> ...``.

Exit status is 0 whenever a run completes (a Reject verdict is data) and 2 for
usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .boolfn import ContractError, all_up, parse_directions
from .claims import verify_claims
from .exact import distance_to_monotone, distance_to_unate
from .harness import ExperimentConfig, load_function, run_experiment, sweep


def _load_json_arg(text: str) -> dict:
    p = Path(text)
    if not text.lstrip().startswith("{") and p.exists():
        text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ContractError(f"--spec is neither JSON nor a readable JSON file: {e}") from None


def _seed_list(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi)))
    return [int(s) for s in text.split(",")]


def _floats(text: str) -> list[float]:
    return [float(s) for s in text.split(",")]


def _ints(text: str) -> list[int]:
    return [int(s) for s in text.split(",")]


def _common(p: argparse.ArgumentParser, spec_flag: str = "--spec") -> None:
    p.add_argument(spec_flag, required=True, dest="spec",
                   help="FunctionSpec or truth-table JSON, inline or as a file path")
    p.add_argument("--function-seeds", type=_seed_list, default=[0],
                   help="comma list or start:stop range of generator seeds")
    p.add_argument("--seed", type=int, default=0, help="master seed for the trials")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-certify", action="store_true", help="skip exact distance certification")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _emit(report, args) -> None:
    if args.out:
        report.write(args.out, args.format)
    print(json.dumps(report.aggregates(), sort_keys=True))


def _experiment(args, tester: str) -> None:
    cfg = ExperimentConfig(
        function=_load_json_arg(args.spec), epsilon=args.epsilon, tester=tester,
        function_seeds=args.function_seeds, trials=args.trials, seed=args.seed,
        c=getattr(args, "c", 0.01), m=getattr(args, "m", None),
        mono_queries=getattr(args, "mono_queries", None),
        directions=getattr(args, "directions", None), workers=args.workers,
        certify=not args.no_certify,
    )
    _emit(run_experiment(cfg), args)


def _exact_distance(args) -> None:
    obj = _load_json_arg(args.spec)
    f = load_function(obj, args.function_seeds[0])
    if args.target == "unate":
        rep = distance_to_unate(f)
    else:
        B = parse_directions(args.directions, f.n) if args.directions else all_up(f.n)
        rep = distance_to_monotone(f, B)
    out = rep.to_json_obj()
    if args.out:
        args.out.write_text(json.dumps(rep.witness.to_json_obj()))
        out["witness_path"] = str(args.out)
        del out["witness"]
    print(json.dumps(out, sort_keys=True))


def _sweep(args) -> None:
    res = sweep(_load_json_arg(args.spec), args.n, args.epsilon, tester="unate",
                function_seeds=args.function_seeds, trials=args.trials, seed=args.seed,
                c=args.c, workers=args.workers, certify=not args.no_certify)
    if args.out:
        args.out.write_text(res.to_csv() if args.format == "csv" else res.to_json())
    print(res.to_csv(), end="")
    for eps, a in res.exponents.items():
        print(f"# epsilon={eps}: fitted exponent of n after dividing by log2 n = {a:.3f}")


def _verify(args) -> int:
    results = verify_claims(args.n_max, args.seed, quick=args.quick)
    for r in results:
        print(r.line())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unate", description="Unateness / monotonicity testers and exact oracles")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test-unate", help="run the adaptive unateness tester")
    _common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--c", type=float, default=0.01)
    p.add_argument("--m", type=int, help="override the search-loop iteration count")
    p.add_argument("--mono-queries", type=int, help="override the edge-sample count")
    p.set_defaults(run=lambda a: _experiment(a, "unate"))

    p = sub.add_parser("test-monotone", help="run the edge monotonicity tester")
    _common(p)
    p.add_argument("--directions", default="all-up", help='"all-up" or one u/d per coordinate')
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--mono-queries", type=int)
    p.set_defaults(run=lambda a: _experiment(a, "monotone"))

    p = sub.add_parser("baseline-edge", help="run the non-adaptive edge tester for unateness")
    _common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(run=lambda a: _experiment(a, "baseline"))

    p = sub.add_parser("exact-distance", help="exact distance to unate / B-monotone functions")
    p.add_argument("--spec", required=True)
    p.add_argument("--function-seeds", type=_seed_list, default=[0])
    p.add_argument("--target", choices=("unate", "monotone"), default="unate")
    p.add_argument("--directions")
    p.add_argument("--out", type=Path, help="write the closest function here")
    p.set_defaults(run=_exact_distance)

    p = sub.add_parser("sweep", help="unateness tester over a grid of n and epsilon")
    _common(p, "--spec-template")
    p.add_argument("--n", type=_ints, required=True)
    p.add_argument("--epsilon", type=_floats, required=True)
    p.add_argument("--c", type=float, default=0.01)
    p.set_defaults(run=_sweep)

    p = sub.add_parser("verify-claims", help="run the claim verification suites")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true", help="reduced sample counts")
    p.set_defaults(run=_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.run(args)
    except ContractError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
