"""Command-line front end: ``molpdual {solve,verify,plot,fuzz,example}``.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 unsupported option.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InstanceError
from .duality import flip_flag
from .linalg import parse_rational
from .molp import MolpInstance, example_instance
from .oracle import run_campaign
from .plot import dual_figure, parametric_figure, primal_figure, render
from .report import Pipeline, instance_json

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3


class InputError(Exception):
    pass


class Unsupported(Exception):
    pass


# ---------------------------------------------------------------------------
# instance files


def _scalar(x, where: str):
    try:
        return parse_rational(x)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{where}: {exc}") from None


def _matrix(data: dict, key: str, rows: int, cols: int) -> list:
    value = data[key]
    if not isinstance(value, list) or len(value) != rows:
        raise InputError(f"{key}: expected {rows} rows")
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"{key}[{i}]: expected {cols} columns")
        out.append([_scalar(x, f"{key}[{i}][{j}]") for j, x in enumerate(row)])
    return out


def parse_instance(text: str) -> MolpInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError("instance must be a JSON object")
    for key in ("n", "m", "q", "P", "A", "b"):
        if key not in data:
            raise InputError(f"missing key {key!r}")
    for key in ("n", "m", "q"):
        if not isinstance(data[key], int) or isinstance(data[key], bool) or data[key] < 0:
            raise InputError(f"{key}: expected a non-negative integer")
    n, m, q = data["n"], data["m"], data["q"]
    P = _matrix(data, "P", q, n)
    A = _matrix(data, "A", m, n)
    if not isinstance(data["b"], list) or len(data["b"]) != m:
        raise InputError(f"b: expected {m} entries")
    b = [_scalar(x, f"b[{i}]") for i, x in enumerate(data["b"])]
    try:
        return MolpInstance.from_lists(P, A, b, n)
    except InstanceError as exc:
        raise InputError(str(exc)) from None


def load_instance(path: str) -> MolpInstance:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def inject_fault(pipe: Pipeline):
    """Geometric lower image with the K-maximal flag of one proper face flipped."""
    dimg = pipe.dimg
    candidates = [i for i in dimg.lattice.proper() if dimg.lattice[i].flags.k_maximal]
    target = candidates[0] if candidates else dimg.lattice.proper()[0]
    return flip_flag(dimg, target, "k_maximal")


def cmd_solve(args) -> int:
    pipe = Pipeline(load_instance(args.instance))
    pipe.verify()
    _emit(dumps(pipe.to_json()), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    pipe = Pipeline(load_instance(args.instance))
    faulty = inject_fault(pipe) if args.inject_fault and pipe.applicable else None
    pipe.verify(faulty)
    report = pipe.to_json()
    _emit(dumps(report), args.out)
    verdicts = report["verdicts"]
    if not verdicts["applicable"]:
        print(f"verification not applicable: {report['status']}", file=sys.stderr)
        return EXIT_FAILED
    for d in report["diagnostics"]:
        print(f"{d['report']}/{d['category']}: {d['message']}", file=sys.stderr)
    return EXIT_OK if verdicts["all_ok"] else EXIT_FAILED


def cmd_plot(args) -> int:
    inst = load_instance(args.instance)
    if inst.q not in (2, 3):
        raise Unsupported(f"plotting supports q = 2 or q = 3, got q = {inst.q}")
    pipe = Pipeline(inst)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    figures = {"dual.svg": dual_figure(pipe.dimg)}
    if inst.q == 2:
        figures["primal.svg"] = primal_figure(pipe.pimg)
        figures["parametric.svg"] = parametric_figure(pipe.dbar)
    for name in sorted(figures):
        (out / name).write_text(render(figures[name]))
        print(out / name)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if args.q not in (2, 3):
        raise Unsupported(f"--q must be 2 or 3, got {args.q}")
    if args.count < 0 or args.max_n < 1 or args.max_m < 1:
        raise InputError("--count must be >= 0 and --max-n, --max-m >= 1")
    summary = run_campaign(args.seed, args.count, q=args.q, max_n=args.max_n, max_m=args.max_m)
    _emit(dumps({"campaign": summary}), args.out)
    for r in summary["results"]:
        for v in r["violations"]:
            print(f"instance {r['index']}: {v}", file=sys.stderr)
    return EXIT_OK if summary["violations"] == 0 else EXIT_FAILED


def cmd_example(args) -> int:
    _emit(dumps(instance_json(example_instance())), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="molpdual", description="Exact geometric duality for MOLPs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_instance(name, help_text, out_help="write the report to this file"):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("instance", help="instance JSON file, or - for stdin")
        p.add_argument("--out", help=out_help)
        return p

    with_instance("solve", "compute images, lattices and correspondences").set_defaults(func=cmd_solve)
    p = with_instance("verify", "check the duality correspondences; exit 1 on any failure")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    with_instance("plot", "write SVG figures", "output directory (default: .)").set_defaults(func=cmd_plot)

    p = sub.add_parser("fuzz", help="seeded random campaign against all verifiers and oracles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--q", type=int, default=2, help="number of objectives (2 or 3)")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--max-m", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("example", help="print the built-in example instance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Unsupported as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
