"""Command-line interface.

Exit codes: 0 success, 1 unexpected failure, 2 parse/validation/config
error, 3 branch-and-bound budget exceeded.  Errors go to stderr as
``error: <Category>: <message>``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .baseline import exact_baseline
from .crr import crr_run
from .errors import AllocationError, BudgetExceeded
from .experiment import ExperimentConfig, run_experiment, sample_instance
from .fairness import NOTIONS, pairwise_report
from .formats import parse_allocation, parse_instance, serialize_allocation, serialize_instance
from .mallows import MallowsConfig, mallows_profile
from .model import build_instance, welfare
from .welfare import make_goal, max_rank, max_utilitarian

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

GOALS = (
    "null", "um", "um-crr", "rm", "rm-crr", "um-threshold:<t>",
    "nash", "egal", "lsowa", "nash-crr", "egal-crr", "lsowa-crr",
)


class ConfigError(Exception):
    category = "ConfigError"


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def solve(instance, goal: str, budget: int):
    """Allocation for a CLI goal string (see ``GOALS``) plus the CRR state if any."""
    if goal == "um":
        return max_utilitarian(instance)[0], None
    if goal == "rm":
        return max_rank(instance)[0], None
    if goal in ("nash", "egal", "lsowa"):
        return exact_baseline(instance, goal, budget), None
    if goal == "null":
        g = make_goal(instance, "null")
    elif goal == "um-crr":
        g = make_goal(instance, "utilitarian_max")
    elif goal == "rm-crr":
        g = make_goal(instance, "rank_max")
    elif goal.startswith("um-threshold:"):
        try:
            t = float(goal.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad threshold in {goal!r}") from None
        g = make_goal(instance, "utilitarian_threshold", threshold=t)
    elif goal in ("nash-crr", "egal-crr", "lsowa-crr"):
        g = make_goal(instance, goal[:-4] + "_max", budget=budget)
    else:
        raise ConfigError(f"unknown goal {goal!r}; choose from {', '.join(GOALS)}")
    state = crr_run(instance, g)
    return state.result, state


def _summary(instance, alloc, sign: str) -> str:
    report = pairwise_report(instance, alloc, sign)
    lines = [f"welfare {format(welfare(instance, alloc, 'utilitarian'), '.10g')}"]
    for notion in NOTIONS:
        frac = report.fractions[notion]
        lines.append(f"{notion} {'n/a' if frac is None else format(frac, '.6f')}")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    instance = parse_instance(_read(args.instance))
    alloc, _ = solve(instance, args.goal, args.bnb_budget)
    summary = _summary(instance, alloc, args.nef_sign)
    if args.output in (None, "-"):
        sys.stdout.write(serialize_allocation(alloc))
        sys.stderr.write(summary)
    else:
        _write(args.output, serialize_allocation(alloc))
        sys.stdout.write(summary)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    instance = parse_instance(_read(args.instance))
    alloc = parse_allocation(_read(args.allocation), instance.n)
    alloc.validate(instance)
    report = pairwise_report(instance, alloc, args.nef_sign)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance", "objective", "notion", "fraction"])
    for row in report.csv_rows(Path(args.instance).stem, args.objective):
        writer.writerow(row[:3] + ["" if row[3] is None else format(row[3], ".10g")])
    text = buf.getvalue()
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK


def _kv(pairs: list[str]) -> dict:
    out = {}
    for p in pairs:
        key, sep, val = p.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, got {p!r}")
        out[key] = val
    return out


def _caps(text: str | None):
    if text is None:
        return None
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"capacity must be 'lo,hi', got {text!r}") from None
    return lo, hi


def _load_config(path: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.from_dict(json.loads(_read(path)))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def cmd_generate(args) -> int:
    if args.config:
        config = _load_config(args.config)
        out_dir = Path(args.out_dir or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        for k, phi in enumerate(config.phis):
            for t in range(config.trials):
                inst = sample_instance(config, k, t)
                (out_dir / f"phi{phi:g}_trial{t:03d}.inst").write_text(serialize_instance(inst), encoding="utf-8")
        return EXIT_OK
    if not args.mallows:
        raise ConfigError("generate needs --mallows key=value ... or --config")
    kv = _kv(args.mallows)
    unknown = set(kv) - {"phi", "n", "m", "seed"}
    if unknown:
        raise ConfigError(f"unknown mallows keys {sorted(unknown)}")
    try:
        phi, n, m = float(kv["phi"]), int(kv["n"]), int(kv["m"])
        seed = int(kv.get("seed", 0))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"--mallows needs phi, n, m (and optional seed): {exc}") from None
    try:
        config = MallowsConfig(phi, tuple(range(m)), seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    profile = mallows_profile(config, n)
    inst = build_instance(profile, None, _caps(args.agent_caps) or (0, m), _caps(args.item_caps) or (0, n))
    _write(args.output, serialize_instance(inst))
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = _load_config(args.config)
    result = run_experiment(config, jobs=args.jobs, timing=args.timing)
    _write(args.output, result.to_csv())
    return EXIT_OK


def cmd_trace(args) -> int:
    instance = parse_instance(_read(args.instance))
    _, state = solve(instance, args.goal, args.bnb_budget)
    if state is None:
        raise ConfigError(f"goal {args.goal!r} does not run CRR; use null, um-crr, rm-crr or um-threshold:<t>")
    lines = state.trace_lines()
    _write(args.output, "".join(line + "\n" for line in lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crralloc", description="Constrained round robin allocation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--nef-sign", choices=("auto", "positive", "negative", "off"), default="auto")
        p.add_argument("--bnb-budget", type=int, default=2_000_000)

    p = sub.add_parser("solve", help="compute an allocation")
    p.add_argument("instance")
    p.add_argument("--goal", default="um-crr")
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", help="fairness report of an allocation")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--objective", default="given")
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate", help="sample Mallows instances")
    p.add_argument("--mallows", nargs="+", metavar="KEY=VALUE")
    p.add_argument("--agent-caps")
    p.add_argument("--item-caps")
    p.add_argument("--config")
    p.add_argument("--out-dir")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", help="run a phi sweep and write CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill runtime_ms (breaks byte-identical reruns)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("trace", help="print the W-CRR pick trace")
    p.add_argument("instance")
    p.add_argument("--goal", default="um-crr")
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        sys.stderr.write(f"error: {exc.category}: {exc}\n")
        return EXIT_BUDGET
    except (AllocationError, ConfigError) as exc:
        sys.stderr.write(f"error: {exc.category}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
