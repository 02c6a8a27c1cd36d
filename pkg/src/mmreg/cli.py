"""Single entry point for threshold computation, simulation, checking,
the lower-bound demo, and batch fuzzing.

Everything is JSON in and JSON out; exit code 0 for success or a clean
verdict, 1 when a violation is found, 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .checker import HistoryError, check_all, check_completion, check_monotonicity, check_property1, check_property2
from .lowerbound import LowerBoundError, demo
from .model import ModelError, load_spec
from .protocol import ProtocolError
from .sim import (
    Schedule,
    SimError,
    WorkloadOp,
    crashed_from_trace,
    emit_trace,
    history_from_trace,
    load_trace,
    run_simulation,
)
from .tolerance import ToleranceError, t_bridge, t_direct


def _default_seed() -> int:
    return int(os.environ.get("MM_SEED", "0"))


def _load_workload(path) -> list[WorkloadOp]:
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    return [
        WorkloadOp(d["op"], d["proc"], d.get("value"), d.get("at-step", 0))
        for d in raw
    ]


def _parse_crash(text: str):
    proc, _, step = text.partition("@")
    return (int(proc), int(step))


# -- fuzzing ---------------------------------------------------------------


def random_workload(spec, rng: random.Random, max_ops: int = 10) -> list[WorkloadOp]:
    ops = []
    wseq = 0
    for _ in range(rng.randint(1, max_ops)):
        if rng.random() < 0.4:
            wseq += 1
            ops.append(WorkloadOp("write", spec.writer, f"w{wseq}", rng.randint(0, 60)))
        else:
            ops.append(WorkloadOp("read", rng.randint(1, spec.n), None, rng.randint(0, 60)))
    return ops


def random_crash_plan(spec, rng: random.Random, crashes: int):
    pids = rng.sample(range(1, spec.n + 1), crashes)
    return tuple((p, rng.randint(0, 150)) for p in sorted(pids))


def fuzz(spec, runs: int, base_seed: int, crashes: int | None = None, t: int | None = None) -> dict:
    """Seeded batch of random runs, each checked for atomicity,
    monotonicity, and completion.  Crash plans stay within the tolerated
    budget unless overridden."""
    t_l = t_bridge(spec.bag).t
    threshold = t_l if t is None else t
    issues = []
    starved = 0
    total_steps = 0
    for i in range(runs):
        seed = base_seed * 1_000_003 + i
        rng = random.Random(seed)
        workload = random_workload(spec, rng)
        n_crashes = crashes if crashes is not None else rng.randint(0, t_l)
        plan = random_crash_plan(spec, rng, n_crashes)
        sim = run_simulation(spec, threshold, workload, Schedule("fair", seed=seed, crash_plan=plan))
        total_steps += sim.step
        history = sim.history()
        verdict = check_property1(history).merged(check_property2(history))
        verdict = verdict.merged(check_monotonicity(sim.trace))
        if n_crashes <= t_l:
            live = check_completion(history, sim.crashed, threshold if n_crashes <= threshold else None)
            starved += len(live.violations)
            verdict = verdict.merged(live)
        if not verdict.ok:
            issues.append(
                {
                    "seed": seed,
                    "violations": [
                        {"prop": v.prop, "ops": list(v.ops), "reason": v.reason}
                        for v in verdict.violations
                    ],
                }
            )
    return {
        "runs": runs,
        "threshold": threshold,
        "violations": issues,
        "starved": starved,
        "mean_steps": total_steps / runs if runs else 0.0,
    }


# -- subcommands -----------------------------------------------------------


def cmd_tolerance(args) -> int:
    spec = load_spec(args.spec)
    out: dict = {"n": spec.n}
    if args.method in ("direct", "both"):
        res = t_direct(spec.bag)
        out["t"] = res.t
        if args.witness:
            out["witness"] = list(map(list, res.witness)) if res.witness else None
    if args.method in ("bridge", "both"):
        res = t_bridge(spec.bag)
        if "t" in out and out["t"] != res.t:
            print(f"error: direct and bridge disagree: {out['t']} vs {res.t}", file=sys.stderr)
            return 1
        out["t"] = res.t
        if args.witness and "witness" not in out:
            out["witness"] = list(map(list, res.witness)) if res.witness else None
    out["method"] = args.method
    print(json.dumps(out))
    return 0


def cmd_simulate(args) -> int:
    spec = load_spec(args.spec)
    t = args.threshold if args.threshold is not None else t_bridge(spec.bag).t
    workload = _load_workload(args.workload)
    crash_plan = tuple(_parse_crash(c) for c in args.crash)
    schedule = Schedule(args.policy, seed=args.seed, crash_plan=crash_plan)
    sim = run_simulation(spec, t, workload, schedule)
    emit_trace(sim.trace, args.trace)
    responded = sum(1 for r in sim.ops if r.response_step is not None)
    print(
        json.dumps(
            {
                "steps": sim.step,
                "ops": len(sim.ops),
                "responded": responded,
                "quiescent": sim.is_quiescent(),
                "trace": args.trace,
            }
        )
    )
    return 0


def cmd_check(args) -> int:
    trace = load_trace(args.trace)
    history = history_from_trace(trace)
    wanted = args.properties.split(",")
    from .checker import Verdict

    verdict = Verdict(True, ())
    if "1" in wanted:
        verdict = verdict.merged(check_property1(history))
    if "2" in wanted:
        verdict = verdict.merged(check_property2(history))
    if "mono" in wanted:
        verdict = verdict.merged(check_monotonicity(trace))
    if "live" in wanted:
        verdict = verdict.merged(check_completion(history, crashed_from_trace(trace)))
    print(
        json.dumps(
            {
                "ok": verdict.ok,
                "violations": [
                    {"prop": v.prop, "ops": list(v.ops), "reason": v.reason}
                    for v in verdict.violations
                ],
            }
        )
    )
    return 0 if verdict.ok else 1


def cmd_violate(args) -> int:
    spec = load_spec(args.spec)
    report = demo(spec, args.t)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(report, f)
            f.write("\n")
    summary = {k: report[k] for k in ("n", "t", "t_L", "writer", "reader", "witness", "violation_certified", "no_crashes", "isolation_ok")}
    print(json.dumps(summary))
    return 0 if report["violation_certified"] else 1


def cmd_fuzz(args) -> int:
    spec = load_spec(args.spec)
    summary = fuzz(spec, args.runs, args.seed, crashes=args.crashes, t=args.threshold)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(summary, f)
            f.write("\n")
    print(json.dumps({k: summary[k] for k in ("runs", "threshold", "starved", "mean_steps")} | {"violations": len(summary["violations"])}))
    if summary["violations"] or summary["starved"]:
        for issue in summary["violations"][:5]:
            print(f"violating seed: {issue['seed']}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmreg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tolerance", help="compute the crash-tolerance threshold")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=["direct", "bridge", "both"], default="both")
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_tolerance)

    p = sub.add_parser("simulate", help="run a workload and emit a trace")
    p.add_argument("--spec", required=True)
    p.add_argument("--threshold", type=int, default=None, help="tolerated crashes t (default: computed threshold)")
    p.add_argument("--workload", required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--policy", choices=["fair", "fifo"], default="fair")
    p.add_argument("--crash", action="append", default=[], metavar="P@STEP")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="verify atomicity of a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--properties", default="1,2,mono,live")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("violate", help="demonstrate impossibility above the threshold")
    p.add_argument("--spec", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_violate)

    p = sub.add_parser("fuzz", help="seeded batch of checked random runs")
    p.add_argument("--spec", required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--crashes", type=int, default=None)
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fuzz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        ModelError,
        ToleranceError,
        SimError,
        LowerBoundError,
        ProtocolError,
        HistoryError,
        OSError,
        json.JSONDecodeError,
        KeyError,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
