"""Command-line front end.

    irs-swipt run <spec-file>             sweep experiment from a JSON spec
    irs-swipt check-feasibility <file>    harvest feasibility of one scenario
    irs-swipt solve <file>                full joint solve of one scenario

Scenario files carry {"config": {...}, "geometry": {...}, "seed": n}; spec
files mirror the ExperimentSpec fields.  Exit status is 0 on success and 2
on a malformed spec or scenario.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .feasibility import feasibility_check
from .harness import (emit_results, load_experiment_spec, run_experiment,
                      summarize)
from .scenario import generate_scenario, load_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irs-swipt",
        description="IRS-assisted SWIPT MIMO downlink optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep experiment from a spec file")
    run.add_argument("spec", help="JSON experiment spec")
    run.add_argument("--seed", type=int, default=None, help="override seed_base")
    run.add_argument("--trials", type=int, default=None, help="override trials")
    run.add_argument("--out", default=None, help="output file (default stdout)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--threads", type=int, default=1)

    for name, help_text in (
            ("check-feasibility", "check the harvest feasibility of a scenario"),
            ("solve", "solve one scenario end to end")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("scenario", help="JSON scenario file")
        cmd.add_argument("--seed", type=int, default=None, help="override seed")
        cmd.add_argument("--out", default=None, help="output file (default stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default="json")
    return parser


def _cmd_run(args) -> int:
    spec = load_experiment_spec(args.spec)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed_base=args.seed)
    if args.trials is not None:
        spec = dataclasses.replace(spec, trials=args.trials)
    results = run_experiment(spec, threads=args.threads)
    if args.out:
        emit_results(results, format=args.format, path=args.out, spec=spec)
        for key, stats in summarize(results).items():
            value, method = key
            print(f"{spec.experiment} value={value:g} method={method}: "
                  f"WSR {stats['wsr_mean']:.4f} bit/s/Hz, "
                  f"Q {stats['q_mean']:.3e} W, "
                  f"feasible {stats['feasible_frac']:.0%}")
    else:
        import io
        buf = io.StringIO()
        if args.format == "csv":
            import tempfile
            from pathlib import Path
            with tempfile.TemporaryDirectory() as tmp:
                p = Path(tmp) / "out.csv"
                emit_results(results, "csv", p, spec=spec)
                buf.write(p.read_text())
        else:
            buf.write(json.dumps({"records": [r.to_dict() for r in results],
                                  "spec": spec.to_dict()}, indent=2))
        print(buf.getvalue(), end="")
    return 0


def _cmd_check_feasibility(args) -> int:
    config, geometry, seed = load_scenario(args.scenario)
    if args.seed is not None:
        seed = args.seed
    channels = generate_scenario(config, geometry, seed)
    feasible, _, _, q = feasibility_check(channels, config)
    doc = {"seed": seed, "feasible": bool(feasible), "q_achieved_watts": q,
           "eh_threshold_watts": config.eh_threshold}
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_solve(args) -> int:
    from .harness import solve_with_init
    config, geometry, seed = load_scenario(args.scenario)
    if args.seed is not None:
        seed = args.seed
    channels = generate_scenario(config, geometry, seed)
    report = solve_with_init(channels, config)
    doc = {"seed": seed, **report.to_dict()}
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(f"feasible={report.feasible} iterations={report.iterations_used} "
          f"wsr={report.wsr_bits:.4f} bit/s/Hz")
    if not args.out:
        print(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "check-feasibility": _cmd_check_feasibility,
                "solve": _cmd_solve}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
