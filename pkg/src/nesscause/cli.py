"""Command line front end.

Exit codes: 0 for success, 1 for domain, scenario, or analysis errors
(diagnostics go to standard error), 2 for usage errors. Output on standard
out is deterministic: identical invocations on identical files print
identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Sequence, Tuple

from .causation import (
    CausalReport,
    CausalSetting,
    but_for,
    actual_causes,
    ness_causes,
)
from .core import NessCauseError, Occurrence
from .dsl import (
    Context,
    Scenario,
    parse_domain,
    parse_formula,
    parse_scenario,
    report_to_dot,
    report_to_json,
    trace_to_json,
)
from .oracle import GeneratorConfig, generate
from .simulator import SimulationError, Trace, build_trace


class _UsageError(Exception):
    pass


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_domain(path: str) -> Context:
    return parse_domain(_read(path))


def _load_scenario(path: str, ctx: Context) -> Scenario:
    return parse_scenario(_read(path), ctx)


def _parse_occurrence(text: str) -> Occurrence:
    name, sep, when = text.rpartition("@")
    if not sep or not name:
        raise _UsageError(f"--event wants name@time, got {text!r}")
    try:
        return Occurrence(name, int(when))
    except ValueError:
        raise _UsageError(f"--event time must be an integer, got {text!r}")


def _occ_token(o: Occurrence) -> str:
    return f"{o.event}@{o.time}"


def _report_text(report: CausalReport) -> str:
    lines = []
    for cs in report.cause_sets:
        occs = sorted(cs.occurrences, key=lambda o: (o.time, o.event))
        lines.append(" ".join(_occ_token(o) for o in occs))
    return "\n".join(sorted(lines)) + ("\n" if lines else "")


def _trace_text(trace: Trace) -> str:
    from .core import sorted_literals

    lines = []
    for t, state in enumerate(trace.states):
        lines.append(f"S{t}: " + ", ".join(str(l) for l in sorted_literals(state)))
        if t < len(trace.events):
            lines.append(f"E{t}: " + ", ".join(sorted(e.name for e in trace.events[t])))
    return "\n".join(lines) + "\n"


def _render_report(report: CausalReport, fmt: str) -> str:
    if fmt == "json":
        return report_to_json(report)
    if fmt == "dot":
        return report_to_dot(report)
    if fmt == "text":
        return _report_text(report)
    raise _UsageError(f"unknown format {fmt!r}")


def _cmd_check(args: argparse.Namespace) -> int:
    ctx = _load_domain(args.domain)
    if args.scenario is not None:
        scenario = _load_scenario(args.scenario, ctx)
        build_trace(ctx, scenario)
    _emit("OK")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    ctx = _load_domain(args.domain)
    scenario = _load_scenario(args.scenario, ctx)
    trace = build_trace(ctx, scenario)
    if args.format == "json":
        _emit(trace_to_json(trace))
    elif args.format == "text":
        _emit(_trace_text(trace))
    else:
        raise _UsageError("simulate supports --format json or text")
    if args.figure:
        from .figures import render_timeline

        render_timeline(trace, args.figure)
    return 0


def _query_formula(args: argparse.Namespace, ctx: Context):
    try:
        return parse_formula(args.formula, ctx)
    except NessCauseError as exc:
        if "unknown fluent" in str(exc):
            raise
        raise _UsageError(f"bad --formula: {exc}")


def _cmd_causes(args: argparse.Namespace) -> int:
    ctx = _load_domain(args.domain)
    scenario = _load_scenario(args.scenario, ctx)
    formula = _query_formula(args, ctx)
    setting = CausalSetting(ctx, scenario)
    report = ness_causes(setting, formula, args.at)
    _emit(_render_report(report, args.format))
    return 0


def _cmd_actual_cause(args: argparse.Namespace) -> int:
    ctx = _load_domain(args.domain)
    scenario = _load_scenario(args.scenario, ctx)
    occurrence = _parse_occurrence(args.event)
    setting = CausalSetting(ctx, scenario)
    report = actual_causes(setting, occurrence)
    _emit(_render_report(report, args.format))
    return 0


def _cmd_butfor(args: argparse.Namespace) -> int:
    ctx = _load_domain(args.domain)
    scenario = _load_scenario(args.scenario, ctx)
    occurrence = _parse_occurrence(args.event)
    formula = _query_formula(args, ctx)
    setting = CausalSetting(ctx, scenario)
    result = but_for(setting, occurrence, formula, args.at)
    verdict = result.refuted_ever if args.any_time else result.refuted_at
    _emit("true" if verdict else "false")
    return 0


def _cmd_export_dot(args: argparse.Namespace) -> int:
    ctx = _load_domain(args.domain)
    scenario = _load_scenario(args.scenario, ctx)
    formula = _query_formula(args, ctx)
    setting = CausalSetting(ctx, scenario)
    report = ness_causes(setting, formula, args.at)
    _emit(report_to_dot(report))
    return 0


def _bench_rows(seed: int, runs: int) -> List[Tuple[str, str, int, str, bool, Optional[bool]]]:
    from .core import sorted_literals

    rows = []
    for i in range(runs):
        cfg = GeneratorConfig(seed=seed + i)
        ctx, scenario, trace = generate(cfg)
        final = trace.states[-1]
        at = trace.length
        positives = [l for l in sorted_literals(final) if l.positive]
        target = positives[0] if positives else sorted_literals(final)[0]
        from .core import Atom

        formula = Atom(target)
        setting = CausalSetting(ctx, scenario, trace)
        report = ness_causes(setting, formula, at)
        union = report.union_of_causes()
        for occ in sorted(scenario.occurrences, key=lambda o: (o.time, o.event)):
            if not trace.occurred(occ):
                continue
            ness_verdict = occ in union
            butfor_verdict: Optional[bool]
            try:
                butfor_verdict = but_for(setting, occ, formula, at).is_cause_at
            except SimulationError:
                butfor_verdict = None
            rows.append(
                (str(seed + i), str(formula), at, _occ_token(occ), ness_verdict, butfor_verdict)
            )
    return rows


def _cmd_bench(args: argparse.Namespace) -> int:
    rows = _bench_rows(args.seed, args.runs)
    out = ["seed\tformula\tat\toccurrence\tness\tbutfor\tagree"]
    for seed, formula, at, occ, ness, butfor in rows:
        if butfor is None:
            butfor_text, agree = "n/a", "n/a"
        else:
            butfor_text = "true" if butfor else "false"
            agree = "yes" if ness == butfor else "no"
        ness_text = "true" if ness else "false"
        out.append(f"{seed}\t{formula}\t{at}\t{occ}\t{ness_text}\t{butfor_text}\t{agree}")
    disagreements = sum(
        1 for _, _, _, _, n, b in rows if b is not None and n != b
    )
    out.append(f"# {len(rows)} rows, {disagreements} disagreements")
    _emit("\n".join(out))
    if args.figure:
        from .figures import render_bench_summary

        render_bench_summary(
            [(occ, n, bool(b)) for _, _, _, occ, n, b in rows], args.figure
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nesscause",
        description="Simulate action-language domains and compute actual causes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="validate a domain (and optional scenario)")
    check.add_argument("domain")
    check.add_argument("scenario", nargs="?")
    check.set_defaults(handler=_cmd_check)

    simulate = sub.add_parser("simulate", help="run a scenario and print the trace")
    simulate.add_argument("domain")
    simulate.add_argument("scenario")
    simulate.add_argument("--format", default="json", choices=("json", "text"))
    simulate.add_argument("--figure", help="write a fluent timeline PNG here")
    simulate.set_defaults(handler=_cmd_simulate)

    causes = sub.add_parser("causes", help="causes of a formula at a time")
    causes.add_argument("domain")
    causes.add_argument("scenario")
    causes.add_argument("--formula", required=True)
    causes.add_argument("--at", type=int, required=True)
    causes.add_argument("--format", default="json", choices=("json", "text", "dot"))
    causes.set_defaults(handler=_cmd_causes)

    actual = sub.add_parser("actual-cause", help="causes of an event occurrence")
    actual.add_argument("domain")
    actual.add_argument("scenario")
    actual.add_argument("--event", required=True, metavar="NAME@TIME")
    actual.add_argument("--format", default="json", choices=("json", "text", "dot"))
    actual.set_defaults(handler=_cmd_actual_cause)

    butfor = sub.add_parser("butfor", help="counterfactual test for one action")
    butfor.add_argument("domain")
    butfor.add_argument("scenario")
    butfor.add_argument("--event", required=True, metavar="NAME@TIME")
    butfor.add_argument("--formula", required=True)
    butfor.add_argument("--at", type=int, required=True)
    butfor.add_argument(
        "--any-time",
        action="store_true",
        help="judge the counterfactual over the whole run, not just --at",
    )
    butfor.set_defaults(handler=_cmd_butfor)

    export = sub.add_parser("export-dot", help="DOT digraph of the causal report")
    export.add_argument("domain")
    export.add_argument("scenario")
    export.add_argument("--formula", required=True)
    export.add_argument("--at", type=int, required=True)
    export.set_defaults(handler=_cmd_export_dot)

    bench = sub.add_parser("bench", help="but-for vs NESS over random domains")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--runs", type=int, default=20)
    bench.add_argument("--figure", help="write a verdict summary PNG here")
    bench.set_defaults(handler=_cmd_bench)

    return parser


def run(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except NessCauseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
