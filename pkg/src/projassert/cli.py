"""Command-line front end.

Subcommands:
  run      execute a debugging campaign and write a JSON report (plus a
           rendered failure-rate figure next to it)
  compile  lower each assertion to measurement-restricted form, print
           step listings and a resource-count table
  stats    evaluate the confidence-interval mathematics stand-alone
  cases    write the bundled example programs (shor.qw, hhl.qw)
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ProjAssertError
from . import cases as cases_mod
from .lang.interp import _get_compiled
from .lang.parser import parse_program
from .lang.syntax import format_matrix
from .lower import count_circuit, count_resources, lower_assertion
from .report import (
    build_report,
    dump_state,
    render_report_figure,
    report_json,
    run_campaign,
    write_report,
)
from .stats import AssertionCounts, theorem1_intervals, theorem1_sample_ok, theorem2_report

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


def _load_program(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_program(text), text


def _float_list(text: str):
    return [float(x) for x in text.split(",") if x.strip() != ""]


def cmd_run(args) -> int:
    program, text = _load_program(args.program)
    epsilons = _float_list(args.epsilons) if args.epsilons else None
    campaign = run_campaign(
        program,
        shots=args.shots,
        seed=args.seed,
        mode=args.mode,
        loop_cap=args.loop_cap,
        jobs=args.jobs,
    )
    report = build_report(
        program, text, campaign, args.shots, args.seed, args.mode, args.alpha,
        epsilons,
    )
    payload = report_json(report)
    if args.out:
        write_report(report, args.out)
        stem, _ = os.path.splitext(args.out)
        render_report_figure(report, stem + ".png")
    else:
        sys.stdout.write(payload)
    if args.dump_state:
        stem = (
            os.path.splitext(args.out)[0] if args.out else "state"
        ) + f"-{args.dump_state}"
        dump_state(
            program, args.dump_state, stem + ".csv", stem + ".png",
            loop_cap=args.loop_cap,
        )
    any_failures = sum(campaign["failures"].values()) > 0
    any_incorrect = any(s["verdict"] == "Incorrect" for s in report["sites"])
    return EXIT_FAILURES if (any_failures or any_incorrect) else EXIT_OK


def _site_counts(stmt, lowered):
    if stmt.impl is not None:
        return count_circuit(stmt.impl)
    return count_resources(lowered)


def cmd_compile(args) -> int:
    program, _ = _load_program(args.program)
    _get_compiled(program)
    sites = program.assert_sites()
    if args.site:
        sites = [s for s in sites if s.site == args.site]
        if not sites:
            print(f"error: no assertion named {args.site}", file=sys.stderr)
            return EXIT_USAGE
    lowereds = {s.site: lower_assertion(s, program.qubit_count) for s in sites}

    lines = []
    for stmt in sites:
        low = lowereds[stmt.site]
        lines.append(f"assertion {stmt.site} (line {stmt.line}):")
        if low.abort_always:
            lines.append("    ABORT-ALWAYS")
        else:
            if low.aux_qubits:
                lines.append("    aux qubit: 1 (prepended as qubit 0)")
            for step in low.steps:
                if step.kind == "unitary":
                    d = step.matrix.shape[0]
                    lines.append(f"    unitary [{d}x{d}]")
                else:
                    lines.append(f"    check q{step.qubit} expect 0")
        if stmt.impl is not None:
            lines.append("    hand circuit: "
                         + "; ".join(
                             f"check q{op.qubits[0]}" if op.kind == "check"
                             else f"{op.name} " + ",".join(f"q{q}" for q in op.qubits)
                             for op in stmt.impl))
    print("\n".join(lines))

    if args.counts:
        print()
        header = f"{'site':<8}{'H':>4}{'CNOT':>6}{'other':>7}{'genU':>6}{'measure':>9}{'aux':>5}"
        print(header)
        for stmt in sites:
            c = _site_counts(stmt, lowereds[stmt.site])
            other = c.other_2q + c.other_3q
            print(
                f"{stmt.site:<8}{c.h_gates:>4}{c.cnot_gates:>6}{other:>7}"
                f"{c.generic_unitaries:>6}{c.measurements:>9}{c.aux_qubits:>5}"
            )

    if args.emit:
        _emit_lowered(program, sites, lowereds, args.emit)
    return EXIT_OK


def _emit_lowered(program, sites, lowereds, path):
    """Write the lowered assertions as a parseable DSL fragment file."""
    shift = 1 if any(lowereds[s.site].aux_qubits for s in sites) else 0
    n = program.qubit_count + shift
    out = [f"qubits {n};"]
    body = []
    for stmt in sites:
        low = lowereds[stmt.site]
        impl_ops = []
        local_shift = shift - low.aux_qubits
        width = program.qubit_count + low.aux_qubits
        for i, step in enumerate(low.steps):
            if step.kind == "unitary":
                name = f"U_{stmt.site}_{i}"
                out.append(f"defgate {name} = {format_matrix(step.matrix)};")
                qlist = ", ".join(
                    f"q{q + local_shift}" for q in range(width)
                )
                impl_ops.append(f"    {name} {qlist};")
            else:
                impl_ops.append(f"    check q{step.qubit + local_shift};")
        target = ", ".join(f"q{q + shift}" for q in stmt.qubits)
        if low.abort_always:
            body.append(f"assert {stmt.site}: {stmt.expr_text} on {target};")
        else:
            body.append(
                f"assert {stmt.site}: {stmt.expr_text} on {target} impl {{"
            )
            body.extend(impl_ops)
            body.append("};")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out + body) + "\n")


def cmd_stats(args) -> int:
    payload = {}
    (_, d_hi), (f_lo, _) = theorem1_intervals(args.l, args.k)
    payload["theorem1"] = {
        "d_interval": [0.0, d_hi],
        "f_interval": [f_lo, 1.0],
        "sample_ok": theorem1_sample_ok(args.l, args.k),
    }
    if args.failures is not None:
        failures = [int(x) for x in args.failures.split(",")]
        if len(failures) != args.l:
            raise ValueError(f"{len(failures)} failure counts for l = {args.l}")
        epsilons = _float_list(args.epsilons) if args.epsilons else None
        verdicts, delta = theorem2_report(
            AssertionCounts(tuple(failures), args.k), epsilons
        )
        payload["theorem2"] = {
            "sites": [
                {
                    "w_minus": v.w_minus,
                    "w_center": v.w_center,
                    "w_plus": v.w_plus,
                    "epsilon": v.epsilon,
                    "verdict": v.verdict,
                }
                for v in verdicts
            ],
            "delta": delta,
        }
    from .report import _round_floats

    print(json.dumps(_round_floats(payload), indent=2))
    return EXIT_OK


def cmd_cases(args) -> int:
    paths = cases_mod.write_case_files(args.out_dir)
    for p in paths:
        print(p)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="projassert",
        description="projection-predicate runtime assertions for quantum programs",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a debugging campaign")
    run.add_argument("--program", required=True)
    run.add_argument("--shots", type=int, required=True)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--alpha", type=float, default=0.05)
    run.add_argument("--epsilons", default=None,
                     help="comma-separated declared tolerances, one per site")
    run.add_argument("--mode", choices=["direct", "lowered"], default="direct")
    run.add_argument("--out", default=None, help="report JSON path")
    run.add_argument("--loop-cap", type=int, default=None)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--dump-state", default=None, metavar="SITE",
                     help="write the exact state at SITE as CSV + figure")
    run.set_defaults(func=cmd_run)

    comp = sub.add_parser("compile", help="lower assertions, count resources")
    comp.add_argument("--program", required=True)
    comp.add_argument("--site", default=None)
    comp.add_argument("--emit", default=None, help="write lowered DSL fragments")
    comp.add_argument("--counts", action="store_true")
    comp.set_defaults(func=cmd_compile)

    st = sub.add_parser("stats", help="confidence-interval mathematics")
    st.add_argument("--l", type=int, required=True)
    st.add_argument("--k", type=int, required=True)
    st.add_argument("--failures", default=None)
    st.add_argument("--epsilons", default=None)
    st.add_argument("--alpha", type=float, default=0.05)
    st.set_defaults(func=cmd_stats)

    cs = sub.add_parser("cases", help="write the bundled example programs")
    cs.add_argument("--out-dir", default=".")
    cs.set_defaults(func=cmd_cases)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ProjAssertError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
