"""Campaign runner and report writer.

Runs k seeded trajectories of a program, aggregates per-assertion
failure counts, attaches the confidence-interval mathematics, and writes
the result as deterministic JSON (stable key order, 12 significant
digits) plus a rendered figure.  Shot i of a campaign with master seed s
always uses derived seed [s, i], so the aggregate is independent of how
shots are scheduled across workers.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ShapeUnderflow
from .lang.exact import semantic_function
from .lang.interp import ABORTED, COMPLETED, LOOP_CAP, _get_compiled, run_trajectory
from .lang.syntax import Program
from .stats import (
    AssertionCounts,
    beta_quantile,
    cp_zero_interval,
    theorem1_intervals,
    theorem1_sample_ok,
    theorem2_report,
)


def cp_interval(failures: int, trials: int, alpha: float = 0.05):
    """Two-sided exact binomial interval via beta quantiles."""
    if trials < 1:
        return 0.0, 1.0
    if failures <= 0:
        return cp_zero_interval(trials, alpha)
    if failures >= trials:
        lo = 1.0 - cp_zero_interval(trials, alpha)[1]
        return lo, 1.0
    lo = beta_quantile(alpha / 2.0, failures, trials - failures + 1)
    hi = beta_quantile(1.0 - alpha / 2.0, failures + 1, trials - failures)
    return lo, hi


def run_campaign(
    program: Program,
    shots: int,
    seed: int,
    mode: str = "direct",
    loop_cap: int | None = None,
    jobs: int = 1,
):
    """Execute the shots and return aggregate counts."""
    compiled = _get_compiled(program)
    sites = program.assert_sites()
    if mode == "lowered":
        for stmt in sites:
            compiled.lowered_assertion(stmt)

    def one(i: int):
        return run_trajectory(program, [seed, i], mode=mode, loop_cap=loop_cap)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, range(shots)))
    else:
        results = [one(i) for i in range(shots)]

    reached = {s.site: 0 for s in sites}
    failures = {s.site: 0 for s in sites}
    status_counts = {COMPLETED: 0, ABORTED: 0, LOOP_CAP: 0}
    for res in results:
        status_counts[res.status] += 1
        for site, count in res.reached.items():
            reached[site] += count
        if res.status == ABORTED:
            failures[res.abort_site] += 1
    return {
        "results": results,
        "reached": reached,
        "failures": failures,
        "status_counts": status_counts,
        "sites": sites,
    }


def build_report(
    program: Program,
    program_text: str,
    campaign: dict,
    shots: int,
    seed: int,
    mode: str,
    alpha: float,
    epsilons=None,
):
    sites = campaign["sites"]
    l = len(sites)
    fail_list = [campaign["failures"][s.site] for s in sites]
    eps_list = list(epsilons) if epsilons is not None else None

    verdicts = None
    delta = None
    underflow = False
    if l:
        try:
            verdicts, delta = theorem2_report(
                AssertionCounts(tuple(fail_list), shots), eps_list
            )
        except ShapeUnderflow:
            underflow = True

    site_records = []
    for idx, stmt in enumerate(sites):
        reached = campaign["reached"][stmt.site]
        failed = campaign["failures"][stmt.site]
        lo, hi = cp_interval(failed, reached, alpha) if reached else (0.0, 1.0)
        record = {
            "site": stmt.site,
            "location": f"line {stmt.line}",
            "reached": reached,
            "failures": failed,
            "cp_low": lo,
            "cp_high": hi,
        }
        if verdicts is not None:
            v = verdicts[idx]
            record.update(
                w_minus=v.w_minus,
                w_center=v.w_center,
                w_plus=v.w_plus,
                epsilon=v.epsilon,
                verdict=v.verdict,
            )
        else:
            record.update(
                w_minus=None, w_center=None, w_plus=None, epsilon=None,
                verdict="Inconclusive",
            )
        site_records.append(record)

    d_hi = f_lo = None
    if l:
        (_, d_hi), (f_lo, _) = theorem1_intervals(l, shots)
    digest = hashlib.sha256(program_text.encode("utf-8")).hexdigest()
    return {
        "schema": "proq-report/1",
        "program_digest": digest,
        "qubits": program.qubit_count,
        "shots": shots,
        "seed": seed,
        "mode": mode,
        "alpha": alpha,
        "sites": site_records,
        "global": {
            "l": l,
            "theorem1_d_hi": d_hi,
            "theorem1_f_lo": f_lo,
            "theorem1_sample_ok": bool(theorem1_sample_ok(l, shots)) if l else None,
            "delta": delta,
            "shape_underflow": underflow,
            "completed": campaign["status_counts"][COMPLETED],
            "aborted": campaign["status_counts"][ABORTED],
            "loop_cap_exceeded": campaign["status_counts"][LOOP_CAP],
        },
    }


def _round_floats(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def report_json(report: dict) -> str:
    """Deterministic serialization: insertion key order, floats at 12
    significant digits."""
    return json.dumps(_round_floats(report), indent=2) + "\n"


def write_report(report: dict, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_json(report))


def render_report_figure(report: dict, path: str):
    """Per-site failure rates with exact-binomial error bars."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sites = report["sites"]
    names = [s["site"] for s in sites]
    rates = [
        s["failures"] / s["reached"] if s["reached"] else 0.0 for s in sites
    ]
    lo = [r - s["cp_low"] for r, s in zip(rates, sites)]
    hi = [s["cp_high"] - r for r, s in zip(rates, sites)]
    fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(sites)), 3.2))
    ax.bar(names, rates, color="#4878d0")
    ax.errorbar(
        names, rates, yerr=[lo, hi], fmt="none", ecolor="#333333", capsize=4
    )
    ax.set_ylabel("failure rate")
    ax.set_ylim(0, 1.05)
    ax.set_title(f"assertion failures over {report['shots']} shots")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def dump_state(program: Program, site: str, csv_path: str, png_path: str,
               loop_cap: int | None = None):
    """Exact average state arriving at an assertion site, as a CSV of
    (basis string, probability) plus a histogram figure."""
    result = semantic_function(program, loop_cap=loop_cap)
    if site not in result.site_states:
        raise KeyError(site)
    op = result.site_states[site]
    mass = float(np.trace(op).real)
    probs = np.real(np.diag(op)) / mass
    n = program.qubit_count
    rows = []
    for idx, p in enumerate(probs):
        rows.append((format(idx, f"0{n}b"), float(p)))
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("basis,probability\n")
        for bits, p in rows:
            fh.write(f"{bits},{p:.12g}\n")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [bits for bits, p in rows if p > 1e-9]
    values = [p for _, p in rows if p > 1e-9]
    fig, ax = plt.subplots(figsize=(max(4, 0.5 * len(labels)), 3.2))
    ax.bar(labels, values, color="#4878d0")
    ax.set_ylabel("probability")
    ax.set_title(f"state arriving at {site}")
    plt.setp(ax.get_xticklabels(), rotation=60, ha="right", fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return rows
