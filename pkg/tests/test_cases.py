"""Bundled case-study programs and bug injection."""

import numpy as np
import pytest

from projassert.cases import (
    HHL_A,
    HHL_B,
    BugSpec,
    build_hhl,
    build_shor,
    example_bugs,
    hhl_eigensystem,
    hhl_gates,
    hhl_reference_solution,
    hhl_solution,
    inject_bug,
    write_case_files,
)
from projassert.errors import BadTarget
from projassert.lang.exact import semantic_function
from projassert.lang.parser import parse_program
from projassert.lang.syntax import Skip, Unitary, program_to_text
from projassert.numerics import partial_trace


def test_shor_program_shape():
    prog = build_shor()
    assert prog.qubit_count == 5
    sites = [s.site for s in prog.assert_sites()]
    assert sites == ["A0", "A1", "A2", "A3"]
    loop = prog.body.stmts[0]
    assert loop.outcomes == frozenset({"000", "001", "011", "101", "111"})


def test_shor_assertions_hold_exactly():
    res = semantic_function(build_shor())
    for site, mass in res.abort_mass.items():
        visit = res.visit_mass[site]
        assert mass / visit <= 1e-9, site
    total = res.completion_mass() + sum(res.abort_mass.values()) + res.residual_loop_mass
    assert total == pytest.approx(1.0, abs=1e-9)


def test_hhl_eigensystem_snaps_to_design_spectrum():
    snapped, vecs = hhl_eigensystem()
    assert sorted(snapped) == [1.0, 1.0, 3.0, 3.0]
    raw = np.linalg.eigvalsh(HHL_A)
    assert np.max(np.abs(np.sort(raw) - np.sort(snapped))) < 0.02
    assert np.allclose(vecs @ vecs.T, np.eye(4), atol=1e-9)


def test_hhl_solutions_agree():
    x = hhl_solution()
    ref = hhl_reference_solution()
    assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.dot(x, ref)) >= 1.0 - 1e-6
    # A x must point along b (up to the snapping of the rounded spectrum)
    b_unit = HHL_B / np.linalg.norm(HHL_B)
    ax = HHL_A @ x
    assert abs(np.dot(ax / np.linalg.norm(ax), b_unit)) >= 1.0 - 1e-3


def test_hhl_gates_are_unitary():
    for g in hhl_gates():
        d = g.shape[0]
        assert np.allclose(g @ g.conj().T, np.eye(d), atol=1e-9)


def test_hhl_assertions_hold_exactly():
    res = semantic_function(build_hhl(), loop_cap=8)
    for site in ("P", "S", "R", "Q"):
        assert res.abort_mass.get(site, 0.0) <= 1e-9, site
    assert res.completion_mass() == pytest.approx(1.0, abs=1e-6)


def test_hhl_output_state_is_the_solution():
    res = semantic_function(build_hhl(), loop_cap=8)
    rho = res.normalized_output(5).matrix
    reduced = partial_trace(rho, 5, [2, 3])
    x = hhl_solution()
    overlap = float(np.real(x @ reduced @ x))
    assert overlap >= 1.0 - 1e-9


def test_case_files_round_trip(tmp_path):
    paths = write_case_files(str(tmp_path))
    assert sorted(p.split("/")[-1] for p in paths) == ["hhl.qw", "shor.qw"]
    for p in paths:
        with open(p, "r", encoding="utf-8") as fh:
            prog = parse_program(fh.read())
        assert prog.qubit_count == 5


def test_inject_bug_leaves_original_untouched():
    prog = build_shor()
    before = program_to_text(prog)
    bugged = inject_bug(prog, BugSpec("DropGate", (0, 0, 2)))
    assert program_to_text(prog) == before
    assert bugged.metadata[-1].startswith("DropGate@")
    assert isinstance(bugged.body.stmts[0].body.stmts[2], Skip)


def test_inject_bug_kinds():
    prog = build_shor()
    replaced = inject_bug(
        prog, BugSpec("ReplaceGate", (0, 0, 2), gate="X", qubits=(0,))
    )
    stmt = replaced.body.stmts[0].body.stmts[2]
    assert stmt == Unitary("X", (0,))

    inserted = inject_bug(prog, BugSpec("InsertGate", (0, 0, 2), gate="X", qubits=(4,)))
    body = inserted.body.stmts[0].body.stmts
    assert len(body) == len(prog.body.stmts[0].body.stmts) + 1
    assert body[3] == Unitary("X", (4,))

    swapped = inject_bug(prog, BugSpec("SwapOperands", (0, 0, 6)))
    stmt = swapped.body.stmts[0].body.stmts[6]
    assert stmt == Unitary("CNOT", (3, 2))


def test_inject_bug_validates_targets():
    prog = build_shor()
    with pytest.raises(BadTarget):
        inject_bug(prog, BugSpec("DropGate", (0, 0, 1)))  # an assert, not a gate
    with pytest.raises(BadTarget):
        inject_bug(prog, BugSpec("DropGate", (0, 0, 99)))
    with pytest.raises(BadTarget):
        inject_bug(prog, BugSpec("InsertGate", (0, 0, 2)))  # no gate given
    with pytest.raises(BadTarget):
        inject_bug(prog, BugSpec("Nonsense", (0, 0, 2)))


def test_example_bug_oracle_violations():
    # each mutation has a clean closed-form per-visit failure rate at its
    # detecting assertion
    expected = {"drop_first_h": 0.5, "replace_cnot_target": 0.75, "insert_x_flag": 1.0}
    for name, bug, site in example_bugs():
        bugged = inject_bug(build_shor(), bug)
        res = semantic_function(bugged)
        rate = res.abort_mass[site] / res.visit_mass[site]
        assert rate == pytest.approx(expected[name], abs=1e-9), name
        # upstream assertions stay clean
        sites = [s.site for s in bugged.assert_sites()]
        for upstream in sites[: sites.index(site)]:
            up_rate = res.abort_mass[upstream] / res.visit_mass[upstream]
            assert up_rate <= 1e-9, (name, upstream)
