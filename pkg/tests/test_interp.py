"""Trajectory interpreter and exact density-operator semantics."""

import numpy as np
import pytest

from projassert.lang.exact import semantic_function
from projassert.lang.gates import CNOT, H, qft_matrix
from projassert.lang.interp import (
    ABORTED,
    COMPLETED,
    LOOP_CAP,
    embed_operator,
    run_trajectory,
)
from projassert.lang.parser import parse_program
from projassert.report import cp_interval
from projassert.states import StateVector


def test_embed_operator_single_qubit_placement():
    # H on qubit 0 of two: H (x) I
    full = embed_operator(H, (0,), 2)
    assert np.allclose(full, np.kron(H, np.eye(2)), atol=1e-12)
    full1 = embed_operator(H, (1,), 2)
    assert np.allclose(full1, np.kron(np.eye(2), H), atol=1e-12)


def test_embed_operator_reversed_control_and_target():
    # CNOT with control q1, target q0 on a 2-qubit register
    full = embed_operator(CNOT, (1, 0), 2)
    expect = np.zeros((4, 4))
    # q1 (low bit) controls, q0 (high bit) flips
    for i in range(4):
        j = i ^ 2 if i & 1 else i
        expect[j, i] = 1.0
    assert np.allclose(full, expect, atol=1e-12)


def test_qft_matrix_is_plain_fourier():
    f = qft_matrix(2)
    t = 4
    expect = np.array(
        [[np.exp(2j * np.pi * r * c / t) for c in range(t)] for r in range(t)]
    ) / 2.0
    assert np.allclose(f, expect, atol=1e-12)
    assert np.allclose(qft_matrix(2, inverse=True), f.conj().T, atol=1e-12)


def test_same_seed_reproduces_a_trajectory():
    prog = parse_program(
        "qubits 2;\nH q0;\nH q1;\nif measure (q0, q1) in {11} { X q0; }\n"
    )
    r1 = run_trajectory(prog, 42)
    r2 = run_trajectory(prog, 42)
    assert r1.measurement_log == r2.measurement_log
    assert np.array_equal(r1.final_state.amplitudes, r2.final_state.amplitudes)


def test_init_resets_to_zero():
    prog = parse_program("qubits 1;\nX q0;\ninit q0;\n")
    r = run_trajectory(prog, 0)
    assert r.status == COMPLETED
    assert abs(r.final_state.amplitudes[0]) == pytest.approx(1.0, abs=1e-12)


def test_init_collapses_superpositions_consistently():
    # after H the reset must land on |0> regardless of which branch the
    # measurement picks
    prog = parse_program("qubits 1;\nH q0;\ninit q0;\n")
    for seed in range(20):
        r = run_trajectory(prog, seed)
        assert abs(r.final_state.amplitudes[0]) == pytest.approx(1.0, abs=1e-12)


def test_assert_aborts_on_orthogonal_state():
    prog = parse_program("qubits 1;\nassert A: span{|1>} on q0;\n")
    r = run_trajectory(prog, 0)
    assert r.status == ABORTED
    assert r.abort_site == "A"
    assert r.reached == {"A": 1}


def test_satisfied_assert_is_non_destructive():
    base = "qubits 2;\nH q0;\nCNOT q0, q1;\n"
    with_assert = base + "assert A: span{|00> + |11>} on q0, q1;\n"
    r_plain = run_trajectory(parse_program(base), 5)
    r_checked = run_trajectory(parse_program(with_assert), 5)
    assert r_checked.status == COMPLETED
    assert np.allclose(
        r_plain.final_state.amplitudes, r_checked.final_state.amplitudes, atol=1e-9
    )


def test_partially_satisfied_assert_projects_the_state():
    prog = parse_program("qubits 1;\nH q0;\nassert A: span{|0>} on q0;\n")
    passed = aborted = 0
    for seed in range(400):
        r = run_trajectory(prog, [21, seed])
        if r.status == COMPLETED:
            passed += 1
            assert abs(r.final_state.amplitudes[0]) == pytest.approx(1.0, abs=1e-9)
        else:
            aborted += 1
    lo, hi = cp_interval(aborted, 400)
    assert lo <= 0.5 <= hi


def test_while_loop_cap_status():
    # measuring |0> always continues and the body keeps it at |0>
    prog = parse_program("qubits 1;\nwhile measure (q0) in {0} cap 3 { skip; }\n")
    r = run_trajectory(prog, 0)
    assert r.status == LOOP_CAP
    r2 = run_trajectory(prog, 0, loop_cap=1)
    assert r2.status == LOOP_CAP


def test_while_loop_exits_on_non_continue_outcome():
    prog = parse_program("qubits 1;\nX q0;\nwhile measure (q0) in {0} { H q0; }\n")
    r = run_trajectory(prog, 0)
    assert r.status == COMPLETED


def test_exact_semantics_mass_conservation():
    text = (
        "qubits 2;\n"
        "while measure (q0) in {0} cap 4 {\n"
        "    H q0;\n"
        "    assert A: span{|0>} (x) I[2] | span{|1>} (x) span{|0>} on q0, q1;\n"
        "}\n"
    )
    res = semantic_function(parse_program(text))
    total = res.completion_mass() + sum(res.abort_mass.values()) + res.residual_loop_mass
    assert total == pytest.approx(1.0, abs=1e-9)


def test_exact_abort_mass_hand_value():
    prog = parse_program("qubits 1;\nH q0;\nassert A: span{|0>} on q0;\n")
    res = semantic_function(prog)
    assert res.abort_mass["A"] == pytest.approx(0.5, abs=1e-12)
    assert res.visit_mass["A"] == pytest.approx(1.0, abs=1e-12)
    assert res.completion_mass() == pytest.approx(0.5, abs=1e-12)


def test_exact_reset_of_mixed_branch():
    # H then init must return all mass to |0>
    prog = parse_program("qubits 1;\nH q0;\ninit q0;\n")
    res = semantic_function(prog)
    rho = res.normalized_output(1).matrix
    assert np.allclose(rho, np.diag([1.0, 0.0]), atol=1e-12)


def test_exact_if_branches_split_mass():
    prog = parse_program(
        "qubits 1;\nH q0;\nif measure (q0) in {1} { X q0; }\n"
    )
    res = semantic_function(prog)
    rho = res.normalized_output(1).matrix
    # both branches end in |0>, so the output is pure despite the split
    assert np.allclose(rho, np.diag([1.0, 0.0]), atol=1e-12)


def test_sampled_abort_rate_matches_exact_oracle():
    text = (
        "qubits 2;\n"
        "H q0;\n"
        "CNOT q0, q1;\n"
        "assert A: span{|00>, |01>, |10>} on q0, q1;\n"
    )
    prog = parse_program(text)
    oracle = semantic_function(prog)
    expected = oracle.abort_mass["A"] / oracle.visit_mass["A"]
    assert expected == pytest.approx(0.5, abs=1e-12)
    fails = sum(
        run_trajectory(prog, [3, i]).status == ABORTED for i in range(600)
    )
    lo, hi = cp_interval(fails, 600)
    assert lo <= expected <= hi


def test_lowered_mode_trajectory_matches_direct_statistics():
    text = (
        "qubits 2;\n"
        "H q0;\n"
        "H q1;\n"
        "assert A: span{|00>, |01>, |10>} on q0, q1;\n"
    )
    prog = parse_program(text)
    oracle = semantic_function(prog)
    expected = oracle.abort_mass["A"] / oracle.visit_mass["A"]
    assert expected == pytest.approx(0.25, abs=1e-12)
    fails = sum(
        run_trajectory(prog, [9, i], mode="lowered").status == ABORTED
        for i in range(400)
    )
    lo, hi = cp_interval(fails, 400)
    assert lo <= expected <= hi


def test_final_state_is_a_unit_vector():
    prog = parse_program("qubits 3;\nH q0;\nCNOT q0, q1;\nH q2;\n")
    r = run_trajectory(prog, 1)
    assert isinstance(r.final_state, StateVector)
    assert np.linalg.norm(r.final_state.amplitudes) == pytest.approx(1.0, abs=1e-9)
