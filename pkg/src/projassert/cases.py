"""Case-study programs and bug injection.

Two generated DSL programs: order finding for N = 15 with a = 11 (five
qubits, four assertions A0..A3) and a 4x4 linear-system solver (two
2-qubit registers plus a success flag, assertions P, S, R, Q).  Both are
emitted as plain text and parsed back, so the .qw files on disk are the
single source of truth for what runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import BadTarget, EigenvalueMismatch
from .lang.parser import parse_program
from .lang.syntax import (
    Assert,
    IfMeasure,
    Program,
    Seq,
    Skip,
    Unitary,
    WhileMeasure,
    format_matrix,
)

SHOR_TEXT = """\
# Order finding for N = 15, a = 11, on 5 qubits.
# q0..q2: phase register (q0 most significant), q3..q4: work register.
qubits 5;
while measure (q0, q1, q2) in {000, 001, 011, 101, 111} cap 1000 {
    init q0, q1, q2, q3, q4;
    assert A0: span{|00000>} on q0, q1, q2, q3, q4 impl {
        check q0; check q1; check q2; check q3; check q4;
    };
    H q0;
    H q1;
    H q2;
    assert A1: span{|+++>} (x) span{|00>} on q0, q1, q2, q3, q4 impl {
        H q0; H q1; H q2;
        check q0; check q1; check q2;
        H q0; H q1; H q2;
    };
    CNOT q2, q3;
    CNOT q2, q4;
    assert A2: span{|++>} (x) span{|000> + |111>} on q0, q1, q2, q3, q4 impl {
        CNOT q2, q3; CNOT q2, q4;
        H q2; H q0; H q1;
        check q0; check q1; check q2; check q3; check q4;
        H q0; H q1; H q2;
        CNOT q2, q4; CNOT q2, q3;
    };
    IQFT q0, q1, q2;
    assert A3: span{|000>, |100>} (x) span{|00>, |11>} on q0, q1, q2, q3, q4 impl {
        check q0; check q1;
        H q2;
        check q2;
        H q2;
    };
}
"""


def build_shor() -> Program:
    """The order-finding program, assertions A0..A3 attached."""
    return parse_program(SHOR_TEXT)


# Linear-system instance: symmetric 4x4 matrix with spectrum {1, 1, 3, 3}
# (printed to three decimals, hence the snapping below) and a unit b.
HHL_A = np.array(
    [
        [1.951, -0.863, 0.332, -0.377],
        [-0.863, 2.239, -0.011, -0.444],
        [0.332, -0.011, 1.301, -0.634],
        [-0.377, -0.444, -0.634, 2.509],
    ]
)
HHL_B = np.array([-0.486, -0.345, -0.494, -0.633])

_TARGET_EIGS = (1.0, 3.0)
_EIG_TOL = 0.02


def hhl_eigensystem():
    """Eigendecomposition of the printed matrix with eigenvalues snapped
    to the design values {1, 1, 3, 3}.

    The printed matrix is rounded to three decimals; snapping restores
    the exact integer spectrum the phase-estimation register resolves.
    """
    vals, vecs = np.linalg.eigh(HHL_A)
    snapped = []
    for v in vals:
        target = min(_TARGET_EIGS, key=lambda t: abs(t - v))
        if abs(v - target) > _EIG_TOL:
            raise EigenvalueMismatch(
                f"eigenvalue {v:.6f} is {abs(v - target):.4f} from {target}"
            )
        snapped.append(target)
    return np.array(snapped), vecs


def hhl_solution() -> np.ndarray:
    """|x|-normalized solution of the snapped system, first significant
    component made positive."""
    snapped, vecs = hhl_eigensystem()
    b = HHL_B / np.linalg.norm(HHL_B)
    coeffs = vecs.T @ b
    x = vecs @ (coeffs / snapped)
    x = x / np.linalg.norm(x)
    return _fix_sign(x)


def hhl_reference_solution() -> np.ndarray:
    """Solution of the printed (unsnapped) system, for cross-checks."""
    x = np.linalg.solve(HHL_A, HHL_B / np.linalg.norm(HHL_B))
    x = x / np.linalg.norm(x)
    return _fix_sign(x)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nz = np.nonzero(np.abs(v) > 1e-9)[0]
    if len(nz) and v[nz[0]].real < 0:
        return -v
    return v


def _ketsum(coeffs, bit_suffix: str = "", width: int = 2) -> str:
    """Render sum of coeffs[k] |k bits + suffix> as a DSL ketsum."""
    parts = []
    for k, c in enumerate(coeffs):
        c = float(np.real(c))
        if abs(c) < 1e-15:
            continue
        bits = format(k, f"0{width}b") + bit_suffix
        sign = "-" if c < 0 else "+"
        term = f"{abs(c):.12g}*|{bits}>"
        if not parts:
            parts.append(term if sign == "+" else "-" + term)
        else:
            parts.append(f" {sign} {term}")
    return "".join(parts)


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def hhl_gates():
    """Concrete UB, UF, UFD, UC matrices for the instance."""
    snapped, vecs = hhl_eigensystem()
    b = HHL_B / np.linalg.norm(HHL_B)
    # unitary completion sending |00> to b
    from .numerics import orthonormal_complement

    ub = np.hstack([b[:, None], orthonormal_complement(b[:, None])]).astype(complex)

    # controlled evolution: sum_tau |tau><tau| (x) exp(i pi A tau / 2),
    # with the snapped spectrum the per-tau phases are exact
    uf = np.zeros((16, 16), dtype=complex)
    for tau in range(4):
        phases = np.exp(1j * np.pi * snapped * tau / 2.0)
        block = (vecs * phases) @ vecs.T
        uf[4 * tau : 4 * tau + 4, 4 * tau : 4 * tau + 4] = block

    # controlled rotation on the flag qubit: angle 2 asin(1/i) for
    # phase-register value i >= 1, identity for 0
    uc = np.zeros((8, 8), dtype=complex)
    uc[0:2, 0:2] = np.eye(2)
    for i in range(1, 4):
        uc[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = _ry(2.0 * np.arcsin(1.0 / i))
    return ub, uf, uf.conj().T, uc


def hhl_text() -> str:
    ub, uf, ufd, uc = hhl_gates()
    x = hhl_solution()

    x_ket = _ketsum(x, bit_suffix="1", width=2)
    q_ket = _ketsum(x, width=2)
    rest0 = "span{|000>, |010>, |100>, |110>}"

    lines = [
        "# Linear-system solver for the fixed 4x4 instance.",
        "# q0, q1: phase register; q2, q3: state register; q4: success flag.",
        "qubits 5;",
        f"defgate UB = {format_matrix(ub)};",
        f"defgate UF = {format_matrix(uf)};",
        f"defgate UFD = {format_matrix(ufd)};",
        f"defgate UC = {format_matrix(uc)};",
        "while measure (q4) in {0} cap 1000 {",
        "    assert P: span{|00>} (x) span{|0>} on q0, q1, q4;",
        "    init q2, q3;",
        "    UB q2, q3;",
        "    H q0;",
        "    H q1;",
        "    UF q0, q1, q2, q3;",
        "    IQFT q0, q1;",
        "    assert S: span{|01>, |11>} on q0, q1;",
        "    UC q0, q1, q4;",
        "    QFT q0, q1;",
        "    UFD q0, q1, q2, q3;",
        "    H q0;",
        "    H q1;",
        f"    assert R: span{{|00>}} (x) (span{{{x_ket}}} | {rest0})"
        " on q0, q1, q2, q3, q4;",
        "}",
        f"assert Q: span{{{q_ket}}} on q2, q3;",
        "",
    ]
    return "\n".join(lines)


def build_hhl() -> Program:
    return parse_program(hhl_text())


def write_case_files(directory: str):
    """Write shor.qw and hhl.qw; returns their paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, text in (("shor.qw", SHOR_TEXT), ("hhl.qw", hhl_text())):
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        paths.append(path)
    return paths


# bug injection ------------------------------------------------------


@dataclass(frozen=True)
class BugSpec:
    """A mutation applied to one Unitary statement.

    kind: DropGate | ReplaceGate | InsertGate | SwapOperands.
    target: index path from the program body; each element selects a
    child (Seq entries by position, a while body is child 0, an if's
    then/else bodies are children 0/1).  InsertGate places the new gate
    directly after the target.
    """

    kind: str
    target: tuple
    gate: str | None = None
    qubits: tuple | None = None


def _navigate(node, path):
    trail = []
    for idx in path:
        trail.append(node)
        if isinstance(node, Seq):
            if not 0 <= idx < len(node.stmts):
                raise BadTarget(f"index {idx} out of range")
            node = node.stmts[idx]
        elif isinstance(node, WhileMeasure):
            if idx != 0:
                raise BadTarget("while has a single child (its body)")
            node = node.body
        elif isinstance(node, IfMeasure):
            if idx == 0:
                node = node.then_body
            elif idx == 1:
                node = node.else_body
            else:
                raise BadTarget("if has children 0 (then) and 1 (else)")
        else:
            raise BadTarget(f"cannot descend into {type(node).__name__}")
    return node


def _rebuild(node, path, edit):
    """Return a copy of node with edit applied at the end of path.

    edit(parent_seq, index) is called on the Seq holding the target and
    returns the replacement statement tuple.
    """
    if len(path) == 1:
        if not isinstance(node, Seq):
            raise BadTarget("target parent is not a statement sequence")
        return Seq(edit(node, path[0]))
    idx = path[0]
    if isinstance(node, Seq):
        stmts = list(node.stmts)
        stmts[idx] = _rebuild(stmts[idx], path[1:], edit)
        return Seq(tuple(stmts))
    if isinstance(node, WhileMeasure):
        return replace(node, body=_rebuild(node.body, path[1:], edit))
    if isinstance(node, IfMeasure):
        if idx == 0:
            return replace(node, then_body=_rebuild(node.then_body, path[1:], edit))
        return replace(node, else_body=_rebuild(node.else_body, path[1:], edit))
    raise BadTarget(f"cannot descend into {type(node).__name__}")


def inject_bug(program: Program, bug: BugSpec) -> Program:
    """Mutated copy of the program; the original is untouched."""
    target = _navigate(program.body, bug.target)
    if not isinstance(target, Unitary):
        raise BadTarget(f"target is {type(target).__name__}, not a gate")

    def edit(seq: Seq, idx: int):
        stmts = list(seq.stmts)
        if bug.kind == "DropGate":
            stmts[idx] = Skip()
        elif bug.kind == "ReplaceGate":
            name = bug.gate or target.name
            qubits = bug.qubits if bug.qubits is not None else target.qubits
            stmts[idx] = Unitary(name, tuple(qubits))
        elif bug.kind == "InsertGate":
            if bug.gate is None or bug.qubits is None:
                raise BadTarget("InsertGate needs gate and qubits")
            stmts.insert(idx + 1, Unitary(bug.gate, tuple(bug.qubits)))
        elif bug.kind == "SwapOperands":
            stmts[idx] = Unitary(target.name, tuple(reversed(target.qubits)))
        else:
            raise BadTarget(f"unknown bug kind {bug.kind}")
        return tuple(stmts)

    body = _rebuild(program.body, list(bug.target), edit)
    note = f"{bug.kind}@{'/'.join(map(str, bug.target))}"
    return Program(
        program.qubit_count,
        dict(program.gate_defs),
        body,
        metadata=program.metadata + (note,),
    )


def example_bugs():
    """Three mutations of the order-finding program; each is detected by
    the named downstream assertion.

    Body indices inside the loop: 0 init, 1 A0, 2-4 the H gates,
    5 A1, 6-7 the CNOTs, 8 A2, 9 IQFT, 10 A3.
    """
    return [
        ("drop_first_h", BugSpec("DropGate", (0, 0, 2)), "A1"),
        (
            "replace_cnot_target",
            BugSpec("ReplaceGate", (0, 0, 7), gate="CNOT", qubits=(2, 3)),
            "A2",
        ),
        (
            "insert_x_flag",
            BugSpec("InsertGate", (0, 0, 7), gate="X", qubits=(4,)),
            "A2",
        ),
    ]
