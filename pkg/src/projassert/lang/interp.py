"""Trajectory interpreter: one seeded state-vector execution per call.

Statements act on a full 2^n state vector.  Per-statement operators are
cached on the Program the first time it runs, so repeated shots pay only
for matrix-vector products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..projections import embed, embed_permutation
from ..states import StateVector
from .gates import gate_matrix
from .syntax import (
    Assert,
    IfMeasure,
    Init,
    Program,
    Seq,
    Skip,
    Unitary,
    WhileMeasure,
)

COMPLETED = "completed"
ABORTED = "aborted"
LOOP_CAP = "loop_cap_exceeded"


@dataclass
class TrajectoryResult:
    status: str
    abort_site: str | None
    final_state: StateVector
    measurement_log: list
    reached: dict  # site -> visit count
    seed: object


def embed_operator(g: np.ndarray, qubits, total_qubits: int) -> np.ndarray:
    """Full 2^n operator applying g on the listed qubits (first = MSB)."""
    rest = total_qubits - len(qubits)
    ordered = np.kron(np.asarray(g, dtype=complex), np.eye(2**rest, dtype=complex))
    perm = embed_permutation(qubits, total_qubits)
    d = 2**total_qubits
    full = np.zeros((d, d), dtype=complex)
    full[np.ix_(perm, perm)] = ordered
    return full


class CompiledProgram:
    """Per-statement operator cache for a Program."""

    def __init__(self, program: Program):
        self.program = program
        self.n = program.qubit_count
        self.unitaries = {}  # id(stmt) -> full matrix
        self.assert_mats = {}  # site -> embedded projection matrix
        self.assert_projs = {}  # site -> embedded Projection
        self.lowered = {}  # site -> LoweredAssertion (filled lazily)
        self._bit_masks = {}
        self._walk(program.body)

    def _walk(self, stmt):
        if isinstance(stmt, Seq):
            for s in stmt.stmts:
                self._walk(s)
        elif isinstance(stmt, Unitary):
            g = gate_matrix(stmt.name, len(stmt.qubits), self.program.gate_defs)
            self.unitaries[id(stmt)] = embed_operator(g, stmt.qubits, self.n)
        elif isinstance(stmt, Assert):
            p = embed(stmt.projection, stmt.qubits, self.n)
            self.assert_projs[stmt.site] = p
            self.assert_mats[stmt.site] = p.as_matrix()
        elif isinstance(stmt, IfMeasure):
            self._walk(stmt.then_body)
            self._walk(stmt.else_body)
        elif isinstance(stmt, WhileMeasure):
            self._walk(stmt.body)

    def lowered_assertion(self, stmt: Assert):
        if stmt.site not in self.lowered:
            from ..lower import lower_assertion

            self.lowered[stmt.site] = lower_assertion(stmt, self.n)
        return self.lowered[stmt.site]

    def bit_mask(self, qubit: int, total: int | None = None) -> np.ndarray:
        """Boolean mask over basis indices where the qubit reads 1."""
        total = self.n if total is None else total
        key = (qubit, total)
        if key not in self._bit_masks:
            idx = np.arange(2**total)
            self._bit_masks[key] = (idx >> (total - 1 - qubit)) & 1 == 1
        return self._bit_masks[key]


def _get_compiled(program: Program) -> CompiledProgram:
    cached = getattr(program, "_compiled", None)
    if cached is None:
        cached = CompiledProgram(program)
        program._compiled = cached
    return cached


class _Abort(Exception):
    def __init__(self, site):
        self.site = site


class _LoopCap(Exception):
    pass


class _Shot:
    def __init__(self, compiled: CompiledProgram, rng, mode: str, loop_cap):
        self.c = compiled
        self.n = compiled.n
        self.rng = rng
        self.mode = mode
        self.loop_cap = loop_cap
        self.psi = np.zeros(2**self.n, dtype=complex)
        self.psi[0] = 1.0
        self.log = []
        self.reached = {}

    def measure_joint(self, qubits) -> str:
        """Computational-basis measurement of the listed qubits; collapses
        the state and returns the outcome bitstring (listed-qubit order)."""
        probs = np.abs(self.psi) ** 2
        t = probs.reshape([2] * self.n)
        order = list(qubits) + [i for i in range(self.n) if i not in qubits]
        t = np.transpose(t, order)
        marg = t.reshape(2 ** len(qubits), -1).sum(axis=1)
        marg = np.where(marg < 1e-12, 0.0, marg)
        marg = marg / marg.sum()
        outcome = int(self.rng.choice(len(marg), p=marg))
        bits = format(outcome, f"0{len(qubits)}b")
        keep = np.ones(2**self.n, dtype=bool)
        for bit, q in zip(bits, qubits):
            mask = self.c.bit_mask(q)
            keep &= mask if bit == "1" else ~mask
        self.psi = np.where(keep, self.psi, 0.0)
        self.psi = self.psi / np.linalg.norm(self.psi)
        self.log.append((tuple(qubits), bits))
        return bits

    def check_qubit(self, qubit: int, total: int, psi: np.ndarray):
        """Single-qubit expect-0 check on a (possibly lifted) vector."""
        mask = self.c.bit_mask(qubit, total)
        p1 = float(np.sum(np.abs(psi[mask]) ** 2))
        p0 = max(1.0 - p1, 0.0)
        if p0 < 1e-12:
            return None
        if p1 >= 1e-12 and self.rng.random() >= p0:
            return None
        out = np.where(mask, 0.0, psi)
        return out / np.linalg.norm(out)

    def reset_qubit(self, qubit: int):
        mask = self.c.bit_mask(qubit)
        p1 = float(np.sum(np.abs(self.psi[mask]) ** 2))
        outcome_one = p1 >= 1e-12 and (p1 > 1.0 - 1e-12 or self.rng.random() < p1)
        if outcome_one:
            post = np.where(mask, self.psi, 0.0)
            post = post / np.linalg.norm(post)
            # flip the measured qubit back to |0>
            flipped = np.zeros_like(post)
            idx = np.arange(len(post))
            flipped[idx ^ (1 << (self.n - 1 - qubit))] = post
            self.psi = flipped
        else:
            post = np.where(mask, 0.0, self.psi)
            self.psi = post / np.linalg.norm(post)

    def run_assert(self, stmt: Assert):
        self.reached[stmt.site] = self.reached.get(stmt.site, 0) + 1
        if self.mode == "lowered":
            self.run_assert_lowered(stmt)
            return
        pmat = self.c.assert_mats[stmt.site]
        proj = pmat @ self.psi
        p_pass = float(np.real(np.vdot(self.psi, proj)))
        p_pass = min(max(p_pass, 0.0), 1.0)
        if p_pass < 1e-12:
            raise _Abort(stmt.site)
        if p_pass <= 1.0 - 1e-12 and self.rng.random() >= p_pass:
            raise _Abort(stmt.site)
        self.psi = proj / np.linalg.norm(proj)

    def run_assert_lowered(self, stmt: Assert):
        lowered = self.c.lowered_assertion(stmt)
        if lowered.abort_always:
            raise _Abort(stmt.site)
        total = self.n + lowered.aux_qubits
        psi = self.psi
        if lowered.aux_qubits:
            lifted = np.zeros(2**total, dtype=complex)
            lifted[: 2**self.n] = psi
            psi = lifted
        for step in lowered.steps:
            if step.kind == "unitary":
                psi = step.matrix @ psi
            else:
                psi = self.check_qubit(step.qubit, total, psi)
                if psi is None:
                    raise _Abort(stmt.site)
        if lowered.aux_qubits:
            psi = psi[: 2**self.n]
            psi = psi / np.linalg.norm(psi)
        self.psi = psi

    def exec(self, stmt):
        if isinstance(stmt, Seq):
            for s in stmt.stmts:
                self.exec(s)
        elif isinstance(stmt, Skip):
            pass
        elif isinstance(stmt, Init):
            for q in stmt.qubits:
                self.reset_qubit(q)
        elif isinstance(stmt, Unitary):
            self.psi = self.c.unitaries[id(stmt)] @ self.psi
        elif isinstance(stmt, Assert):
            self.run_assert(stmt)
        elif isinstance(stmt, IfMeasure):
            bits = self.measure_joint(stmt.qubits)
            if bits in stmt.outcomes:
                self.exec(stmt.then_body)
            else:
                self.exec(stmt.else_body)
        elif isinstance(stmt, WhileMeasure):
            cap = self.loop_cap if self.loop_cap is not None else stmt.max_iters
            iters = 0
            while True:
                bits = self.measure_joint(stmt.qubits)
                if bits not in stmt.outcomes:
                    break
                if iters >= cap:
                    raise _LoopCap()
                self.exec(stmt.body)
                iters += 1
        else:
            raise TypeError(f"unknown statement {stmt!r}")


def run_trajectory(
    program: Program, seed, mode: str = "direct", loop_cap: int | None = None
) -> TrajectoryResult:
    """Simulate one execution from |0...0>.

    ``seed`` may be an int or a seed sequence list; shot i of a campaign
    with master seed s uses [s, i], which makes results independent of
    scheduling order.
    """
    compiled = _get_compiled(program)
    rng = np.random.default_rng(seed)
    shot = _Shot(compiled, rng, mode, loop_cap)
    status = COMPLETED
    site = None
    try:
        shot.exec(program.body)
    except _Abort as a:
        status = ABORTED
        site = a.site
    except _LoopCap:
        status = LOOP_CAP
    final = StateVector(shot.psi / np.linalg.norm(shot.psi), compiled.n)
    return TrajectoryResult(status, site, final, shot.log, shot.reached, seed)
