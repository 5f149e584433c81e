"""The assertion compiler.

An arbitrary projection predicate is rewritten into a form that needs
only single-qubit computational-basis measurements: a basis-change
unitary, expect-zero checks on leading qubits, and the inverse unitary.
Ranks that are not powers of two are split into two commuting
power-of-two projections checked back to back; ranks above half the
space dimension borrow one auxiliary qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DecompositionMismatch,
    NotNeeded,
    RankNotPowerOfTwo,
    RankOutOfRange,
)
from .lang.gates import gate_matrix
from .lang.syntax import Assert, ImplOp
from .numerics import orthonormal_complement
from .projections import Projection, embed, meet, subspace_equal, tensor, zero_projection


@dataclass(frozen=True)
class IcbForm:
    unitary: np.ndarray
    measured_qubits: tuple
    # every check expects outcome 0; the satisfied subspace maps onto
    # |0...0> of the measured qubits tensor anything on the rest


@dataclass(frozen=True)
class Step:
    kind: str  # "unitary" or "check"
    matrix: np.ndarray | None = None
    qubit: int | None = None
    label: str = ""


@dataclass(frozen=True)
class LoweredAssertion:
    site: str
    ambient_qubits: int  # program width, aux not included
    aux_qubits: int
    steps: tuple
    abort_always: bool = False


@dataclass(frozen=True)
class ResourceCount:
    h_gates: int = 0
    cnot_gates: int = 0
    other_2q: int = 0
    other_3q: int = 0
    generic_unitaries: int = 0
    measurements: int = 0
    aux_qubits: int = 0


def _is_power_of_two(r: int) -> bool:
    return r > 0 and (r & (r - 1)) == 0


def icb(p: Projection) -> IcbForm:
    """Implementation in the computational basis for rank 2^m.

    The returned unitary maps p's subspace onto the pattern
    |0...0> (first n-m qubits) tensor anything (last m qubits).
    """
    r = p.rank
    n = p.ambient_qubits
    if not _is_power_of_two(r):
        raise RankNotPowerOfTwo(f"rank {r}")
    m = r.bit_length() - 1
    d = p.dim
    basis = np.hstack([p.frame, orthonormal_complement(p.frame)])
    # pattern frame is the first r standard basis vectors, so the target
    # full basis is the identity; U = I . basis^H
    u = basis.conj().T
    return IcbForm(u, tuple(range(n - m)))


def split(p: Projection) -> tuple:
    """Two commuting rank-2^(n-1) projections whose meet is p.

    Requires 0 < rank <= 2^(n-1) and rank not a power of two.
    """
    r = p.rank
    n = p.ambient_qubits
    half = p.dim // 2
    if r == 0 or r > half:
        raise RankOutOfRange(f"rank {r} not in (0, {half}]")
    if _is_power_of_two(r):
        raise RankOutOfRange(f"rank {r} is a power of two; use icb directly")
    u = np.hstack([p.frame, orthonormal_complement(p.frame)])
    p1 = Projection(u[:, :half], n)
    cols2 = list(range(r)) + list(range(half, 2 * half - r))
    p2 = Projection(u[:, cols2], n)
    return p1, p2


def aux_lift(p: Projection) -> Projection:
    """|0><0| on a fresh leading qubit tensor p; for rank > 2^(n-1)."""
    if p.rank <= p.dim // 2:
        raise NotNeeded(f"rank {p.rank} <= {p.dim // 2}")
    e0 = Projection(np.array([[1.0], [0.0]], dtype=complex), 1)
    return tensor(e0, p)


def _icb_steps(form: IcbForm, prev_u: np.ndarray | None):
    """Steps entering this ICB frame from the previous one (or identity)."""
    if prev_u is None:
        entry = form.unitary
    else:
        entry = form.unitary @ prev_u.conj().T
    steps = [Step("unitary", matrix=entry)]
    for q in form.measured_qubits:
        steps.append(Step("check", qubit=q))
    return steps


def lower_assertion(site: Assert, ambient_qubits: int) -> LoweredAssertion:
    """Compile one assert statement for a program of the given width."""
    p = embed(site.projection, site.qubits, ambient_qubits)
    return lower_projection(p, site.site)


def lower_projection(p: Projection, site_name: str = "") -> LoweredAssertion:
    n = p.ambient_qubits
    r = p.rank
    if r == 0:
        return LoweredAssertion(site_name, n, 0, (), abort_always=True)
    aux = 0
    if r > p.dim // 2 and not _is_power_of_two(r):
        p = aux_lift(p)
        aux = 1
    if _is_power_of_two(p.rank):
        form = icb(p)
        steps = _icb_steps(form, None) + [
            Step("unitary", matrix=form.unitary.conj().T)
        ]
        return LoweredAssertion(site_name, n, aux, tuple(steps))
    p1, p2 = split(p)
    f1 = icb(p1)
    f2 = icb(p2)
    steps = (
        _icb_steps(f1, None)
        + _icb_steps(f2, f1.unitary)
        + [Step("unitary", matrix=f2.unitary.conj().T)]
    )
    return LoweredAssertion(site_name, n, aux, tuple(steps))


def pass_operator(lowered: LoweredAssertion) -> np.ndarray:
    """Composed operator of the all-checks-pass branch, on the lifted
    space if an auxiliary qubit is used."""
    total = lowered.ambient_qubits + lowered.aux_qubits
    d = 2**total
    op = np.eye(d, dtype=complex)
    for step in lowered.steps:
        if step.kind == "unitary":
            op = step.matrix @ op
        else:
            idx = np.arange(d)
            mask = (idx >> (total - 1 - step.qubit)) & 1 == 0
            op = np.where(mask[:, None], op, 0.0)
    return op


def exact_lowered(lowered: LoweredAssertion, rho: np.ndarray):
    """Exact effect of executing the lowered steps on a density operator.

    Returns (pass-branch rho on the original space, abort mass).  The
    auxiliary qubit, when present, starts in |0> and is discarded after.
    """
    n = lowered.ambient_qubits
    d = 2**n
    mass_in = float(np.trace(rho).real)
    if lowered.abort_always:
        return np.zeros_like(rho), mass_in
    total = n + lowered.aux_qubits
    big = 2**total
    if lowered.aux_qubits:
        lifted = np.zeros((big, big), dtype=complex)
        lifted[:d, :d] = rho
        rho = lifted
    for step in lowered.steps:
        if step.kind == "unitary":
            rho = step.matrix @ rho @ step.matrix.conj().T
        else:
            idx = np.arange(big)
            mask = (idx >> (total - 1 - step.qubit)) & 1 == 0
            rho = np.where(mask[:, None] & mask[None, :], rho, 0.0)
    if lowered.aux_qubits:
        rho = rho[:d, :d]
    return rho, mass_in - float(np.trace(rho).real)


_GATE_FIELD = {
    "H": "h_gates",
    "CNOT": "cnot_gates",
    "SWAP": "other_2q",
    "TOFFOLI": "other_3q",
    "FREDKIN": "other_3q",
}


def _classify(name: str, arity: int) -> str:
    if name in _GATE_FIELD:
        return _GATE_FIELD[name]
    if arity == 2:
        return "other_2q"
    if arity == 3:
        return "other_3q"
    return "generic_unitaries"


def count_circuit(ops, aux_qubits: int = 0) -> ResourceCount:
    """Resource count of an explicit gate/check sequence (an impl block)."""
    tally = {f: 0 for f in ResourceCount.__dataclass_fields__}
    tally["aux_qubits"] = aux_qubits
    for op in ops:
        if op.kind == "check":
            tally["measurements"] += 1
        else:
            tally[_classify(op.name, len(op.qubits))] += 1
    return ResourceCount(**tally)


def count_resources(
    lowered: LoweredAssertion, gate_decomposition=None, gate_defs=None
) -> ResourceCount:
    """Count measurements, aux qubits, and gates of a lowered assertion.

    Without a decomposition, each unitary step counts as one generic
    unitary.  With one (a list of ImplOp gate groups, one group per
    unitary step, on the lifted space), the composed group must match the
    step's matrix; gates are then counted individually.
    """
    checks = sum(1 for s in lowered.steps if s.kind == "check")
    if gate_decomposition is None:
        generic = sum(1 for s in lowered.steps if s.kind == "unitary")
        return ResourceCount(
            generic_unitaries=generic,
            measurements=checks,
            aux_qubits=lowered.aux_qubits,
        )
    from .lang.interp import embed_operator

    gate_defs = gate_defs or {}
    total = lowered.ambient_qubits + lowered.aux_qubits
    d = 2**total
    unitary_steps = [s for s in lowered.steps if s.kind == "unitary"]
    if len(gate_decomposition) != len(unitary_steps):
        raise DecompositionMismatch(
            f"{len(gate_decomposition)} gate groups for {len(unitary_steps)} steps"
        )
    tally = {f: 0 for f in ResourceCount.__dataclass_fields__}
    tally["measurements"] = checks
    tally["aux_qubits"] = lowered.aux_qubits
    for group, step in zip(gate_decomposition, unitary_steps):
        composed = np.eye(d, dtype=complex)
        for op in group:
            g = gate_matrix(op.name, len(op.qubits), gate_defs)
            composed = embed_operator(g, op.qubits, total) @ composed
            tally[_classify(op.name, len(op.qubits))] += 1
        if np.max(np.abs(composed - step.matrix)) > 1e-8:
            raise DecompositionMismatch("gate group does not compose to the step unitary")
    return ResourceCount(**tally)
