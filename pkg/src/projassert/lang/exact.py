"""Exact density-operator semantics.

Measurements become mixtures instead of samples, assertion failures
route mass into per-site abort accumulators, and while loops are
unrolled up to a cap with the still-looping remainder reported as
residual mass.  Serves as the oracle for every sampled quantity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..states import DensityOperator
from .interp import CompiledProgram, _get_compiled, embed_operator
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
from .gates import X

MASS_FLOOR = 1e-16


@dataclass
class ExactResult:
    rho_out: np.ndarray  # completion branch, scaled by its mass
    abort_mass: dict  # site -> mass routed to abort
    visit_mass: dict  # site -> total mass arriving at the site
    residual_loop_mass: float
    site_states: dict  # site -> unnormalized pre-measurement operator

    def completion_mass(self) -> float:
        return float(np.trace(self.rho_out).real)

    def normalized_output(self, qubit_count: int) -> DensityOperator:
        m = self.completion_mass()
        return DensityOperator(self.rho_out / m, qubit_count)


class _Exact:
    def __init__(self, compiled: CompiledProgram, loop_cap):
        self.c = compiled
        self.n = compiled.n
        self.loop_cap = loop_cap
        self.abort_mass = {}
        self.visit_mass = {}
        self.site_states = {}
        self.residual = 0.0

    def project_bits(self, rho, qubits, bits):
        keep = np.ones(2**self.n, dtype=bool)
        for bit, q in zip(bits, qubits):
            mask = self.c.bit_mask(q)
            keep &= mask if bit == "1" else ~mask
        out = np.where(keep[:, None] & keep[None, :], rho, 0.0)
        return out

    def measure_split(self, rho, qubits, outcomes):
        """Mass inside vs outside the outcome set, decohered per outcome."""
        rho_in = np.zeros_like(rho)
        rho_out = np.zeros_like(rho)
        for o in range(2 ** len(qubits)):
            bits = format(o, f"0{len(qubits)}b")
            piece = self.project_bits(rho, qubits, bits)
            if bits in outcomes:
                rho_in += piece
            else:
                rho_out += piece
        return rho_in, rho_out

    def exec(self, stmt, rho):
        if float(np.trace(rho).real) < MASS_FLOOR:
            return np.zeros_like(rho)
        if isinstance(stmt, Seq):
            for s in stmt.stmts:
                rho = self.exec(s, rho)
            return rho
        if isinstance(stmt, Skip):
            return rho
        if isinstance(stmt, Init):
            for q in stmt.qubits:
                rho = self.reset(rho, q)
            return rho
        if isinstance(stmt, Unitary):
            u = self.c.unitaries[id(stmt)]
            return u @ rho @ u.conj().T
        if isinstance(stmt, Assert):
            site = stmt.site
            mass = float(np.trace(rho).real)
            self.visit_mass[site] = self.visit_mass.get(site, 0.0) + mass
            self.site_states[site] = self.site_states.get(site, 0.0) + rho
            p = self.c.assert_mats[site]
            passed = p @ rho @ p
            self.abort_mass[site] = self.abort_mass.get(site, 0.0) + mass - float(
                np.trace(passed).real
            )
            return passed
        if isinstance(stmt, IfMeasure):
            rho_in, rho_out = self.measure_split(rho, stmt.qubits, stmt.outcomes)
            return self.exec(stmt.then_body, rho_in) + self.exec(
                stmt.else_body, rho_out
            )
        if isinstance(stmt, WhileMeasure):
            cap = self.loop_cap if self.loop_cap is not None else stmt.max_iters
            done = np.zeros_like(rho)
            for _ in range(cap):
                rho_in, rho_out = self.measure_split(rho, stmt.qubits, stmt.outcomes)
                done += rho_out
                if float(np.trace(rho_in).real) < MASS_FLOOR:
                    rho_in *= 0.0
                    break
                rho = self.exec(stmt.body, rho_in)
            else:
                rho_in, rho_out = self.measure_split(rho, stmt.qubits, stmt.outcomes)
                done += rho_out
            self.residual += float(np.trace(rho_in).real)
            return done
        raise TypeError(f"unknown statement {stmt!r}")

    def reset(self, rho, qubit):
        mask = self.c.bit_mask(qubit)
        zero = np.where((~mask)[:, None] & (~mask)[None, :], rho, 0.0)
        one = np.where(mask[:, None] & mask[None, :], rho, 0.0)
        x = embed_operator(X, (qubit,), self.n)
        return zero + x @ one @ x


def semantic_function(
    program: Program, rho_in=None, loop_cap: int | None = None
) -> ExactResult:
    """Exact branch-summed semantics from rho_in (default |0...0><0...0|).

    Total mass (completion + aborts + loop residual) is conserved.
    """
    compiled = _get_compiled(program)
    d = 2**compiled.n
    if rho_in is None:
        rho = np.zeros((d, d), dtype=complex)
        rho[0, 0] = 1.0
    elif isinstance(rho_in, DensityOperator):
        rho = rho_in.matrix.astype(complex)
    else:
        rho = np.asarray(rho_in, dtype=complex)
    ex = _Exact(compiled, loop_cap)
    out = ex.exec(program.body, rho)
    return ExactResult(out, ex.abort_mass, ex.visit_mass, ex.residual, ex.site_states)
