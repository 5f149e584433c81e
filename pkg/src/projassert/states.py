"""Quantum state representations and the two standard state metrics.

Pure states are unit vectors (StateVector), mixed states are density
operators.  Both use the qubit-0-MSB index convention of the numerics
module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, IncompleteMeasurement, NotPSD
from .numerics import hermitian_eig, psd_sqrt


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    qubit_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.qubit_count,):
            raise DimensionMismatch(
                f"{len(amps)} amplitudes for {self.qubit_count} qubits"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > 1e-9:
            raise DimensionMismatch(f"state norm {nrm} is not 1")
        object.__setattr__(self, "amplitudes", amps)

    @staticmethod
    def computational(index: int, qubit_count: int) -> "StateVector":
        amps = np.zeros(2**qubit_count, dtype=complex)
        amps[index] = 1.0
        return StateVector(amps, qubit_count)

    def density(self) -> "DensityOperator":
        a = self.amplitudes
        return DensityOperator(np.outer(a, a.conj()), self.qubit_count)


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray
    qubit_count: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = 2**self.qubit_count
        if m.shape != (d, d):
            raise DimensionMismatch(f"{m.shape} matrix for {self.qubit_count} qubits")
        if np.max(np.abs(m - m.conj().T)) > 1e-9:
            raise DimensionMismatch("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-9:
            raise DimensionMismatch(f"trace {np.trace(m).real} is not 1")
        vals = np.linalg.eigvalsh(m)
        if vals.min() < -1e-9:
            raise NotPSD(f"negative eigenvalue {vals.min():.3e}")
        object.__setattr__(self, "matrix", m)


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, DensityOperator):
        return x.matrix
    if isinstance(x, StateVector):
        return x.density().matrix
    return np.asarray(x, dtype=complex)


def trace_distance(rho, sigma) -> float:
    """D(rho, sigma) = half the trace norm of rho - sigma."""
    a = _as_matrix(rho)
    b = _as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    vals = np.linalg.eigvalsh(a - b)
    return float(0.5 * np.sum(np.abs(vals)))


def fidelity(rho, sigma) -> float:
    """F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    a = _as_matrix(rho)
    b = _as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    ra = psd_sqrt(a)
    inner = ra @ b @ ra
    vals, _ = hermitian_eig(inner)
    vals = np.clip(vals, 0.0, None)
    return float(np.sum(np.sqrt(vals)))


def measure_projective(state: StateVector, projectors, rng):
    """Sample one outcome of a projective measurement.

    ``projectors`` is a list of Projection values that must resolve the
    identity.  Returns (outcome index, post-measurement state, outcome
    probability).  Branches with probability below 1e-12 are never taken.
    """
    d = 2**state.qubit_count
    mats = [p.as_matrix() if hasattr(p, "as_matrix") else np.asarray(p) for p in projectors]
    total = sum(mats)
    if np.max(np.abs(total - np.eye(d))) > 1e-8:
        raise IncompleteMeasurement("projectors do not sum to the identity")
    for i, a in enumerate(mats):
        for bmat in mats[i + 1 :]:
            if np.max(np.abs(a @ bmat)) > 1e-8:
                raise IncompleteMeasurement("projectors are not pairwise orthogonal")
    psi = state.amplitudes
    probs = np.array([max((psi.conj() @ (m @ psi)).real, 0.0) for m in mats])
    probs[probs < 1e-12] = 0.0
    probs = probs / probs.sum()
    outcome = int(rng.choice(len(mats), p=probs))
    post = mats[outcome] @ psi
    post = post / np.linalg.norm(post)
    return outcome, StateVector(post, state.qubit_count), float(probs[outcome])
