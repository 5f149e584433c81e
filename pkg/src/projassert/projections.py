"""The projection lattice.

A Projection is a closed subspace of a 2^n-dimensional space, stored as a
d x r orthonormal column frame.  Lattice operations (meet, join,
complement), satisfaction tests, qubit embedding, and local projections
all live here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateIndex,
    EmptyKeepSet,
    IndexOutOfRange,
    NotPSD,
)
from .numerics import (
    hermitian_eig,
    orthonormal_columns,
    orthonormal_complement,
    partial_trace,
)
from .states import DensityOperator, StateVector, _as_matrix


@dataclass(frozen=True)
class Projection:
    frame: np.ndarray
    ambient_qubits: int

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=complex)
        if f.ndim == 1:
            f = f[:, None]
        d = 2**self.ambient_qubits
        if f.shape[0] != d:
            raise DimensionMismatch(
                f"frame has {f.shape[0]} rows for {self.ambient_qubits} qubits"
            )
        r = f.shape[1]
        if r:
            dev = np.max(np.abs(f.conj().T @ f - np.eye(r)))
            if dev > 1e-9:
                raise DimensionMismatch(f"frame columns not orthonormal ({dev:.3e})")
        object.__setattr__(self, "frame", f)

    @property
    def rank(self) -> int:
        return self.frame.shape[1]

    @property
    def dim(self) -> int:
        return 2**self.ambient_qubits

    def as_matrix(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T


def zero_projection(qubit_count: int) -> Projection:
    return Projection(np.zeros((2**qubit_count, 0), dtype=complex), qubit_count)


def identity_projection(qubit_count: int) -> Projection:
    return Projection(np.eye(2**qubit_count, dtype=complex), qubit_count)


def from_kets(kets, qubit_count: int) -> Projection:
    """Projection onto the span of the given (not necessarily orthonormal)
    vectors."""
    d = 2**qubit_count
    if not kets:
        return zero_projection(qubit_count)
    cols = []
    for k in kets:
        v = np.asarray(k, dtype=complex).reshape(-1)
        if v.shape != (d,):
            raise DimensionMismatch(f"ket length {v.shape[0]}, expected {d}")
        cols.append(v)
    return Projection(orthonormal_columns(np.column_stack(cols)), qubit_count)


def meet(p: Projection, q: Projection) -> Projection:
    """Subspace intersection, via the eigenvalue-2 eigenspace of P+Q."""
    if p.ambient_qubits != q.ambient_qubits:
        raise DimensionMismatch("ambient dimensions differ")
    vals, vecs = hermitian_eig(p.as_matrix() + q.as_matrix())
    sel = np.abs(vals - 2.0) < 1e-6
    return Projection(vecs[:, sel], p.ambient_qubits)


def join(p: Projection, q: Projection) -> Projection:
    """Closed span of the union of the two subspaces."""
    if p.ambient_qubits != q.ambient_qubits:
        raise DimensionMismatch("ambient dimensions differ")
    if p.rank == 0:
        return q
    if q.rank == 0:
        return p
    return Projection(
        orthonormal_columns(np.hstack([p.frame, q.frame])), p.ambient_qubits
    )


def complement(p: Projection) -> Projection:
    return Projection(orthonormal_complement(p.frame), p.ambient_qubits)


def tensor(p: Projection, q: Projection) -> Projection:
    """Tensor product of subspaces (frame Kronecker product)."""
    if p.rank == 0 or q.rank == 0:
        return zero_projection(p.ambient_qubits + q.ambient_qubits)
    return Projection(np.kron(p.frame, q.frame), p.ambient_qubits + q.ambient_qubits)


def embed_permutation(target_qubits, total_qubits: int) -> np.ndarray:
    """Basis-index map for placing an operator on target_qubits.

    Returns perm with perm[j] = global basis index whose target-qubit bits
    spell j's high bits and whose remaining-qubit bits spell j's low bits.
    """
    targets = list(target_qubits)
    if len(set(targets)) != len(targets):
        raise DuplicateIndex(f"duplicate qubit in {targets}")
    if any(t < 0 or t >= total_qubits for t in targets):
        raise IndexOutOfRange(f"{targets} outside 0..{total_qubits - 1}")
    rest = [i for i in range(total_qubits) if i not in targets]
    order = targets + rest
    d = 2**total_qubits
    perm = np.zeros(d, dtype=np.int64)
    for j in range(d):
        g = 0
        for pos, qubit in enumerate(order):
            bit = (j >> (total_qubits - 1 - pos)) & 1
            g |= bit << (total_qubits - 1 - qubit)
        perm[j] = g
    return perm


def embed(p: Projection, target_qubits, total_qubits: int) -> Projection:
    """Place p on the listed qubits, identity on the rest."""
    targets = list(target_qubits)
    if p.ambient_qubits != len(targets):
        raise DimensionMismatch(
            f"projection on {p.ambient_qubits} qubits, {len(targets)} targets"
        )
    rest = total_qubits - len(targets)
    frame = np.kron(p.frame, np.eye(2**rest, dtype=complex))
    perm = embed_permutation(targets, total_qubits)
    big = np.zeros((2**total_qubits, frame.shape[1]), dtype=complex)
    big[perm, :] = frame
    return Projection(big, total_qubits)


def satisfies(rho, p: Projection) -> bool:
    return violation(rho, p) <= 1e-9


def violation(rho, p: Projection) -> float:
    """1 - tr(P rho): the per-shot abort probability of assert(P)."""
    m = _as_matrix(rho)
    if m.shape[0] != p.dim:
        raise DimensionMismatch(f"{m.shape[0]} vs {p.dim}")
    v = 1.0 - np.trace(p.as_matrix() @ m).real
    return float(min(max(v, 0.0), 1.0))


def support(rho) -> Projection:
    """Projection onto the nonzero-eigenvalue eigenspace of a PSD operator."""
    m = _as_matrix(rho)
    n = int(round(np.log2(m.shape[0])))
    vals, vecs = hermitian_eig(m)
    if len(vals) and vals.min() < -1e-9 * max(vals.max(), 1.0):
        raise NotPSD(f"eigenvalue {vals.min():.3e}")
    if len(vals) == 0 or vals.max() <= 0.0:
        return zero_projection(n)
    sel = vals > 1e-9 * vals.max()
    return Projection(orthonormal_columns(vecs[:, sel]), n)


def local_projection(p: Projection, keep) -> Projection:
    """Support of the partial trace of P over the discarded qubits.

    A sound weakening: any state satisfying p also satisfies the result
    embedded back on the kept qubits.
    """
    keep = sorted(set(keep))
    if not keep:
        raise EmptyKeepSet("keep set is empty")
    reduced = partial_trace(p.as_matrix(), p.ambient_qubits, keep)
    return support(reduced)


def subspace_equal(p: Projection, q: Projection, tol: float = 1e-8) -> bool:
    if p.ambient_qubits != q.ambient_qubits or p.rank != q.rank:
        return False
    pm = p.as_matrix()
    qm = q.as_matrix()
    return float(np.linalg.norm(pm @ qm - pm)) <= tol


def random_projection(qubit_count: int, rank: int, rng) -> Projection:
    """Haar-ish random subspace of the given rank, for tests and sweeps."""
    d = 2**qubit_count
    if rank == 0:
        return zero_projection(qubit_count)
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    qmat, _ = np.linalg.qr(g)
    return Projection(qmat[:, :rank], qubit_count)


def random_state_in(p: Projection, rng) -> StateVector:
    """Random pure state inside the subspace of p (rank must be > 0)."""
    coef = rng.normal(size=p.rank) + 1j * rng.normal(size=p.rank)
    v = p.frame @ coef
    return StateVector(v / np.linalg.norm(v), p.ambient_qubits)
