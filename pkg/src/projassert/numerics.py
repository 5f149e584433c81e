"""Dense complex linear algebra for operators on up to ~8 qubits.

All operators are plain complex128 numpy arrays.  Qubit 0 is the most
significant bit of a basis-state index, so the ket string "011" on qubits
(a, b, c) means a=0, b=1, c=1.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateIndex,
    IndexOutOfRange,
    NotHermitian,
    NotOrthonormal,
    NotPSD,
)

HERMITIAN_TOL = 1e-9
RANK_TOL = 1e-9


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two operators (or column stacks)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def _check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise NotHermitian(f"max |a - a^H| entry = {dev:.3e} exceeds {tol:.1e}")
    return a


def hermitian_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Degenerate eigenspaces are re-orthonormalized against the standard
    basis in index order, and each eigenvector's first significant
    component is made real positive, so the output is deterministic.
    """
    a = _check_hermitian(a)
    vals, vecs = np.linalg.eigh(a)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    gap = 1e-8 * scale

    # canonicalize each (near-)degenerate block
    i = 0
    n = len(vals)
    while i < n:
        j = i + 1
        while j < n and vals[i] - vals[j] <= gap:
            j += 1
        if j - i >= 1:
            block = vecs[:, i:j]
            vecs[:, i:j] = _canonical_basis(block)
        i = j
    return vals, vecs


def _canonical_basis(block: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(block).

    Projects standard basis vectors onto the span in index order and
    Gram-Schmidts the survivors; phases fixed real-positive.
    """
    d, r = block.shape
    if r == 0:
        return block
    proj = block @ block.conj().T
    cols = []
    for idx in range(d):
        v = proj[:, idx].copy()
        for c in cols:
            v -= c * (c.conj() @ v)
        nrm = np.linalg.norm(v)
        if nrm > 1e-6:
            v /= nrm
            # second pass for numerical orthogonality
            for c in cols:
                v -= c * (c.conj() @ v)
            v /= np.linalg.norm(v)
            cols.append(v)
            if len(cols) == r:
                break
    out = np.column_stack(cols)
    return _fix_phases(out)


def _fix_phases(b: np.ndarray) -> np.ndarray:
    b = b.copy()
    for k in range(b.shape[1]):
        col = b[:, k]
        nz = np.nonzero(np.abs(col) > 1e-9)[0]
        if len(nz):
            ph = col[nz[0]] / abs(col[nz[0]])
            b[:, k] = col / ph
    return b


def orthonormal_columns(m: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column span of ``m``.

    Modified Gram-Schmidt in column index order with reorthogonalization;
    residuals with norm <= tol (relative to the largest column norm) are
    dropped.  A zero matrix yields a d x 0 result.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    d = m.shape[0]
    if m.shape[1] == 0:
        return np.zeros((d, 0), dtype=complex)
    scale = float(np.max(np.linalg.norm(m, axis=0)))
    if scale == 0.0:
        return np.zeros((d, 0), dtype=complex)
    thresh = tol * scale
    cols: list[np.ndarray] = []
    for j in range(m.shape[1]):
        v = m[:, j].copy()
        for c in cols:
            v -= c * (c.conj() @ v)
        if np.linalg.norm(v) <= thresh:
            continue
        for c in cols:
            v -= c * (c.conj() @ v)
        nrm = np.linalg.norm(v)
        if nrm <= thresh:
            continue
        cols.append(v / nrm)
    if not cols:
        return np.zeros((d, 0), dtype=complex)
    return np.column_stack(cols)


def orthonormal_complement(b: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of col(b)."""
    b = np.asarray(b, dtype=complex)
    if b.ndim == 1:
        b = b[:, None]
    d, r = b.shape
    if r:
        dev = np.max(np.abs(b.conj().T @ b - np.eye(r)))
        if dev > 1e-9:
            raise NotOrthonormal(f"b^H b deviates from identity by {dev:.3e}")
    cols: list[np.ndarray] = []
    for idx in range(d):
        v = np.zeros(d, dtype=complex)
        v[idx] = 1.0
        if r:
            v -= b @ (b.conj().T @ v)
        for c in cols:
            v -= c * (c.conj() @ v)
        if np.linalg.norm(v) <= 1e-9:
            continue
        if r:
            v -= b @ (b.conj().T @ v)
        for c in cols:
            v -= c * (c.conj() @ v)
        nrm = np.linalg.norm(v)
        if nrm <= 1e-9:
            continue
        cols.append(v / nrm)
        if len(cols) == d - r:
            break
    if not cols:
        return np.zeros((d, 0), dtype=complex)
    return np.column_stack(cols)


def partial_trace(a: np.ndarray, qubit_count: int, keep) -> np.ndarray:
    """Partial trace keeping the qubits in ``keep`` (increasing index order)."""
    a = np.asarray(a, dtype=complex)
    d = 2**qubit_count
    if a.shape != (d, d):
        raise DimensionMismatch(
            f"expected {d}x{d} matrix for {qubit_count} qubits, got {a.shape}"
        )
    keep = sorted(set(int(q) for q in keep))
    if any(q < 0 or q >= qubit_count for q in keep):
        raise DimensionMismatch(f"keep set {keep} outside 0..{qubit_count - 1}")
    drop = [q for q in range(qubit_count) if q not in keep]
    t = a.reshape([2] * (2 * qubit_count))
    # contract row/col axes of each dropped qubit, largest axis first so
    # earlier positions stay valid
    for q in sorted(drop, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    dk = 2 ** len(keep)
    return t.reshape(dk, dk)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Unique PSD square root of a Hermitian PSD matrix."""
    vals, vecs = hermitian_eig(a)
    if np.any(vals < -1e-9):
        raise NotPSD(f"eigenvalue {vals.min():.3e} below -1e-9")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T
