"""Builtin gate library.

Matrices follow the qubit-0-MSB convention: for a two-qubit gate the
first listed qubit indexes the high bit.  QFT and IQFT are generated on
demand for any register width, with the first listed qubit as the most
significant bit and no bit-reversal step.
"""

from __future__ import annotations

import numpy as np

_S2 = 1.0 / np.sqrt(2.0)

H = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
TOFFOLI = np.eye(8, dtype=complex)
TOFFOLI[[6, 7], :] = TOFFOLI[[7, 6], :]
FREDKIN = np.eye(8, dtype=complex)
FREDKIN[[5, 6], :] = FREDKIN[[6, 5], :]

BUILTIN = {
    "H": H,
    "X": X,
    "CNOT": CNOT,
    "SWAP": SWAP,
    "TOFFOLI": TOFFOLI,
    "FREDKIN": FREDKIN,
}

VARIADIC = {"QFT", "IQFT"}


def qft_matrix(qubit_count: int, inverse: bool = False) -> np.ndarray:
    """|k> -> (1/sqrt(T)) sum_tau exp(+-2 pi i tau k / T) |tau>."""
    t = 2**qubit_count
    tau = np.arange(t)
    sign = -1.0 if inverse else 1.0
    return np.exp(sign * 2j * np.pi * np.outer(tau, tau) / t) / np.sqrt(t)


def gate_matrix(name: str, arity: int, gate_defs: dict) -> np.ndarray:
    """Resolve a gate reference to a concrete matrix of the right size."""
    if name == "QFT":
        return qft_matrix(arity)
    if name == "IQFT":
        return qft_matrix(arity, inverse=True)
    if name in gate_defs:
        return gate_defs[name]
    if name in BUILTIN:
        return BUILTIN[name]
    raise KeyError(name)
