"""The projection lattice: constructors, operations, embeddings, and the
local-projection weakening."""

import numpy as np
import pytest

from projassert.errors import DimensionMismatch, DuplicateIndex, EmptyKeepSet, IndexOutOfRange
from projassert.numerics import kron_all, partial_trace
from projassert.projections import (
    Projection,
    complement,
    embed,
    embed_permutation,
    from_kets,
    identity_projection,
    join,
    local_projection,
    meet,
    random_projection,
    random_state_in,
    satisfies,
    subspace_equal,
    support,
    tensor,
    violation,
    zero_projection,
)

Z = np.array([1.0, 0.0])
O = np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2.0)


def test_projection_matrix_is_hermitian_idempotent():
    rng = np.random.default_rng(0)
    p = random_projection(3, 5, rng)
    m = p.as_matrix()
    assert np.allclose(m, m.conj().T, atol=1e-10)
    assert np.allclose(m @ m, m, atol=1e-10)
    assert p.rank == 5
    assert p.dim == 8


def test_projection_rejects_bad_frames():
    with pytest.raises(DimensionMismatch):
        Projection(np.eye(3), 2)
    with pytest.raises(DimensionMismatch):
        Projection(np.ones((4, 2)), 2)


def test_from_kets_normalizes_and_deduplicates():
    p = from_kets([Z, 2.0 * Z, Z + O], 1)
    assert p.rank == 2
    assert subspace_equal(p, identity_projection(1))
    assert from_kets([], 3).rank == 0


def test_meet_and_join_hand_case():
    p0 = from_kets([Z], 1)
    pp = from_kets([PLUS], 1)
    assert meet(p0, pp).rank == 0
    assert subspace_equal(join(p0, pp), identity_projection(1))
    assert subspace_equal(meet(p0, p0), p0)
    assert subspace_equal(join(p0, zero_projection(1)), p0)


def test_complement_properties():
    rng = np.random.default_rng(1)
    p = random_projection(2, 1, rng)
    c = complement(p)
    assert c.rank == 3
    assert np.allclose(p.as_matrix() + c.as_matrix(), np.eye(4), atol=1e-10)
    assert meet(p, c).rank == 0


def test_tensor_ranks_multiply():
    p = random_projection(1, 1, np.random.default_rng(2))
    q = random_projection(2, 3, np.random.default_rng(3))
    t = tensor(p, q)
    assert t.ambient_qubits == 3
    assert t.rank == 3
    assert tensor(p, zero_projection(2)).rank == 0


def test_embed_uses_first_listed_qubit_as_most_significant():
    one = from_kets([O], 1)
    # |1><1| on qubit 0 of two selects basis indices 2, 3
    m0 = embed(one, [0], 2).as_matrix()
    assert np.allclose(np.diag(m0), [0, 0, 1, 1], atol=1e-12)
    # on qubit 1 it selects the odd indices
    m1 = embed(one, [1], 2).as_matrix()
    assert np.allclose(np.diag(m1), [0, 1, 0, 1], atol=1e-12)


def test_embed_respects_listed_qubit_order():
    # a projection onto |01> placed on (q1, q0) means q1=0, q0=1
    p01 = from_kets([np.kron(Z, O)], 2)
    m = embed(p01, [1, 0], 2).as_matrix()
    # q0=1, q1=0 is basis index 2
    assert np.allclose(np.diag(m), [0, 0, 1, 0], atol=1e-12)


def test_embed_permutation_validation():
    with pytest.raises(DuplicateIndex):
        embed_permutation([0, 0], 2)
    with pytest.raises(IndexOutOfRange):
        embed_permutation([3], 2)


def test_violation_hand_values():
    p0 = from_kets([Z], 1)
    plus_rho = np.outer(PLUS, PLUS)
    assert violation(plus_rho, p0) == pytest.approx(0.5, abs=1e-12)
    assert satisfies(np.outer(Z, Z), p0)
    assert not satisfies(np.outer(O, O), p0)


def test_support_of_a_mixture():
    rho = 0.5 * np.outer(Z, Z) + 0.5 * np.outer(PLUS, PLUS)
    s = support(rho)
    assert s.rank == 2
    rank1 = support(np.outer(MINUS, MINUS))
    assert subspace_equal(rank1, from_kets([MINUS], 1))


def test_local_projection_four_qubit_example():
    # generators: |+>|111>, |000>|->, |0>(|00>+|11>)/sqrt(2)|1>
    psi1 = kron_all(PLUS[:, None], O[:, None], O[:, None], O[:, None]).ravel()
    psi2 = kron_all(Z[:, None], Z[:, None], Z[:, None], MINUS[:, None]).ravel()
    bell = (kron_all(Z[:, None], Z[:, None]) + kron_all(O[:, None], O[:, None])).ravel()
    psi3 = kron_all(Z[:, None], (bell / np.sqrt(2.0))[:, None], O[:, None]).ravel()
    p = from_kets([psi1, psi2, psi3], 4)
    assert p.rank == 3

    def span2(*kets):
        return from_kets(list(kets), 2)

    k00 = np.kron(Z, Z)
    k01 = np.kron(Z, O)
    k11 = np.kron(O, O)
    # first two qubits: |0><0| (x) I + |11><11|
    assert subspace_equal(local_projection(p, (0, 1)), span2(k00, k01, k11))
    # middle pair: the Bell-diagonal span {|00>, |11>}
    assert subspace_equal(local_projection(p, (1, 2)), span2(k00, k11))
    # last two qubits: |00>, |01>, |11> (psi2 contributes |0->,
    # psi3 contributes |01> after tracing its entangled partner)
    assert subspace_equal(local_projection(p, (2, 3)), span2(k00, k01, k11))


def test_local_projection_soundness_randomized():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(2, 4))
        rank = int(rng.integers(1, 2**n))
        p = random_projection(n, rank, rng)
        keep = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        lp = local_projection(p, keep)
        state = random_state_in(p, rng)
        reduced = partial_trace(state.density().matrix, n, keep)
        assert violation(reduced, lp) <= 1e-9
        # embedded back on the full space it is a weakening of p
        big = embed(lp, keep, n)
        assert violation(state.density().matrix, big) <= 1e-9


def test_local_projection_rejects_empty_keep_set():
    p = random_projection(2, 2, np.random.default_rng(8))
    with pytest.raises(EmptyKeepSet):
        local_projection(p, [])


def test_subspace_equal_distinguishes():
    p = from_kets([Z], 1)
    q = from_kets([PLUS], 1)
    assert not subspace_equal(p, q)
    assert not subspace_equal(p, identity_projection(1))
    assert subspace_equal(p, from_kets([-1.0 * Z], 1))


def test_random_state_in_lies_inside():
    rng = np.random.default_rng(9)
    p = random_projection(3, 3, rng)
    for _ in range(10):
        sv = random_state_in(p, rng)
        assert satisfies(sv.density().matrix, p)
