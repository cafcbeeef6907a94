import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from gfl.fields import default_field
from gfl.linalg import (MatrixFq, compose, is_injective, kernel_basis, kernel_matrix, pack_gf2, rank,
                        rank_generic, rref, tensor, unpack_gf2)

FIELDS = tuple(default_field(q) for q in (2, 3, 4, 5, 9))


def rand(F, m, n, rng, density=1.0):
    A = rng.integers(0, F.q, (m, n)).astype(F.dtype)
    if density < 1:
        A[rng.random((m, n)) > density] = 0
    return MatrixFq(F, A)


def test_rank_trivial():
    for F in FIELDS:
        assert rank(MatrixFq.identity(F, 7)) == 7
        assert rank(MatrixFq.zeros(F, 5, 9)) == 0
        assert rank(MatrixFq.zeros(F, 0, 3)) == 0
        assert kernel_basis(MatrixFq.identity(F, 4)) == []
        assert len(kernel_basis(MatrixFq.zeros(F, 4, 4))) == 4


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_rank_against_naive(F):
    rng = np.random.default_rng(F.q)
    for _ in range(25):
        m, n = rng.integers(1, 14, 2)
        A = rand(F, m, n, rng, density=rng.random())
        want = oracles.naive_rank(F, A.dense().tolist())
        assert rank(A) == want == rank(A.T)
        assert rank_generic(A) == want


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_kernel_vectors(F):
    rng = np.random.default_rng(100 + F.q)
    for _ in range(20):
        m, n = rng.integers(1, 10, 2)
        A = rand(F, m, n, rng, density=0.5)
        K = kernel_matrix(A)
        assert K.ncols == n - rank(A)
        assert compose(A, K).is_zero()
        assert rank(K) == K.ncols


def test_rref_is_reduced():
    F = default_field(3)
    rng = np.random.default_rng(0)
    A = rand(F, 6, 9, rng)
    R, piv = rref(A)
    for i, c in enumerate(piv):
        col = R[:, c]
        assert col[i] == 1 and np.count_nonzero(col) == 1
    assert not R[len(piv):].any()


def test_compose_and_tensor_identities():
    rng = np.random.default_rng(4)
    for F in FIELDS:
        A = rand(F, 4, 5, rng)
        assert compose(A, MatrixFq.identity(F, 5)) == A
        assert compose(MatrixFq.identity(F, 4, sparse=True), A) == A
        assert tensor(MatrixFq.identity(F, 3), MatrixFq.identity(F, 4)) == MatrixFq.identity(F, 12)
        with pytest.raises(ValueError):
            compose(A, A)


def test_compose_matches_naive_product():
    rng = np.random.default_rng(9)
    for F in FIELDS:
        A, B = rand(F, 5, 7, rng), rand(F, 7, 3, rng)
        assert compose(A, B).dense().tolist() == oracles.naive_matmul(F, A.dense().tolist(), B.dense().tolist())


def test_sparse_and_dense_composition_agree():
    rng = np.random.default_rng(12)
    for F in FIELDS:
        S = MatrixFq.from_coo(F, 6, 5, rng.integers(0, 6, 12), rng.integers(0, 5, 12),
                              rng.integers(0, F.p, 12))
        D = rand(F, 5, 4, rng)
        E = rand(F, 3, 6, rng)
        assert compose(S, D) == compose(S.todense(), D)
        assert compose(E, S) == compose(E, S.todense())
        assert compose(S.T, S) == compose(S.T.todense(), S.todense())


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), qi=st.integers(0, 4),
       dims=st.tuples(*[st.integers(1, 4)] * 6))
def test_tensor_laws(seed, qi, dims):
    F = FIELDS[qi]
    rng = np.random.default_rng(seed)
    a, b, c, d, e, f = dims
    A, B = rand(F, a, b, rng), rand(F, d, e, rng)
    C, D = rand(F, b, c, rng), rand(F, e, f, rng)
    assert compose(tensor(A, B), tensor(C, D)) == tensor(compose(A, C), compose(B, D))
    assert rank(tensor(A, B)) == rank(A) * rank(B)
    A2 = rand(F, a, b, rng)
    # associativity
    X = rand(F, c, 3, rng)
    assert compose(compose(A, C), X) == compose(A, compose(C, X))
    # bilinearity in the first slot
    from gfl.linalg import add
    assert tensor(add(A, A2), B) == add(tensor(A, B), tensor(A2, B))


def test_tensor_index_convention():
    F = default_field(3)
    A = MatrixFq(F, np.array([[1, 2]], np.uint8))
    B = MatrixFq(F, np.array([[1], [2]], np.uint8))
    T = tensor(A, B).dense()
    # entry ((0, i2), (j1, 0)) = A[0, j1] * B[i2, 0]
    assert T.tolist() == [[1, 2], [2, 1]]


def test_pack_roundtrip():
    rng = np.random.default_rng(2)
    for n in (1, 63, 64, 65, 200):
        A = rng.integers(0, 2, (7, n)).astype(np.uint8)
        assert np.array_equal(unpack_gf2(pack_gf2(A), n), A)


def test_json_and_hex():
    F = default_field(4)
    A = MatrixFq(F, np.array([[0, 1], [2, 3]], np.uint8))
    obj = json.loads(json.dumps(A.to_json()))
    assert obj["entries"] == [[0, 0], [1, 0], [0, 1], [1, 1]]
    assert MatrixFq.from_json(obj) == A
    G = MatrixFq(default_field(2), np.array([[1, 0, 1, 1], [0, 0, 0, 1]], np.uint8))
    assert G.hex_rows() == ["d", "8"]
    assert len(G.packed_bytes()) == 16
    with pytest.raises(ValueError):
        A.hex_rows()


def test_determinism():
    rng = np.random.default_rng(8)
    F = default_field(3)
    A = rand(F, 30, 40, rng)
    r1, p1 = rref(A)
    r2, p2 = rref(A)
    assert p1 == p2 and r1.tobytes() == r2.tobytes()


def test_is_injective():
    F = default_field(2)
    assert is_injective(MatrixFq.identity(F, 3))
    assert not is_injective(MatrixFq.zeros(F, 3, 1))
