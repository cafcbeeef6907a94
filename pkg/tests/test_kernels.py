import numpy as np
import pytest

from gfl import _kernels
from gfl.chmorph import phi_seq
from gfl.fields import default_field
from gfl.linalg import MatrixFq, pack_gf2, rank, rank_generic, rref

needs_core = pytest.mark.skipif("cython" not in _kernels.AVAILABLE, reason="compiled core not built")


def test_backend_reported():
    assert _kernels.backend() in _kernels.AVAILABLE
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")


def test_packed_and_generic_rank_agree_on_1000_matrices():
    rng = np.random.default_rng(2024)
    F = default_field(2)
    for i in range(1000):
        m, n = rng.integers(1, 257, 2)
        density = rng.choice([0.02, 0.1, 0.5])
        A = (rng.random((m, n)) < density).astype(np.uint8)
        if i % 10 == 0:
            # low rank: product of thin factors
            k = rng.integers(1, min(m, n) + 1)
            A = ((rng.integers(0, 2, (m, k)) @ rng.integers(0, 2, (k, n))) % 2).astype(np.uint8)
        M = MatrixFq(F, A)
        assert rank(M) == rank_generic(M)


@needs_core
@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_echelon_parity(q):
    F = default_field(q)
    rng = np.random.default_rng(q)
    for _ in range(30):
        m, n = rng.integers(1, 40, 2)
        A = MatrixFq(F, rng.integers(0, q, (m, n)).astype(F.dtype))
        with _kernels.using("cython"):
            r1, p1 = rref(A)
        with _kernels.using("python"):
            r2, p2 = rref(A)
        assert p1 == p2 and np.array_equal(r1, r2)


@needs_core
def test_gf2_echelon_parity():
    rng = np.random.default_rng(5)
    for _ in range(40):
        m, n = rng.integers(1, 150, 2)
        A = rng.integers(0, 2, (m, n)).astype(np.uint8)
        W1, W2 = pack_gf2(A), pack_gf2(A)
        p1 = _kernels._core.echelon_gf2(W1, n, True)
        from gfl._kernels import _pure
        p2 = _pure.echelon_gf2(W2, n, True)
        assert list(p1) == list(p2) and np.array_equal(W1, W2)


@needs_core
@pytest.mark.parametrize("q,s,d", [(2, (4, 2), 3), (3, (3, 1), 3), (4, (2, 1), 2), (9, (2,), 2)])
def test_product_kernel_parity(q, s, d):
    F = default_field(q)
    with _kernels.using("cython"):
        a = phi_seq(F, s, d)
    with _kernels.using("python"):
        b = phi_seq(F, s, d)
    assert a == b
