import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from gfl.fields import default_field
from gfl.gamma import (GammaElement, TensorElement, _truncation_map, bar_gamma_kernel, basis_array,
                       coproduct, coproduct_matrix, divided_power_of_vector, dp_vector, frobenius_matrix,
                       gamma_basis, gamma_dim, gamma_map, product, product_dense, product_matrix,
                       tilde_gamma_kernel, truncated_count, truncation_composite, verschiebung_p,
                       verschiebung_q)
from gfl.linalg import MatrixFq, compose, rank, tensor

F2, F3, F4 = default_field(2), default_field(3), default_field(4)
FIELDS = (F2, F3, F4)


def mono(F, *a):
    return GammaElement.monomial(F, a)


def random_matrix(F, rows, cols, rng):
    return MatrixFq(F, rng.integers(0, F.q, (rows, cols)).astype(F.dtype))


# -- bases ----------------------------------------------------------------------

def test_basis_sizes_and_order():
    assert len(gamma_basis(3, 3)) == 10
    assert gamma_basis(0, 4) == [(0, 0, 0, 0)]
    assert gamma_basis(5, 1) == [(5,)]
    assert gamma_basis(-1, 2) == []
    b = gamma_basis(4, 3)
    assert b == sorted(b, reverse=True)
    assert b[0] == (4, 0, 0)
    for n, d in itertools.product(range(7), range(1, 5)):
        assert gamma_dim(n, d) == comb(n + d - 1, d - 1) == len(gamma_basis(n, d))


# -- product and coproduct ----------------------------------------------------------

def test_product_examples():
    assert product(mono(F2, 1), mono(F2, 1)).is_zero()
    assert product(mono(F3, 2, 1), mono(F3, 0, 0)) == mono(F3, 2, 1)
    assert product(mono(F2, 1, 0), mono(F2, 0, 1)) == mono(F2, 1, 1)


def test_coproduct_examples():
    c = coproduct(mono(F2, 2), 1, 1)
    assert c.terms == {((1,), (1,)): 1}
    z = mono(F3, 2, 1)
    assert coproduct(z, 3, 0).terms == {((2, 1), (0, 0)): 1}
    c = coproduct(mono(F2, 1, 1), 1, 1)
    assert c.terms == {((1, 0), (0, 1)): 1, ((0, 1), (1, 0)): 1}
    assert coproduct(z, -1, 4).is_zero()
    with pytest.raises(ValueError):
        coproduct(z, 1, 1)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_product_matches_shuffle_oracle(F):
    for d in (1, 2, 3):
        for n1, n2 in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)]:
            for a in gamma_basis(n1, d):
                for b in gamma_basis(n2, d):
                    assert product(mono(F, *a), mono(F, *b)).terms == oracles.oracle_product(F, a, b)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_coproduct_matches_tensor_oracle(F):
    for d in (1, 2, 3):
        for n in range(1, 5):
            for c in gamma_basis(n, d):
                for k in range(n + 1):
                    got = coproduct(mono(F, *c), k, n - k).terms
                    assert got == oracles.oracle_coproduct(F, c, k)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_divided_power_matches_tensor_power(F):
    for d in (1, 2, 3):
        for v in itertools.product(range(F.q), repeat=d):
            for k in range(4):
                x = divided_power_of_vector(F, [F.element(c) for c in v], k)
                assert x.terms == oracles.oracle_divided_power(F, v, k)


def test_divided_power_examples():
    assert divided_power_of_vector(F2, [1, 0], 3) == mono(F2, 3, 0)
    x = divided_power_of_vector(F2, [1, 1], 2)
    assert x.terms == {(2, 0): 1, (1, 1): 1, (0, 2): 1}


def test_product_expansion_example():
    # x^[2]_2 = x^(1) x^(2) for x = e1 + e2
    x = [1, 1]
    lhs = divided_power_of_vector(F2, x, 3)
    rhs = product(divided_power_of_vector(F2, x, 1), divided_power_of_vector(F2, x, 2))
    assert lhs == rhs and not lhs.is_zero()


def test_dense_product_matches_sparse():
    rng = np.random.default_rng(3)
    for F in FIELDS + (default_field(9), default_field(5)):
        for n1, n2, d in [(3, 2, 2), (4, 5, 3), (7, 3, 2), (6, 6, 3), (0, 3, 2), (9, 4, 1), (5, 4, 4)]:
            X = rng.integers(0, F.q, (4, gamma_dim(n1, d))).astype(F.dtype)
            Y = rng.integers(0, F.q, (4, gamma_dim(n2, d))).astype(F.dtype)
            got = product_dense(F, X, n1, Y, n2, d)
            for i in range(4):
                want = product(GammaElement.from_vector(F, X[i], n1, d),
                               GammaElement.from_vector(F, Y[i], n2, d))
                assert np.array_equal(got[i], want.to_vector())


def test_json_roundtrip():
    F = default_field(9)
    x = divided_power_of_vector(F, [F.t, 1, 2], 3)
    obj = x.to_json()
    assert set(obj) == {"degree", "dim", "terms"}
    assert GammaElement.from_json(F, obj) == x


def test_tensor_vector_layout():
    x, y = mono(F2, 1, 0), mono(F2, 0, 2)
    v = TensorElement.pure(x, y).to_vector()
    i1 = gamma_basis(1, 2).index((1, 0))
    i2 = gamma_basis(2, 2).index((0, 2))
    assert np.flatnonzero(v).tolist() == [i1 * 3 + i2]


# -- structure-map matrices ------------------------------------------------------

def _tensor_product_elements(F, x: TensorElement, y: TensorElement):
    out = {}
    for (a1, a2), c in x.terms.items():
        for (b1, b2), e in y.terms.items():
            k = product(mono(F, *a1), mono(F, *b1)).scale(F.mul(c, e))
            m = product(mono(F, *a2), mono(F, *b2))
            for u, cu in k.terms.items():
                for v, cv in m.terms.items():
                    out[(u, v)] = F.add(out.get((u, v), 0), F.mul(cu, cv))
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_bialgebra_compatibility(F):
    for d in (1, 2, 3):
        for na, nb in [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3)]:
            for i in range(na + nb + 1):
                j = na + nb - i
                for a in gamma_basis(na, d)[:4]:
                    for b in gamma_basis(nb, d)[:4]:
                        lhs = coproduct(product(mono(F, *a), mono(F, *b)), i, j).terms
                        rhs = {}
                        for i1 in range(max(0, i - nb), min(na, i) + 1):
                            t = _tensor_product_elements(
                                F, coproduct(mono(F, *a), i1, na - i1),
                                coproduct(mono(F, *b), i - i1, nb - i + i1))
                            for k, v in t.items():
                                rhs[k] = F.add(rhs.get(k, 0), v)
                        assert lhs == {k: v for k, v in rhs.items() if v}


def test_coproduct_and_product_matrices_match_elements():
    for F in FIELDS:
        d = 2
        C = coproduct_matrix(F, (2, 3), d).dense()
        M = product_matrix(F, (2, 3), d).dense()
        for j, c in enumerate(gamma_basis(5, d)):
            want = coproduct(mono(F, *c), 2, 3).to_vector()
            assert np.array_equal(C[:, j], want)
        for i, a in enumerate(gamma_basis(2, d)):
            for k, b in enumerate(gamma_basis(3, d)):
                want = product(mono(F, *a), mono(F, *b)).to_vector()
                assert np.array_equal(M[:, i * gamma_dim(3, d) + k], want)


def test_coproduct_negative_degree_is_empty():
    M = coproduct_matrix(F2, (-1, 4), 2)
    assert M.nrows == 0 and M.ncols == gamma_dim(3, 2)


# -- functoriality --------------------------------------------------------------------

@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_gamma_map_basic(F):
    for n, d in [(0, 2), (3, 2), (4, 3)]:
        I = MatrixFq.identity(F, d)
        assert gamma_map(I, n) == MatrixFq.identity(F, gamma_dim(n, d))
        for lam in range(1, F.q):
            S = MatrixFq(F, (I.dense() * lam).astype(F.dtype))
            want = MatrixFq(F, (np.eye(gamma_dim(n, d)) * F.pow(lam, n)).astype(F.dtype))
            assert gamma_map(S, n) == want
        if n:
            assert gamma_map(MatrixFq.zeros(F, d, d), n).is_zero()


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), qi=st.integers(0, 2), n=st.integers(0, 5),
       d=st.integers(1, 3), d2=st.integers(1, 3), d3=st.integers(1, 3))
def test_gamma_map_functorial(seed, qi, n, d, d2, d3):
    F = FIELDS[qi]
    rng = np.random.default_rng(seed)
    f, g = random_matrix(F, d2, d, rng), random_matrix(F, d3, d2, rng)
    assert gamma_map(compose(g, f), n) == compose(gamma_map(g, n), gamma_map(f, n))


def test_gamma_map_column_is_product_of_powers():
    rng = np.random.default_rng(0)
    F = F3
    f = random_matrix(F, 3, 2, rng)
    G = gamma_map(f, 3).dense()
    for j, a in enumerate(gamma_basis(3, 2)):
        x = divided_power_of_vector(F, f.dense()[:, 0], a[0])
        y = divided_power_of_vector(F, f.dense()[:, 1], a[1])
        assert np.array_equal(G[:, j], product(x, y).to_vector())


# -- Verschiebung -----------------------------------------------------------------------

def test_verschiebung_examples():
    V = verschiebung_p(F2, 2, 1).dense()
    assert V.shape == (1, 1) and V[0, 0] == 1
    V = verschiebung_p(F2, 2, 2)
    col = gamma_basis(4, 2).index((3, 1))
    assert not V.dense()[:, col].any()
    V = verschiebung_q(F4, 2, 1).dense()
    assert V.shape == (1, 1) and V[0, 0] == 1
    assert verschiebung_q(F2, 3, 3) == verschiebung_p(F2, 3, 3)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_verschiebung_q_is_iterated_p_and_surjective(F):
    for n, d in [(1, 2), (2, 2), (2, 3), (3, 1)]:
        V = verschiebung_q(F, n, d)
        it = None
        for k in range(F.m):
            step = verschiebung_p(F, n * F.p ** (F.m - 1 - k), d)
            it = step if it is None else compose(step, it)
        assert V == it
        assert rank(V) == gamma_dim(n, d)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_verschiebung_naturality(F):
    rng = np.random.default_rng(11)
    for n, d, d2 in [(1, 2, 2), (2, 2, 3), (1, 3, 2)]:
        f = random_matrix(F, d2, d, rng)
        lhs = compose(verschiebung_q(F, n, d2), gamma_map(f, F.q * n))
        rhs = compose(gamma_map(f, n), verschiebung_q(F, n, d))
        assert lhs == rhs
        lhs = compose(verschiebung_p(F, n, d2), gamma_map(f, F.p * n))
        rhs = compose(gamma_map(frobenius_matrix(f), n), verschiebung_p(F, n, d))
        assert lhs == rhs


# -- truncated kernels --------------------------------------------------------------------

def test_tilde_examples():
    assert len(tilde_gamma_kernel(F2, 3, 3)) == 1
    assert len(tilde_gamma_kernel(F2, 3, 2)) == 0
    assert len(tilde_gamma_kernel(F3, 0, 2)) == 1
    assert len(tilde_gamma_kernel(F4, 2, 2)) == gamma_dim(2, 2)


def test_bar_examples():
    assert len(bar_gamma_kernel(F3, 2, 2)) == 3
    for p_field in (F2, F3):
        for d in (1, 2, 3):
            assert len(bar_gamma_kernel(p_field, d * (p_field.p - 1) + 1, d)) == 0
    for n, d in [(2, 2), (3, 3), (4, 3)]:
        assert bar_gamma_kernel(F2, n, d) == tilde_gamma_kernel(F2, n, d)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_truncation_direct_vs_generic(F):
    for n, d in [(F.q, 2), (F.q + 2, 3), (2 * F.q + 1, 2)]:
        assert _truncation_map(F, n, d, F.q) == truncation_composite(F, n, d, "q")
        assert _truncation_map(F, n, d, F.p) == truncation_composite(F, n, d, "p")


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_tilde_kernel_is_truncated_span(F):
    # the kernel is spanned by monomials with every exponent < q
    for n, d in [(3, 2), (4, 3), (5, 3)]:
        ker = tilde_gamma_kernel(F, n, d)
        assert len(ker) == truncated_count(n, d, F.q)
        support = {a for x in ker for a in x.terms}
        assert all(max(a) < F.q for a in support)


def test_truncated_count():
    assert truncated_count(2, 2, 3) == 3
    assert truncated_count(3, 3, 2) == 1
    assert truncated_count(0, 3, 2) == 1
    assert truncated_count(-1, 3, 2) == 0
    for n, d, k in itertools.product(range(8), range(1, 4), range(2, 5)):
        brute = sum(1 for a in itertools.product(range(k), repeat=d) if sum(a) == n)
        assert truncated_count(n, d, k) == brute
