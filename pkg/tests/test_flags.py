import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from gfl.fields import default_field
from gfl.flags import (ZERO, FlagCanonical, canonicalize, diag_matrix, enumerate_flags, flag_count,
                       flag_diag, flag_map, flag_map_matrix, truncate, truncation_matrix)
from gfl.linalg import MatrixFq, compose, rank, tensor

F2, F3, F4 = default_field(2), default_field(3), default_field(4)
FIELDS = (F2, F3, F4)


def random_invertible(F, d, rng):
    while True:
        M = rng.integers(0, F.q, (d, d)).astype(F.dtype)
        if rank(MatrixFq(F, M)) == d:
            return MatrixFq(F, M)


def test_canonicalize_examples():
    f = canonicalize(F2, [[1, 0, 0], [0, 1, 0]])
    assert f.rows == ((1, 0, 0), (0, 1, 0))
    assert canonicalize(F2, [[1, 0, 0], [1, 0, 0]]) is ZERO
    assert canonicalize(F2, [[1, 0], [0, 1]]) == canonicalize(F2, [[1, 0], [1, 1]])
    assert canonicalize(F2, [[1, 1], [0, 1]]) != canonicalize(F2, [[1, 0], [0, 1]])


def test_enumeration_examples():
    assert len(enumerate_flags(2, 3, 1)) == 7
    assert len(enumerate_flags(2, 3, 2)) == 21
    assert len(enumerate_flags(3, 2, 1)) == 4
    assert enumerate_flags(2, 2, 3) == []
    flags = enumerate_flags(3, 3, 2)
    assert [f.rows for f in flags] == sorted(f.rows for f in flags)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_counts_match_gaussian_product(F):
    for d in range(1, 5):
        for r in range(0, d + 1):
            assert len(enumerate_flags(F, d, r)) == flag_count(F.q, d, r) \
                == oracles.gaussian_flag_count(F.q, d, r)


@pytest.mark.parametrize("q,d,r", [(2, 3, 2), (2, 3, 3), (3, 2, 2), (2, 4, 2), (4, 2, 1), (3, 3, 1)])
def test_counts_match_chain_oracle(q, d, r):
    F = default_field(q)
    assert oracles.oracle_flag_count(F, d, r) == len(enumerate_flags(F, d, r))


def test_distinct_flags_are_distinct_chains():
    F = F3
    chains = {oracles.chain_of(F, f.rows) for f in enumerate_flags(F, 3, 2)}
    assert len(chains) == flag_count(3, 3, 2)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), qi=st.integers(0, 2), d=st.integers(1, 4), data=st.data())
def test_canonical_form_unique_under_triangular_change(seed, qi, d, data):
    F = FIELDS[qi]
    r = data.draw(st.integers(1, d))
    rng = np.random.default_rng(seed)
    flag = enumerate_flags(F, d, r)[rng.integers(flag_count(F.q, d, r))]
    rows = flag.as_array(F)
    new = []
    for i in range(r):
        v = np.zeros(d, F.dtype)
        for j in range(i + 1):
            c = int(rng.integers(1 if j == i else 0, F.q))
            v = F.vadd(v, F.vmul(np.full(d, c, F.dtype), rows[j]))
        new.append([F.element(x) for x in v])
    assert canonicalize(F, new) == flag


def test_flag_map_examples():
    rng = np.random.default_rng(5)
    for F in FIELDS:
        d, r = 3, 2
        flags = enumerate_flags(F, d, r)
        g = random_invertible(F, d, rng)
        images = [flag_map(g, f) for f in flags]
        assert sorted(images) == sorted(flags)
        assert all(flag_map(MatrixFq.zeros(F, d, d), f) is ZERO for f in flags)
        for lam in range(1, F.q):
            S = MatrixFq(F, (np.eye(d) * lam).astype(F.dtype))
            assert all(flag_map(S, f) == f for f in flags)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), qi=st.integers(0, 2), d=st.integers(1, 3), d2=st.integers(1, 3),
       d3=st.integers(1, 3), r=st.integers(1, 2))
def test_flag_map_functorial(seed, qi, d, d2, d3, r):
    F = FIELDS[qi]
    rng = np.random.default_rng(seed)
    f = MatrixFq(F, rng.integers(0, F.q, (d2, d)).astype(F.dtype))
    g = MatrixFq(F, rng.integers(0, F.q, (d3, d2)).astype(F.dtype))
    for fl in enumerate_flags(F, d, r):
        a = flag_map(f, fl)
        lhs = flag_map(compose(g, f), fl)
        rhs = ZERO if a is ZERO else flag_map(g, a)
        assert lhs == rhs
    assert flag_map_matrix(compose(g, f), r) == compose(flag_map_matrix(g, r), flag_map_matrix(f, r))


def test_constant_free():
    for F in FIELDS:
        for r in (1, 2):
            assert enumerate_flags(F, 0, r) == []
            M = flag_map_matrix(MatrixFq.zeros(F, 0, 2), r)
            assert M.nrows == 0


def test_truncation():
    flags = enumerate_flags(F2, 3, 2)
    for f in flags:
        assert truncate(f, 2) == f
    hits = {}
    for f in flags:
        hits[truncate(f, 1)] = hits.get(truncate(f, 1), 0) + 1
    assert sorted(hits.values()) == [3] * 7
    P = truncation_matrix(F2, 3, 2, 1)
    assert P.shape == (7, 21) and rank(P) == 7
    with pytest.raises(ValueError):
        truncate(flags[0], 3)
    with pytest.raises(ValueError):
        truncate(flags[0], 0)


def test_diag():
    for F in (F2, F3):
        flags = enumerate_flags(F, 2, 2)
        assert flag_diag(flags[0]) == (flags[0], flags[0])
        D = diag_matrix(F, 2, 2)
        assert (np.count_nonzero(D.dense(), axis=0) == 1).all()
        rng = np.random.default_rng(2)
        g = random_invertible(F, 2, rng)
        G = flag_map_matrix(g, 2)
        assert compose(D, G) == compose(tensor(G, G), D)


def test_flag_json_roundtrip():
    for F in FIELDS:
        f = enumerate_flags(F, 3, 2)[-1]
        obj = f.to_json(F)
        assert set(obj) == {"r", "d", "rows"}
        assert FlagCanonical.from_json(F, obj) == f
