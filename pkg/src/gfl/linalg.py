"""Exact matrices over GF(q): rank, kernel, composition and tensor products.

A :class:`MatrixFq` holds either a dense array of element codes or a
``scipy.sparse`` integer matrix.  Sparse storage is reserved for the
structure maps (coproduct, product, Verschiebung, flag maps) whose entries
lie in the prime subfield, so their action on dense matrices can be done
one polynomial-basis coordinate at a time.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .fields import FieldElement, FieldSpec

_FLOAT_EXACT = 1 << 52


class MatrixFq:
    """Matrix over ``spec``; ``data`` is a code array or a sparse int matrix."""

    __slots__ = ("spec", "data")

    def __init__(self, spec: FieldSpec, data):
        self.spec = spec
        if sp.issparse(data):
            data = sp.csr_array(data, dtype=np.int64)
            data.data %= spec.p
            data.eliminate_zeros()
        else:
            data = np.asarray(data)
            if data.ndim != 2:
                raise ValueError(f"expected a 2-d array, got shape {data.shape}")
            data = data.astype(spec.dtype, copy=False)
        self.data = data

    # -- construction ----------------------------------------------------
    @classmethod
    def zeros(cls, spec, nrows, ncols, sparse=False):
        if sparse:
            return cls(spec, sp.csr_array((nrows, ncols), dtype=np.int64))
        return cls(spec, np.zeros((nrows, ncols), spec.dtype))

    @classmethod
    def identity(cls, spec, n, sparse=False):
        if sparse:
            return cls(spec, sp.identity(n, dtype=np.int64, format="csr"))
        return cls(spec, np.eye(n, dtype=spec.dtype))

    @classmethod
    def from_rows(cls, spec, rows):
        """From nested lists of ints (integer image) or FieldElements."""
        rows = list(rows)
        ncols = len(rows[0]) if rows else 0
        arr = np.zeros((len(rows), ncols), spec.dtype)
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, x in enumerate(row):
                arr[i, j] = spec(x).code
        return cls(spec, arr)

    @classmethod
    def from_coo(cls, spec, nrows, ncols, rows, cols, vals):
        """Sparse matrix with prime-subfield integer entries; duplicates add."""
        a = sp.coo_array((np.asarray(vals, np.int64), (np.asarray(rows), np.asarray(cols))),
                         shape=(nrows, ncols))
        return cls(spec, a.tocsr())

    # -- basic properties --------------------------------------------------
    @property
    def shape(self):
        return self.data.shape

    @property
    def nrows(self) -> int:
        return self.data.shape[0]

    @property
    def ncols(self) -> int:
        return self.data.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def dense(self) -> np.ndarray:
        """Code array (a view for dense matrices)."""
        if self.is_sparse:
            return _int_to_codes(self.spec, self.data.toarray())
        return self.data

    def todense(self) -> "MatrixFq":
        return self if not self.is_sparse else MatrixFq(self.spec, self.dense())

    def entry(self, i: int, j: int) -> FieldElement:
        if self.is_sparse:
            return self.spec.element(int(self.data[i, j]))
        return self.spec.element(int(self.data[i, j]))

    @property
    def T(self) -> "MatrixFq":
        if self.is_sparse:
            return MatrixFq(self.spec, self.data.T.tocsr())
        return MatrixFq(self.spec, self.data.T)

    def column(self, j: int) -> np.ndarray:
        if self.is_sparse:
            return _int_to_codes(self.spec, self.data[:, [j]].toarray()[:, 0])
        return self.data[:, j]

    def columns(self, idx) -> "MatrixFq":
        idx = np.asarray(idx, dtype=np.intp)
        if self.is_sparse:
            return MatrixFq(self.spec, self.data[:, idx])
        return MatrixFq(self.spec, self.data[:, idx])

    def nnz(self) -> int:
        return int(self.data.nnz) if self.is_sparse else int(np.count_nonzero(self.data))

    def is_zero(self) -> bool:
        return self.nnz() == 0

    def __eq__(self, other):
        if not isinstance(other, MatrixFq):
            return NotImplemented
        if self.spec != other.spec or self.shape != other.shape:
            return False
        if self.is_sparse and other.is_sparse:
            return (self.data != other.data).nnz == 0
        return bool(np.array_equal(self.dense(), other.dense()))

    __hash__ = None

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"MatrixFq({self.spec}, {self.nrows}x{self.ncols}, {kind})"

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        codes = self.dense()
        digits = self.spec.digits
        return {
            "field": self.spec.to_json(),
            "nrows": self.nrows,
            "ncols": self.ncols,
            "entries": [[int(c) for c in digits[x]] for x in codes.ravel()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixFq":
        f = obj["field"]
        spec = FieldSpec(f["p"], f["m"], tuple(f["poly"]))
        codes = np.array([spec.encode(c) for c in obj["entries"]], dtype=spec.dtype)
        return cls(spec, codes.reshape(obj["nrows"], obj["ncols"]))

    def hex_rows(self) -> list[str]:
        """GF(2) only: row i as hex of sum_c bit(i,c) 2^c."""
        self._require_gf2()
        width = max(1, (self.ncols + 3) // 4)
        out = []
        for row in self.dense():
            val = int.from_bytes(np.packbits(row.astype(np.uint8), bitorder="little").tobytes(),
                                 "little")
            out.append(format(val, "x").zfill(width))
        return out

    def packed_bytes(self) -> bytes:
        """GF(2) only: rows of little-endian uint64 words, row-major."""
        self._require_gf2()
        return pack_gf2(self.dense()).astype("<u8").tobytes()

    def _require_gf2(self):
        if self.spec.q != 2:
            raise ValueError("packed rows are only defined over GF(2)")


def _int_to_codes(spec: FieldSpec, arr: np.ndarray) -> np.ndarray:
    """Prime-subfield integers -> codes (identical numbers, reduced mod p)."""
    return (np.asarray(arr, dtype=np.int64) % spec.p).astype(spec.dtype)


def pack_gf2(arr: np.ndarray) -> np.ndarray:
    """(m, n) 0/1 array -> (m, ceil(n/64)) uint64, column c at bit c&63 of word c>>6."""
    m, n = arr.shape
    nw = max(1, (n + 63) // 64)
    bits = np.packbits(arr.astype(np.uint8), axis=1, bitorder="little")
    buf = np.zeros((m, nw * 8), np.uint8)
    buf[:, :bits.shape[1]] = bits
    return np.ascontiguousarray(buf).view("<u8").astype(np.uint64)


def unpack_gf2(W: np.ndarray, ncols: int) -> np.ndarray:
    b = np.ascontiguousarray(W.astype("<u8")).view(np.uint8)
    return np.unpackbits(b, axis=1, bitorder="little")[:, :ncols]


# -- rank and kernels ----------------------------------------------------------

def rank(A: MatrixFq) -> int:
    """Exact rank by Gaussian elimination (packed rows when q = 2)."""
    codes = A.dense()
    if codes.size == 0:
        return 0
    if codes.shape[1] > codes.shape[0]:
        codes = codes.T
    if A.spec.q == 2:
        return rank_gf2(codes)
    work = np.array(codes, dtype=A.spec.dtype, order="C")
    return len(_kernels.echelon(work, A.spec, reduced=False))


def rank_gf2(arr: np.ndarray) -> int:
    """Rank of a 0/1 array via the packed path."""
    if arr.size == 0:
        return 0
    W = pack_gf2(arr)
    return len(_kernels.echelon_gf2(W, arr.shape[1], reduced=False))


def rank_generic(A: MatrixFq) -> int:
    """Rank through table elimination even when q = 2 (cross-check path)."""
    codes = A.dense()
    if codes.size == 0:
        return 0
    if codes.shape[1] > codes.shape[0]:
        codes = codes.T
    work = np.array(codes, dtype=A.spec.dtype, order="C")
    return len(_kernels.echelon(work, A.spec, reduced=False))


def rref(A: MatrixFq) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form (codes) and pivot columns."""
    work = np.array(A.dense(), dtype=A.spec.dtype, order="C")
    if work.size == 0:
        return work, []
    piv = _kernels.echelon(work, A.spec, reduced=True)
    return work, piv


def kernel_basis(A: MatrixFq) -> list[np.ndarray]:
    """Basis of the right null space, one code vector per free column."""
    spec = A.spec
    R, piv = rref(A)
    n = A.ncols
    pivset = set(piv)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        k = np.zeros(n, spec.dtype)
        k[f] = 1
        for i, c in enumerate(piv):
            k[c] = spec.neg(int(R[i, f]))
        out.append(k)
    return out


def kernel_matrix(A: MatrixFq) -> MatrixFq:
    basis = kernel_basis(A)
    if not basis:
        return MatrixFq.zeros(A.spec, A.ncols, 0)
    return MatrixFq(A.spec, np.stack(basis, axis=1))


def is_injective(A: MatrixFq) -> bool:
    return rank(A) == A.ncols


# -- composition and tensor products -----------------------------------------------

def _matmul_int(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Integer matrix product mod p; float BLAS when provably exact."""
    k = A.shape[1]
    if (p - 1) ** 2 * max(k, 1) < _FLOAT_EXACT:
        C = np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
    else:
        C = A.astype(np.int64) @ B.astype(np.int64)
    return C % p


def _dense_product(spec: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    p, m = spec.p, spec.m
    if m == 1:
        return _matmul_int(A, B, p).astype(spec.dtype)
    dg = spec.digits
    Ad = dg[A]
    Bd = dg[B]
    C = [np.zeros((A.shape[0], B.shape[1]), np.int64) for _ in range(2 * m - 1)]
    for i in range(m):
        for j in range(m):
            C[i + j] = (C[i + j] + _matmul_int(Ad[..., i], Bd[..., j], p)) % p
    for e in range(2 * m - 2, m - 1, -1):
        top = C[e]
        for i in range(m):
            if spec.poly[i]:
                C[e - m + i] = (C[e - m + i] - spec.poly[i] * top) % p
    return spec.recombine(np.stack(C[:m], axis=-1))


def _sparse_dense(spec: FieldSpec, S, B: np.ndarray) -> np.ndarray:
    p, m = spec.p, spec.m
    if m == 1:
        return ((S @ B.astype(np.int64)) % p).astype(spec.dtype)
    dg = spec.digits[B]
    planes = [(S @ dg[..., i]) % p for i in range(m)]
    return spec.recombine(np.stack(planes, axis=-1))


def compose(A: MatrixFq, B: MatrixFq) -> MatrixFq:
    """A o B (apply B first)."""
    if A.spec != B.spec:
        raise ValueError(f"field mismatch: {A.spec} vs {B.spec}")
    if A.ncols != B.nrows:
        raise ValueError(f"cannot compose {A.shape} with {B.shape}")
    spec = A.spec
    if A.is_sparse and B.is_sparse:
        return MatrixFq(spec, A.data @ B.data)
    if A.is_sparse:
        return MatrixFq(spec, _sparse_dense(spec, A.data, B.data))
    if B.is_sparse:
        return MatrixFq(spec, _sparse_dense(spec, B.data.T.tocsr(), A.data.T).T)
    return MatrixFq(spec, _dense_product(spec, A.data, B.data))


def tensor(A: MatrixFq, B: MatrixFq) -> MatrixFq:
    """Kronecker product; basis pair (i1, i2) sits at index i1 * n2 + i2."""
    if A.spec != B.spec:
        raise ValueError(f"field mismatch: {A.spec} vs {B.spec}")
    spec = A.spec
    if A.is_sparse and B.is_sparse:
        return MatrixFq(spec, sp.kron(A.data, B.data, format="csr"))
    a, b = A.dense(), B.dense()
    out = spec.vmul(a[:, None, :, None], b[None, :, None, :])
    return MatrixFq(spec, out.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]))


def add(A: MatrixFq, B: MatrixFq) -> MatrixFq:
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    if A.is_sparse and B.is_sparse:
        return MatrixFq(A.spec, A.data + B.data)
    return MatrixFq(A.spec, A.spec.vadd(A.dense(), B.dense()))


def scale(c: int, A: MatrixFq) -> MatrixFq:
    """Multiply by the field element with code ``c``."""
    return MatrixFq(A.spec, A.spec.vmul(np.asarray(c, A.spec.dtype), A.dense()))


def hstack(mats: list[MatrixFq], spec: FieldSpec, nrows: int) -> MatrixFq:
    if not mats:
        return MatrixFq.zeros(spec, nrows, 0)
    return MatrixFq(spec, np.concatenate([m.dense() for m in mats], axis=1))
