"""Divided powers Gamma^n(F^d) in the divided-monomial basis.

The basis element for an exponent vector ``a`` is
``e^(a) = gamma_{a_1}(e_1) ... gamma_{a_d}(e_d)``; bases are listed in
descending lexicographic order, so ``(n, 0, ..., 0)`` comes first.

Two representations coexist: :class:`GammaElement` (sparse dict, used at the
API surface and for small checks) and dense code vectors indexed by the basis
(used when building large morphism matrices).  Products of dense vectors go
through a precomputed :class:`MulPlan` listing every pair of monomials whose
product coefficient is nonzero mod p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .fields import FieldElement, FieldSpec, binom_mod_p, binom_table
from .linalg import MatrixFq, compose, kernel_basis, tensor

Exps = tuple[int, ...]


# -- bases ---------------------------------------------------------------------

def gamma_dim(n: int, d: int) -> int:
    if n < 0 or d < 0:
        return 0
    if d == 0:
        return 1 if n == 0 else 0
    return comb(n + d - 1, d - 1)


@lru_cache(maxsize=512)
def _basis(n: int, d: int) -> tuple[Exps, ...]:
    if n < 0:
        return ()
    if d == 0:
        return ((),) if n == 0 else ()
    if d == 1:
        return ((n,),)
    out = []
    for a in range(n, -1, -1):
        out.extend((a,) + rest for rest in _basis(n - a, d - 1))
    return tuple(out)


def gamma_basis(n: int, d: int) -> list[Exps]:
    """Exponent vectors of degree n in d variables, descending lex order."""
    return list(_basis(n, d))


@lru_cache(maxsize=512)
def basis_array(n: int, d: int) -> np.ndarray:
    b = _basis(n, d)
    arr = np.array(b, dtype=np.int64).reshape(len(b), d)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=512)
def basis_index(n: int, d: int) -> dict[Exps, int]:
    return {a: i for i, a in enumerate(_basis(n, d))}


@lru_cache(maxsize=512)
def _sorted_keys(n: int, d: int) -> np.ndarray:
    radix = (n + 1) ** np.arange(d - 1, -1, -1, dtype=np.int64)
    keys = basis_array(n, d) @ radix
    return keys[::-1].copy()  # ascending


def index_of(exps: np.ndarray, n: int, d: int) -> np.ndarray:
    """Vectorised basis position of rows of ``exps`` (all of degree n)."""
    exps = np.asarray(exps, dtype=np.int64).reshape(-1, d)
    if d == 0:
        return np.zeros(len(exps), np.int64)
    radix = (n + 1) ** np.arange(d - 1, -1, -1, dtype=np.int64)
    asc = _sorted_keys(n, d)
    pos = np.searchsorted(asc, exps @ radix)
    return len(asc) - 1 - pos


def binom_mod_p_vec(n: np.ndarray, k: np.ndarray, p: int) -> np.ndarray:
    """Elementwise C(n, k) mod p by Lucas' theorem."""
    n = np.array(n, dtype=np.int64)
    k = np.array(k, dtype=np.int64)
    n, k = np.broadcast_arrays(n, k)
    n, k = n.copy(), k.copy()
    out = np.ones(n.shape, np.int64)
    out[(k < 0) | (k > n)] = 0
    k[out == 0] = 0
    tab = binom_table(p)
    while n.any():
        out = out * tab[n % p, k % p] % p
        n //= p
        k //= p
    return out


def prod_mod(arr: np.ndarray, p: int) -> np.ndarray:
    """Product along the last axis, reduced mod p at every step."""
    out = np.ones(arr.shape[:-1], np.int64)
    for j in range(arr.shape[-1]):
        out = out * arr[..., j] % p
    return out


# -- sparse elements -------------------------------------------------------------

@dataclass(frozen=True)
class GammaElement:
    """Sparse element of Gamma^degree(F^dim)."""

    spec: FieldSpec
    degree: int
    dim: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for a, c in self.terms.items():
            a = tuple(int(x) for x in a)
            if len(a) != self.dim or sum(a) != self.degree or min(a, default=0) < 0:
                raise ValueError(f"exponent {a} not in Gamma^{self.degree}(F^{self.dim})")
            c = c.code if isinstance(c, FieldElement) else int(c)
            if c:
                clean[a] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def monomial(cls, spec, a: Sequence[int], coeff: int = 1) -> "GammaElement":
        return cls(spec, sum(a), len(a), {tuple(a): coeff})

    @classmethod
    def from_vector(cls, spec, vec, n: int, d: int) -> "GammaElement":
        b = _basis(n, d)
        return cls(spec, n, d, {b[i]: int(vec[i]) for i in np.flatnonzero(vec)})

    def to_vector(self) -> np.ndarray:
        v = np.zeros(gamma_dim(self.degree, self.dim), self.spec.dtype)
        idx = basis_index(self.degree, self.dim)
        for a, c in self.terms.items():
            v[idx[a]] = c
        return v

    def coeff(self, a: Sequence[int]) -> FieldElement:
        return self.spec.element(self.terms.get(tuple(a), 0))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GammaElement") -> "GammaElement":
        self._compatible(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = self.spec.add(out.get(a, 0), c)
        return GammaElement(self.spec, self.degree, self.dim, out)

    def scale(self, c) -> "GammaElement":
        c = self.spec(c).code
        return GammaElement(self.spec, self.degree, self.dim,
                            {a: self.spec.mul(c, x) for a, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GammaElement):
            return product(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, GammaElement):
            return NotImplemented
        return (self.spec == other.spec and self.degree == other.degree
                and self.dim == other.dim and self.terms == other.terms)

    def __hash__(self):
        return hash((self.degree, self.dim, frozenset(self.terms.items())))

    def _compatible(self, other):
        if self.spec != other.spec or self.dim != other.dim:
            raise ValueError("elements live over different fields or dimensions")
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def __repr__(self):
        if not self.terms:
            return f"0 in Gamma^{self.degree}"
        parts = [f"{self.spec.element(c)!r}*e{a}" for a, c in sorted(self.terms.items(), reverse=True)]
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "dim": self.dim,
            "terms": [{"exps": list(a), "coeff": list(self.spec.decode(c))}
                      for a, c in sorted(self.terms.items(), reverse=True)],
        }

    @classmethod
    def from_json(cls, spec, obj) -> "GammaElement":
        return cls(spec, obj["degree"], obj["dim"],
                   {tuple(t["exps"]): spec.encode(t["coeff"]) for t in obj["terms"]})


@dataclass(frozen=True)
class TensorElement:
    """Sparse element of Gamma^n1 (F^d) (x) Gamma^n2 (F^d)."""

    spec: FieldSpec
    bidegree: tuple[int, int]
    dim: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        n1, n2 = self.bidegree
        clean = {}
        for (u, v), c in self.terms.items():
            if sum(u) != n1 or sum(v) != n2 or len(u) != self.dim or len(v) != self.dim:
                raise ValueError(f"term {(u, v)} does not have bidegree {self.bidegree}")
            c = c.code if isinstance(c, FieldElement) else int(c)
            if c:
                clean[(tuple(u), tuple(v))] = c
        object.__setattr__(self, "terms", clean)

    def to_vector(self) -> np.ndarray:
        n1, n2 = self.bidegree
        d2 = gamma_dim(n2, self.dim)
        i1, i2 = basis_index(n1, self.dim), basis_index(n2, self.dim)
        v = np.zeros(gamma_dim(n1, self.dim) * d2, self.spec.dtype)
        for (a, b), c in self.terms.items():
            v[i1[a] * d2 + i2[b]] = c
        return v

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return (self.spec == other.spec and self.bidegree == other.bidegree
                and self.dim == other.dim and self.terms == other.terms)

    def __hash__(self):
        return hash((self.bidegree, self.dim, frozenset(self.terms.items())))

    @classmethod
    def pure(cls, x: GammaElement, y: GammaElement) -> "TensorElement":
        spec = x.spec
        terms = {}
        for a, c in x.terms.items():
            for b, e in y.terms.items():
                terms[(a, b)] = spec.mul(c, e)
        return cls(spec, (x.degree, y.degree), x.dim, terms)


def _mono_product_coeff(a: Exps, b: Exps, p: int) -> int:
    c = 1
    for x, y in zip(a, b):
        c = c * binom_mod_p(x + y, x, p) % p
        if not c:
            return 0
    return c


def product(x: GammaElement, y: GammaElement) -> GammaElement:
    """Product in the divided power algebra."""
    if x.spec != y.spec:
        raise ValueError(f"field mismatch: {x.spec} vs {y.spec}")
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    spec = x.spec
    out: dict[Exps, int] = {}
    for a, c in x.terms.items():
        for b, e in y.terms.items():
            k = _mono_product_coeff(a, b, spec.p)
            if k:
                s = tuple(i + j for i, j in zip(a, b))
                out[s] = spec.add(out.get(s, 0), spec.mul(k, spec.mul(c, e)))
    return GammaElement(spec, x.degree + y.degree, x.dim, out)


def coproduct(z: GammaElement, a: int, b: int) -> TensorElement:
    """Component of the coproduct in bidegree (a, b)."""
    if a + b != z.degree:
        raise ValueError(f"bidegree ({a}, {b}) does not split degree {z.degree}")
    spec = z.spec
    out: dict = {}
    if a < 0 or b < 0:
        return TensorElement(spec, (a, b), z.dim, {})
    for c, coeff in z.terms.items():
        for u in _bounded_splits(c, a):
            v = tuple(x - y for x, y in zip(c, u))
            key = (u, v)
            out[key] = spec.add(out.get(key, 0), coeff)
    return TensorElement(spec, (a, b), z.dim, out)


def _bounded_splits(c: Exps, a: int):
    """All u <= c componentwise with |u| = a."""
    if not c:
        if a == 0:
            yield ()
        return
    rest_cap = sum(c[1:])
    for u0 in range(min(c[0], a), max(0, a - rest_cap) - 1, -1):
        for tail in _bounded_splits(c[1:], a - u0):
            yield (u0,) + tail


def divided_power_of_vector(spec: FieldSpec, v: Sequence, k: int) -> GammaElement:
    """The symmetric tensor v^(x)k as an element of Gamma^k."""
    codes = [spec(x).code for x in v]
    vec = dp_vector(spec, np.array(codes, dtype=spec.dtype), k)
    return GammaElement.from_vector(spec, vec, k, len(codes))


# -- dense kernels ---------------------------------------------------------------

def dp_vector(spec: FieldSpec, v: np.ndarray, k: int) -> np.ndarray:
    """Dense coordinates of v^(x)k: coefficient prod_i v_i^(a_i) at e^(a)."""
    d = len(v)
    A = basis_array(k, d)
    out = np.ones(len(A), spec.dtype)
    for j in range(d):
        out = spec.vmul(out, spec.power_table(int(v[j]), k)[A[:, j]])
    return out


def dp_matrix(spec: FieldSpec, V: np.ndarray, k: int) -> np.ndarray:
    """Rows of V raised to the k-th divided power, stacked (B, dim)."""
    V = np.asarray(V)
    out = np.empty((V.shape[0], gamma_dim(k, V.shape[1])), spec.dtype)
    for i, v in enumerate(V):
        out[i] = dp_vector(spec, v, k)
    return out


@lru_cache(maxsize=None)
def _digit_options(d: int, p: int):
    """Per-level digit choices: (du, dw) in [0,p)^d with du + dw < p coordinatewise,
    grouped by (sum du, sum dw), each with its coefficient prod C(du+dw, du) mod p."""
    pairs = [(a, b) for a in range(p) for b in range(p - a)]
    tab = binom_table(p)
    groups: dict = {}
    for combo in itertools.product(pairs, repeat=d):
        du = tuple(a for a, _ in combo)
        dw = tuple(b for _, b in combo)
        c = 1
        for a, b in combo:
            c = c * int(tab[a + b, a]) % p
        groups.setdefault((sum(du), sum(dw)), []).append((du, dw, c))
    return {k: (np.array([g[0] for g in v], np.int64).reshape(-1, d),
                np.array([g[1] for g in v], np.int64).reshape(-1, d),
                np.array([g[2] for g in v], np.int64))
            for k, v in groups.items()}


def _carry_free_chunks(n1: int, n2: int, d: int, p: int, limit: int = 1 << 21):
    """Yield (u, w, coef) blocks covering every (u, w) with |u| = n1, |w| = n2
    whose coordinatewise sums have no base-p carries; coef is
    prod_j C(u_j + w_j, u_j) mod p.

    Digits are chosen one base-p level at a time, depth first, so memory
    stays near ``limit`` rows while the work is proportional to the output.
    """
    opts = _digit_options(d, p)

    def walk(r1, r2, u, w, c, scale):
        if r1 == 0 and r2 == 0:
            yield u, w, c
            return
        for (s1, s2), (du, dw, dc) in opts.items():
            if s1 > r1 or s2 > r2 or (r1 - s1) % p or (r2 - s2) % p:
                continue
            step = max(1, limit // len(du))
            for i in range(0, len(u), step):
                nu = (u[i:i + step, None, :] + scale * du[None]).reshape(-1, d)
                nw = (w[i:i + step, None, :] + scale * dw[None]).reshape(-1, d)
                nc = (c[i:i + step, None] * dc[None] % p).reshape(-1)
                keep = nc != 0
                if keep.any():
                    yield from walk((r1 - s1) // p, (r2 - s2) // p, nu[keep], nw[keep], nc[keep],
                                    scale * p)

    z = np.zeros((1, d), np.int64)
    yield from walk(n1, n2, z, z, np.ones(1, np.int64), 1)


def _carry_free_pairs(n1: int, n2: int, d: int, p: int):
    """All carry-free pairs at once; see :func:`_carry_free_chunks`."""
    blocks = list(_carry_free_chunks(n1, n2, d, p))
    if not blocks:
        z = np.zeros((0, d), np.int64)
        return z, z, np.zeros(0, np.int64)
    return tuple(np.concatenate(x) for x in zip(*blocks))


@lru_cache(maxsize=4096)
def carry_free_count(n1: int, n2: int, d: int, p: int) -> int:
    """Number of carry-free pairs; all have nonzero coefficient since
    C(a + b, a) is a unit mod p whenever a + b < p."""
    if n1 == 0 and n2 == 0:
        return 1
    total = 0
    for (s1, s2), (du, _, _) in _digit_options(d, p).items():
        if s1 <= n1 and s2 <= n2 and (n1 - s1) % p == 0 and (n2 - s2) % p == 0:
            total += len(du) * carry_free_count((n1 - s1) // p, (n2 - s2) // p, d, p)
    return total


class MulPlan:
    """Nonzero monomial pairs for Gamma^n1 x Gamma^n2 -> Gamma^(n1+n2) over F_p."""

    def __init__(self, n1: int, n2: int, d: int, p: int):
        self.n1, self.n2, self.d, self.p = n1, n2, d, p
        u, w, coef = _carry_free_pairs(n1, n2, d, p)
        ia, ib = index_of(u, n1, d), index_of(w, n2, d)
        ic = index_of(u + w, n1 + n2, d)
        order = np.lexsort((ib, ia, ic))
        self.ia = np.ascontiguousarray(ia[order], dtype=np.int32)
        self.ib = np.ascontiguousarray(ib[order], dtype=np.int32)
        self.ic = np.ascontiguousarray(ic[order], dtype=np.int32)
        self.coef = np.ascontiguousarray(coef[order], dtype=np.uint8 if p <= 256 else np.uint16)

    def __len__(self):
        return len(self.ia)

    def apply(self, spec: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Row-wise products: (B, dim n1) x (B, dim n2) -> (B, dim n1+n2)."""
        X = np.ascontiguousarray(X, dtype=spec.dtype)
        Y = np.ascontiguousarray(Y, dtype=spec.dtype)
        if X.ndim == 1:
            return self.apply(spec, X[None], Y[None])[0]
        out = np.zeros((X.shape[0], gamma_dim(self.n1 + self.n2, self.d)), spec.dtype)
        coef = self.coef.astype(spec.dtype)
        _kernels.mul_scatter(X, Y, self.ia, self.ib, self.ic, coef, out, spec)
        return out


@lru_cache(maxsize=64)
def mul_plan(n1: int, n2: int, d: int, p: int) -> MulPlan:
    return MulPlan(n1, n2, d, p)


# products with more pairs than this are streamed instead of cached as a plan
PLAN_LIMIT = 4_000_000


def _product_streamed(spec: FieldSpec, X: np.ndarray, n1: int, Y: np.ndarray, n2: int,
                      d: int) -> np.ndarray:
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=spec.dtype)
    Y = np.ascontiguousarray(np.atleast_2d(Y), dtype=spec.dtype)
    out = np.zeros((X.shape[0], gamma_dim(n1 + n2, d)), spec.dtype)
    for u, w, coef in _carry_free_chunks(n1, n2, d, spec.p):
        ic = index_of(u + w, n1 + n2, d)
        order = np.argsort(ic, kind="stable")
        _kernels.mul_scatter(X, Y, index_of(u, n1, d)[order].astype(np.int32),
                             index_of(w, n2, d)[order].astype(np.int32),
                             ic[order].astype(np.int32), coef[order].astype(spec.dtype), out, spec)
    return out


def product_dense(spec: FieldSpec, X: np.ndarray, n1: int, Y: np.ndarray, n2: int, d: int):
    """Dense product of (batches of) vectors of degrees n1 and n2."""
    if n1 < n2:
        X, n1, Y, n2 = Y, n2, X, n1
    if carry_free_count(n1, n2, d, spec.p) > PLAN_LIMIT:
        out = _product_streamed(spec, X, n1, Y, n2, d)
        return out if np.ndim(X) > 1 else out[0]
    return mul_plan(n1, n2, d, spec.p).apply(spec, X, Y)


def product_of_powers(spec: FieldSpec, vectors: np.ndarray, degrees: Sequence[int]) -> np.ndarray:
    """prod_i v_i^(x)n_i for one generator sequence ``vectors`` (r, d)."""
    return product_of_powers_batch(spec, np.asarray(vectors)[None], degrees)[0]


def product_of_powers_batch(spec: FieldSpec, gens: np.ndarray, degrees: Sequence[int]) -> np.ndarray:
    """For gens of shape (B, r, d): rows prod_i gens[b, i]^(x)degrees[i]."""
    gens = np.asarray(gens)
    B, r, d = gens.shape
    if r == 0:
        return np.ones((B, 1), spec.dtype)
    order = sorted(range(r), key=lambda i: -degrees[i])
    # multiply small factors together first, then hit the largest once
    acc = None
    acc_deg = 0
    for i in reversed(order):
        X = dp_matrix(spec, gens[:, i, :], degrees[i])
        if acc is None:
            acc, acc_deg = X, degrees[i]
        else:
            acc = product_dense(spec, acc, acc_deg, X, degrees[i], d)
            acc_deg += degrees[i]
    return acc


# -- structure maps as matrices ---------------------------------------------------------

def _tensor_index(idx_list: list[np.ndarray], dims: Sequence[int]) -> np.ndarray:
    out = np.zeros_like(idx_list[0])
    for idx, dm in zip(idx_list, dims):
        out = out * dm + idx
    return out


def _split_tuples(degrees: Sequence[int], d: int):
    """All tuples (u_1..u_k) with |u_i| = degrees[i]; returns stacked arrays."""
    bases = [basis_array(n, d) for n in degrees]
    grids = np.meshgrid(*[np.arange(len(b)) for b in bases], indexing="ij")
    idx = [g.ravel() for g in grids]
    parts = [b[i] for b, i in zip(bases, idx)]
    return idx, parts


def coproduct_matrix(spec: FieldSpec, degrees: Sequence[int], d: int) -> MatrixFq:
    """Iterated coproduct Gamma^(sum) -> (x)_i Gamma^(degrees[i]) (sparse)."""
    degrees = tuple(degrees)
    N = sum(degrees)
    dims = [gamma_dim(n, d) for n in degrees]
    nrows = int(np.prod(dims)) if dims else 1
    if any(n < 0 for n in degrees):
        return MatrixFq.zeros(spec, 0, gamma_dim(N, d), sparse=True)
    idx, parts = _split_tuples(degrees, d)
    total = np.sum(parts, axis=0) if parts else np.zeros((1, d), np.int64)
    rows = _tensor_index(idx, dims)
    cols = index_of(total, N, d)
    return MatrixFq.from_coo(spec, nrows, gamma_dim(N, d), rows, cols, np.ones(len(rows)))


def product_matrix(spec: FieldSpec, degrees: Sequence[int], d: int) -> MatrixFq:
    """Iterated product (x)_i Gamma^(degrees[i]) -> Gamma^(sum) (sparse)."""
    degrees = tuple(degrees)
    N = sum(degrees)
    dims = [gamma_dim(n, d) for n in degrees]
    idx, parts = _split_tuples(degrees, d)
    coef = np.ones(len(idx[0]), np.int64)
    run = np.zeros_like(parts[0])
    for u in parts:
        run = run + u
        coef = coef * prod_mod(binom_mod_p_vec(run, u, spec.p), spec.p) % spec.p
    cols = _tensor_index(idx, dims)
    rows = index_of(run, N, d)
    return MatrixFq.from_coo(spec, gamma_dim(N, d), int(np.prod(dims)), rows, cols, coef)


def _versch(spec: FieldSpec, n: int, d: int, factor: int) -> MatrixFq:
    """Gamma^(factor*n) -> Gamma^n dividing exponents by ``factor``."""
    B = basis_array(n, d)
    rows = np.arange(len(B))
    cols = index_of(B * factor, factor * n, d)
    return MatrixFq.from_coo(spec, len(B), gamma_dim(factor * n, d), rows, cols, np.ones(len(B)))


def verschiebung_p(spec: FieldSpec, n: int, d: int) -> MatrixFq:
    """Gamma^(pn) -> Gamma^n (target carrying one Frobenius twist)."""
    return _versch(spec, n, d, spec.p)


def verschiebung_q(spec: FieldSpec, n: int, d: int, times: int = 1) -> MatrixFq:
    """Gamma^(q^times n) -> Gamma^n; no net twist over GF(q)."""
    return _versch(spec, n, d, spec.q ** times)


def _truncation_map(spec: FieldSpec, n: int, d: int, k: int) -> MatrixFq:
    """(1 (x) V_k) o Delta_(n-k, k) : Gamma^n -> Gamma^(n-k) (x) Gamma^1."""
    B = basis_array(n, d)
    rows, cols = [], []
    d1 = gamma_dim(n - k, d)
    for j in range(d):
        hit = np.flatnonzero(B[:, j] >= k)
        u = B[hit].copy()
        u[:, j] -= k
        rows.append(index_of(u, n - k, d) * d + j)
        cols.append(hit)
    rows = np.concatenate(rows) if rows else np.zeros(0, np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, np.int64)
    return MatrixFq.from_coo(spec, d1 * d, len(B), rows, cols, np.ones(len(rows)))


def truncation_composite(spec: FieldSpec, n: int, d: int, versch: str = "q") -> MatrixFq:
    """The composite whose kernel defines the truncated divided powers.

    Built from the generic coproduct and Verschiebung matrices; see
    :func:`_truncation_map` for the direct monomial description.
    """
    k = spec.q if versch == "q" else spec.p
    if n < k:
        return MatrixFq.zeros(spec, 0, gamma_dim(n, d), sparse=True)
    V = verschiebung_q(spec, 1, d) if versch == "q" else verschiebung_p(spec, 1, d)
    one = MatrixFq.identity(spec, gamma_dim(n - k, d), sparse=True)
    return compose(tensor(one, V), coproduct_matrix(spec, (n - k, k), d))


def _kernel_elements(spec, M: MatrixFq, n: int, d: int) -> list[GammaElement]:
    if M.nrows == 0:
        return [GammaElement.monomial(spec, a) for a in gamma_basis(n, d)]
    return [GammaElement.from_vector(spec, k, n, d) for k in kernel_basis(M)]


def tilde_gamma_kernel(spec: FieldSpec, n: int, d: int) -> list[GammaElement]:
    """Basis of the kernel of (1 (x) V) o Delta_(n-q, q) on Gamma^n(F^d)."""
    return _kernel_elements(spec, truncation_composite(spec, n, d, "q"), n, d)


def bar_gamma_kernel(spec: FieldSpec, n: int, d: int) -> list[GammaElement]:
    """Basis of the kernel of (1 (x) V_p) o Delta_(n-p, p) on Gamma^n(F^d)."""
    return _kernel_elements(spec, truncation_composite(spec, n, d, "p"), n, d)


def truncated_count(n: int, d: int, k: int) -> int:
    """#{a in [0, k-1]^d : sum(a) = n}."""
    if n < 0:
        return 0
    poly = [1]
    for _ in range(d):
        new = [0] * (len(poly) + k - 1)
        for i, c in enumerate(poly):
            for j in range(k):
                new[i + j] += c
        poly = new
    return poly[n] if n < len(poly) else 0


# -- functoriality ------------------------------------------------------------------

def gamma_map(f: MatrixFq, n: int) -> MatrixFq:
    """Gamma^n(f) for a d'xd matrix f, as a dense dim' x dim matrix."""
    spec = f.spec
    F = f.dense()
    dp, d = F.shape
    src = basis_array(n, d)
    out = np.zeros((gamma_dim(n, dp), len(src)), spec.dtype)
    if len(src) == 0:
        return MatrixFq(spec, out)
    nnz = np.count_nonzero(F, axis=0)
    if (nnz <= 1).all():
        return MatrixFq(spec, _gamma_map_monomial(spec, F, n, src, out))
    for col, a in enumerate(src):
        gens = [F[:, i] for i in range(d) if a[i]]
        degs = [int(a[i]) for i in range(d) if a[i]]
        if not gens:
            out[:, col] = 1  # only when n == 0
            continue
        out[:, col] = product_of_powers(spec, np.array(gens), degs)
    return MatrixFq(spec, out)


def _gamma_map_monomial(spec, F, n, src, out):
    """Fast path when every column of f has at most one nonzero entry."""
    dp, d = F.shape
    target = np.argmax(F != 0, axis=0)
    scal = F[target, np.arange(d)]
    for col, a in enumerate(src):
        c = 1
        img = [0] * dp
        for i in range(d):
            if a[i] == 0:
                continue
            if scal[i] == 0:
                c = 0
                break
            c = spec.mul(c, spec.pow(int(scal[i]), int(a[i])))
            j = target[i]
            c = spec.mul(c, binom_mod_p(img[j] + int(a[i]), int(a[i]), spec.p))
            img[j] += int(a[i])
        if c:
            out[basis_index(n, dp)[tuple(img)], col] = c
    return out


def frobenius_matrix(f: MatrixFq, k: int = 1) -> MatrixFq:
    """Entrywise p^k-th power (the Frobenius twist of a linear map)."""
    spec = f.spec
    return MatrixFq(spec, spec.vpow(f.dense(), spec.p ** (k % spec.m)))


def gamma_elements_equal(x: Iterable[GammaElement], y: Iterable[GammaElement]) -> bool:
    return list(x) == list(y)


def all_vectors(spec: FieldSpec, d: int) -> np.ndarray:
    """Every vector of F^d as a (q^d, d) code array, lexicographic."""
    return np.array(list(itertools.product(range(spec.q), repeat=d)), dtype=spec.dtype).reshape(-1, d)
