"""Complete flags in F_q^d, their canonical forms and the flag modules.

A flag ``<v_1> < <v_1, v_2> < ... < <v_1..v_r>`` is stored as the r x d
matrix of its canonical generators: row i is v_i reduced against the pivots
of rows 1..i-1 and scaled so its leading entry is 1.  Two generator
sequences for the same chain of subspaces produce identical rows, so flags
can be compared and hashed by their rows alone.  Linear dependence maps to
the zero marker ``None``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .fields import FieldSpec, default_field
from .linalg import MatrixFq

ZERO = None


@dataclass(frozen=True, order=True)
class FlagCanonical:
    r: int
    d: int
    rows: tuple[tuple[int, ...], ...]

    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x) for row in self.rows)

    def as_array(self, spec: FieldSpec) -> np.ndarray:
        return np.array(self.rows, dtype=spec.dtype).reshape(self.r, self.d)

    def to_json(self, spec: FieldSpec) -> dict:
        return {"r": self.r, "d": self.d,
                "rows": [[list(spec.decode(x)) for x in row] for row in self.rows]}

    @classmethod
    def from_json(cls, spec: FieldSpec, obj: dict) -> "FlagCanonical":
        rows = tuple(tuple(spec.encode(c) for c in row) for row in obj["rows"])
        return cls(obj["r"], obj["d"], rows)


def _spec(q_or_spec) -> FieldSpec:
    return q_or_spec if isinstance(q_or_spec, FieldSpec) else default_field(int(q_or_spec))


def canonicalize(spec: FieldSpec, vectors: Sequence[Sequence]) -> Optional[FlagCanonical]:
    """Canonical flag generated by ``vectors``, or None if they are dependent.

    Entries may be FieldElements, coefficient lists or integers (read mod p).
    """
    vecs = [[spec(x).code for x in v] for v in vectors]
    d = len(vecs[0]) if vecs else 0
    rows: list[list[int]] = []
    pivots: list[int] = []
    for v in vecs:
        if len(v) != d:
            raise ValueError("vectors of different lengths")
        w = list(v)
        for row, pc in zip(rows, pivots):
            c = w[pc]
            if c:
                nc = spec.neg(c)
                w = [spec.add(x, spec.mul(nc, y)) for x, y in zip(w, row)]
        lead = next((j for j, x in enumerate(w) if x), None)
        if lead is None:
            return ZERO
        s = spec.inv(w[lead])
        w = [spec.mul(s, x) for x in w]
        rows.append(w)
        pivots.append(lead)
    return FlagCanonical(len(rows), d, tuple(tuple(r) for r in rows))


@lru_cache(maxsize=128)
def _enumerate(spec: FieldSpec, d: int, r: int) -> tuple[FlagCanonical, ...]:
    if r > d or r < 0:
        return ()
    vectors = list(itertools.product(range(spec.q), repeat=d))
    out = []

    def extend(rows, pivots):
        if len(rows) == r:
            out.append(FlagCanonical(r, d, tuple(rows)))
            return
        for v in vectors:
            if any(v[pc] for pc in pivots):
                continue
            lead = next((j for j, x in enumerate(v) if x), None)
            if lead is None or v[lead] != 1:
                continue
            extend(rows + [v], pivots + [lead])

    extend([], [])
    return tuple(out)


def enumerate_flags(q, d: int, r: int) -> list[FlagCanonical]:
    """All complete flags of length r in F_q^d, in lexicographic order of rows."""
    return list(_enumerate(_spec(q), d, r))


def flag_count(q: int, d: int, r: int) -> int:
    """prod_{i<r} (q^(d-i) - 1)/(q - 1); zero when r > d."""
    if r > d:
        return 0
    out = 1
    for i in range(r):
        out *= (q ** (d - i) - 1) // (q - 1)
    return out


@lru_cache(maxsize=128)
def flag_index(spec: FieldSpec, d: int, r: int) -> dict[FlagCanonical, int]:
    return {f: i for i, f in enumerate(_enumerate(spec, d, r))}


@lru_cache(maxsize=128)
def flag_array(spec: FieldSpec, d: int, r: int) -> np.ndarray:
    """(N, r, d) code array of canonical rows, in enumeration order."""
    flags = _enumerate(spec, d, r)
    arr = np.array([f.rows for f in flags], dtype=spec.dtype).reshape(len(flags), r, d)
    arr.flags.writeable = False
    return arr


def _apply(spec: FieldSpec, F: np.ndarray, v: Sequence[int]) -> list:
    img = spec.sum_codes(spec.vmul(F, np.asarray(v, spec.dtype)[None, :]), axis=1)
    return [spec.element(x) for x in img]


def flag_map(f: MatrixFq, flag: FlagCanonical) -> Optional[FlagCanonical]:
    """Image of a flag under the d'xd matrix f, or None if it collapses."""
    F = f.dense()
    if F.shape[1] != flag.d:
        raise ValueError(f"map has {F.shape[1]} columns, flag lives in dimension {flag.d}")
    return canonicalize(f.spec, [_apply(f.spec, F, row) for row in flag.rows])


def flag_map_matrix(f: MatrixFq, r: int) -> MatrixFq:
    """Matrix of F[Flag_r](f) in the enumeration bases (sparse 0/1)."""
    spec = f.spec
    dp, d = f.shape
    src = _enumerate(spec, d, r)
    idx = flag_index(spec, dp, r)
    rows, cols = [], []
    for j, fl in enumerate(src):
        img = flag_map(f, fl)
        if img is not ZERO:
            rows.append(idx[img])
            cols.append(j)
    return MatrixFq.from_coo(spec, len(idx), len(src), rows, cols, np.ones(len(rows)))


def truncate(flag: FlagCanonical, s: int) -> FlagCanonical:
    """Forget the subspaces of dimension > s."""
    if not 0 < s <= flag.r:
        raise ValueError(f"cannot truncate a length-{flag.r} flag to length {s}")
    return FlagCanonical(s, flag.d, flag.rows[:s])


def truncation_matrix(spec: FieldSpec, d: int, r: int, s: int) -> MatrixFq:
    """pi_{r,s}: F[Flag_r](F^d) -> F[Flag_s](F^d) (sparse)."""
    src = _enumerate(spec, d, r)
    if s == 0:
        return MatrixFq.from_coo(spec, 1, len(src), np.zeros(len(src)), np.arange(len(src)),
                                 np.ones(len(src)))
    idx = flag_index(spec, d, s)
    rows = [idx[truncate(fl, s)] for fl in src]
    return MatrixFq.from_coo(spec, len(idx), len(src), rows, np.arange(len(src)), np.ones(len(src)))


def flag_diag(flag: FlagCanonical) -> tuple[FlagCanonical, FlagCanonical]:
    return (flag, flag)


def diag_matrix(spec: FieldSpec, d: int, r: int) -> MatrixFq:
    """[F] -> [F] (x) [F] with tensor index i * N + i."""
    n = len(_enumerate(spec, d, r))
    cols = np.arange(n)
    return MatrixFq.from_coo(spec, n * n, n, cols * n + cols, cols, np.ones(n))


def flags_containing(spec: FieldSpec, phi: FlagCanonical) -> list[int]:
    """Indices of the length-(r+1) flags whose first r steps are ``phi``."""
    flags = _enumerate(spec, phi.d, phi.r + 1)
    return [i for i, f in enumerate(flags) if f.rows[:phi.r] == phi.rows]
