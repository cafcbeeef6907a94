"""Crabb-Hubbuck morphisms and their companions as explicit matrices.

Every morphism is a :class:`~gfl.linalg.MatrixFq` in fixed bases: flag
modules use the enumeration order of :mod:`gfl.flags`, divided powers the
descending-lex monomial order of :mod:`gfl.gamma`, and tensor products the
first-factor-major index ``i1 * n2 + i2``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fields import FieldSpec, bracket, seq_bracket
from .flags import (FlagCanonical, enumerate_flags, flag_array, flag_count, flags_containing,
                    truncation_matrix)
from .gamma import (basis_array, dp_vector, gamma_dim, gamma_map, index_of,
                    product_of_powers_batch, product_dense)
from .linalg import MatrixFq, compose, rank


@dataclass(frozen=True)
class SeqS:
    """Weakly decreasing sequence of positive integers s_1 >= ... >= s_r."""

    s: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(x) for x in self.s)
        object.__setattr__(self, "s", s)
        if any(x <= 0 for x in s):
            raise ValueError(f"sequence entries must be positive: {s}")
        if any(a < b for a, b in zip(s, s[1:])):
            raise ValueError(f"sequence must be weakly decreasing: {s}")

    @property
    def r(self) -> int:
        return len(self.s)

    @property
    def strict(self) -> bool:
        return all(a > b for a, b in zip(self.s, self.s[1:]))

    def degree(self, q: int) -> int:
        return seq_bracket(self.s, q)

    def plus(self) -> "SeqS":
        return SeqS(tuple(x + 1 for x in self.s))

    def prime(self) -> "SeqS":
        """(s_1 - s_r, ..., s_{r-1} - s_r); needs a strictly decreasing tail."""
        last = self.s[-1]
        return SeqS(tuple(x - last for x in self.s[:-1]))

    def __iter__(self):
        return iter(self.s)

    def __len__(self):
        return len(self.s)

    def __str__(self):
        return "(" + ",".join(map(str, self.s)) + ")"


def _seq(s) -> SeqS:
    return s if isinstance(s, SeqS) else SeqS(tuple(s))


def criterion_steps(s, q: int, d: int) -> list[dict]:
    """Per-step values [s_i - s_{i+1}]_q against (q - 1)(d - i + 1)."""
    s = _seq(s).s + (0,)
    return [{"i": i + 1, "lhs": bracket(s[i] - s[i + 1], q), "rhs": (q - 1) * (d - i)}
            for i in range(len(s) - 1)]


def criterion_holds(s, q: int, d: int) -> bool:
    return all(st["lhs"] >= st["rhs"] for st in criterion_steps(s, q, d))


@dataclass
class CriterionReport:
    q: int
    d: int
    seq: tuple[int, ...]
    degree: int
    flag_dim: int
    gamma_dim: int
    rank: Optional[int]
    injective: Optional[bool]
    criterion_holds: bool
    per_step: list = field(default_factory=list)
    strict: bool = True
    status: str = "ok"

    def to_json(self) -> dict:
        out = asdict(self)
        out["seq"] = list(self.seq)
        return out


# -- the line map and the Crabb-Hubbuck morphism --------------------------------------

def phi_line(spec: FieldSpec, n: int, d: int) -> MatrixFq:
    """F[Flag_1](F^d) -> Gamma^n(F^d), a line <v> going to v^(x)n."""
    if n % (spec.q - 1):
        raise ValueError(f"(q-1) = {spec.q - 1} does not divide n = {n}")
    lines = flag_array(spec, d, 1)
    cols = [dp_vector(spec, row[0], n) for row in lines]
    if not cols:
        return MatrixFq.zeros(spec, gamma_dim(n, d), 0)
    return MatrixFq(spec, np.stack(cols, axis=1))


def phi_images(spec: FieldSpec, s, d: int, gens: Optional[np.ndarray] = None) -> np.ndarray:
    """(N, dim) array: row j is prod_i v_i^(x)[s_i]_q for generator sequence j."""
    s = _seq(s)
    if gens is None:
        gens = flag_array(spec, d, s.r)
    degs = [bracket(x, spec.q) for x in s]
    if len(gens) == 0:
        return np.zeros((0, gamma_dim(sum(degs), d)), spec.dtype)
    return product_of_powers_batch(spec, gens, degs)


def phi_seq(spec: FieldSpec, s, d: int) -> MatrixFq:
    """phi_s : F[Flag_r](F^d) -> Gamma^[s]_q(F^d) (dense)."""
    return MatrixFq(spec, phi_images(spec, s, d).T)


def phi_constant(spec: FieldSpec, r: int, t: int, d: int) -> MatrixFq:
    return phi_seq(spec, (t,) * r, d)


# -- delta, psi and the key-step composite ---------------------------------------------

def _split_map(spec, n1: int, n2: int, d: int, f1: int, f2: int) -> MatrixFq:
    """Sparse map Gamma^(f1 n1 + f2 n2) -> Gamma^n1 (x) Gamma^n2:
    e^(c) -> sum over c = f1 u + f2 w of e^(u) (x) e^(w).

    With one factor equal to 1 this is a coproduct component followed by an
    iterated Verschiebung on the other tensor factor.
    """
    U, W = basis_array(n1, d), basis_array(n2, d)
    iu, iw = np.meshgrid(np.arange(len(U)), np.arange(len(W)), indexing="ij")
    iu, iw = iu.ravel(), iw.ravel()
    N = f1 * n1 + f2 * n2
    cols = index_of(f1 * U[iu] + f2 * W[iw], N, d)
    rows = iu * len(W) + iw
    return MatrixFq.from_coo(spec, len(U) * len(W), gamma_dim(N, d), rows, cols,
                             np.ones(len(rows)))


def delta_degrees(s, q: int) -> tuple[int, int, int]:
    """(r [s_r]_q, sum_i ([s_i]_q - [s_r]_q), sum_i [s_i - s_r]_q)."""
    s = _seq(s)
    last = s.s[-1]
    a = s.r * bracket(last, q)
    b = sum(bracket(x, q) - bracket(last, q) for x in s)
    b_red = sum(bracket(x - last, q) for x in s)
    return a, b, b_red


def delta_s(spec: FieldSpec, s, d: int) -> MatrixFq:
    """(1 (x) V^(s_r)) o Delta : Gamma^[s] -> Gamma^(r[s_r]) (x) Gamma^(sum [s_i - s_r])."""
    s = _seq(s)
    a, b, b_red = delta_degrees(s, spec.q)
    if b != spec.q ** s.s[-1] * b_red:
        raise ArithmeticError("degree identity [s_i] - [s_r] = q^s_r [s_i - s_r] failed")
    return _split_map(spec, a, b_red, d, 1, spec.q ** s.s[-1])


def psi_s(spec: FieldSpec, s, d: int, phi: Optional[MatrixFq] = None) -> MatrixFq:
    if phi is None:
        phi = phi_seq(spec, s, d)
    return compose(delta_s(spec, s, d), phi)


def _kron_columns(spec, A: np.ndarray, B: np.ndarray, ja, jb) -> np.ndarray:
    """Column k is A[:, ja[k]] (x) B[:, jb[k]]."""
    ja, jb = np.asarray(ja), np.asarray(jb)
    out = spec.vmul(A[:, None, ja], B[None, :, jb])
    return out.reshape(A.shape[0] * B.shape[0], len(ja))


def key_step_composite(spec: FieldSpec, s, d: int) -> MatrixFq:
    """(phi_(s_r..s_r) (x) phi_s') o (1 (x) pi_{r,r-1}) o diag, evaluated columnwise."""
    s = _seq(s)
    if s.r < 2:
        raise ValueError("the key-step composite needs r >= 2")
    const = phi_constant(spec, s.r, s.s[-1], d).dense()
    sp = phi_seq(spec, s.prime(), d).dense()
    pi = truncation_matrix(spec, d, s.r, s.r - 1).data.tocsc()
    jb = pi.indices  # one nonzero per column
    return MatrixFq(spec, _kron_columns(spec, const, sp, np.arange(const.shape[1]), jb))


def key_step_holds(spec: FieldSpec, s, d: int, block: int = 1 << 24) -> bool:
    """Decide psi_s == key_step_composite(s) without forming either matrix.

    delta_s has a single 1 in each row, so row (u, w) of psi_s is row
    u + q^s_r w of phi_s; rows are compared in blocks of about ``block`` entries.
    """
    s = _seq(s)
    if s.r < 2:
        raise ValueError("the key-step composite needs r >= 2")
    a, _, b_red = delta_degrees(s, spec.q)
    Q = spec.q ** s.s[-1]
    X = phi_images(spec, s, d)
    C = phi_images(spec, (s.s[-1],) * s.r, d)
    jb = truncation_matrix(spec, d, s.r, s.r - 1).data.tocsc().indices
    R = phi_images(spec, s.prime(), d)[jb]
    U, W = basis_array(a, d), Q * basis_array(b_red, d)
    n = a + Q * b_red
    step = max(1, block // max(1, len(W) * len(X)))
    for i in range(0, len(U), step):
        u = U[i:i + step]
        idx = index_of((u[:, None, :] + W[None]).reshape(-1, d), n, d).reshape(len(u), len(W))
        if not np.array_equal(X[:, idx], spec.vmul(C[:, i:i + step, None], R[:, None, :])):
            return False
    return True


# -- stabilization ------------------------------------------------------------------------

def eta_stab(spec: FieldSpec, s, d: int) -> MatrixFq:
    """(V (x) 1) o Delta : Gamma^[s+] -> Gamma^[s] (x) Gamma^((q-1) r)."""
    s = _seq(s)
    q = spec.q
    big, small = s.plus().degree(q), s.degree(q)
    if big != q * small + s.r * (q - 1):
        raise ArithmeticError("degree identity [s+] = q[s] + r(q-1) failed")
    return _split_map(spec, small, (q - 1) * s.r, d, q, 1)


def eta_diagram(spec: FieldSpec, s, d: int) -> tuple[MatrixFq, MatrixFq]:
    """Both paths around the stabilization square: eta o phi_{s+} and
    (phi_s (x) phi_(1..1)) o diag."""
    s = _seq(s)
    lhs = compose(eta_stab(spec, s, d), phi_seq(spec, s.plus(), d))
    a = phi_seq(spec, s, d).dense()
    b = phi_constant(spec, s.r, 1, d).dense()
    j = np.arange(a.shape[1])
    return lhs, MatrixFq(spec, _kron_columns(spec, a, b, j, j))


# -- restriction to flags through a fixed partial flag -------------------------------------

def _quotient_coords(phi: FlagCanonical) -> list[int]:
    piv = set(phi.pivots())
    return [j for j in range(phi.d) if j not in piv]


def restriction_matrix(spec: FieldSpec, phi: FlagCanonical, t: int) -> MatrixFq:
    """phi_(t..t) (length r = len(phi) + 1) restricted to the flags containing phi."""
    r = phi.r + 1
    idx = flags_containing(spec, phi)
    gens = flag_array(spec, phi.d, r)[idx]
    return MatrixFq(spec, phi_images(spec, (t,) * r, phi.d, gens).T)


def rho_matrix(spec: FieldSpec, phi: FlagCanonical, t: int) -> MatrixFq:
    """Flags through phi -> lines of the quotient -> Gamma^[t](V/<phi>)."""
    keep = _quotient_coords(phi)
    idx = flags_containing(spec, phi)
    last = flag_array(spec, phi.d, phi.r + 1)[idx][:, -1, :][:, keep]
    n = bracket(t, spec.q)
    cols = [dp_vector(spec, w, n) for w in last]
    return MatrixFq(spec, np.stack(cols, axis=1).reshape(gamma_dim(n, len(keep)), len(cols)))


def section_matrix(spec: FieldSpec, phi: FlagCanonical) -> MatrixFq:
    """Coordinate section V/<phi> -> V onto the non-pivot coordinates."""
    keep = _quotient_coords(phi)
    S = np.zeros((phi.d, len(keep)), spec.dtype)
    S[keep, np.arange(len(keep))] = 1
    return MatrixFq(spec, S)


def gamma_phi(spec: FieldSpec, phi: FlagCanonical, t: int) -> np.ndarray:
    """Image of [phi] under phi_(t..t) on length-(r-1) flags, as a dense vector."""
    gens = phi.as_array(spec)[None]
    return phi_images(spec, (t,) * phi.r, phi.d, gens)[0] if phi.r else np.ones(1, spec.dtype)


def cap_with_gamma_phi(spec: FieldSpec, phi: FlagCanonical, t: int) -> MatrixFq:
    """Gamma^[t](V/<phi>) -> Gamma^(r[t])(V): apply the section, then multiply by gamma_phi."""
    n = bracket(t, spec.q)
    sec = gamma_map(section_matrix(spec, phi), n).dense()
    g = gamma_phi(spec, phi, t)
    if phi.r == 0:
        return MatrixFq(spec, sec)
    G = np.broadcast_to(g, (sec.shape[1], len(g)))
    out = product_dense(spec, G, phi.r * n, sec.T, n, phi.d)
    return MatrixFq(spec, out.T)


def restriction_test(spec: FieldSpec, phi: FlagCanonical, t: int, d: Optional[int] = None) -> bool:
    """Is phi_(t..t) injective on the flags through ``phi``?

    Decided twice: by the rank of the restricted matrix, and by injectivity
    of the line map on the quotient V/<phi>.  The two must agree.
    """
    if d is not None and d != phi.d:
        raise ValueError(f"flag lives in dimension {phi.d}, not {d}")
    if phi.r >= phi.d:
        raise ValueError("need len(phi) < dim V")
    R = restriction_matrix(spec, phi, t)
    direct = rank(R) == R.ncols
    L = phi_line(spec, bracket(t, spec.q), phi.d - phi.r)
    quotient = rank(L) == L.ncols
    if direct != quotient:
        raise AssertionError(f"direct ({direct}) and quotient ({quotient}) routes disagree for {phi}")
    return direct


# -- filtration dimensions and the ring of lines --------------------------------------------

def qk_dim(spec: FieldSpec, k: int, d: int) -> int:
    if k < 1:
        raise ValueError("k must be >= 1")
    return rank(phi_line(spec, k * (spec.q - 1), d))


def sequences_of_degree(n: int, q: int, max_len: int) -> list[SeqS]:
    """Weakly decreasing positive sequences s with [s]_q = n and length <= max_len."""
    out: list[SeqS] = []

    def rec(rem, cap, acc):
        if rem == 0 and acc:
            out.append(SeqS(tuple(acc)))
            return
        if len(acc) == max_len:
            return
        for s in range(cap, 0, -1):
            b = bracket(s, q)
            if b <= rem:
                rec(rem - b, s, acc + [s])

    if n > 0:
        top = 1
        while bracket(top + 1, q) <= n:
            top += 1
        rec(n, top, [])
    return out


def ring_of_lines_dim(spec: FieldSpec, n: int, d: int) -> int:
    """Dimension of the span of the images of all phi_s landing in Gamma^n(F^d)."""
    seqs = sequences_of_degree(n, spec.q, d)
    if not seqs:
        return 0
    cols = [phi_images(spec, s, d) for s in seqs]
    stacked = np.concatenate(cols, axis=0)
    return rank(MatrixFq(spec, stacked.T))


# -- cells --------------------------------------------------------------------------------

def cell_sizes(q: int, s, d: int) -> tuple[int, int]:
    s = _seq(s)
    return flag_count(q, d, s.r), gamma_dim(s.degree(q), d)


def matrix_entries(q: int, s, d: int) -> int:
    n_flags, n_gamma = cell_sizes(q, s, d)
    return n_flags * n_gamma


def evaluate_cell(spec: FieldSpec, s, d: int, cap: Optional[int] = None,
                  entry_cap: Optional[int] = None) -> CriterionReport:
    """Rank of phi_s on F^d, with resource guards (status 'skipped')."""
    s = _seq(s)
    q = spec.q
    n_flags, n_gamma = cell_sizes(q, s, d)
    rep = CriterionReport(
        q=q, d=d, seq=s.s, degree=s.degree(q), flag_dim=n_flags, gamma_dim=n_gamma,
        rank=None, injective=None, criterion_holds=criterion_holds(s, q, d),
        per_step=criterion_steps(s, q, d), strict=s.strict)
    if cap is not None and n_gamma > cap:
        rep.status = "skipped"
        return rep
    if entry_cap is not None and n_flags * n_gamma > entry_cap:
        rep.status = "skipped"
        return rep
    if n_flags == 0:
        rep.rank, rep.injective = 0, True
        return rep
    rk = rank(phi_seq(spec, s, d))
    rep.rank, rep.injective = rk, rk == n_flags
    return rep


def strict_sequences(r: int, s_max: int) -> list[SeqS]:
    """Strictly decreasing sequences of length r with entries <= s_max (lex order)."""
    import itertools
    return [SeqS(tuple(sorted(c, reverse=True)))
            for c in itertools.combinations(range(1, s_max + 1), r)]


def weak_sequences(r: int, s_max: int) -> list[SeqS]:
    import itertools
    return [SeqS(tuple(sorted(c, reverse=True)))
            for c in itertools.combinations_with_replacement(range(1, s_max + 1), r)]
