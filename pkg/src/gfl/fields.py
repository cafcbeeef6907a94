"""Arithmetic in GF(p^m) with a polynomial basis, plus modular binomials.

Elements are encoded as integers ``c_0 + c_1 p + ... + c_{m-1} p^{m-1}``
where ``(c_i)`` are the polynomial-basis coordinates.  The matrix engine
works exclusively on these codes; :class:`FieldElement` is the thin
object wrapper used at API boundaries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

MAX_ORDER = 1 << 16
TABLE_ORDER = 256

# Conway polynomials, coefficients low-to-high.
DEFAULT_POLYS = {
    2: (2, 1, (1, 1)),
    3: (3, 1, (1, 1)),
    4: (2, 2, (1, 1, 1)),
    5: (5, 1, (3, 1)),
    7: (7, 1, (4, 1)),
    8: (2, 3, (1, 1, 0, 1)),
    9: (3, 2, (2, 2, 1)),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mod(a: list[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a by the monic polynomial b over GF(p)."""
    a = [x % p for x in a]
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return a[:db]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    m = len(poly) - 1
    if m < 1 or poly[-1] % p != 1:
        return False
    for k in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if not any(_poly_mod(list(poly), low + (1,), p)):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^m) defined by a monic irreducible ``poly`` (low-to-high)."""

    p: int
    m: int
    poly: tuple[int, ...]
    _t: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        poly = tuple(int(c) % self.p if self.p else int(c) for c in self.poly)
        object.__setattr__(self, "poly", poly)
        if not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.m < 1:
            raise ValueError("extension degree must be >= 1")
        if self.p ** self.m > MAX_ORDER:
            raise ValueError(f"q = {self.p}^{self.m} exceeds {MAX_ORDER}")
        if len(poly) != self.m + 1:
            raise ValueError(f"poly must have {self.m + 1} coefficients, got {len(poly)}")
        if poly[-1] != 1:
            raise ValueError("poly must be monic")
        if not is_irreducible(poly, self.p):
            raise ValueError(f"poly {poly} is reducible over GF({self.p})")
        object.__setattr__(self, "_t", _build_tables(self.p, self.m, poly))

    # -- basic data ----------------------------------------------------
    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def dtype(self):
        return np.uint8 if self.q <= TABLE_ORDER else np.uint16

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    @property
    def digits(self) -> np.ndarray:
        """(q, m) array of polynomial-basis coordinates of every code."""
        return self._t["digits"]

    @property
    def generator(self) -> int:
        """Code of a generator of the multiplicative group."""
        return self._t["gen"]

    def __str__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.q})[{','.join(map(str, self.poly))}]"

    def describe(self) -> str:
        """The ``p,m,c0,...,cm`` string accepted by :func:`parse_field`."""
        return ",".join(map(str, (self.p, self.m) + self.poly))

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "poly": list(self.poly)}

    # -- elements ------------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            self._check(value)
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, self.encode_int(int(value)))
        return FieldElement(self, self.encode(value))

    def element(self, code: int) -> "FieldElement":
        return FieldElement(self, int(code))

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, c) for c in range(self.q)]

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def t(self) -> "FieldElement":
        """The class of the polynomial variable (a root of ``poly``)."""
        if self.m == 1:
            return self(-self.poly[0])
        return FieldElement(self, self.p)

    def encode(self, coeffs: Sequence[int]) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.m:
            coeffs = _poly_mod(coeffs, self.poly, self.p)
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + int(c) % self.p
        return code

    def encode_int(self, n: int) -> int:
        """Image of the integer n under Z -> GF(q)."""
        return n % self.p

    def decode(self, code: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self._t["digits"][code])

    def _check(self, a: "FieldElement"):
        if a.spec != self:
            raise ValueError(f"field mismatch: {a.spec} vs {self}")

    # -- scalar arithmetic on codes -------------------------------------
    def add(self, a: int, b: int) -> int:
        t = self._t
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if "add" in t:
            return int(t["add"][a, b])
        return self.encode(x + y for x, y in zip(t["digits"][a], t["digits"][b]))

    def neg(self, a: int) -> int:
        return int(self._t["neg"][a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        t = self._t
        if "mul" in t:
            return int(t["mul"][a, b])
        if a == 0 or b == 0:
            return 0
        return int(t["exp"][(int(t["log"][a]) + int(t["log"][b])) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + str(self))
        return int(self._t["inv"][a])

    def pow(self, a: int, k: int) -> int:
        if k == 0:
            return 1
        if a == 0:
            return 0
        t = self._t
        return int(t["exp"][(int(t["log"][a]) * k) % (self.q - 1)])

    def frob(self, a: int, k: int = 1) -> int:
        return self.pow(a, self.p ** (k % self.m))

    # -- vectorised arithmetic -------------------------------------------
    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        t = self._t
        if self.m == 1:
            return ((a.astype(np.int64) + b) % self.p).astype(self.dtype)
        if self.p == 2:
            return np.bitwise_xor(a, b).astype(self.dtype)
        if "add" in t:
            return t["add"][a, b]
        dg = t["digits"]
        return self.recombine((dg[a].astype(np.int64) + dg[b]) % self.p)

    def vneg(self, a) -> np.ndarray:
        return self._t["neg"][np.asarray(a)]

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        t = self._t
        if "mul" in t:
            return t["mul"][a, b]
        if self.m == 1:
            return ((a.astype(np.int64) * b) % self.p).astype(self.dtype)
        la = t["log"][a].astype(np.int64)
        lb = t["log"][b].astype(np.int64)
        out = t["exp"][(la + lb) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out).astype(self.dtype)

    def vinv(self, a) -> np.ndarray:
        return self._t["inv"][np.asarray(a)]

    def vpow(self, a, k: int) -> np.ndarray:
        a = np.asarray(a)
        if k == 0:
            return np.ones(a.shape, self.dtype)
        t = self._t
        out = t["exp"][(t["log"][a].astype(np.int64) * k) % (self.q - 1)]
        return np.where(a == 0, 0, out).astype(self.dtype)

    def power_table(self, a: int, n: int) -> np.ndarray:
        """[a^0, a^1, ..., a^n] as codes."""
        out = np.empty(n + 1, self.dtype)
        out[0] = 1
        if a == 0:
            out[1:] = 0
            return out
        t = self._t
        out[1:] = t["exp"][(int(t["log"][a]) * np.arange(1, n + 1)) % (self.q - 1)]
        return out

    def recombine(self, digits: np.ndarray) -> np.ndarray:
        """Inverse of ``digits``: last axis holds the m coordinates."""
        w = self.p ** np.arange(self.m, dtype=np.int64)
        return (np.asarray(digits, dtype=np.int64) @ w).astype(self.dtype)

    def sum_codes(self, codes: np.ndarray, axis: int = 0) -> np.ndarray:
        """Field sum of codes along ``axis``."""
        codes = np.asarray(codes)
        if self.m == 1:
            return (codes.astype(np.int64).sum(axis=axis) % self.p).astype(self.dtype)
        if self.p == 2:
            return np.bitwise_xor.reduce(codes, axis=axis).astype(self.dtype)
        dg = self._t["digits"][codes].astype(np.int64)
        return self.recombine(dg.sum(axis=axis) % self.p)


def _build_tables(p: int, m: int, poly: tuple[int, ...]) -> dict:
    q = p ** m
    dtype = np.uint8 if q <= TABLE_ORDER else np.uint16
    codes = np.arange(q, dtype=np.int64)
    digits = np.stack([(codes // p ** i) % p for i in range(m)], axis=1).astype(np.int64)
    w = p ** np.arange(m, dtype=np.int64)

    # multiplication by the class t, on coordinate vectors
    def times_t(dg):
        top = dg[..., m - 1].copy()
        shifted = np.zeros_like(dg)
        shifted[..., 1:] = dg[..., :-1]
        return (shifted - top[..., None] * np.array(poly[:m])) % p

    def mul_codes(a: int, b: int) -> int:
        acc = np.zeros(m, np.int64)
        cur = digits[a].copy()
        for i in range(m):
            acc = (acc + digits[b][i] * cur) % p
            cur = times_t(cur)
        return int(acc @ w)

    # primitive element by search: order must be q-1
    gen = None
    for g in range(1, q):
        x, order = 1, 0
        while True:
            x = mul_codes(x, g) if m > 1 else (x * g) % p
            order += 1
            if x == 1:
                break
        if order == q - 1:
            gen = g
            break
    if gen is None:  # pragma: no cover - impossible for a field
        raise ArithmeticError("no primitive element found")

    exp = np.empty(q - 1, np.int64)
    x = 1
    for i in range(q - 1):
        exp[i] = x
        x = mul_codes(x, gen) if m > 1 else (x * gen) % p
    log = np.zeros(q, np.int64)
    log[exp] = np.arange(q - 1)
    inv = np.zeros(q, np.int64)
    inv[exp] = exp[(-np.arange(q - 1)) % (q - 1)]
    neg = ((-digits) % p) @ w

    t = {
        "digits": digits,
        "gen": int(gen),
        "exp": exp.astype(dtype),
        "log": log,
        "inv": inv.astype(dtype),
        "neg": neg.astype(dtype),
    }
    if q <= TABLE_ORDER:
        la = log[:, None] + log[None, :]
        mul = exp[la % (q - 1)]
        mul[0, :] = 0
        mul[:, 0] = 0
        add = ((digits[:, None, :] + digits[None, :, :]) % p) @ w
        t["mul"] = mul.astype(dtype)
        t["add"] = add.astype(dtype)
    return t


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.decode(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ValueError(f"field mismatch: {self.spec} vs {other.spec}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.spec.encode_int(int(other))
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.add(self.code, b))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.code))

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(self.code, b))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.code, self.spec.inv(b)))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(self.spec, self.spec.pow(self.code, k))

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.spec.encode_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.spec.p, self.spec.m, self.code))

    def __repr__(self):
        if self.spec.m == 1:
            return str(self.code)
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(mono if c == 1 and mono else f"{c}{mono}")
        return "+".join(reversed(terms)) or "0"

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.code))

    def order(self) -> int:
        """Multiplicative order."""
        if self.code == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        k, x = 1, self
        while x.code != 1:
            x = x * self
            k += 1
        return k

    def to_json(self) -> list[int]:
        return list(self.coeffs)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    if a.spec != b.spec:
        raise ValueError(f"field mismatch: {a.spec} vs {b.spec}")
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def frobenius(a: FieldElement, k: int = 1) -> FieldElement:
    """a^(p^k)."""
    return FieldElement(a.spec, a.spec.frob(a.code, k))


def binom_mod_p(n: int, k: int, p: int) -> int:
    """C(n, k) mod p via Lucas' theorem."""
    if k < 0 or n < 0 or k > n:
        return 0
    out = 1
    while n or k:
        ni, ki = n % p, k % p
        if ki > ni:
            return 0
        out = out * _small_binom(ni, ki, p) % p
        n //= p
        k //= p
    return out


@lru_cache(maxsize=None)
def _small_binom(n: int, k: int, p: int) -> int:
    num = den = 1
    for i in range(k):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * pow(den, p - 2, p) % p


@lru_cache(maxsize=None)
def binom_table(p: int) -> np.ndarray:
    """(p, p) table of C(i, j) mod p for digits i, j."""
    return np.array([[_small_binom(i, j, p) if j <= i else 0 for j in range(p)]
                     for i in range(p)], dtype=np.int64)


def bracket(s: int, q: int) -> int:
    """q^s - 1."""
    if s < 0:
        raise ValueError("s must be >= 0")
    return q ** s - 1


def seq_bracket(seq: Sequence[int], q: int) -> int:
    return sum(bracket(s, q) for s in seq)


@lru_cache(maxsize=None)
def default_field(q: int) -> FieldSpec:
    if q in DEFAULT_POLYS:
        p, m, poly = DEFAULT_POLYS[q]
        return FieldSpec(p, m, poly)
    if is_prime(q):
        return FieldSpec(q, 1, (0, 1))
    for p in range(2, q + 1):
        if is_prime(p):
            m, r = 0, q
            while r % p == 0:
                r //= p
                m += 1
            if r == 1:
                for low in itertools.product(range(p), repeat=m):
                    poly = low + (1,)
                    if low[0] and is_irreducible(poly, p):
                        return FieldSpec(p, m, poly)
    raise ValueError(f"{q} is not a prime power")


def parse_field(text: str) -> FieldSpec:
    """Parse ``q``, ``p,m`` or ``p,m,c0,...,cm``."""
    try:
        parts = [int(x) for x in str(text).replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise ValueError(f"bad field description {text!r}") from None
    if len(parts) == 1:
        return default_field(parts[0])
    p, m = parts[0], parts[1]
    if len(parts) == 2:
        return default_field(p ** m) if is_prime(p) else FieldSpec(p, m, ())
    return FieldSpec(p, m, tuple(parts[2:]))
