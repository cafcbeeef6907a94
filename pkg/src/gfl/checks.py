"""Executable identities for divided powers, flags and the line maps.

Each check takes a field and a small box of parameters and returns a
:class:`CheckResult`.  The battery in :mod:`gfl.harness` runs them all; the
test suite calls them individually.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import chmorph
from .fields import FieldSpec, bracket
from .flags import flag_count
from .gamma import (all_vectors, coproduct_matrix, gamma_dim, product_matrix, product_of_powers_batch,
                    tilde_gamma_kernel, bar_gamma_kernel, truncated_count, verschiebung_p,
                    verschiebung_q)
from .linalg import MatrixFq, compose, tensor


@dataclass
class CheckResult:
    name: str
    cells: int = 0
    failures: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "cells": self.cells,
                "failures": self.failures, "rows": self.rows}


def _powers_of_all_vectors(spec: FieldSpec, d: int, degrees) -> np.ndarray:
    V = all_vectors(spec, d)
    gens = np.repeat(V[:, None, :], len(degrees), axis=1)
    return product_of_powers_batch(spec, gens, list(degrees))


def product_expansion(spec: FieldSpec, d_max: int = 3, s_max: int = 2,
                      dim_cap: int = 20000) -> CheckResult:
    """v^[s]_q equals the product of v^((p-1) p^j) over j < s m, for every v."""
    res = CheckResult("product-expansion")
    p, m = spec.p, spec.m
    for d in range(1, d_max + 1):
        for s in range(1, s_max + 1):
            n = bracket(s, spec.q)
            if gamma_dim(n, d) > dim_cap:
                continue
            lhs = _powers_of_all_vectors(spec, d, [n])
            rhs = _powers_of_all_vectors(spec, d, [(p - 1) * p ** j for j in range(s * m)])
            res.cells += 1
            if not np.array_equal(lhs, rhs):
                res.failures.append({"d": d, "s": s})
    return res


def product_vanish(spec: FieldSpec, d_max: int = 3, s_max: int = 3,
                   dim_cap: int = 20000) -> CheckResult:
    """v^[s]_q * v^i = 0 for 0 < i <= [s]_q, for every v in F^d."""
    res = CheckResult("product-vanish")
    for d in range(1, d_max + 1):
        for s in range(1, s_max + 1):
            n = bracket(s, spec.q)
            if gamma_dim(2 * n, d) > dim_cap:
                continue
            for i in range(1, n + 1):
                res.cells += 1
                if _powers_of_all_vectors(spec, d, [n, i]).any():
                    res.failures.append({"d": d, "s": s, "i": i})
    return res


def splitting_sequences(p: int, max_degree: int, max_parts: int = 3):
    """Sequences ((a_i, r_i)) with 0 < a_i, r_i increasing and a_i p^r_i < p^r_(i+1)."""
    out = []

    def rec(acc, total):
        if len(acc) >= 2:
            out.append(tuple(acc))
        if len(acc) == max_parts:
            return
        r_min = 0 if not acc else acc[-1][1] + 1
        r = r_min
        while p ** r <= max_degree - total:
            if acc and acc[-1][0] * p ** acc[-1][1] >= p ** r:
                r += 1
                continue
            a = 1
            while total + a * p ** r <= max_degree:
                rec(acc + [(a, r)], total + a * p ** r)
                a += 1
            r += 1

    rec([], 0)
    return out


def gamma_splitting(spec: FieldSpec, d_max: int = 3, max_degree: int = 20,
                    dim_cap: int = 400) -> CheckResult:
    """Product after coproduct over the degrees a_i p^r_i is the identity."""
    res = CheckResult("gamma-splitting")
    for d in range(1, d_max + 1):
        for seq in splitting_sequences(spec.p, max_degree):
            degs = [a * spec.p ** r for a, r in seq]
            if np.prod([gamma_dim(n, d) for n in degs]) > dim_cap * 50:
                continue
            N = sum(degs)
            comp = compose(product_matrix(spec, degs, d), coproduct_matrix(spec, degs, d))
            res.cells += 1
            if comp != MatrixFq.identity(spec, gamma_dim(N, d), sparse=True):
                res.failures.append({"d": d, "seq": [list(x) for x in seq]})
    return res


def _versch_tensor(spec, degs, d, kind):
    mats = [(verschiebung_p if kind == "p" else verschiebung_q)(spec, b, d) for b in degs]
    out = mats[0]
    for M in mats[1:]:
        out = tensor(out, M)
    return out


def versch_product(spec: FieldSpec, d_max: int = 2, max_degree: int = 8) -> CheckResult:
    """V o mu on (x) Gamma^beta_i: zero unless every beta_i is divisible, else mu o (x) V.

    Entries of both sides lie in the prime field, where the coefficient
    Frobenius acts trivially, so the twisted statement is a plain matrix
    equality.  Checked for V_p and for V = V_p^m.
    """
    res = CheckResult("versch-product")
    for kind, k in (("p", spec.p), ("q", spec.q)):
        for d in range(1, d_max + 1):
            for parts in (2, 3):
                for beta in itertools.product(range(max_degree + 1), repeat=parts):
                    N = sum(beta)
                    if N == 0 or N % k or N > max_degree:
                        continue
                    V = (verschiebung_p if kind == "p" else verschiebung_q)(spec, N // k, d)
                    lhs = compose(V, product_matrix(spec, beta, d))
                    divisible = all(b % k == 0 for b in beta)
                    if divisible:
                        rhs = compose(product_matrix(spec, [b // k for b in beta], d),
                                      _versch_tensor(spec, [b // k for b in beta], d, kind))
                        ok = lhs == rhs
                    else:
                        ok = lhs.is_zero()
                    res.cells += 1
                    res.rows.append({"versch": kind, "d": d, "beta": list(beta),
                                     "trivial": not divisible, "ok": bool(ok)})
                    if not ok:
                        res.failures.append({"versch": kind, "d": d, "beta": list(beta)})
    return res


def truncated_kernels(spec: FieldSpec, d_max: int = 3, n_max: int = 12) -> CheckResult:
    """Kernel dimensions of the truncation composites against exponent counts,
    and vanishing of the q-truncated kernel when d <= (n-1)/(q-1)."""
    res = CheckResult("truncated-kernels")
    q, p = spec.q, spec.p
    for d in range(1, d_max + 1):
        for n in range(0, n_max + 1):
            tq = len(tilde_gamma_kernel(spec, n, d))
            tp = len(bar_gamma_kernel(spec, n, d))
            res.cells += 1
            ok = tq == truncated_count(n, d, q) and tp == truncated_count(n, d, p)
            if n >= 1 and d * (q - 1) <= n - 1:
                ok = ok and tq == 0
            res.rows.append({"d": d, "n": n, "tilde": tq, "bar": tp})
            if not ok:
                res.failures.append({"d": d, "n": n, "tilde": tq, "bar": tp})
    return res


def qk_recursion(spec: FieldSpec, d_max: int = 3, k_max: int = 5) -> CheckResult:
    """qk(k) - qk(k-1) = dim of the q-truncated kernel in degree k(q-1);
    qk(k) = number of lines once d <= k."""
    res = CheckResult("qk-recursion")
    q = spec.q
    for d in range(1, d_max + 1):
        prev = chmorph.qk_dim(spec, 1, d)
        res.rows.append({"d": d, "k": 1, "qk": prev})
        for k in range(2, k_max + 1):
            cur = chmorph.qk_dim(spec, k, d)
            tilde = len(tilde_gamma_kernel(spec, k * (q - 1), d))
            res.cells += 1
            res.rows.append({"d": d, "k": k, "qk": cur, "tilde": tilde})
            if cur - prev != tilde:
                res.failures.append({"d": d, "k": k, "qk": cur, "prev": prev, "tilde": tilde})
            prev = cur
        for k in range(1, k_max + 1):
            if d <= k and chmorph.qk_dim(spec, k, d) != flag_count(q, d, 1):
                res.failures.append({"d": d, "k": k, "lines": flag_count(q, d, 1)})
    return res


def key_step(spec: FieldSpec, d_max: int = 3, s_max: int = 4, dim_cap: int = 20000) -> CheckResult:
    """delta o phi equals the tensor of the constant and reduced maps over the diagonal."""
    res = CheckResult("key-step")
    for d in range(1, d_max + 1):
        for r in range(2, d + 1):
            for s in chmorph.strict_sequences(r, s_max):
                if chmorph.cell_sizes(spec.q, s, d)[1] > dim_cap:
                    continue
                res.cells += 1
                if not chmorph.key_step_holds(spec, s, d):
                    res.failures.append({"d": d, "seq": list(s)})
    return res


def eta_square(spec: FieldSpec, d_max: int = 3, s_max: int = 3, dim_cap: int = 5000) -> CheckResult:
    """eta o phi_(s+) equals (phi_s (x) phi_(1..1)) o diag."""
    res = CheckResult("eta-diagram")
    for d in range(1, d_max + 1):
        for r in range(1, d + 1):
            for s in chmorph.weak_sequences(r, s_max):
                if chmorph.cell_sizes(spec.q, s.plus(), d)[1] > dim_cap:
                    continue
                lhs, rhs = chmorph.eta_diagram(spec, s, d)
                res.cells += 1
                if lhs != rhs:
                    res.failures.append({"d": d, "seq": list(s)})
    return res


def restriction_routes(spec: FieldSpec, d_max: int = 3, t_max: int = 2) -> CheckResult:
    """Direct and quotient decisions of injectivity on flags through a fixed flag agree."""
    from .flags import enumerate_flags
    res = CheckResult("restriction-routes")
    for d in range(1, d_max + 1):
        for r in range(1, d + 1):
            for t in range(1, t_max + 1):
                for phi in enumerate_flags(spec, d, r - 1):
                    res.cells += 1
                    try:
                        chmorph.restriction_test(spec, phi, t)
                    except AssertionError as exc:
                        res.failures.append({"d": d, "r": r, "t": t, "error": str(exc)})
    return res


BATTERY = (product_expansion, product_vanish, gamma_splitting, versch_product,
           truncated_kernels, qk_recursion, key_step, eta_square, restriction_routes)


def run_all(spec: FieldSpec, d_max: int = 3) -> list[CheckResult]:
    return [chk(spec, d_max=d_max) for chk in BATTERY]
