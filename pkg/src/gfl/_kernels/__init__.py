"""Kernel dispatch: compiled core when importable, numpy otherwise.

Set ``GFL_PURE=1`` to force the numpy path at import; :func:`set_backend`
switches at runtime (used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

from . import _pure

try:
    if os.environ.get("GFL_PURE"):
        raise ImportError("GFL_PURE set")
    from . import _core
except ImportError:
    _core = None

AVAILABLE = ("cython", "python") if _core is not None else ("python",)
_active = AVAILABLE[0]


def backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in AVAILABLE:
        raise ValueError(f"backend {name!r} not available (have {AVAILABLE})")
    _active = name


@contextmanager
def using(name: str):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def _tables(spec):
    t = spec._t
    return t["add"], t["mul"], t["neg"], t["inv"]


def echelon(A: np.ndarray, spec, reduced: bool = False) -> list[int]:
    """Row-reduce ``A`` (codes, modified in place); return pivot columns."""
    if _active == "cython" and spec.q <= 256:
        add, mul, neg, inv = _tables(spec)
        A8 = np.ascontiguousarray(A, dtype=np.uint8)
        piv = _core.echelon_tab(A8, add, mul, neg, inv, reduced)
        if A8 is not A:
            A[...] = A8
        return piv
    return _pure.echelon(A, spec, reduced)


def echelon_gf2(W: np.ndarray, ncols: int, reduced: bool = False) -> list[int]:
    if _active == "cython":
        return _core.echelon_gf2(W, ncols, reduced)
    return _pure.echelon_gf2(W, ncols, reduced)


def mul_scatter(X, Y, ia, ib, ic, coef, out, spec) -> None:
    """Accumulate bilinear pair contributions into ``out`` (in place)."""
    if _active == "cython" and spec.q <= 256:
        add, mul, _, _ = _tables(spec)
        _core.mul_scatter_tab(X, Y, ia, ib, ic, coef, out, add, mul)
        return
    _pure.mul_scatter(X, Y, ia, ib, ic, coef, out, spec)
