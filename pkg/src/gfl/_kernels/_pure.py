"""Numpy implementations of the hot kernels; always available."""

from __future__ import annotations

import numpy as np


def echelon(A: np.ndarray, spec, reduced: bool) -> list[int]:
    """In-place row echelon form over ``spec``; returns pivot columns."""
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        a = int(A[r, c])
        if a != 1:
            A[r, c:] = spec.vmul(spec.inv(a), A[r, c:])
        if reduced:
            rows = np.flatnonzero(A[:, c])
            rows = rows[rows != r]
        else:
            rows = r + 1 + np.flatnonzero(A[r + 1:, c])
        if rows.size:
            f = spec.vneg(A[rows, c])
            prow = A[r, c:]
            A[rows, c:] = spec.vadd(A[rows, c:], spec.vmul(f[:, None], prow[None, :]))
        pivots.append(c)
        r += 1
    return pivots


def echelon_gf2(W: np.ndarray, ncols: int, reduced: bool) -> list[int]:
    """In-place echelon form of packed GF(2) rows."""
    m = W.shape[0]
    pivots: list[int] = []
    r = 0
    one = np.uint64(1)
    for c in range(ncols):
        if r == m:
            break
        w = c >> 6
        bit = one << np.uint64(c & 63)
        nz = np.flatnonzero(W[r:, w] & bit)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            W[[r, i]] = W[[i, r]]
        if reduced:
            rows = np.flatnonzero(W[:, w] & bit)
            rows = rows[rows != r]
        else:
            rows = r + 1 + np.flatnonzero(W[r + 1:, w] & bit)
        if rows.size:
            W[rows, w:] ^= W[r, w:]
        pivots.append(c)
        r += 1
    return pivots


def mul_scatter(X, Y, ia, ib, ic, coef, out, spec, chunk: int = 1 << 22) -> None:
    """out[t, ic[k]] += coef[k] * X[t, ia[k]] * Y[t, ib[k]]; ``ic`` sorted."""
    npairs = ia.shape[0]
    if npairs == 0:
        return
    starts = np.flatnonzero(np.r_[True, ic[1:] != ic[:-1]])
    targets = ic[starts]
    rows = max(1, chunk // npairs)
    for t0 in range(0, X.shape[0], rows):
        xs = X[t0:t0 + rows, ia]
        ys = Y[t0:t0 + rows, ib]
        v = spec.vmul(coef[None, :], spec.vmul(xs, ys))
        if spec.m == 1:
            s = np.add.reduceat(v.astype(np.int64), starts, axis=1) % spec.p
            acc = s.astype(spec.dtype)
        elif spec.p == 2:
            acc = np.bitwise_xor.reduceat(v, starts, axis=1)
        else:
            dg = spec.digits[v]
            s = np.add.reduceat(dg, starts, axis=1) % spec.p
            acc = spec.recombine(s)
        blk = out[t0:t0 + rows]
        blk[:, targets] = spec.vadd(blk[:, targets], acc)
