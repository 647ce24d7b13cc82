"""Exact matrix helpers over Q(zeta_m) used by the analysis and matroid modules."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .cyclotomic import Cyclotomic, euler_phi

_INT64_SAFE = 2**62


def to_tensor(rows: Sequence[Sequence[Cyclotomic]], m: int) -> tuple[np.ndarray, int]:
    """Integer tensor T[i, j, t] and common denominator D with rows = T / D."""
    phi = euler_phi(m)
    den = math.lcm(*(z.denominator for r in rows for z in r)) if rows else 1
    big = max((abs(c) * (den // z.denominator) for r in rows for z in r for c in z.numerators), default=0)
    dtype = np.int64 if big < 2**31 else object
    t = np.zeros((len(rows), len(rows[0]) if rows else 0, phi), dtype=dtype)
    for i, r in enumerate(rows):
        for j, z in enumerate(r):
            scale = den // z.denominator
            for a, c in enumerate(z.numerators):
                if c:
                    t[i, j, a] = c * scale
    return t, den


def from_tensor(t: np.ndarray, den: int, m: int) -> list[list[Cyclotomic]]:
    out = []
    for i in range(t.shape[0]):
        row = []
        for j in range(t.shape[1]):
            row.append(Cyclotomic._raw(m, [int(x) for x in t[i, j]], den))
        out.append(row)
    return out


def matmul(a: Sequence[Sequence[Cyclotomic]], b: Sequence[Sequence[Cyclotomic]], m: int) -> list[list[Cyclotomic]]:
    """Exact product of two matrices over Q(zeta_m) via integer tensor convolution."""
    ta, da = to_tensor(a, m)
    tb, db = to_tensor(b, m)
    phi = ta.shape[2]
    inner = ta.shape[1]
    bound = int(np.abs(ta).max(initial=0)) * int(np.abs(tb).max(initial=0)) * max(inner, 1) * max(phi, 1)
    if bound >= _INT64_SAFE or ta.dtype == object or tb.dtype == object:
        ta, tb = ta.astype(object), tb.astype(object)
    # product in Z[x]/(x^m - 1), reduced once at the end
    out = np.zeros((ta.shape[0], tb.shape[1], m), dtype=ta.dtype)
    for a_exp in range(phi):
        coeff = ta[:, :, a_exp]
        if not coeff.any():
            continue
        prod = np.tensordot(coeff, tb, axes=([1], [0]))  # (r, c, phi)
        idx = (np.arange(phi) + a_exp) % m  # distinct since phi <= m
        out[:, :, idx] += prod
    return from_tensor(out, da * db, m)


def exact_rank(rows: Sequence[Sequence[Cyclotomic]]) -> int:
    """Rank by Gaussian elimination over Q(zeta_m)."""
    mat = [list(r) for r in rows]
    if not mat or not mat[0]:
        return 0
    nrows, ncols = len(mat), len(mat[0])
    rank = 0
    for c in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if not mat[i][c].is_zero():
                # prefer rational pivots, whose inverse is cheap
                if piv is None or (mat[i][c].is_rational() and not mat[piv][c].is_rational()):
                    piv = i
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = mat[rank][c].inverse()
        prow = [z * inv for z in mat[rank][c + 1 :]]
        for i in range(rank + 1, nrows):
            f = mat[i][c]
            if f.is_zero():
                continue
            tail = mat[i][c + 1 :]
            mat[i] = mat[i][: c + 1] + [t - f * pz for t, pz in zip(tail, prow)]
        rank += 1
        if rank == nrows:
            break
    return rank
