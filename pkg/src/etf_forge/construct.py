"""Exact constructions of frames, Gram matrices and triple-product tables."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclotomic import Cyclotomic, root_of_unity
from .errors import ConsistencyError, NotAnEtfError, OutOfReach
from .finite_field import (
    FieldSpec,
    Intertwiner,
    field_for_order,
    intertwiner,
    is_paley_admissible,
    is_prime,
    prime_power,
)
from .frames import FrameMatrix, GramMatrix, TripleTable

__all__ = [
    "group_elements",
    "fourier_matrix",
    "DifferenceSetVerdict",
    "is_difference_set",
    "etf_from_difference_set",
    "development",
    "paley_columns",
    "paley_etf",
    "MonomialOperator",
    "FrameSymmetry",
    "PaleySymmetryGenerators",
    "paley_symmetry_generators",
    "simplex_gram",
    "onb_gram",
    "naimark_gram",
    "conference_matrix",
    "conference_etf_gram",
    "gabor_steiner_tp_table",
]


# -- finite abelian groups Z_m1 x ... x Z_mr ------------------------------------


def _norm_orders(orders) -> tuple[int, ...]:
    if isinstance(orders, int):
        orders = (orders,)
    orders = tuple(int(m) for m in orders)
    if not orders or any(m < 2 for m in orders):
        raise ValueError(f"cyclic factor orders must be >= 2, got {orders}")
    return orders


def group_elements(orders) -> list:
    """Elements in lexicographic order; plain ints for a cyclic group."""
    orders = _norm_orders(orders)
    if len(orders) == 1:
        return list(range(orders[0]))
    return list(itertools.product(*(range(m) for m in orders)))


def _as_tuple(x, orders: tuple[int, ...]) -> tuple[int, ...]:
    t = (x,) if isinstance(x, int) else tuple(x)
    if len(t) != len(orders):
        raise ValueError(f"element {x!r} does not belong to Z_{orders}")
    return tuple(int(a) % m for a, m in zip(t, orders))


def _from_tuple(t: tuple[int, ...], orders: tuple[int, ...]):
    return t[0] if len(orders) == 1 else t


def fourier_matrix(orders) -> FrameMatrix:
    """Character table of Z_m1 x ... x Z_mr over Q(zeta_L), L = lcm of the orders."""
    orders = _norm_orders(orders)
    big = math.lcm(*orders)
    elems = [_as_tuple(x, orders) for x in group_elements(orders)]
    rows = tuple(
        tuple(root_of_unity(big, _character_exponent(x, y, orders, big)) for y in elems) for x in elems
    )
    return FrameMatrix(big, rows, tuple(_from_tuple(y, orders) for y in elems))


def _character_exponent(x, y, orders, big) -> int:
    return sum(a * b * (big // m) for a, b, m in zip(x, y, orders)) % big


# -- difference sets -------------------------------------------------------------


@dataclass(frozen=True)
class DifferenceSetVerdict:
    passed: bool
    v: int
    k: int
    lam: int | None
    tally: dict

    def __bool__(self) -> bool:
        return self.passed

    def params(self) -> tuple[int, int, int]:
        if not self.passed:
            raise ValueError("not a difference set")
        return (self.v, self.k, self.lam)


def is_difference_set(orders, subset) -> DifferenceSetVerdict:
    """Tally the k(k-1) ordered differences of ``subset``."""
    orders = _norm_orders(orders)
    elems = sorted({_as_tuple(x, orders) for x in subset})
    if not elems:
        raise ValueError("difference set candidate must be non-empty")
    v, k = math.prod(orders), len(elems)
    tally: Counter = Counter()
    for x, y in itertools.permutations(elems, 2):
        tally[tuple((a - b) % m for a, b, m in zip(x, y, orders))] += 1
    zero = (0,) * len(orders)
    nonzero = [g for g in (_as_tuple(e, orders) for e in group_elements(orders)) if g != zero]
    counts = {tally.get(g, 0) for g in nonzero}
    ok = len(counts) == 1
    lam = counts.pop() if ok else None
    return DifferenceSetVerdict(ok, v, k, lam, {_from_tuple(g, orders): tally.get(g, 0) for g in nonzero})


def etf_from_difference_set(orders, subset, verify: bool = True) -> FrameMatrix:
    """Rows of the Fourier matrix indexed by a difference set (in sorted order)."""
    from .gram_analysis import check_equiangular, check_tight, gram

    orders = _norm_orders(orders)
    verdict = is_difference_set(orders, subset)
    if not verdict:
        raise NotAnEtfError(f"{sorted(subset)} is not a difference set in Z_{orders}")
    big = math.lcm(*orders)
    rows_idx = sorted({_as_tuple(x, orders) for x in subset})
    elems = [_as_tuple(x, orders) for x in group_elements(orders)]
    rows = tuple(
        tuple(root_of_unity(big, _character_exponent(x, y, orders, big)) for y in elems) for x in rows_idx
    )
    frame = FrameMatrix(big, rows, tuple(_from_tuple(y, orders) for y in elems))
    if verify:
        g = gram(frame)
        if not (check_equiangular(g) and check_tight(g)):
            raise ConsistencyError("difference-set frame failed the ETF checks")
    return frame


def development(orders, subset):
    """All translates subset + g as blocks on the lexicographic element indices."""
    from .matroid import BlockDesign

    orders = _norm_orders(orders)
    elems = [_as_tuple(x, orders) for x in group_elements(orders)]
    where = {e: i for i, e in enumerate(elems)}
    base = [_as_tuple(x, orders) for x in subset]
    blocks = set()
    for g in elems:
        blocks.add(frozenset(where[tuple((a + b) % m for a, b, m in zip(x, g, orders))] for x in base))
    return BlockDesign.from_blocks(len(elems), blocks)


# -- Paley ETFs -------------------------------------------------------------------


def paley_columns(fld: FieldSpec) -> list[int]:
    """Column order: 0 first, then C^l e_1 for l = 0..q-2 (as element codes)."""
    return [0] + [fld.alpha_power(l) for l in range(fld.q - 1)]


def _paley_field(q: int | FieldSpec, modulus=None) -> FieldSpec:
    fld = q if isinstance(q, FieldSpec) else field_for_order(q, modulus)
    if not is_paley_admissible(fld):
        raise ValueError(f"q = {fld.q} is not 3 mod 4")
    if fld.q <= 3:
        raise ValueError("the Paley ETF needs q > 3")
    return fld


def _paley_exponents(fld: FieldSpec) -> np.ndarray:
    p, d = fld.p, (fld.q - 1) // 2
    rows = np.array([fld.coords(fld.alpha_power(2 * k)) for k in range(d)], dtype=np.int64)
    cols = np.array([fld.coords(c) for c in paley_columns(fld)], dtype=np.int64)
    return (rows @ cols.T) % p


def paley_etf(q: int | FieldSpec, modulus: Sequence[int] | None = None) -> FrameMatrix:
    """Rows C^(2k) e_1, columns y in paley_columns order, entries zeta_p^<x, y>."""
    fld = _paley_field(q, modulus)
    exps = _paley_exponents(fld)
    rows = tuple(tuple(root_of_unity(fld.p, int(e)) for e in r) for r in exps)
    labels = tuple(_hashable_label(fld, c) for c in paley_columns(fld))
    return FrameMatrix(fld.p, rows, labels)


def _hashable_label(fld: FieldSpec, code: int):
    return code if fld.s == 1 else fld.coords(code)


@dataclass(frozen=True)
class MonomialOperator:
    """A generalized permutation: (U v)_i = zeta_m^phase[i] * v[source[i]]."""

    m: int
    source: tuple[int, ...]
    phase: tuple[int, ...]

    @property
    def row_map(self) -> tuple[int, ...]:
        """Row l of the input lands in row row_map[l] of the output."""
        out = [0] * len(self.source)
        for i, s in enumerate(self.source):
            out[s] = i
        return tuple(out)

    def matrix(self) -> list[list[Cyclotomic]]:
        d = len(self.source)
        zero = Cyclotomic.zero(self.m)
        mat = [[zero] * d for _ in range(d)]
        for i, (s, ph) in enumerate(zip(self.source, self.phase)):
            mat[i][s] = root_of_unity(self.m, ph)
        return mat

    def apply(self, frame: FrameMatrix) -> FrameMatrix:
        rows = tuple(
            tuple(root_of_unity(self.m, ph) * z for z in frame.entries[s])
            for s, ph in zip(self.source, self.phase)
        )
        return FrameMatrix(frame.m, rows, frame.labels)


@dataclass(frozen=True)
class FrameSymmetry:
    """A unitary U with U phi_j = phi_perm[j] for every column j."""

    name: str
    operator: MonomialOperator
    perm: tuple[int, ...]


@dataclass(frozen=True)
class PaleySymmetryGenerators:
    field: FieldSpec
    intertwiner: Intertwiner
    modulations: tuple[FrameSymmetry, ...]  # one per b in F_q, in column order
    translation: FrameSymmetry
    galois: FrameSymmetry

    def all(self) -> tuple[FrameSymmetry, ...]:
        return (self.galois, self.translation) + self.modulations

    def permutations(self) -> list[tuple[int, ...]]:
        return [g.perm for g in self.all()]


def _induced_permutation(frame: FrameMatrix, op: MonomialOperator) -> tuple[int, ...]:
    """Find perm with U Phi = Phi P, checked entrywise in exact arithmetic."""
    image = op.apply(frame)
    where = {frame.column(j): j for j in range(frame.n)}
    perm = []
    for j in range(frame.n):
        k = where.get(image.column(j))
        if k is None:
            raise ConsistencyError(f"column {j} is not mapped to a frame vector")
        perm.append(k)
    if sorted(perm) != list(range(frame.n)):
        raise ConsistencyError("induced map on columns is not a permutation")
    return tuple(perm)


def paley_symmetry_generators(q: int | FieldSpec, modulus: Sequence[int] | None = None) -> PaleySymmetryGenerators:
    """Modulations, the cyclic row shift T and the Galois row permutation Pi.

    Each induced column permutation is recovered by exact column matching and
    compared with its closed form: y -> y + b, y -> S C^-2 S^-1 y and
    y -> S (S^-1 y)^p respectively.
    """
    fld = _paley_field(q, modulus)
    it = intertwiner(fld)
    frame = paley_etf(fld)
    p, d = fld.p, (fld.q - 1) // 2
    cols = paley_columns(fld)
    col_of = {c: j for j, c in enumerate(cols)}
    rows = [fld.coords(fld.alpha_power(2 * k)) for k in range(d)]

    def expect(fn) -> tuple[int, ...]:
        return tuple(col_of[fn(c)] for c in cols)

    mods = []
    for b in cols:
        bc = fld.coords(b)
        op = MonomialOperator(p, tuple(range(d)), tuple(sum(x * y for x, y in zip(r, bc)) % p for r in rows))
        perm = _induced_permutation(frame, op)
        if perm != expect(lambda y, b=b: fld.add(y, b)):
            raise ConsistencyError(f"modulation by {fld.label(b)} induces an unexpected permutation")
        mods.append(FrameSymmetry(f"M[{fld.label(b)}]", op, perm))

    shift = MonomialOperator(p, tuple((i - 1) % d for i in range(d)), (0,) * d)
    c_inv2 = fld.alpha_power(-2)
    perm = _induced_permutation(frame, shift)

    def t_map(y: int) -> int:
        return it.apply(fld, fld.mul(c_inv2, it.apply_inverse(fld, y)))

    if perm != expect(t_map):
        raise ConsistencyError("row shift induces an unexpected permutation")
    translation = FrameSymmetry("T", shift, perm)

    src = [0] * d
    for l in range(d):
        src[(p * l) % d] = l
    pi = MonomialOperator(p, tuple(src), (0,) * d)
    perm = _induced_permutation(frame, pi)

    def g_map(y: int) -> int:
        return it.apply(fld, fld.frobenius(it.apply_inverse(fld, y)))

    if perm != expect(g_map):
        raise ConsistencyError("Galois row permutation induces an unexpected permutation")
    galois = FrameSymmetry("Pi", pi, perm)
    return PaleySymmetryGenerators(fld, it, tuple(mods), translation, galois)


# -- simplices, bases, Naimark complements ----------------------------------------


def _int_gram(rows: Sequence[Sequence[int | Fraction]], m: int = 1) -> GramMatrix:
    entries = tuple(tuple(Cyclotomic.rational(m, x) for x in r) for r in rows)
    return GramMatrix(m, entries, tuple(range(len(rows))))


def simplex_gram(n: int) -> GramMatrix:
    """Regular simplex of n vectors in dimension n-1, scaled to diagonal n-1."""
    if n < 2:
        raise ValueError("a simplex needs n >= 2")
    return _int_gram([[n - 1 if j == k else -1 for k in range(n)] for j in range(n)])


def onb_gram(n: int) -> GramMatrix:
    if n < 1:
        raise ValueError("need n >= 1")
    return _int_gram([[int(j == k) for k in range(n)] for j in range(n)])


def naimark_gram(g: GramMatrix, a: Fraction | int | None = None) -> GramMatrix:
    """A I - G for a tight Gram with G^2 = A G."""
    from .gram_analysis import check_tight, gram_product

    if a is None:
        verdict = check_tight(g)
        if not verdict:
            raise NotAnEtfError("Naimark complement needs a tight frame")
        a = verdict.value
    a = Fraction(a)
    sq = gram_product(g, g)
    if any(sq[j][k] != g.entries[j][k] * a for j in range(g.n) for k in range(g.n)):
        raise NotAnEtfError(f"G^2 != {a} G")
    n = g.n
    entries = tuple(
        tuple((Cyclotomic.rational(g.m, a) if j == k else Cyclotomic.zero(g.m)) - g.entries[j][k] for k in range(n))
        for j in range(n)
    )
    if all(z.is_zero() for r in entries for z in r):
        raise NotAnEtfError("complement is the zero matrix (n = d)")
    out = GramMatrix(g.m, entries, g.labels)
    sq = gram_product(out, out)
    if any(sq[j][k] != entries[j][k] * a for j in range(n) for k in range(n)):
        raise ConsistencyError("Naimark complement is not tight")
    return out


# -- skew-conference ETFs -----------------------------------------------------------


def conference_matrix(q: int) -> list[list[int]]:
    """Bordered Paley tournament: index 0 is the point at infinity."""
    fld = field_for_order(q)
    n = q + 1
    sigma = [[0] * n for _ in range(n)]
    for x in range(q):
        sigma[0][x + 1] = 1
        sigma[x + 1][0] = -1
        for y in range(q):
            if x != y:
                sigma[x + 1][y + 1] = 1 if fld.is_qr((x - y) % q) else -1
    return sigma


def conference_etf_gram(q: int) -> GramMatrix:
    """G = I + (g/q) Sigma over Q(zeta_q), g = a - conj(a); n = q + 1, d = (q + 1) / 2."""
    pp = prime_power(q)
    if pp is None:
        raise ValueError(f"{q} is not a prime power")
    if q % 4 != 3:
        raise ValueError(f"q = {q} is not 3 mod 4")
    if not is_prime(q):
        raise OutOfReach(
            f"conference ETF for the prime power {q} is not supported",
            {"q": q, "reason": "quadratic Gauss element for prime powers needs a sign analysis"},
        )
    sigma = conference_matrix(q)
    n = q + 1
    for j in range(n):
        for k in range(n):
            if sigma[j][k] != -sigma[k][j]:
                raise ConsistencyError("conference matrix is not skew-symmetric")
            dot = sum(sigma[j][t] * sigma[k][t] for t in range(n))
            if dot != (q if j == k else 0):
                raise ConsistencyError("Sigma Sigma^T != q I")
    fld = field_for_order(q)
    a = Cyclotomic.zero(q)
    for t in range(1, q):
        if fld.is_qr(t):
            a = a + root_of_unity(q, t)
    g = a - a.conj()
    if g * g != -q:
        raise ConsistencyError("g^2 != -q")
    unit = g / q
    one, zero = Cyclotomic.one(q), Cyclotomic.zero(q)
    entries = tuple(
        tuple(one if j == k else (unit if sigma[j][k] == 1 else -unit) if sigma[j][k] else zero for k in range(n))
        for j in range(n)
    )
    return GramMatrix(q, entries, ("inf",) + tuple(range(q)))


# -- Gabor-Steiner triple products --------------------------------------------------


def gabor_steiner_tp_table(p: int) -> TripleTable:
    """Triple products on F_p^2 labels (k, kappa), given by the symplectic formula."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    pts = list(itertools.product(range(p), repeat=2))
    half = (p + 1) // 2
    values = {}
    for (i, x), (j, y), (k, z) in itertools.permutations(list(enumerate(pts)), 3):
        (a, al), (b, be), (c, ga) = x, y, z
        form = (a * ga - c * al) + (b * al - a * be) + (c * be - b * ga)
        values[(i, j, k)] = root_of_unity(p, form * half)
    return TripleTable(p, tuple(pts), values)
