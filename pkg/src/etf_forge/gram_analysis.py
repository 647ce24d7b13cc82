"""Exact structural tests on Gram data and the label tables used by the symmetry search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import _linalg
from .cyclotomic import Cyclotomic, lift, root_of_unity
from .errors import NotAnEtfError
from .finite_field import FieldSpec, Intertwiner, intertwiner
from .frames import FrameMatrix, GramMatrix, TripleTable

__all__ = [
    "Verdict",
    "PairLabelTable",
    "TripleLabelTable",
    "gram",
    "gram_product",
    "check_equal_norm",
    "check_equiangular",
    "check_tight",
    "require_etf",
    "exact_rank",
    "triple_product",
    "pair_labels",
    "triple_labels",
    "paley_tp_class",
    "switching_equivalent_aligned",
    "check_3c_uniform",
    "triple_table_from_gram",
]

exact_rank = _linalg.exact_rank


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, Cyclotomic):
        return v.to_json()
    return v


@dataclass(frozen=True)
class Verdict:
    check: str
    passed: bool
    value: Any = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "value": _jsonable(self.value),
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
        }


# -- Gram construction -----------------------------------------------------


def _root_exponents(frame: FrameMatrix) -> list[list[int]] | None:
    """Exponents e with entry = zeta_m^e, or None if some entry is not a root of unity."""
    lookup = {root_of_unity(frame.m, k): k for k in range(frame.m)}
    out = []
    for row in frame.entries:
        r = []
        for z in row:
            e = lookup.get(z)
            if e is None:
                return None
            r.append(e)
        out.append(r)
    return out


def gram(frame: FrameMatrix, require_equal_norm: bool = True) -> GramMatrix:
    """G[j][k] = sum_i Phi[i][j] * conj(Phi[i][k])."""
    m, n = frame.m, frame.n
    exps = _root_exponents(frame)
    if exps is not None:
        # sum of roots of unity: tally exponents, reduce once per entry
        cols = list(zip(*exps))
        rows = []
        for j in range(n):
            row = []
            for k in range(n):
                poly = [0] * m
                for a, b in zip(cols[j], cols[k]):
                    poly[(a - b) % m] += 1
                row.append(Cyclotomic._raw(m, poly, 1))
            rows.append(tuple(row))
        entries = tuple(rows)
    else:
        phi_t = [list(r) for r in zip(*frame.entries)]  # n x d
        conj = [[z.conj() for z in r] for r in frame.entries]  # d x n
        entries = tuple(tuple(r) for r in _linalg.matmul(phi_t, conj, m))
    g = GramMatrix(m, entries, frame.labels)
    if require_equal_norm and not check_equal_norm(g):
        raise NotAnEtfError("frame vectors do not all have the same norm")
    return g


def gram_product(g1: GramMatrix, g2: GramMatrix) -> list[list[Cyclotomic]]:
    return _linalg.matmul(g1.entries, g2.entries, g1.m)


# -- verdicts ----------------------------------------------------------------


def check_equal_norm(g: GramMatrix) -> Verdict:
    diag = g.diagonal()
    ok = all(z == diag[0] for z in diag) and diag[0].is_rational() and diag[0].to_fraction() > 0
    return Verdict("equal_norm", ok, diag[0].to_fraction() if diag[0].is_rational() else None)


def check_equiangular(g: GramMatrix) -> Verdict:
    """Pass iff every off-diagonal |G[j][k]|^2 is one constant; value is that constant."""
    if not check_equal_norm(g):
        return Verdict("equiangular", False, None, {"reason": "unequal norms"})
    n = g.n
    if n < 2:
        return Verdict("equiangular", True, None)
    cache: dict[Cyclotomic, Cyclotomic] = {}
    common = None
    for j in range(n):
        for k in range(j + 1, n):
            z = g.entries[j][k]
            sq = cache.get(z)
            if sq is None:
                sq = cache[z] = z * z.conj()
            if common is None:
                common = sq
            elif sq != common:
                return Verdict("equiangular", False, None, {"witness": [j, k]})
    return Verdict("equiangular", True, common.to_fraction() if common.is_rational() else common)


def check_tight(g: GramMatrix) -> Verdict:
    """Pass iff G^2 = A G with A = tr(G^2) / tr(G); reports A and rank.

    When G^2 = A G holds, G / A is an orthogonal projection, so its rank equals
    its trace; the reported rank is tr(G) / A, which is exact.
    """
    n = g.n
    tr = sum((g.entries[i][i] for i in range(n)), Cyclotomic.zero(g.m))
    if tr.is_zero():
        return Verdict("tight", False, None, {"reason": "zero trace"})
    sq = gram_product(g, g)
    tr2 = sum((sq[i][i] for i in range(n)), Cyclotomic.zero(g.m))
    a = tr2 / tr
    ok = all(sq[j][k] == a * g.entries[j][k] for j in range(n) for k in range(n))
    if not ok:
        return Verdict("tight", False, None)
    if not (a.is_rational() and tr.is_rational()):
        return Verdict("tight", False, None, {"reason": "irrational frame bound"})
    rank = tr.to_fraction() / a.to_fraction()
    if rank.denominator != 1:  # pragma: no cover - impossible for a projection
        return Verdict("tight", False, None, {"reason": "non-integral trace of projection"})
    return Verdict("tight", True, a.to_fraction(), {"rank": int(rank)})


def require_etf(g: GramMatrix) -> tuple[Verdict, Verdict]:
    eq = check_equiangular(g)
    if not eq:
        raise NotAnEtfError("input Gram is not equiangular")
    ti = check_tight(g)
    if not ti:
        raise NotAnEtfError("input Gram is not tight")
    return eq, ti


# -- triple products and label tables ---------------------------------------


def triple_product(g: GramMatrix, j: int, k: int, l: int) -> Cyclotomic:
    if len({j, k, l}) != 3:
        raise ValueError(f"triple product needs distinct indices, got {(j, k, l)}")
    e = g.entries
    return e[j][k] * e[k][l] * e[l][j]


def triple_table_from_gram(g: GramMatrix) -> TripleTable:
    values = {t: triple_product(g, *t) for t in itertools.permutations(range(g.n), 3)}
    return TripleTable(g.m, g.labels, values)


@dataclass(frozen=True)
class PairLabelTable:
    """Off-diagonal Gram entries as small integers; labels[j*n + k], -1 on the diagonal."""

    n: int
    labels: tuple[int, ...]
    values: tuple[Cyclotomic, ...]
    conj: tuple[int, ...]

    def label(self, j: int, k: int) -> int:
        return self.labels[j * self.n + k]

    def negated(self) -> PairLabelTable:
        return PairLabelTable(self.n, self.labels, tuple(-v for v in self.values), self.conj)


@dataclass(frozen=True)
class TripleLabelTable:
    """Triple products as small integers; labels[(j*n + k)*n + l], -1 on repeated indices."""

    n: int
    labels: tuple[int, ...]
    values: tuple[Cyclotomic, ...]
    conj: tuple[int, ...]

    def label(self, j: int, k: int, l: int) -> int:
        return self.labels[(j * self.n + k) * self.n + l]


def _conj_map(values: Sequence[Cyclotomic], index: dict) -> tuple[int, ...]:
    out = []
    for v in values:
        c = index.get(v.conj())
        if c is None:
            raise ValueError("label set is not closed under conjugation")
        out.append(c)
    return tuple(out)


def pair_labels(g: GramMatrix) -> PairLabelTable:
    n = g.n
    index: dict[Cyclotomic, int] = {}
    values: list[Cyclotomic] = []
    labels = [-1] * (n * n)
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            z = g.entries[j][k]
            lab = index.get(z)
            if lab is None:
                lab = index[z] = len(values)
                values.append(z)
            labels[j * n + k] = lab
    return PairLabelTable(n, tuple(labels), tuple(values), _conj_map(values, index))


def triple_labels(src: GramMatrix | TripleTable) -> TripleLabelTable:
    """Label every ordered distinct triple by its exact triple product."""
    n = src.n
    index: dict[Cyclotomic, int] = {}
    values: list[Cyclotomic] = []
    labels = [-1] * (n * n * n)

    def label_of(z: Cyclotomic) -> int:
        lab = index.get(z)
        if lab is None:
            lab = index[z] = len(values)
            values.append(z)
        return lab

    if isinstance(src, GramMatrix):
        pt = pair_labels(src)
        pl = pt.labels
        memo: dict[tuple[int, int, int], int] = {}
        for j, k, l in itertools.permutations(range(n), 3):
            key = (pl[j * n + k], pl[k * n + l], pl[l * n + j])
            lab = memo.get(key)
            if lab is None:
                v = pt.values
                lab = memo[key] = label_of(v[key[0]] * v[key[1]] * v[key[2]])
            labels[(j * n + k) * n + l] = lab
    else:
        for (j, k, l), z in sorted(src.values.items()):
            labels[(j * n + k) * n + l] = label_of(z)
    return TripleLabelTable(n, tuple(labels), tuple(values), _conj_map(values, index))


# -- Paley triple-product classes --------------------------------------------


def paley_tp_class(
    fld: FieldSpec, j: int, k: int, l: int, it: Intertwiner | None = None
) -> str:
    """Class of the triple of field elements (codes) by residuosity of differences.

    A difference y counts as a residue when S^{-1} y is a quadratic residue; for
    prime fields S is the identity.  The letters list j-k, k-l, l-j in sorted
    order, e.g. "QQN".
    """
    if len({j, k, l}) != 3:
        raise ValueError("paley_tp_class needs distinct elements")
    if it is None:
        it = intertwiner(fld)
    count = 0
    for x, y in ((j, k), (k, l), (l, j)):
        diff = fld.sub(x, y)
        if fld.is_qr(it.apply_inverse(fld, diff)):
            count += 1
    return "Q" * count + "N" * (3 - count)


def paley_class_values(a: Cyclotomic) -> dict[str, Cyclotomic]:
    """Triple-product value of each class in terms of a = sum of zeta^t over residues."""
    ab = a.conj()
    n2 = a * ab
    return {"QQQ": a * a * a, "QQN": n2 * a, "QNN": n2 * ab, "NNN": ab * ab * ab}


# -- switching equivalence and 3_c-uniformity --------------------------------


def _common_order(g1: GramMatrix, g2: GramMatrix) -> tuple[GramMatrix, GramMatrix]:
    if g1.m == g2.m:
        return g1, g2
    m = math.lcm(g1.m, g2.m)
    return g1.map(lambda z: lift(z, m), m), g2.map(lambda z: lift(z, m), m)


def switching_equivalent_aligned(g1: GramMatrix, g2: GramMatrix) -> bool:
    """True iff the triple products agree under the identity index correspondence."""
    if g1.n != g2.n:
        raise ValueError(f"sizes differ: {g1.n} vs {g2.n}")
    require_etf(g1)
    require_etf(g2)
    g1, g2 = _common_order(g1, g2)
    for j, k, l in itertools.combinations(range(g1.n), 3):
        if triple_product(g1, j, k, l) != triple_product(g2, j, k, l):
            return False
    return True


def check_3c_uniform(g: GramMatrix) -> Verdict:
    """Pass iff TP + conj(TP) is constant over all triples; value is that constant."""
    require_etf(g)
    tl = triple_labels(g)
    reals = {v + v.conj() for v in tl.values}
    ok = len(reals) <= 1
    value = next(iter(reals)) if ok and reals else None
    if value is not None and value.is_rational():
        value = value.to_fraction()
    return Verdict(
        "3c_uniform",
        ok,
        value,
        {"purely_imaginary": all((v + v.conj()).is_zero() for v in tl.values)},
    )
