"""Permutation groups and automorphism search over pair/triple label tables."""

from __future__ import annotations

import itertools
import math
import sys
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BudgetExceeded
from .finite_field import FieldSpec, Intertwiner, is_prime
from .gram_analysis import PairLabelTable, TripleLabelTable

__all__ = [
    "Permutation",
    "PermGroup",
    "identity",
    "compose",
    "inverse",
    "cycle_notation",
    "symmetric_group",
    "vector_symmetry_group",
    "line_symmetry_group",
    "find_tp_isomorphism",
    "agl_subgroup",
    "asp_group",
    "is_k_transitive",
    "is_k_homogeneous",
    "k_tuple_orbit_size",
    "k_subset_orbit_size",
    "cycles",
    "groups_equal",
    "is_subgroup",
    "DEFAULT_ELEMENT_CAP",
    "DEFAULT_SEARCH_BUDGET",
]

DEFAULT_ELEMENT_CAP = 10**7
DEFAULT_ORBIT_CAP = 10**6
DEFAULT_SEARCH_BUDGET = 5 * 10**6

Permutation = tuple  # images: Permutation[x] is the image of x


def identity(n: int) -> Permutation:
    return tuple(range(n))


def compose(a: Sequence[int], b: Sequence[int]) -> Permutation:
    """a then b: x -> b[a[x]]."""
    return tuple(b[x] for x in a)


def inverse(a: Sequence[int]) -> Permutation:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def is_permutation(a: Sequence[int]) -> bool:
    return sorted(a) == list(range(len(a)))


def cycles(a: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(a)
    out = []
    for start in range(len(a)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = a[x]
        out.append(tuple(cyc))
    return out


def cycle_notation(a: Sequence[int], fixed: bool = True) -> str:
    return "".join(
        "(" + " ".join(map(str, c)) + ")" for c in cycles(a) if fixed or len(c) > 1
    ) or "()"


# -- Schreier-Sims with the natural base n-1, ..., 0 ---------------------------------
# Level k holds a transversal of the pointwise stabilizer of {k+1, ..., n-1} modulo
# that of {k, ..., n-1}; generators enter at the top level and Schreier generators
# descend one level at a time, so each level's generators generate its group.


class _SimsTable:
    def __init__(self, n: int, gens: Iterable[Sequence[int]]):
        self.n = n
        self.ident = identity(n)
        self.trans: list[dict[int, Permutation]] = [{k: self.ident} for k in range(n)]
        self.strong: list[list[Permutation]] = [[] for _ in range(n)]
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 20000))
        try:
            for g in gens:
                self._add(n - 1, tuple(g))
        finally:
            sys.setrecursionlimit(old)

    def sift(self, g: Sequence[int], k: int | None = None) -> tuple[Permutation, int]:
        """Reduce g through levels k..0; returns the residue and the failing level (-1 if none)."""
        g = tuple(g)
        if k is None:
            k = self.n - 1
        for i in range(k, -1, -1):
            j = g[i]
            if j == i:
                continue
            u = self.trans[i].get(j)
            if u is None:
                return g, i
            g = compose(g, inverse(u))
        return g, -1

    def _contains(self, k: int, g: Permutation) -> bool:
        return self.sift(g, k)[1] == -1

    def _add(self, k: int, g: Permutation) -> None:
        if k < 0 or self._contains(k, g):
            return
        self.strong[k].append(g)
        for s in list(self.trans[k].values()):
            self._b(k, compose(s, g))

    def _b(self, k: int, g: Permutation) -> None:
        j = g[k]
        u = self.trans[k].get(j)
        if u is not None:
            self._add(k - 1, compose(g, inverse(u)))
        else:
            self.trans[k][j] = g
            for t in list(self.strong[k]):
                self._b(k, compose(g, t))

    def order(self) -> int:
        return math.prod(len(t) for t in self.trans)

    def contains(self, g: Sequence[int]) -> bool:
        return self.sift(g)[1] == -1


@dataclass
class PermGroup:
    """A permutation group on {0, ..., n-1} given by generators.

    ``order`` is computed by Schreier-Sims unless supplied by the automorphism
    search (which derives it from orbit sizes along its stabilizer chain).
    """

    n: int
    generators: tuple[Permutation, ...]
    known_order: int | None = None
    is_full_symmetric: bool = False
    search_info: dict = field(default_factory=dict, compare=False)
    _sims: _SimsTable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        gens = set()
        for g in self.generators:
            g = tuple(int(x) for x in g)
            if len(g) != self.n or not is_permutation(g):
                raise ValueError(f"not a permutation of {self.n} points: {g}")
            if g != identity(self.n):
                gens.add(g)
        self.generators = tuple(sorted(gens))

    @property
    def sims(self) -> _SimsTable:
        if self._sims is None:
            self._sims = _SimsTable(self.n, self.generators)
        return self._sims

    @property
    def order(self) -> int:
        if self.known_order is not None:
            return self.known_order
        return self.sims.order()

    def schreier_sims_order(self) -> int:
        return self.sims.order()

    def contains(self, g: Sequence[int]) -> bool:
        if len(g) != self.n:
            return False
        if self.is_full_symmetric:
            return is_permutation(g)
        return self.sims.contains(g)

    def __contains__(self, g) -> bool:
        return self.contains(g)

    def elements(self, cap: int = DEFAULT_ELEMENT_CAP) -> set[Permutation]:
        """Materialize by closure under the generators."""
        if self.order > cap:
            raise BudgetExceeded(f"group order {self.order} exceeds element cap {cap}", {"order": self.order})
        ident = identity(self.n)
        seen = {ident}
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def orbit(self, point: int) -> set[int]:
        seen = {point}
        queue = deque([point])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def orbits(self) -> list[tuple[int, ...]]:
        out, seen = [], set()
        for x in range(self.n):
            if x not in seen:
                o = self.orbit(x)
                seen |= o
                out.append(tuple(sorted(o)))
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "generators": [list(g) for g in self.generators],
        }


def symmetric_group(n: int) -> PermGroup:
    gens = []
    if n >= 2:
        gens.append((1, 0) + tuple(range(2, n)))
    if n >= 3:
        gens.append(tuple(range(1, n)) + (0,))
    return PermGroup(n, tuple(gens), known_order=math.factorial(n), is_full_symmetric=True)


# -- orbits of tuples and subsets ---------------------------------------------------


def _orbit_size(group: PermGroup, start, act, target: int, cap: int) -> int:
    if target > cap:
        raise BudgetExceeded(f"orbit of size up to {target} exceeds the cap {cap}", {"target": target})
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in group.generators:
            y = act(g, x)
            if y not in seen:
                seen.add(y)
                if len(seen) == target:
                    return target
                queue.append(y)
    return len(seen)


def k_tuple_orbit_size(group: PermGroup, k: int, cap: int = DEFAULT_ORBIT_CAP) -> int:
    start = tuple(range(k))
    target = math.perm(group.n, k)
    return _orbit_size(group, start, lambda g, t: tuple(g[x] for x in t), target, cap)


def k_subset_orbit_size(group: PermGroup, k: int, cap: int = DEFAULT_ORBIT_CAP) -> int:
    start = tuple(range(k))
    target = math.comb(group.n, k)
    return _orbit_size(group, start, lambda g, t: tuple(sorted(g[x] for x in t)), target, cap)


def is_k_transitive(group: PermGroup, k: int, cap: int = DEFAULT_ORBIT_CAP) -> bool:
    if not 0 <= k <= group.n:
        raise ValueError(f"k = {k} outside 0..{group.n}")
    target = math.perm(group.n, k)
    if group.is_full_symmetric or target <= 1:
        return True
    if group.order < target:
        return False
    return k_tuple_orbit_size(group, k, cap) == target


def is_k_homogeneous(group: PermGroup, k: int, cap: int = DEFAULT_ORBIT_CAP) -> bool:
    if not 0 <= k <= group.n:
        raise ValueError(f"k = {k} outside 0..{group.n}")
    target = math.comb(group.n, k)
    if group.is_full_symmetric or target <= 1:
        return True
    if group.order < target:
        return False
    return k_subset_orbit_size(group, k, cap) == target


def is_subgroup(g1: PermGroup, g2: PermGroup) -> bool:
    """True iff g1 <= g2."""
    if g1.n != g2.n:
        raise ValueError("groups act on different point sets")
    return all(g2.contains(g) for g in g1.generators)


def groups_equal(g1: PermGroup, g2: PermGroup) -> bool:
    return g1.n == g2.n and g1.order == g2.order and is_subgroup(g1, g2)


# -- predicted groups ----------------------------------------------------------------


def agl_subgroup(fld: FieldSpec, conjugate_by: Intertwiner | None = None) -> PermGroup:
    """x -> m x^sigma + b (m a residue) on the Paley column order.

    With ``conjugate_by`` = S each map f is replaced by y -> S f(S^-1 y), the
    form in which the group acts on the columns of the Paley frame.
    """
    from .construct import paley_columns

    cols = paley_columns(fld)
    where = {c: i for i, c in enumerate(cols)}
    alpha2 = fld.alpha_power(2)
    maps = [lambda x, b=fld.p**i: fld.add(x, b) for i in range(fld.s)]
    maps.append(lambda x: fld.mul(alpha2, x))
    if fld.s > 1:
        maps.append(fld.frobenius)

    def conj(f):
        if conjugate_by is None:
            return f
        return lambda y: conjugate_by.apply(fld, f(conjugate_by.apply_inverse(fld, y)))

    gens = [tuple(where[conj(f)(c)] for c in cols) for f in maps]
    group = PermGroup(fld.q, tuple(gens))
    expected = fld.q * ((fld.q - 1) // 2) * fld.s
    if group.order != expected:
        raise AssertionError(f"AGammaL subgroup has order {group.order}, expected {expected}")
    return group


def asp_group(p: int) -> PermGroup:
    """x -> M x + b on F_p^2 with M in SL(2, p); points (k, kappa) in lexicographic order."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    pts = list(itertools.product(range(p), repeat=2))
    where = {x: i for i, x in enumerate(pts)}

    def affine(mat, b):
        (a, bb), (c, d) = mat
        return tuple(
            where[((a * x + bb * y + b[0]) % p, (c * x + d * y + b[1]) % p)] for x, y in pts
        )

    ident = ((1, 0), (0, 1))
    gens = [
        affine(ident, (1, 0)),
        affine(ident, (0, 1)),
        affine(((1, 1), (0, 1)), (0, 0)),
        affine(((1, 0), (1, 1)), (0, 0)),
    ]
    group = PermGroup(p * p, tuple(gens))
    expected = p * p * p * (p * p - 1)
    if group.order != expected:
        raise AssertionError(f"ASp(2,{p}) has order {group.order}, expected {expected}")
    return group


# -- the automorphism search -------------------------------------------------------


class _Fail(Exception):
    pass


class _Engine:
    """Backtracking over images with bitmask candidate sets.

    Source colourings (pairA, tripA) describe the domain; target colourings
    (pairB, tripB) the codomain.  A solution is a bijection s with
    pairB[s(j)][s(k)] = pairA[j][k] and, in triple mode, the same for triples.
    """

    def __init__(self, n, pairA, pairB, tripA, tripB, vcolA, vcolB, budget):
        self.n = n
        self.pairA, self.pairB = pairA, pairB
        self.tripA, self.tripB = tripA, tripB
        self.budget = budget
        self.nodes = 0
        self.pmask = []
        for x in range(n):
            d: dict[int, int] = {}
            for y in range(n):
                if y != x:
                    d[pairB[x][y]] = d.get(pairB[x][y], 0) | (1 << y)
            self.pmask.append(d)
        self.tmask = None
        if tripB is not None:
            self.tmask = []
            for x in range(n):
                for y in range(n):
                    d = {}
                    if x != y:
                        base = (x * n + y) * n
                        for z in range(n):
                            if z != x and z != y:
                                lab = tripB[base + z]
                                d[lab] = d.get(lab, 0) | (1 << z)
                    self.tmask.append(d)
        by_colour: dict = {}
        for x in range(n):
            by_colour[vcolB[x]] = by_colour.get(vcolB[x], 0) | (1 << x)
        self.initial = [by_colour.get(vcolA[j], 0) for j in range(n)]

    # state: (cand list, img list, used mask, placed list)

    def start(self):
        return (list(self.initial), [-1] * self.n, 0, [])

    def place(self, state, a: int, x: int):
        cand, img, used, placed = state
        if not (cand[a] >> x) & 1 or (used >> x) & 1:
            raise _Fail
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded {self.budget} nodes", {"nodes": self.nodes})
        img[a] = x
        used |= 1 << x
        cand[a] = 1 << x
        pa = self.pairA[a]
        pm = self.pmask[x]
        trip = self.tripA is not None
        n = self.n
        for j in range(n):
            if img[j] >= 0:
                continue
            c = cand[j] & ~used & pm.get(pa[j], 0)
            if trip and c:
                for b in placed:
                    c &= self.tmask[img[b] * n + x].get(self.tripA[(b * n + a) * n + j], 0)
                    if not c:
                        break
            if not c:
                raise _Fail
            cand[j] = c
        placed = placed + [a]
        return (cand, img, used, placed)

    def propagate(self, state):
        while True:
            cand, img = state[0], state[1]
            forced = None
            for j in range(self.n):
                if img[j] < 0 and cand[j].bit_count() == 1:
                    forced = j
                    break
            if forced is None:
                return state
            state = self.place(state, forced, cand[forced].bit_length() - 1)

    @staticmethod
    def copy(state):
        return (list(state[0]), list(state[1]), state[2], state[3])

    def choose(self, state) -> int | None:
        cand, img = state[0], state[1]
        best, best_count = None, None
        for j in range(self.n):
            if img[j] < 0:
                c = cand[j].bit_count()
                if best is None or c < best_count:
                    best, best_count = j, c
        return best

    def extend(self, state, a: int, x: int):
        """A complete solution extending state with a -> x, or None."""
        try:
            st = self.propagate(self.place(self.copy(state), a, x))
        except _Fail:
            return None
        return self._dfs(st)

    def _dfs(self, state):
        j = self.choose(state)
        if j is None:
            perm = tuple(state[1])
            return perm if self.verify(perm) else None
        c = state[0][j]
        while c:
            low = c & -c
            x = low.bit_length() - 1
            c ^= low
            try:
                st = self.propagate(self.place(self.copy(state), j, x))
            except _Fail:
                continue
            res = self._dfs(st)
            if res is not None:
                return res
        return None

    def verify(self, perm) -> bool:
        n = self.n
        for j in range(n):
            pj = perm[j]
            for k in range(n):
                if j != k and self.pairB[pj][perm[k]] != self.pairA[j][k]:
                    return False
        if self.tripA is not None:
            for j, k, l in itertools.permutations(range(n), 3):
                if self.tripB[(perm[j] * n + perm[k]) * n + perm[l]] != self.tripA[(j * n + k) * n + l]:
                    return False
        return True


def _colour_ids(keys: list) -> list[int]:
    index: dict = {}
    return [index.setdefault(k, len(index)) for k in keys]


def _pair_structure(n: int, labels: Sequence[int]) -> tuple[list[list[int]], list]:
    pair = [[labels[j * n + k] if j != k else -1 for k in range(n)] for j in range(n)]
    vcol = [tuple(sorted(Counter(r).items())) for r in pair]
    return pair, vcol


def _triple_structure(n: int, labels: Sequence[int]):
    """Pair invariant: multiset of triple labels over the third index."""
    keys = []
    for j in range(n):
        row = []
        for k in range(n):
            if j == k:
                row.append(None)
            else:
                base = (j * n + k) * n
                row.append(tuple(sorted(Counter(labels[base + l] for l in range(n) if l != j and l != k).items())))
        keys.append(row)
    return keys


class _Shared:
    """Maps arbitrary hashable keys to ints consistently across two tables."""

    def __init__(self):
        self.index: dict = {}

    def __call__(self, key) -> int:
        return self.index.setdefault(key, len(self.index))


def _engine_for_pairs(t1: PairLabelTable, t2: PairLabelTable, budget: int) -> _Engine:
    n = t1.n
    ids = _Shared()
    lab1 = [ids(t1.values[x]) if x >= 0 else -1 for x in t1.labels]
    lab2 = [ids(t2.values[x]) if x >= 0 else -1 for x in t2.labels]
    pa, va = _pair_structure(n, lab1)
    pb, vb = _pair_structure(n, lab2)
    vid = _Shared()
    return _Engine(n, pa, pb, None, None, [vid(v) for v in va], [vid(v) for v in vb], budget)


def _engine_for_triples(t1: TripleLabelTable, t2: TripleLabelTable, budget: int) -> _Engine:
    n = t1.n
    ids = _Shared()
    lab1 = [ids(t1.values[x]) if x >= 0 else -1 for x in t1.labels]
    lab2 = [ids(t2.values[x]) if x >= 0 else -1 for x in t2.labels]
    k1, k2 = _triple_structure(n, lab1), _triple_structure(n, lab2)
    pid = _Shared()
    pa = [[pid(k) if k is not None else -1 for k in row] for row in k1]
    pb = [[pid(k) if k is not None else -1 for k in row] for row in k2]
    vid = _Shared()
    va = [vid(tuple(sorted(Counter(r).items()))) for r in pa]
    vb = [vid(tuple(sorted(Counter(r).items()))) for r in pb]
    return _Engine(n, pa, pb, lab1, lab2, va, vb, budget)


def _orbit_of(point: int, gens: Sequence[Permutation]) -> set[int]:
    seen = {point}
    queue = deque([point])
    while queue:
        x = queue.popleft()
        for g in gens:
            if g[x] not in seen:
                seen.add(g[x])
                queue.append(g[x])
    return seen


def _automorphism_group(engine: _Engine) -> PermGroup:
    n = engine.n
    gens: list[Permutation] = []
    levels = []  # (base point, state before placing it)
    try:
        state = engine.propagate(engine.start())
        while True:
            b = engine.choose(state)
            if b is None:
                break
            levels.append((b, engine.copy(state)))
            state = engine.propagate(engine.place(state, b, b))
        orbit_sizes = [0] * len(levels)
        for i in range(len(levels) - 1, -1, -1):
            b, st = levels[i]
            prefix = [lv[0] for lv in levels[:i]]
            stab = [g for g in gens if all(g[x] == x for x in prefix)]
            orbit = _orbit_of(b, stab)
            c = st[0][b]
            while c:
                low = c & -c
                x = low.bit_length() - 1
                c ^= low
                if x in orbit:
                    continue
                perm = engine.extend(st, b, x)
                if perm is not None:
                    gens.append(perm)
                    stab.append(perm)
                    orbit = _orbit_of(b, stab)
            orbit_sizes[i] = len(orbit)
    except BudgetExceeded as exc:
        exc.report.update({"partial_generators": [list(g) for g in sorted(gens)], "nodes": engine.nodes})
        raise
    info = {
        "base": [lv[0] for lv in levels],
        "orbit_sizes": orbit_sizes,
        "nodes": engine.nodes,
    }
    return PermGroup(n, tuple(gens), known_order=math.prod(orbit_sizes), search_info=info)


def vector_symmetry_group(t: PairLabelTable, budget: int = DEFAULT_SEARCH_BUDGET) -> PermGroup:
    """All permutations preserving every off-diagonal Gram entry."""
    if len(set(x for x in t.labels if x >= 0)) <= 1:
        return symmetric_group(t.n)
    return _automorphism_group(_engine_for_pairs(t, t, budget))


def line_symmetry_group(t: TripleLabelTable, budget: int = DEFAULT_SEARCH_BUDGET) -> PermGroup:
    """All permutations preserving every triple product."""
    if t.n < 3 or len(set(x for x in t.labels if x >= 0)) <= 1:
        return symmetric_group(t.n)
    return _automorphism_group(_engine_for_triples(t, t, budget))


def find_tp_isomorphism(
    t1: TripleLabelTable, t2: TripleLabelTable, budget: int = DEFAULT_SEARCH_BUDGET
) -> Permutation | None:
    """sigma with t2(sigma j, sigma k, sigma l) = t1(j, k, l) for all triples, or None."""
    if t1.n != t2.n:
        raise ValueError(f"sizes differ: {t1.n} vs {t2.n}")
    n = t1.n
    if n < 3:
        return identity(n)
    engine = _engine_for_triples(t1, t2, budget)
    state = engine.start()
    try:
        state = engine.propagate(state)
    except _Fail:
        return None
    return engine._dfs(state)
