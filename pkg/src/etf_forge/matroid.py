"""Linear-dependence structure of frames: rank, spark, short circuits, simplex subsets, designs."""

from __future__ import annotations

import itertools
import math
import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import Cyclotomic
from .errors import BudgetExceeded, ConsistencyError, NotAnEtfError
from .finite_field import is_prime
from .frames import GramMatrix
from .gram_analysis import check_equal_norm, check_equiangular, check_tight, exact_rank
from .symmetry import PermGroup, is_k_homogeneous

__all__ = [
    "BlockDesign",
    "is_t_design",
    "rank_of_subset",
    "spark_lower_bound",
    "spark_lower_bound_ceiling",
    "spark_lower_bound_attained",
    "SparkResult",
    "spark_search",
    "spark",
    "bender",
    "binder",
    "check_circuits",
    "DesignDegree",
    "bender_design_degree",
    "MatroidReport",
    "matroid_report",
    "DEFAULT_BUDGET",
]


@dataclass(frozen=True)
class BlockDesign:
    v: int
    k: int
    blocks: tuple[tuple[int, ...], ...]  # sorted blocks, sorted lexicographically

    def __post_init__(self):
        for b in self.blocks:
            if len(b) != self.k:
                raise ValueError(f"block {b} does not have size {self.k}")
            if any(not 0 <= x < self.v for x in b):
                raise ValueError(f"block {b} has points outside 0..{self.v - 1}")
        if len(set(self.blocks)) != len(self.blocks):
            raise ValueError("repeated block")

    @classmethod
    def from_blocks(cls, v: int, blocks: Iterable[Iterable[int]], k: int | None = None) -> BlockDesign:
        bl = sorted({tuple(sorted(b)) for b in blocks})
        if k is None:
            if not bl:
                raise ValueError("block size is needed for an empty design")
            k = len(bl[0])
        return cls(v, k, tuple(bl))

    def __len__(self) -> int:
        return len(self.blocks)

    def __contains__(self, block) -> bool:
        return tuple(sorted(block)) in self._block_set

    @property
    def _block_set(self) -> frozenset:
        # cached lazily on the instance despite frozen=True
        try:
            return self.__dict__["_bs"]
        except KeyError:
            bs = frozenset(self.blocks)
            object.__setattr__(self, "_bs", bs)
            return bs

    def image(self, perm: Sequence[int]) -> BlockDesign:
        return BlockDesign.from_blocks(self.v, ([perm[x] for x in b] for b in self.blocks), self.k)

    def is_invariant_under(self, perm: Sequence[int]) -> bool:
        bs = self._block_set
        return all(tuple(sorted(perm[x] for x in b)) in bs for b in self.blocks)

    def to_json(self) -> dict:
        return {"v": self.v, "k": self.k, "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, data: dict) -> BlockDesign:
        d = cls.from_blocks(int(data["v"]), data["blocks"], int(data["k"]))
        if [list(b) for b in d.blocks] != [list(b) for b in data["blocks"]]:
            raise ValueError("blocks are not sorted canonically")
        return d


def is_t_design(design: BlockDesign, t: int) -> int | None:
    """lambda if every t-subset of points lies in exactly lambda > 0 blocks, else None."""
    if t < 0:
        raise ValueError(f"t = {t} must be non-negative")
    if t > design.k or not design.blocks:
        return None
    tally: Counter = Counter()
    for b in design.blocks:
        for sub in itertools.combinations(b, t):
            tally[sub] += 1
    if len(tally) != math.comb(design.v, t):
        return None
    counts = set(tally.values())
    return counts.pop() if len(counts) == 1 else None


# -- rank and the spark bound -------------------------------------------------------


def rank_of_subset(g: GramMatrix, subset: Sequence[int]) -> int:
    """Exact rank of the vectors in ``subset`` (rank of the principal Gram submatrix)."""
    subset = list(subset)
    if not subset:
        return 0
    return exact_rank(g.principal(subset))


def spark_lower_bound(d: int, n: int) -> float:
    """1 + sqrt(d (n - 1) / (n - d)) for n > d."""
    if n <= d:
        raise ValueError("the bound needs n > d")
    return 1 + math.sqrt(d * (n - 1) / (n - d))


def spark_lower_bound_ceiling(d: int, n: int) -> int:
    """Smallest integer s with (s - 1)^2 >= d (n - 1) / (n - d), computed exactly."""
    target = Fraction(d * (n - 1), n - d)
    s = 1 + math.isqrt(target.numerator // target.denominator)
    while Fraction((s - 1) ** 2) < target:
        s += 1
    while s > 1 and Fraction((s - 2) ** 2) >= target:
        s -= 1
    return s


def spark_lower_bound_attained(d: int, n: int, s: int) -> bool:
    if n <= d or s < 2:
        raise ValueError("need n > d and s >= 2")
    return Fraction((s - 1) ** 2) == Fraction(d * (n - 1), n - d)


# -- reduction modulo a prime -------------------------------------------------------


def _primes_one_mod(m: int, start: int = 2**31 - 1):
    """Primes P = 1 mod m below ``start``, descending."""
    p = start - ((start - 1) % m)
    while p > m:
        if is_prime(p):
            yield p
        p -= m


def _root_of_unity_mod(m: int, p: int) -> int:
    if m == 1:
        return 1
    factors = [r for r in range(2, m + 1) if m % r == 0 and is_prime(r)]
    for h in range(2, p):
        w = pow(h, (p - 1) // m, p)
        if all(pow(w, m // r, p) != 1 for r in factors):
            return w
    raise ArithmeticError("no primitive root of unity found")  # pragma: no cover


def _reduce_mod(z: Cyclotomic, p: int, w: int) -> int:
    if z.denominator % p == 0:
        raise ZeroDivisionError
    val = 0
    wk = 1
    for c in z.numerators:
        val = (val + c * wk) % p
        wk = (wk * w) % p
    return val * pow(z.denominator, p - 2, p) % p


def _gram_mod(g: GramMatrix, p: int) -> np.ndarray | None:
    w = _root_of_unity_mod(g.m, p)
    cache: dict = {}
    out = np.zeros((g.n, g.n), dtype=np.int64)
    try:
        for j in range(g.n):
            for k in range(g.n):
                z = g.entries[j][k]
                v = cache.get(z)
                if v is None:
                    v = cache[z] = _reduce_mod(z, p, w)
                out[j, k] = v
    except ZeroDivisionError:
        return None
    return out


def _inv_mod(x: int, p: int) -> int:
    return pow(int(x), p - 2, p)


def _coordinates_mod(gp: np.ndarray, p: int) -> np.ndarray | None:
    """Columns G[R, :] for a row set R independent mod p of full rank; d x n."""
    n = gp.shape[0]
    basis: list[np.ndarray] = []  # reduced rows with pivot columns
    pivots: list[int] = []
    rows: list[int] = []
    for j in range(n):
        r = gp[j].copy()
        for b, c in zip(basis, pivots):
            if r[c]:
                r = (r - r[c] * b) % p
        nz = np.flatnonzero(r)
        if nz.size == 0:
            continue
        c = int(nz[0])
        r = r * _inv_mod(r[c], p) % p
        for i, b in enumerate(basis):
            if b[c]:
                basis[i] = (b - b[c] * r) % p
        basis.append(r)
        pivots.append(c)
        rows.append(j)
    return gp[rows, :] % p


# -- the enumeration core -------------------------------------------------------------


@dataclass
class _SizeResult:
    candidates: list[tuple[int, ...]]
    nodes: int
    degenerate: bool


def _search_size(coords: np.ndarray, p: int, s: int, first: int | None = None) -> _SizeResult:
    """Dependent s-subsets mod p whose first s-2 elements are independent mod p.

    Each DFS node is an independent prefix I; the residuals of the later
    columns modulo span(I) are kept in a matrix, and at depth s-2 two columns
    close a circuit exactly when their residuals are parallel.  A zero residual
    above the leaves means a dependence of size < s, which is reported as a
    degenerate prime.
    """
    d, n = coords.shape
    cols = coords.T.copy()  # n x d
    rng = np.random.default_rng(12345)
    u = rng.integers(1, 2**20, size=d, dtype=np.int64)
    w = rng.integers(1, 2**20, size=d, dtype=np.int64)
    out: list[tuple[int, ...]] = []
    state = {"nodes": 0, "degenerate": False}
    depth = s - 2

    def leaf(prefix, idx, resid):
        if resid.shape[0] < 2:
            return
        a = (resid @ u) % p
        b = (resid @ w) % p
        cross = (a[:, None] * b[None, :] - b[:, None] * a[None, :]) % p
        jj, kk = np.nonzero(np.triu(cross == 0, 1))
        for j, k in zip(jj.tolist(), kk.tolist()):
            if _parallel(resid[j], resid[k], p):
                out.append(tuple(prefix) + (int(idx[j]), int(idx[k])))

    def rec(prefix, idx, resid):
        state["nodes"] += 1
        if not resid.any(axis=1).all():
            state["degenerate"] = True
            return
        left = depth - len(prefix)
        if left == 0:
            leaf(prefix, idx, resid)
            return
        # need left - 1 further pivots plus two closing columns after this one
        for t in range(resid.shape[0] - left - 1):
            piv = resid[t]
            c = int(np.flatnonzero(piv)[0])
            inv = _inv_mod(piv[c], p)
            rest = resid[t + 1 :]
            f = (rest[:, c] * inv) % p
            new = (rest - (f[:, None] * piv[None, :]) % p) % p
            rec(prefix + [int(idx[t])], idx[t + 1 :], new)
            if state["degenerate"]:
                return

    idx = np.arange(n)
    if first is None:
        rec([], idx, cols)
    else:
        # the subtree whose prefix starts with ``first`` (used to split work)
        piv = cols[first]
        if not piv.any():
            return _SizeResult([], 1, True)
        c = int(np.flatnonzero(piv)[0])
        inv = _inv_mod(piv[c], p)
        rest = cols[first + 1 :]
        f = (rest[:, c] * inv) % p
        new = (rest - (f[:, None] * piv[None, :]) % p) % p
        rec([first], idx[first + 1 :], new)
    return _SizeResult(out, state["nodes"], state["degenerate"])


def _parallel(x: np.ndarray, y: np.ndarray, p: int) -> bool:
    c = int(np.flatnonzero(x)[0])
    if not y[c]:
        return False
    return bool(np.all((x * int(y[c]) - y * int(x[c])) % p == 0))


def _search_size_task(args):
    coords, p, s, first = args
    return _search_size(coords, p, s, first)


def _nodes_estimate(n: int, s: int) -> int:
    return sum(math.comb(n, t) for t in range(0, max(s - 1, 1)))


def _budget_default() -> int:
    env = os.environ.get("ETF_FORGE_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BUDGET


DEFAULT_BUDGET = 5 * 10**7


@dataclass
class SparkResult:
    spark: int
    d: int
    n: int
    lower_bound: int | None  # ceiling of the bound, when the input is an ETF
    full_spark: bool
    short_circuits: list[tuple[int, ...]] | None  # None when full spark (all (d+1)-subsets)
    nodes: int
    prime: int | None
    false_positives: int
    sizes_searched: list[int]

    def work(self) -> dict:
        return {"enumeration_nodes": self.nodes, "false_positives": self.false_positives}


def _is_etf(g: GramMatrix) -> bool:
    return bool(check_equiangular(g)) and bool(check_tight(g))


def _frame_dim(g: GramMatrix) -> int:
    t = check_tight(g)
    if t:
        return t.detail["rank"]
    return exact_rank(g.entries)


def spark_search(
    g: GramMatrix,
    max_size: int | None = None,
    budget: int | None = None,
    jobs: int = 1,
    use_bound: bool = True,
) -> SparkResult:
    """Smallest dependent subset size and all dependent subsets of that size."""
    budget = _budget_default() if budget is None else budget
    n = g.n
    if not check_equal_norm(g):
        raise NotAnEtfError("spark needs equal-norm (in particular nonzero) vectors")
    etf = _is_etf(g)
    d = _frame_dim(g)
    lb = spark_lower_bound_ceiling(d, n) if etf and n > d else None
    start = max(2, lb) if (use_bound and lb is not None) else 2
    stop = d + 1 if max_size is None else min(d + 1, max_size)
    report = {"d": d, "n": n, "lower_bound": lb, "budget": budget}
    if n <= d:
        return SparkResult(n + 1, d, n, lb, True, [], 0, None, 0, [])
    if start <= d and _nodes_estimate(n, min(start, d)) > budget:
        report.update({"spark_at_least": start, "estimated_nodes": _nodes_estimate(n, start)})
        raise BudgetExceeded(
            f"spark search at size {start} needs about {_nodes_estimate(n, start):.3e} nodes, budget {budget}",
            report,
        )
    primes = _primes_one_mod(g.m)
    p = next(primes)
    gp = _gram_mod(g, p)
    while gp is None:
        p = next(primes)
        gp = _gram_mod(g, p)
    coords = _coordinates_mod(gp, p)
    nodes = 0
    false_pos = 0
    searched = []
    s = start
    while s <= stop:
        if s == d + 1:
            return SparkResult(d + 1, d, n, lb, True, None, nodes, p, false_pos, searched)
        est = _nodes_estimate(n, s)
        if nodes + est > budget:
            report.update({"spark_at_least": s, "estimated_nodes": est, "nodes_used": nodes})
            raise BudgetExceeded(f"spark search at size {s} would exceed the budget {budget}", report)
        if coords.shape[0] < d:
            res = _SizeResult([], 0, True)
        else:
            res = _run_size(coords, p, s, jobs)
        nodes += res.nodes
        if res.degenerate:
            p = next(primes)
            gp = _gram_mod(g, p)
            while gp is None:
                p = next(primes)
                gp = _gram_mod(g, p)
            coords = _coordinates_mod(gp, p)
            continue
        searched.append(s)
        verified = []
        for block in sorted(set(tuple(sorted(b)) for b in res.candidates)):
            if rank_of_subset(g, block) < s:
                verified.append(block)
            else:
                false_pos += 1
        if verified:
            return SparkResult(s, d, n, lb, False, verified, nodes, p, false_pos, searched)
        s += 1
    report.update({"spark_at_least": stop + 1, "nodes_used": nodes})
    raise BudgetExceeded(f"no dependent subset of size <= {stop}", report)


def _run_size(coords: np.ndarray, p: int, s: int, jobs: int) -> _SizeResult:
    n = coords.shape[1]
    if jobs <= 1 or s < 3:
        return _search_size(coords, p, s)
    tasks = [(coords, p, s, f) for f in range(n - (s - 1))]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_search_size_task, tasks))
    cands = sorted(c for r in results for c in r.candidates)
    return _SizeResult(cands, 1 + sum(r.nodes for r in results), any(r.degenerate for r in results))


def spark(g: GramMatrix, **kw) -> int:
    return spark_search(g, **kw).spark


def bender(g: GramMatrix, result: SparkResult | None = None, **kw) -> BlockDesign:
    """All dependent subsets of size spark (the short circuits)."""
    if result is None:
        result = spark_search(g, **kw)
    if result.full_spark:
        k = result.spark
        if math.comb(result.n, k) > _budget_default():
            raise BudgetExceeded(f"C({result.n},{k}) blocks exceed the budget", {"spark": k})
        return BlockDesign.from_blocks(result.n, itertools.combinations(range(result.n), k), k)
    return BlockDesign.from_blocks(result.n, result.short_circuits, result.spark)


def check_circuits(g: GramMatrix, design: BlockDesign, sample: int = 100, seed: int = 0) -> bool:
    """Every sampled block is dependent and each of its maximal proper subsets is independent."""
    blocks = list(design.blocks)
    if len(blocks) > sample:
        blocks = random.Random(seed).sample(blocks, sample)
    for b in blocks:
        if rank_of_subset(g, b) >= len(b):
            return False
        for sub in itertools.combinations(b, len(b) - 1):
            if rank_of_subset(g, sub) != len(b) - 1:
                return False
    return True


def binder(g: GramMatrix, result: SparkResult | None = None, force: bool = False, **kw) -> BlockDesign:
    """Spark-sized subsets that form a simplex for their span.

    Only searched when the spark bound is attained (or ``force``); otherwise
    the binder at spark size is empty.
    """
    if result is None:
        result = spark_search(g, **kw)
    s = result.spark
    attained = result.n > result.d and spark_lower_bound_attained(result.d, result.n, s)
    if not (attained or force):
        return BlockDesign(result.n, s, ())
    blocks = []
    for b in bender(g, result).blocks:
        if rank_of_subset(g, b) != len(b) - 1:
            continue
        sub = GramMatrix(g.m, tuple(tuple(r) for r in g.principal(b)), tuple(g.labels[i] for i in b))
        if check_tight(sub) and check_equiangular(sub):
            blocks.append(b)
    return BlockDesign(result.n, s, tuple(sorted(blocks)))


# -- designs from the bender -----------------------------------------------------------


@dataclass
class DesignDegree:
    t: int
    lambdas: dict  # t -> lambda for each t that passed
    homogeneity: int  # largest k <= block size with a k-homogeneous group


def bender_design_degree(design: BlockDesign, sym: PermGroup | None = None) -> DesignDegree:
    """Largest t <= k such that the blocks form a t-design.

    With a symmetry group the guarantee t >= (largest k with a k-homogeneous
    action) is asserted.
    """
    lambdas = {}
    t = 0
    for cand in range(1, design.k + 1):
        lam = is_t_design(design, cand)
        if lam is None:
            break
        lambdas[cand] = lam
        t = cand
    hom = 0
    if sym is not None:
        for k in range(1, design.k + 1):
            if is_k_homogeneous(sym, k):
                hom = k
            else:
                break
        if t < hom:
            raise ConsistencyError(f"bender is only a {t}-design but the group is {hom}-homogeneous")
    return DesignDegree(t, lambdas, hom)


@dataclass
class MatroidReport:
    spark: int
    lower_bound: int | None
    lower_bound_attained: bool
    bender: BlockDesign
    design_degree: int
    lambdas: dict
    binder_nonempty: bool
    circuits_checked: bool
    work: dict

    def to_json(self) -> dict:
        return {
            "spark": self.spark,
            "lower_bound": self.lower_bound,
            "lower_bound_attained": self.lower_bound_attained,
            "bender_blocks": len(self.bender),
            "design_degree": self.design_degree,
            "lambdas": {str(k): v for k, v in self.lambdas.items()},
            "binder_nonempty": self.binder_nonempty,
            "circuits_checked": self.circuits_checked,
        }


def matroid_report(g: GramMatrix, sym: PermGroup | None = None, jobs: int = 1, budget: int | None = None) -> MatroidReport:
    res = spark_search(g, jobs=jobs, budget=budget)
    bd = bender(g, res)
    deg = bender_design_degree(bd, sym)
    attained = res.n > res.d and spark_lower_bound_attained(res.d, res.n, res.spark)
    bnd = binder(g, res)
    return MatroidReport(
        res.spark,
        res.lower_bound,
        attained,
        bd,
        deg.t,
        deg.lambdas,
        len(bnd) > 0,
        check_circuits(g, bd),
        res.work(),
    )
