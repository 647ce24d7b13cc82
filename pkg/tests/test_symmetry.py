from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import paley_gram
from etf_forge import construct as cx
from etf_forge import gram_analysis as ga
from etf_forge import symmetry as sy
from etf_forge.errors import BudgetExceeded
from etf_forge.finite_field import field_for_order, intertwiner


def closure(n, gens):
    ident = tuple(range(n))
    seen, queue = {ident}, deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple(g[x[i]] for i in range(n))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def perms(n):
    return st.permutations(list(range(n))).map(tuple)


def label_array(table, arity):
    return np.array(table.labels, dtype=np.int64).reshape((table.n,) * arity)


def brute_automorphisms(arr):
    """All permutations preserving a label array, by exhaustive enumeration."""
    n = arr.shape[0]
    out = []
    for p in itertools.permutations(range(n)):
        idx = np.array(p)
        img = arr[np.ix_(*([idx] * arr.ndim))]
        if np.array_equal(img, arr):
            out.append(p)
    return out


@given(perms(6), perms(6), perms(6))
def test_compose_and_inverse(a, b, c):
    assert sy.compose(sy.compose(a, b), c) == sy.compose(a, sy.compose(b, c))
    assert sy.compose(a, sy.inverse(a)) == sy.identity(6)
    # compose(a, b) applies a first
    assert all(sy.compose(a, b)[i] == b[a[i]] for i in range(6))


def test_cycle_notation():
    assert sy.cycle_notation((0, 2, 1, 4, 5, 3)) == "(0)(1 2)(3 4 5)"
    assert sy.cycle_notation((0, 2, 1), fixed=False) == "(1 2)"
    assert sy.cycles((1, 0, 2)) == [(0, 1), (2,)]


@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.lists(perms(n), min_size=1, max_size=3))))
def test_schreier_sims_against_brute_closure(data):
    n, gens = data
    group = sy.PermGroup(n, tuple(gens))
    elems = closure(n, gens)
    assert group.order == len(elems)
    assert group.elements() == elems
    for p in itertools.islice(itertools.permutations(range(n)), 200):
        assert group.contains(p) == (p in elems)


@given(st.integers(3, 6).flatmap(lambda n: st.tuples(st.just(n), st.lists(perms(n), min_size=1, max_size=2))), st.integers(1, 3))
def test_orbit_sizes_against_brute_force(data, k):
    n, gens = data
    group = sy.PermGroup(n, tuple(gens))
    elems = closure(n, gens)
    start = tuple(range(k))
    assert sy.k_tuple_orbit_size(group, k) == len({tuple(g[i] for i in start) for g in elems})
    assert sy.k_subset_orbit_size(group, k) == len({frozenset(g[i] for i in start) for g in elems})
    tuples = set(itertools.permutations(range(n), k))
    transitive = all(len({tuple(g[i] for i in t) for g in elems}) == len(tuples) for t in [start])
    assert sy.is_k_transitive(group, k) == transitive
    orbits = {frozenset(g[x] for g in elems) for x in range(n)}
    assert {frozenset(o) for o in group.orbits()} == orbits


@pytest.mark.parametrize("n", [1, 2, 3, 6, 9])
def test_symmetric_group(n):
    g = sy.symmetric_group(n)
    assert g.order == g.schreier_sims_order() == math.factorial(n)
    assert all(sy.is_k_transitive(g, k) for k in range(1, min(n, 4) + 1))


@pytest.mark.parametrize("q,modulus", [(7, None), (11, None), (19, None), (27, (1, 2, 0, 1)), (27, None), (243, None)])
def test_agl_subgroup_order(q, modulus):
    fld = field_for_order(q, modulus)
    g = sy.agl_subgroup(fld, intertwiner(fld))
    assert g.order == g.schreier_sims_order() == q * (q - 1) // 2 * fld.s


@pytest.mark.parametrize("p,order", [(3, 216), (5, 3000)])
def test_asp_group(p, order):
    g = sy.asp_group(p)
    assert g.order == order
    assert sy.is_k_transitive(g, 2)


@pytest.mark.parametrize("source,mode,order", [("paley7", "lines", 21), ("paley7", "vectors", 21), ("conference3", "lines", 12), ("conference7", "lines", 168)])
def test_search_agrees_with_exhaustive_enumeration(source, mode, order):
    g = {"paley7": lambda: paley_gram(7), "conference3": lambda: cx.conference_etf_gram(3), "conference7": lambda: cx.conference_etf_gram(7)}[source]()
    if mode == "lines":
        t = ga.triple_labels(g)
        found = sy.line_symmetry_group(t)
        arr = label_array(t, 3)
    else:
        t = ga.pair_labels(g)
        found = sy.vector_symmetry_group(t)
        arr = label_array(t, 2)
    brute = brute_automorphisms(arr)
    assert len(brute) == order == found.order == found.schreier_sims_order()
    assert found.elements() == set(brute)


@pytest.mark.parametrize("q,modulus", [(7, None), (11, None), (19, None), (27, (1, 2, 0, 1))])
def test_paley_groups(q, modulus):
    g = paley_gram(q, modulus)
    fld = field_for_order(q, modulus)
    agl = sy.agl_subgroup(fld, intertwiner(fld))
    vec = sy.vector_symmetry_group(ga.pair_labels(g))
    lines = sy.line_symmetry_group(ga.triple_labels(g))
    assert sy.groups_equal(vec, agl) and sy.groups_equal(lines, agl)
    assert lines.order == lines.schreier_sims_order()
    assert sy.is_k_homogeneous(lines, 2) and not sy.is_k_transitive(lines, 2)
    gens = cx.paley_symmetry_generators(fld)
    assert all(lines.contains(p) for p in gens.permutations())


def test_paley_27_group_needs_the_intertwiner():
    fld = field_for_order(27, (1, 2, 0, 1))
    lines = sy.line_symmetry_group(ga.triple_labels(paley_gram(27, (1, 2, 0, 1))))
    assert lines.order == 1053
    assert not sy.groups_equal(lines, sy.agl_subgroup(fld))
    assert lines.search_info["orbit_sizes"] == [27, 13, 3, 1]


def test_homogeneity_profile_of_paley_7():
    lines = sy.line_symmetry_group(ga.triple_labels(paley_gram(7)))
    assert [sy.is_k_homogeneous(lines, k) for k in range(1, 5)] == [True, True, False, False]


@pytest.mark.parametrize("n", [3, 5, 7])
def test_simplex_and_onb_groups_are_symmetric(n):
    assert sy.line_symmetry_group(ga.triple_labels(cx.simplex_gram(n))).order == math.factorial(n)
    assert sy.vector_symmetry_group(ga.pair_labels(cx.onb_gram(n))).order == math.factorial(n)
    assert sy.vector_symmetry_group(ga.pair_labels(cx.simplex_gram(n))).is_full_symmetric


def test_naimark_complement_has_the_same_groups():
    g = paley_gram(11)
    h = cx.naimark_gram(g)
    assert sy.groups_equal(sy.vector_symmetry_group(ga.pair_labels(g)), sy.vector_symmetry_group(ga.pair_labels(h)))
    assert sy.groups_equal(sy.line_symmetry_group(ga.triple_labels(g)), sy.line_symmetry_group(ga.triple_labels(h)))


def test_gabor_steiner_group():
    t = ga.triple_labels(cx.gabor_steiner_tp_table(3))
    g = sy.line_symmetry_group(t)
    assert g.order == 216
    assert sy.groups_equal(g, sy.asp_group(3))
    assert sy.is_k_transitive(g, 2) and not sy.is_k_transitive(g, 3)


def _tp_preserved(t1, t2, sigma):
    n = t1.n
    return all(
        t2.values[t2.label(sigma[j], sigma[k], sigma[l])] == t1.values[t1.label(j, k, l)]
        for j, k, l in itertools.permutations(range(n), 3)
    )


@given(perms(7))
def test_isomorphism_search_on_relabelled_paley_7(sigma):
    frame = cx.paley_etf(7)
    g1 = paley_gram(7)
    inv = sy.inverse(sigma)
    g2 = ga.gram(frame.permute_columns(inv))
    t1, t2 = ga.triple_labels(g1), ga.triple_labels(g2)
    found = sy.find_tp_isomorphism(t1, t2)
    assert found is not None and _tp_preserved(t1, t2, found)


def test_conjugate_paley_7_is_isomorphic_via_negation():
    # NR = -QR, so y -> -y carries the triple products of Phi_7 to their conjugates
    g = paley_gram(7)
    t1, t2 = ga.triple_labels(g), ga.triple_labels(g.conj())
    labels = g.labels
    negation = tuple(labels.index((-y) % 7) for y in labels)
    assert _tp_preserved(t1, t2, negation)
    found = sy.find_tp_isomorphism(t1, t2)
    assert found is not None and _tp_preserved(t1, t2, found)
    aut = sy.line_symmetry_group(t1)
    assert aut.contains(sy.compose(found, sy.inverse(negation)))


def test_isomorphism_search_rejects_inequivalent_tables():
    t1 = ga.triple_labels(cx.conference_etf_gram(3))
    t2 = ga.triple_labels(cx.simplex_gram(4))
    assert sy.find_tp_isomorphism(t1, t2) is None
    with pytest.raises(ValueError):
        sy.find_tp_isomorphism(t1, ga.triple_labels(paley_gram(7)))


def test_search_budget_reports_partial_generators():
    with pytest.raises(BudgetExceeded) as info:
        sy.line_symmetry_group(ga.triple_labels(paley_gram(19)), budget=3)
    assert "partial_generators" in info.value.report


def test_subgroup_relations():
    s4 = sy.symmetric_group(4)
    a4 = sy.PermGroup(4, ((1, 2, 0, 3), (0, 2, 3, 1)))
    assert a4.order == 12
    assert sy.is_subgroup(a4, s4) and not sy.is_subgroup(s4, a4)
    assert not sy.groups_equal(a4, s4)
    assert sy.is_k_homogeneous(a4, 2) and sy.is_k_transitive(a4, 2) and not sy.is_k_transitive(a4, 3)
    with pytest.raises(ValueError):
        sy.PermGroup(3, ((0, 0, 1),))
