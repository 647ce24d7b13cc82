from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import paley_gram
from etf_forge import construct as cx
from etf_forge import gram_analysis as ga
from etf_forge.cyclotomic import Cyclotomic, approx, root_of_unity
from etf_forge.errors import NotAnEtfError
from etf_forge.finite_field import field_for_order, intertwiner
from etf_forge.frames import FrameMatrix, GramMatrix

PALEY = [(7, None), (11, None), (19, None), (23, None), (27, (1, 2, 0, 1)), (27, None), (43, None)]


def numeric_gram(frame):
    f = np.array([[approx(z) for z in row] for row in frame.entries])
    return f.T @ f.conj()


def test_gram_convention_and_fast_path_agree():
    frame = cx.paley_etf(11)
    g = ga.gram(frame)
    assert np.allclose(np.array([[approx(z) for z in r] for r in g.entries]), numeric_gram(frame))
    # a non-root entry forces the generic product path
    scaled = FrameMatrix(frame.m, tuple(tuple(z * 2 for z in r) for r in frame.entries), frame.labels)
    g2 = ga.gram(scaled)
    assert all(g2.entries[j][k] == g.entries[j][k] * 4 for j in range(11) for k in range(11))


def test_gram_rejects_unequal_norms():
    frame = FrameMatrix(1, ((Cyclotomic.one(1), Cyclotomic.one(1)), (Cyclotomic.zero(1), Cyclotomic.one(1))), (0, 1))
    with pytest.raises(NotAnEtfError):
        ga.gram(frame)
    g = ga.gram(frame, require_equal_norm=False)
    assert not ga.check_equal_norm(g)


def test_gram_matrix_must_be_hermitian():
    i = root_of_unity(4, 1)
    one = Cyclotomic.one(4)
    with pytest.raises(ValueError):
        GramMatrix(4, ((one, i), (i, one)), (0, 1))


def _residue_value(fld, it, g):
    # G[j][0] for the first column whose element y has S^-1 y a residue
    cols = cx.paley_columns(fld)
    j = next(j for j in range(1, fld.q) if fld.is_qr(it.apply_inverse(fld, cols[j])))
    return g.entries[j][0]


@pytest.mark.parametrize("q,modulus", PALEY)
def test_paley_pair_values_follow_residuosity(q, modulus):
    fld = field_for_order(q, modulus)
    it = intertwiner(fld)
    g = paley_gram(q, modulus)
    cols = cx.paley_columns(fld)
    a = _residue_value(fld, it, g)
    assert a + a.conj() == -1
    assert a * a.conj() == Fraction(q + 1, 4)
    for j, k in itertools.permutations(range(q), 2):
        qr = fld.is_qr(it.apply_inverse(fld, fld.sub(cols[j], cols[k])))
        assert g.entries[j][k] == (a if qr else a.conj())


@pytest.mark.parametrize("q,modulus", PALEY[:5])
def test_paley_triple_product_classes(q, modulus):
    fld = field_for_order(q, modulus)
    it = intertwiner(fld)
    g = paley_gram(q, modulus)
    cols = cx.paley_columns(fld)
    values = ga.paley_class_values(_residue_value(fld, it, g))
    assert len(set(values.values())) == 4
    rng = random.Random(q)
    triples = list(itertools.permutations(range(q), 3))
    for j, k, l in rng.sample(triples, min(600, len(triples))):
        cls = ga.paley_tp_class(fld, cols[j], cols[k], cols[l], it)
        assert ga.triple_product(g, j, k, l) == values[cls]


def test_prime_paley_value_is_gauss_period():
    for q in (7, 11, 19, 23, 31):
        a = paley_gram(q).entries[1][0]
        assert (2 * a + 1) ** 2 == -q


@pytest.mark.parametrize("q,modulus", PALEY[:5])
def test_triple_product_identities(q, modulus):
    g = paley_gram(q, modulus)
    rng = random.Random(0)
    for _ in range(300):
        j, k, l = rng.sample(range(q), 3)
        tp = ga.triple_product(g, j, k, l)
        assert tp == ga.triple_product(g, l, j, k) == ga.triple_product(g, k, l, j)
        assert ga.triple_product(g, j, l, k) == tp.conj()


@pytest.mark.parametrize("source", ["paley7", "conference7", "simplex5"])
def test_triple_table_invariants(source):
    g = {"paley7": lambda: paley_gram(7), "conference7": lambda: cx.conference_etf_gram(7), "simplex5": lambda: cx.simplex_gram(5)}[source]()
    t = ga.triple_table_from_gram(g)
    t.check_invariants()
    assert len(t.values) == g.n * (g.n - 1) * (g.n - 2)


def test_label_tables_are_canonical():
    g = paley_gram(11)
    pl = ga.pair_labels(g)
    for (j, k), (u, v) in itertools.product(itertools.permutations(range(11), 2), repeat=2):
        if (j, k) < (u, v):
            assert (pl.label(j, k) == pl.label(u, v)) == (g.entries[j][k] == g.entries[u][v])
    for j, k in itertools.permutations(range(11), 2):
        assert pl.values[pl.conj[pl.label(j, k)]] == g.entries[j][k].conj()
    tl = ga.triple_labels(g)
    assert len(tl.values) == 4
    for j, k, l in itertools.permutations(range(11), 3):
        assert tl.values[tl.label(j, k, l)] == ga.triple_product(g, j, k, l)
    assert ga.triple_labels(ga.triple_table_from_gram(g)).labels == tl.labels


@pytest.mark.parametrize("q,modulus", PALEY)
def test_paley_verdicts(q, modulus):
    g = paley_gram(q, modulus)
    e, t = ga.require_etf(g)
    assert e.value == Fraction(q + 1, 4) and t.value == q
    assert e.to_json()["passed"] is True


def test_verdicts_fail_on_non_etfs():
    g = cx._int_gram([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
    assert not ga.check_equiangular(g)
    assert not ga.check_tight(g)
    with pytest.raises(NotAnEtfError):
        ga.require_etf(g)
    # equiangular but not tight: three unit vectors at 60 degrees in the plane, plus one more dimension
    h = cx._int_gram([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
    assert ga.check_equiangular(h) and not ga.check_tight(h)


@given(st.sampled_from([7, 11]), st.lists(st.integers(0, 6), min_size=11, max_size=11), st.permutations(list(range(7))))
def test_switching_equivalence_under_unimodular_rescaling(q, phases, perm):
    frame = cx.paley_etf(q)
    scalars = [root_of_unity(q, x) for x in phases[:q]]
    g = paley_gram(q)
    g2 = ga.gram(frame.rescale_columns(scalars))
    assert ga.switching_equivalent_aligned(g, g2)
    if q == 7:
        # a mixed-order rescaling (fourth roots) needs the lcm lift
        g4 = ga.gram(_rescale_lifted(frame, [x % 4 for x in phases[:7]]))
        assert ga.switching_equivalent_aligned(g, g4)


def _rescale_lifted(frame, quarter_turns):
    from etf_forge.cyclotomic import lift

    m = 28
    rows = tuple(
        tuple(lift(z, m) * root_of_unity(m, 7 * t) for z, t in zip(row, quarter_turns))
        for row in frame.entries
    )
    return FrameMatrix(m, rows, frame.labels)


def test_conjugate_is_not_aligned_equivalent():
    g = paley_gram(7)
    assert not ga.switching_equivalent_aligned(g, g.conj())
    with pytest.raises(ValueError):
        ga.switching_equivalent_aligned(g, paley_gram(11))


@pytest.mark.parametrize(
    "name,expected,imaginary",
    [("conference3", True, True), ("conference7", True, True), ("conference11", True, True), ("simplex6", True, False), ("paley7", False, False), ("paley11", False, False)],
)
def test_3c_uniform(name, expected, imaginary):
    builders = {
        "conference3": lambda: cx.conference_etf_gram(3),
        "conference7": lambda: cx.conference_etf_gram(7),
        "conference11": lambda: cx.conference_etf_gram(11),
        "simplex6": lambda: cx.simplex_gram(6),
        "paley7": lambda: paley_gram(7),
        "paley11": lambda: paley_gram(11),
    }
    v = ga.check_3c_uniform(builders[name]())
    assert bool(v) == expected
    assert v.detail["purely_imaginary"] == imaginary
    if imaginary:
        assert v.value == 0
    if name == "simplex6":
        assert v.value == -2


@pytest.mark.parametrize("q", [7, 11, 19])
def test_exact_rank_matches_numpy(q):
    g = paley_gram(q)
    rng = random.Random(q)
    num = np.array([[approx(z) for z in r] for r in g.entries])
    for _ in range(30):
        size = rng.randrange(1, q + 1)
        idx = sorted(rng.sample(range(q), size))
        sub = [[g.entries[j][k] for k in idx] for j in idx]
        assert ga.exact_rank(sub) == np.linalg.matrix_rank(num[np.ix_(idx, idx)], tol=1e-8)
