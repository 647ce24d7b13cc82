from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from etf_forge import construct as cx
from etf_forge import gram_analysis as ga
from etf_forge.cyclotomic import Cyclotomic, euler_phi

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ORDERS = [1, 2, 3, 4, 5, 7, 8, 9, 12, 15]


def cyclotomics(m: int | None = None, bound: int = 6):
    """Elements of Q(zeta_m) built from arbitrary (non-canonical) length-m coefficient lists."""
    frac = st.builds(Fraction, st.integers(-bound, bound), st.integers(1, 4))
    ms = st.just(m) if m is not None else st.sampled_from(ORDERS)
    return ms.flatmap(lambda k: st.lists(frac, min_size=k, max_size=k).map(lambda c: Cyclotomic(k, c)))


@lru_cache(maxsize=None)
def paley_gram(q: int, modulus: tuple | None = None):
    return ga.gram(cx.paley_etf(q, modulus))


@pytest.fixture(scope="session")
def phi7():
    return paley_gram(7)


@pytest.fixture(scope="session")
def phi27():
    return paley_gram(27, (1, 2, 0, 1))


def same_field_triple(bound: int = 5):
    return st.sampled_from(ORDERS).flatmap(lambda m: st.tuples(*(cyclotomics(m, bound) for _ in range(3))))


__all__ = ["cyclotomics", "paley_gram", "same_field_triple", "euler_phi"]


def regular_rank(rows, m: int) -> int:
    """Rank over Q(zeta_m) via sympy: expand each entry to its regular representation over QQ."""
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    from etf_forge.cyclotomic import root_of_unity

    phi = euler_phi(m)
    basis = [root_of_unity(m, i) for i in range(phi)]
    r, c = len(rows), len(rows[0]) if rows else 0
    big = [[QQ(0)] * (c * phi) for _ in range(r * phi)]
    for a in range(r):
        for b in range(c):
            z = rows[a][b]
            if z.is_zero():
                continue
            for i, e in enumerate(basis):
                col = (z * e).coeffs
                for k, x in enumerate(col):
                    big[a * phi + k][b * phi + i] = QQ(x.numerator, x.denominator)
    if not big:
        return 0
    total = DomainMatrix(big, (r * phi, c * phi), QQ).rank()
    assert total % phi == 0
    return total // phi


# -- acceptance summary: one line per criterion --------------------------------------

_CRITERIA: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        if hasattr(rep, "wasxfail"):
            status = "FAIL (xfail: " + rep.wasxfail + ")"
        else:
            status = rep.outcome.upper()
        _CRITERIA.setdefault(mark.args[0], []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        parts = _CRITERIA[n]
        ok = all(s == "PASSED" for _, s in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}")
        for name, s in parts:
            terminalreporter.write_line(f"    {name}: {s}")
