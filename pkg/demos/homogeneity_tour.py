"""Which small ETFs have k-homogeneous line symmetry groups?

Compares skew-conference ETFs, simplices, the Gabor-Steiner table for p = 3
and a few Paley ETFs.
"""

from __future__ import annotations

from etf_forge import construct as cx
from etf_forge import gram_analysis as ga
from etf_forge import symmetry as sy

cases = {
    "conference q=3": cx.conference_etf_gram(3),
    "conference q=7": cx.conference_etf_gram(7),
    "conference q=11": cx.conference_etf_gram(11),
    "simplex n=5": cx.simplex_gram(5),
    "Paley q=7": ga.gram(cx.paley_etf(7)),
    "Paley q=11": ga.gram(cx.paley_etf(11)),
    "Gabor-Steiner p=3": cx.gabor_steiner_tp_table(3),
}

print(f"{'frame':<20}{'n':>4}{'order':>8}  3c  k-homogeneous (k=1..4)   k-transitive")
for name, obj in cases.items():
    group = sy.line_symmetry_group(ga.triple_labels(obj))
    hom = "".join("Y" if sy.is_k_homogeneous(group, k) else "." for k in range(1, 5))
    tra = "".join("Y" if sy.is_k_transitive(group, k) else "." for k in range(1, 5))
    c3 = "-" if not hasattr(obj, "entries") else ("Y" if ga.check_3c_uniform(obj) else ".")
    print(f"{name:<20}{group.n:>4}{group.order:>8}  {c3:>2}  {hom:<24}{tra}")
