"""Walk through the Paley ETF on F_27: field model, intertwiner, symmetries, bender.

Run with ``python3 demos/paley27_walkthrough.py``; pass ``--skip-spark`` to stop
before the (roughly ten second) short-circuit enumeration.
"""

from __future__ import annotations

import sys
import time

from etf_forge import construct as cx
from etf_forge import gram_analysis as ga
from etf_forge import matroid as mt
from etf_forge import symmetry as sy
from etf_forge.cyclotomic import approx
from etf_forge.finite_field import field_new, intertwiner, normal_basis_qr

MODULUS = (1, 2, 0, 1)  # x^3 + 2x + 1, constant term first

fld = field_new(3, 3, MODULUS)
print("F_27 = F_3[x]/(x^3 + 2x + 1)")
for k in range(14):
    print(f"  alpha^{k:<2d} -> {fld.coords(fld.alpha_power(k))}")

nb = normal_basis_qr(fld)
it = intertwiner(fld)
print(f"\nnormal basis of residues: alpha^{2 * nb.b} orbit {nb.orbit}")
print("intertwiner S =", it.S)

# the frame: 13 rows (residues alpha^0, alpha^2, ...), 27 columns (0, then alpha^l)
frame = cx.paley_etf(fld)
g = ga.gram(frame)
eq, tight = ga.require_etf(g)
a = g.entries[1][0]
print(f"\nPhi_27 is a ({frame.d}, {frame.n}) ETF: |<phi_j, phi_k>|^2 = {eq.value}, frame bound {tight.value}")
print(f"off-diagonal Gram values a = {approx(a):.4f} and conj(a)")

# symmetries
gens = cx.paley_symmetry_generators(fld)
print("\nGalois row permutation:", sy.cycle_notation(gens.galois.operator.row_map))
t0 = time.perf_counter()
lines = sy.line_symmetry_group(ga.triple_labels(g))
print(f"line symmetry group: order {lines.order}, base {lines.search_info['base']}, "
      f"orbit sizes {lines.search_info['orbit_sizes']} ({time.perf_counter() - t0:.2f}s)")
print("equals the S-conjugated affine semilinear group:", sy.groups_equal(lines, sy.agl_subgroup(fld, it)))
print("equals the unconjugated one:", sy.groups_equal(lines, sy.agl_subgroup(fld)))
for k in (1, 2, 3):
    print(f"  {k}-homogeneous: {sy.is_k_homogeneous(lines, k)}   {k}-transitive: {sy.is_k_transitive(lines, k)}")

if "--skip-spark" in sys.argv:
    sys.exit(0)

t0 = time.perf_counter()
res = mt.spark_search(g, jobs=4)
bd = mt.bender(g, res)
print(f"\nspark {res.spark} (lower bound {res.lower_bound}), {len(bd)} short circuits, "
      f"{res.nodes} nodes, {time.perf_counter() - t0:.1f}s")
deg = mt.bender_design_degree(bd, lines)
print(f"bender is a {deg.t}-design with lambdas {deg.lambdas}")
print("bender invariant under every line symmetry:", all(bd.is_invariant_under(p) for p in lines.generators))
