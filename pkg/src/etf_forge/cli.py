"""Command-line front end: constructions, analyses and reproduction campaigns."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import construct as cx
from . import gram_analysis as ga
from . import matroid as mt
from . import symmetry as sy
from .errors import BudgetExceeded, ConsistencyError, EtfForgeError, NotAnEtfError
from .finite_field import (
    field_for_order,
    field_new,
    intertwiner,
    is_paley_admissible,
    normal_basis_qr,
    prime_power,
    qr_set,
)
from .frames import FrameMatrix, GramMatrix, TripleTable, dump_json, load_json
from .reports import EXIT_USAGE, Report

EXPECTED_PI_CYCLES_27 = "(0)(1 3 9)(2 6 5)(4 12 10)(7 8 11)"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 and 3 keep their report meanings."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _parse_set(text: str):
    text = text.strip()
    if text.startswith("["):
        return [tuple(x) if isinstance(x, list) else x for x in json.loads(text)]
    return _int_list(text)


def _budget(args) -> int | None:
    return getattr(args, "budget", None)


def _as_gram(obj) -> GramMatrix:
    if isinstance(obj, FrameMatrix):
        return ga.gram(obj)
    if isinstance(obj, GramMatrix):
        return obj
    raise ValueError("this command needs a frame or Gram matrix, not a triple table")


def _tables(obj, mode: str):
    if isinstance(obj, TripleTable):
        if mode != "lines":
            raise ValueError("a triple table only supports --mode lines")
        return ga.triple_labels(obj)
    g = _as_gram(obj)
    return ga.pair_labels(g) if mode == "vectors" else ga.triple_labels(g)


def _group(obj, mode: str, budget: int | None) -> sy.PermGroup:
    kw = {} if budget is None else {"budget": budget}
    t = _tables(obj, mode)
    if mode == "vectors":
        return sy.vector_symmetry_group(t, **kw)
    return sy.line_symmetry_group(t, **kw)


def _k_table(rep: Report, g: sy.PermGroup, kmax: int = 4, prefix: str = "") -> dict:
    table = {}
    for k in range(1, min(kmax, g.n) + 1):
        tr = sy.is_k_transitive(g, k)
        hom = sy.is_k_homogeneous(g, k)
        table[k] = {"transitive": tr, "homogeneous": hom}
        rep.add(f"{prefix}{k}-transitive", tr)
        rep.add(f"{prefix}{k}-homogeneous", hom)
    return table


def _expected_group(spec: str, n: int, labels, modulus=None) -> sy.PermGroup:
    kind, _, arg = spec.partition(":")
    if kind == "agl":
        fld = field_for_order(int(arg), modulus)
        if tuple(labels) != cx.paley_etf(fld).labels:
            raise ValueError("input columns are not in the Paley column order for this field")
        return sy.agl_subgroup(fld, intertwiner(fld))
    if kind == "asp":
        return sy.asp_group(int(arg))
    if kind == "sym":
        return sy.symmetric_group(n)
    raise ValueError(f"unknown expected group {spec!r}")


# -- commands ---------------------------------------------------------------------------


def cmd_field(args) -> Report:
    modulus = tuple(_int_list(args.modulus)) if args.modulus else None
    fld = field_new(args.p, args.s, modulus)
    rep = Report("field", {"p": args.p, "s": args.s, "modulus": list(modulus) if modulus else None})
    rep.data["field"] = fld.to_json()
    rep.data["alpha_powers"] = [list(fld.coords(c)) for c in fld.exp_table]
    qr = qr_set(fld)
    rep.data["qr"] = [list(x) for x in qr]
    rep.add("qr_size", len(qr), (fld.q - 1) // 2 if fld.p > 2 else fld.q - 1)
    adm = is_paley_admissible(fld)
    rep.add("paley_admissible", adm)
    if adm:
        nb = normal_basis_qr(fld)
        rep.data["normal_basis_residue"] = {"b": nb.b, "element": list(nb.element), "orbit": [list(x) for x in nb.orbit]}
        it = intertwiner(fld)
        rep.data["S"] = [list(r) for r in it.S]
        rep.add("intertwiner_verified", True, True)
    return rep


def _emit_object(rep: Report, obj, out: str | None) -> None:
    if out:
        dump_json(obj, out)
        rep.data["written"] = str(out)
    else:
        rep.data["object"] = obj.to_json()


def cmd_construct(args) -> Report:
    kind = args.kind
    inputs = {k: v for k, v in vars(args).items() if k in ("q", "group", "set", "n", "p", "modulus") and v is not None}
    rep = Report(f"construct {kind}", inputs)
    if kind == "paley":
        modulus = tuple(_int_list(args.modulus)) if args.modulus else None
        frame = cx.paley_etf(args.q, modulus)
        g = ga.gram(frame)
        rep.add("equiangular", ga.check_equiangular(g).value, Fraction(args.q + 1, 4))
        rep.add("tight_frame_bound", ga.check_tight(g).value, args.q)
        _emit_object(rep, frame, args.out)
    elif kind == "diffset":
        orders = _int_list(args.group)
        subset = _parse_set(args.set)
        verdict = cx.is_difference_set(orders, subset)
        if not verdict:
            rep.add("difference_set", False, note="rejected: not a difference set")
            rep.data["difference_tally"] = {str(k): v for k, v in sorted(verdict.tally.items())}
            rep.rejected = True
            return rep
        rep.add("difference_set", True, True)
        rep.add("parameters", list(verdict.params()))
        frame = cx.etf_from_difference_set(orders, subset)
        g = ga.gram(frame)
        rep.add("equiangular", bool(ga.check_equiangular(g)), True)
        rep.add("tight", bool(ga.check_tight(g)), True)
        _emit_object(rep, frame, args.out)
    elif kind == "conference":
        g = cx.conference_etf_gram(args.q)
        rep.add("n", g.n, args.q + 1)
        tight = ga.check_tight(g)
        rep.add("d", tight.detail.get("rank"), (args.q + 1) // 2)
        rep.add("frame_bound", tight.value, 2)
        _emit_object(rep, g, args.out)
    elif kind in ("simplex", "onb"):
        g = cx.simplex_gram(args.n) if kind == "simplex" else cx.onb_gram(args.n)
        rep.add("tight", bool(ga.check_tight(g)), True)
        _emit_object(rep, g, args.out)
    elif kind == "gabor-steiner-tp":
        t = cx.gabor_steiner_tp_table(args.p)
        t.check_invariants()
        rep.add("n", t.n, args.p * args.p)
        _emit_object(rep, t, args.out)
    return rep


def cmd_analyze(args) -> Report:
    obj = load_json(args.inp)
    g = _as_gram(obj)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    rep = Report("analyze", {"in": Path(args.inp).name, "checks": checks})
    for c in checks:
        if c == "equiangular":
            v = ga.check_equiangular(g)
        elif c == "tight":
            v = ga.check_tight(g)
        elif c in ("3c", "3c_uniform"):
            v = ga.check_3c_uniform(g)
        elif c == "rank":
            rep.add("rank", ga.exact_rank(g.entries))
            continue
        else:
            raise ValueError(f"unknown check {c!r}")
        # verdicts are measurements here, not assertions; they never set exit code 2
        rep.add(v.check, v.passed, note=json.dumps(v.to_json()["detail"], sort_keys=True))
        rep.add(f"{v.check}:value", v.value)
    return rep


def cmd_symmetry(args) -> Report:
    obj = load_json(args.inp)
    rep = Report("symmetry", {"in": Path(args.inp).name, "mode": args.mode, "expect": args.expect})
    g = _group(obj, args.mode, _budget(args))
    rep.count("search_nodes", g.search_info.get("nodes", 0))
    rep.data["generators"] = [list(x) for x in g.generators]
    rep.data["search"] = g.search_info
    rep.add("order", g.order)
    rep.data["k_table"] = _k_table(rep, g)
    if args.expect:
        modulus = tuple(_int_list(args.modulus)) if args.modulus else None
        exp = _expected_group(args.expect, g.n, obj.labels, modulus)
        rep.add("expected_order", g.order, exp.order)
        rep.add("equals_expected_group", sy.groups_equal(g, exp), True)
    return rep


def cmd_homogeneity(args) -> Report:
    obj = load_json(args.inp)
    ks = _int_list(args.k)
    rep = Report("homogeneity", {"in": Path(args.inp).name, "mode": args.mode, "k": ks})
    g = _group(obj, args.mode, _budget(args))
    rep.count("search_nodes", g.search_info.get("nodes", 0))
    rep.add("order", g.order)
    for k in ks:
        rep.add(f"{k}-homogeneous", sy.is_k_homogeneous(g, k))
        rep.add(f"{k}-transitive", sy.is_k_transitive(g, k))
    return rep


def _spark_kwargs(args) -> dict:
    kw = {"jobs": args.jobs}
    if getattr(args, "max_size", None):
        kw["max_size"] = args.max_size
    if _budget(args) is not None:
        kw["budget"] = _budget(args)
    return kw


def cmd_spark(args) -> Report:
    g = _as_gram(load_json(args.inp))
    rep = Report("spark", {"in": Path(args.inp).name, "max_size": args.max_size})
    res = mt.spark_search(g, **_spark_kwargs(args))
    rep.count("enumeration_nodes", res.nodes)
    rep.add("spark", res.spark)
    rep.add("full_spark", res.full_spark)
    if res.lower_bound is not None:
        rep.add("spark_lower_bound", res.lower_bound)
        rep.add("spark_at_least_bound", res.spark >= res.lower_bound, True)
        rep.add("lower_bound_attained", mt.spark_lower_bound_attained(res.d, res.n, res.spark))
    rep.data["dimension"] = res.d
    return rep


def cmd_bender(args) -> Report:
    g = _as_gram(load_json(args.inp))
    rep = Report("bender", {"in": Path(args.inp).name, "design_check": args.design_check})
    res = mt.spark_search(g, **_spark_kwargs(args))
    rep.count("enumeration_nodes", res.nodes)
    bd = mt.bender(g, res)
    rep.add("spark", res.spark)
    rep.add("blocks", len(bd))
    rep.add("circuits_sampled_minimal", mt.check_circuits(g, bd), True)
    if args.design_check:
        deg = mt.bender_design_degree(bd)
        rep.add("design_degree", deg.t)
        for t, lam in sorted(deg.lambdas.items()):
            rep.add(f"lambda_{t}", lam)
    if args.out:
        Path(args.out).write_text(json.dumps(bd.to_json(), separators=(",", ":")) + "\n")
    return rep


def cmd_design(args) -> Report:
    data = json.loads(Path(args.inp).read_text())
    bd = mt.BlockDesign.from_json(data)
    rep = Report("design", {"in": Path(args.inp).name, "t": args.t})
    lam = mt.is_t_design(bd, args.t)
    rep.add(f"{args.t}-design", lam is not None)
    rep.add("lambda", lam)
    rep.add("blocks", len(bd))
    return rep


def cmd_switch_equiv(args) -> Report:
    a, b = load_json(args.a), load_json(args.b)
    rep = Report("switch-equiv", {"a": Path(args.a).name, "b": Path(args.b).name, "search": args.search})
    ga_, gb = _as_gram(a), _as_gram(b)
    rep.add("aligned_equivalent", ga.switching_equivalent_aligned(ga_, gb))
    if args.search:
        perm = sy.find_tp_isomorphism(ga.triple_labels(ga_), ga.triple_labels(gb))
        rep.add("equivalent_up_to_permutation", perm is not None)
        rep.data["permutation"] = list(perm) if perm is not None else None
    return rep


# -- campaigns ----------------------------------------------------------------------------


def _paley_feasibility(q: int, budget: int) -> dict | None:
    """Budget report if the spark enumeration for Phi_q cannot fit, else None."""
    d, n = (q - 1) // 2, q
    lb = mt.spark_lower_bound_ceiling(d, n)
    est = mt._nodes_estimate(n, lb)
    if est > budget:
        return {
            "q": q,
            "d": d,
            "n": n,
            "spark_lower_bound": lb,
            "estimated_nodes_at_bound": est,
            "subsets_at_bound": math.comb(n, lb),
            "budget": budget,
            "reason": "spark enumeration is beyond the configured budget",
        }
    return None


def _suite_item(rep: Report, q: int, budget: int, jobs: int, modulus=None) -> None:
    tag = f"q={q}"
    pp = prime_power(q)
    if pp is None or q % 4 != 3 or q <= 3:
        rep.add(f"{tag}:admissible", False, passed=None, note="rejected: q must be a prime power = 3 mod 4 and > 3")
        rep.rejected = True
        return
    p, s = pp
    infeasible = _paley_feasibility(q, budget)
    if infeasible is not None:
        rep.add(f"{tag}:refused", True, passed=None, note="out of reach at this budget; no partial claims made")
        rep.budget_report = dict(rep.budget_report or {}, **{tag: infeasible})
        return
    fld = field_for_order(q, modulus)
    it = intertwiner(fld)
    d = (q - 1) // 2
    ds = cx.is_difference_set([p] * s if s > 1 else [q], _qr_group_elements(fld))
    rep.add(f"{tag}:qr_difference_set", list(ds.params()) if ds else None, [q, d, (q - 3) // 4])

    frame = cx.paley_etf(fld)
    g = ga.gram(frame)
    rep.add(f"{tag}:equiangular_value", ga.check_equiangular(g).value, Fraction(q + 1, 4))
    tight = ga.check_tight(g)
    rep.add(f"{tag}:frame_bound", tight.value, q)
    rep.add(f"{tag}:dimension", tight.detail.get("rank"), d)

    gens = cx.paley_symmetry_generators(fld)
    rep.add(f"{tag}:generators_verified", len(gens.all()), q + 2)
    pi_cycles = sy.cycle_notation(gens.galois.operator.row_map)
    rep.add(f"{tag}:galois_row_cycles", pi_cycles, EXPECTED_PI_CYCLES_27 if q == 27 else None)

    expected_order = q * d * s
    agl = sy.agl_subgroup(fld, it)
    kw = {"budget": budget}
    vec = sy.vector_symmetry_group(ga.pair_labels(g), **kw)
    lines = sy.line_symmetry_group(ga.triple_labels(g), **kw)
    rep.count("search_nodes", vec.search_info.get("nodes", 0) + lines.search_info.get("nodes", 0))
    rep.add(f"{tag}:vector_group_order", vec.order, expected_order)
    rep.add(f"{tag}:line_group_order", lines.order, expected_order)
    rep.add(f"{tag}:vector_group_is_agl", sy.groups_equal(vec, agl), True)
    rep.add(f"{tag}:line_group_is_agl", sy.groups_equal(lines, agl), True)
    rep.add(f"{tag}:paley_generators_in_line_group", all(lines.contains(x) for x in gens.permutations()), True)
    rep.add(f"{tag}:2-homogeneous", sy.is_k_homogeneous(lines, 2), True)
    rep.add(f"{tag}:2-transitive", sy.is_k_transitive(lines, 2), False)

    res = mt.spark_search(g, budget=budget, jobs=jobs)
    rep.count("enumeration_nodes", res.nodes)
    conj = ((p + 1) // 2) ** s
    if s == 1 or q == 27:
        rep.add(f"{tag}:spark", res.spark, conj)
    else:
        rep.add(f"{tag}:spark", res.spark, conj, passed=None, note="conjectured value, reported only")
    bd = mt.bender(g, res)
    if res.full_spark:
        rep.add(f"{tag}:bender_blocks", len(bd), math.comb(q, res.spark))
    elif q == 27:
        rep.add(f"{tag}:bender_blocks", len(bd), 28 * math.comb(27, 2) // math.comb(8, 2))
    else:
        rep.add(f"{tag}:bender_blocks", len(bd))
    rep.add(f"{tag}:bender_invariant_under_line_group", all(bd.is_invariant_under(x) for x in lines.generators), True)
    rep.add(f"{tag}:circuits_sampled_minimal", mt.check_circuits(g, bd), True)
    deg = mt.bender_design_degree(bd, lines)
    rep.add(f"{tag}:bender_design_degree_at_least_2", deg.t >= 2, True)
    if res.full_spark:
        rep.add(f"{tag}:bender_complete_design", deg.t, res.spark)
    rep.add(f"{tag}:bender_lambda_2", deg.lambdas.get(2), 28 if q == 27 else None)


def _qr_group_elements(fld):
    if fld.s == 1:
        return [c[0] for c in qr_set(fld)]
    return [tuple(c) for c in qr_set(fld)]


def cmd_paper_suite(q_list, budget: int | None = None, jobs: int = 1, moduli: dict | None = None) -> Report:
    budget = mt._budget_default() if budget is None else budget
    rep = Report("paper-suite", {"q": list(q_list), "budget": budget})
    for q in q_list:
        try:
            _suite_item(rep, q, budget, jobs, (moduli or {}).get(q))
        except BudgetExceeded as exc:
            rep.add(f"q={q}:refused", True, passed=None, note=str(exc))
            rep.budget_report = dict(rep.budget_report or {}, **{f"q={q}": exc.report})
    return rep


def cmd_khom_suite(budget: int | None = None) -> Report:
    rep = Report("khom-suite", {})
    kw = {} if budget is None else {"budget": budget}
    for q in (3, 7):
        tag = f"conference q={q}"
        g = cx.conference_etf_gram(q)
        tight = ga.check_tight(g)
        rep.add(f"{tag}:n", g.n, q + 1)
        rep.add(f"{tag}:d", tight.detail.get("rank"), (q + 1) // 2)
        v = ga.check_3c_uniform(g)
        rep.add(f"{tag}:3c_uniform", v.passed, True)
        rep.add(f"{tag}:triple_products_purely_imaginary", v.detail["purely_imaginary"], True)
        lines = sy.line_symmetry_group(ga.triple_labels(g), **kw)
        rep.count("search_nodes", lines.search_info.get("nodes", 0))
        rep.add(f"{tag}:3-subset_orbit", sy.k_subset_orbit_size(lines, 3), math.comb(q + 1, 3))
        rep.add(f"{tag}:3-homogeneous", sy.is_k_homogeneous(lines, 3), True)

    g7 = ga.gram(cx.paley_etf(7))
    lines7 = sy.line_symmetry_group(ga.triple_labels(g7), **kw)
    rep.add("paley q=7:3c_uniform", ga.check_3c_uniform(g7).passed, False)
    rep.add("paley q=7:3-homogeneous", sy.is_k_homogeneous(lines7, 3), False)
    rep.add("paley q=7:3-subset_orbit", sy.k_subset_orbit_size(lines7, 3))

    simplex = cx.simplex_gram(5)
    sl = sy.line_symmetry_group(ga.triple_labels(simplex))
    rep.add("simplex n=5:line_group_order", sl.order, 120)
    rep.add("simplex n=5:k-homogeneous for k<=5", all(sy.is_k_homogeneous(sl, k) for k in range(1, 6)), True)
    rep.add("simplex n=5:3c_uniform", ga.check_3c_uniform(simplex).passed, True)
    onb = sy.vector_symmetry_group(ga.pair_labels(cx.onb_gram(4)))
    rep.add("onb n=4:vector_group_order", onb.order, 24)

    gs = sy.line_symmetry_group(ga.triple_labels(cx.gabor_steiner_tp_table(3)), **kw)
    rep.count("search_nodes", gs.search_info.get("nodes", 0))
    rep.add("gabor-steiner p=3:line_group_order", gs.order, 216)
    rep.add("gabor-steiner p=3:contains ASp(2,3)", sy.is_subgroup(sy.asp_group(3), gs), True)
    rep.add("gabor-steiner p=3:2-transitive", sy.is_k_transitive(gs, 2), True)
    return rep


# -- argument parsing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="enumeration/search budget (overrides ETF_FORGE_BUDGET)")
    common.add_argument("--wall-time", action="store_true", help="include wall-clock seconds in the report")

    parser = _Parser(prog="etf-forge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("field", parents=[common], help="finite field model, residues and intertwiner")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--modulus", help="comma-separated coefficients, constant term first, monic")
    p.set_defaults(func=cmd_field)

    def add_construct_args(c, kind):
        if kind in ("paley", "conference"):
            c.add_argument("--q", type=int, required=True)
        if kind == "paley":
            c.add_argument("--modulus")
        if kind == "diffset":
            c.add_argument("--group", required=True, help="cyclic factor orders, e.g. 7 or 2,2")
            c.add_argument("--set", required=True, help="e.g. 1,2,4 or [[0,1],[1,0],[1,1]]")
        if kind in ("simplex", "onb"):
            c.add_argument("--n", type=int, required=True)
        if kind == "gabor-steiner-tp":
            c.add_argument("--p", type=int, required=True)
        c.add_argument("--out")
        c.set_defaults(kind=kind, func=cmd_construct)

    p = sub.add_parser("construct", help="build a frame, Gram matrix or triple table")
    csub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("paley", "diffset", "conference", "simplex", "onb", "gabor-steiner-tp"):
        add_construct_args(csub.add_parser(kind, parents=[common]), kind)
    add_construct_args(sub.add_parser("paley", parents=[common], help="alias of construct paley"), "paley")

    p = sub.add_parser("analyze", parents=[common], help="equiangularity, tightness, 3c-uniformity")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--checks", default="equiangular,tight")
    p.set_defaults(func=cmd_analyze)

    for name, func in (("symmetry", cmd_symmetry), ("homogeneity", cmd_homogeneity)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--in", dest="inp", required=True)
        p.add_argument("--mode", choices=["lines", "vectors"], default="lines")
        if name == "symmetry":
            p.add_argument("--expect", help="agl:q, asp:p or sym")
            p.add_argument("--modulus", help="field modulus used to build the input (for agl:q)")
        else:
            p.add_argument("--k", default="1,2,3,4")
        p.set_defaults(func=func)

    for name, func in (("spark", cmd_spark), ("bender", cmd_bender)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--in", dest="inp", required=True)
        p.add_argument("--max-size", type=int)
        p.add_argument("--jobs", type=int, default=1)
        if name == "bender":
            p.add_argument("--design-check", action="store_true")
            p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("design", parents=[common], help="t-design verification of a block file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--t", type=int, default=2)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("switch-equiv", parents=[common], help="switching equivalence of two ETFs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--search", action="store_true", help="also search over index permutations")
    p.set_defaults(func=cmd_switch_equiv)

    p = sub.add_parser("paper-suite", parents=[common], help="Paley reproduction campaign")
    p.add_argument("--q", default="7,11,27")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--modulus", action="append", default=[], help="q=c0,c1,... override, repeatable")
    p.set_defaults(func=lambda a: cmd_paper_suite(_int_list(a.q), _budget(a), a.jobs, _moduli(a.modulus)))

    p = sub.add_parser("khom-suite", parents=[common], help="3-homogeneity campaign")
    p.set_defaults(func=lambda a: cmd_khom_suite(_budget(a)))
    return parser


def _moduli(items) -> dict:
    out = {}
    for item in items:
        q, _, coeffs = item.partition("=")
        out[int(q)] = tuple(_int_list(coeffs))
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command if args.command != "construct" else f"construct {args.kind}"
    t0 = time.perf_counter()
    try:
        rep = args.func(args)
    except BudgetExceeded as exc:
        rep = Report(command, {k: v for k, v in vars(args).items() if k not in ("func",)})
        rep.budget_report = dict(exc.report, message=str(exc))
    except ConsistencyError as exc:
        rep = Report(command, {k: v for k, v in vars(args).items() if k not in ("func",)})
        rep.add("internal_consistency", str(exc), passed=False)
    except (ValueError, NotAnEtfError, FileNotFoundError, EtfForgeError) as exc:
        print(f"etf-forge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    wall = time.perf_counter() - t0 if getattr(args, "wall_time", False) else None
    print(rep.dumps(wall))
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
