"""
Properties of the string diagram calculus: inert maps evaluate to identities,
evaluation is local under cutting and disjoint unions, the named figures give
their hand-computed values, and D matches its generator table.
"""
import logging
from typing import Callable, Dict, Iterable, List, Optional

from shadowcalc import generators as gen
from shadowcalc.base_finset import BaseMap, BaseObject, LabeledProduct, LabeledProductMap
from shadowcalc.colorings import Color3, Coloring, embed_obj
from shadowcalc.d_diagram import d_arrow, d_object
from shadowcalc.errors import ShadowcalcError
from shadowcalc.families import Family
from shadowcalc.graph_core import path_graph
from shadowcalc.labeled_graphs import GraphDiagram, LabeledGraph, constellation_iso, is_inert
from shadowcalc.locality import check_disjoint_union, check_locality
from shadowcalc.matrices import MatrixObject
from shadowcalc.named_ops import (op_base_change_l, op_base_change_r, op_boxtimes, op_I, op_odot,
                                  op_pull, op_push, op_shadow, op_unit)
from shadowcalc.plans import Backend, evaluate, get_backend, inert_relabeling, plan_from
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "String Diagram Calculus Properties"
SUITE_NAMES = ["inert-identity", "locality", "disjoint-union", "named-figures", "d-table"]
DEFAULTS = {"instances": 100, "max_internal": 5}

W, G_, K = Color3.WHITE, Color3.GRAY, Color3.BLACK


# =============================================================================
# 2. INSTANCE GENERATION
# =============================================================================

def random_path(rng) -> LabeledGraph:
    return gen.random_labeled_path(rng, int(rng.integers(2, DEFAULTS["max_internal"] + 1)), force_black=True)


def fiber(backend_name: str, base: LabeledProduct, counts: Dict):
    if backend_name == "family":
        return Family.from_counts(base, counts)
    return MatrixObject.from_ranks(base, counts)


def counts_of(b: Backend, X) -> list:
    summary = b.summary(X)
    return summary.get("cardinalities", summary.get("ranks"))


def d_table_string():
    """● e1 w e2 w e3 ● with f: B1 -> B2 and g: B2 -> B3 on the two whites."""
    B1 = BaseObject((0, 1), name="B1")
    B2 = BaseObject(("a", "b", "c"), name="B2")
    B3 = BaseObject((True, False), name="B3")
    f = BaseMap(B1, B2, ("b", "c"))
    g = BaseMap(B2, B3, (True, True, False))
    G = LabeledGraph.build(path_graph(["black", "white", "white", "black"]), {1: B1, 2: B2, 3: B3},
                           orient={101: (1, 2), 102: (2, 3)}, vertex_label={101: f, 102: g})
    return G, (B1, B2, B3), (f, g)


# =============================================================================
# 3. ANALYSIS LOGIC (CORE ENGINE)
# =============================================================================

def inert_identity(seed: int, count: int, backend_name: str) -> CoherenceReport:
    """An inert map relabels each component's value along identity base maps."""
    b = get_backend(backend_name)
    report = CoherenceReport("inert-identity", "inert maps act as identities")
    for k in range(count):
        instance = seed + k
        rng = gen.make_rng(instance)
        try:
            P = gen.random_inert_map(rng, random_path(rng))
            if not is_inert(P):
                report.record(instance, False, {"reason": "generated map is not inert"})
                continue
            a = gen.random_assignment(rng, embed_obj(P.source), backend_name)
            plan = plan_from(P)
            out = evaluate(plan, a, b)
            track = inert_relabeling(plan)
            comps = constellation_iso(P)
            witness = None
            for v, (u, R) in track.items():
                if comps is not None and comps.get(u) != v:
                    witness = {"component": repr(v), "reason": "not the constellation bijection"}
                elif not all(c.is_identity for c in R.components):
                    witness = {"component": repr(v), "reason": "relabeling changes elements"}
                elif out.values[v] != b.pullback(R, a.values[u]):
                    witness = {"component": repr(v), "reason": "value is not the relabeled input"}
                if witness:
                    break
            report.record(instance, witness is None, witness)
        except ShadowcalcError as e:
            report.record_error(instance, e)
    return report


def locality(seed: int, count: int, backend_name: str) -> CoherenceReport:
    b = get_backend(backend_name)
    report = CoherenceReport("locality", "evaluation is invariant under cutting")
    for k in range(count):
        instance = seed + k
        rng = gen.make_rng(instance)
        try:
            G = random_path(rng)
            P = gen.random_darkening_chain(rng, G, 1)[0]
            T_target = {v for v in P.target.graph.internal_whites if rng.random() < 0.5}
            T_source = {v for v in G.graph.internal_whites if P(v) in T_target}
            F = GraphDiagram({"G": G, "H": P.target}, (("G", "H", P),))
            a = gen.random_assignment(rng, embed_obj(G), backend_name)
            part = check_locality(F, {"G": T_source, "H": T_target}, {"G": a}, b)
            for v in part.verdicts:
                v["instance"] = instance
            report.extend(part)
        except ShadowcalcError as e:
            report.record_error(instance, e)
    return report


def disjoint_union(seed: int, count: int, backend_name: str) -> CoherenceReport:
    b = get_backend(backend_name)
    report = CoherenceReport("disjoint-union", "a union of maps evaluates side by side")
    for k in range(count):
        instance = seed + k
        rng = gen.make_rng(instance)
        try:
            P1 = gen.random_darkening_chain(rng, random_path(rng), 1)[0]
            P2 = gen.random_darkening_chain(rng, random_path(rng), 1)[0]
            a1 = gen.random_assignment(rng, embed_obj(P1.source), backend_name)
            a2 = gen.random_assignment(rng, embed_obj(P2.source), backend_name)
            part = check_disjoint_union(P1, P2, a1, a2, b)
            for v in part.verdicts:
                v["instance"] = instance
            report.extend(part)
        except ShadowcalcError as e:
            report.record_error(instance, e)
    return report


def figure_checks(backend_name: str) -> Dict[str, Callable[[], bool]]:
    """Hand-computed values of the named figures."""
    b = get_backend(backend_name)
    B = BaseObject((0, 1), name="B")
    A = BaseObject((0, 1), name="A")
    point = BaseObject((0,), name="pt")
    f = BaseMap(A, point, (0, 0))
    BB = LabeledProduct.of({0: B, 1: B})
    M = fiber(backend_name, BB, {(0, 0): 2, (0, 1): 1, (1, 1): 3})
    N = fiber(backend_name, BB, {(0, 1): 2, (1, 0): 1})
    X = fiber(backend_name, LabeledProduct.of({0: point}), {(0,): 3})
    Y = fiber(backend_name, LabeledProduct.of({0: A}), {(0,): 1, (1,): 2})

    def total(Z):
        return b.summary(Z)["total"]

    return {
        "unit is the diagonal": lambda: counts_of(b, op_unit(B, b)) == [[1, 0], [0, 1]],
        "shadow of M": lambda: total(op_shadow(M, b)) == 5,
        "shadow of the unit": lambda: total(op_shadow(op_unit(B, b), b)) == len(B),
        "left base change": lambda: counts_of(b, op_base_change_l(f, b)) == [[1], [1]],
        "right base change": lambda: counts_of(b, op_base_change_r(f, b)) == [[1, 1]],
        "monoidal unit": lambda: total(op_I(b)) == 1,
        "pullback": lambda: counts_of(b, op_pull(f, X, b)) == [3, 3],
        "pushforward": lambda: counts_of(b, op_push(f, Y, b)) == [3],
        "external product": lambda: total(op_boxtimes(M, N, b)) == total(M) * total(N),
        "composition with the unit": lambda: counts_of(b, op_odot(op_unit(B, b), M, b)) == counts_of(b, M),
    }


def named_figures(backend_name: str) -> CoherenceReport:
    report = CoherenceReport("named-figures", "hand-computed values of the named operations")
    for name, check in figure_checks(backend_name).items():
        try:
            ok = check()
            report.record(name, ok, None if ok else {"figure": name})
        except ShadowcalcError as e:
            report.record_error(name, e)
    return report


def d_table_rows():
    """(gray coloring, flipped coloring, index map, components) for the generator table."""
    G, (B1, B2, B3), (f, g) = d_table_string()
    ident = BaseMap.identity

    def col(x, y):
        return Coloring.of(G, {101: x.value, 102: y.value})

    return G, [
        (col(G_, G_), col(W, G_), {1: 1, 2: 1}, {1: ident(B1), 2: f}),
        (col(G_, G_), col(G_, W), {1: 1, 3: 1}, {1: ident(B1), 3: f.then(g)}),
        (col(G_, G_), col(K, G_), {2: 1}, {2: f}),
        (col(G_, G_), col(G_, K), {1: 1}, {1: ident(B1)}),
        (col(W, G_), col(W, W), {1: 1, 3: 2}, {1: ident(B1), 3: g}),
        (col(W, G_), col(W, K), {1: 1, 2: 2}, {1: ident(B1), 2: ident(B2)}),
        (col(G_, W), col(K, W), {2: 1, 3: 3}, {2: f, 3: ident(B3)}),
        (col(K, G_), col(K, W), {2: 2, 3: 2}, {2: ident(B2), 3: g}),
        (col(G_, K), col(K, K), {}, {}),
    ]


def d_table() -> CoherenceReport:
    report = CoherenceReport("d-table", "D on the generator table of the three-edge string")
    G, rows = d_table_rows()
    for n, (hi, lo, p, comps) in enumerate(rows, start=1):
        try:
            expected = LabeledProductMap.build(d_object(G, hi), d_object(G, lo), p, comps)
            got = d_arrow(G, hi, lo)
            ok = got == expected
            report.record(n, ok, None if ok else {"from": repr(hi.key), "to": repr(lo.key), "got": repr(got)})
        except ShadowcalcError as e:
            report.record_error(n, e)
    return report


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    wanted = set(only) if only is not None else set(SUITE_NAMES)
    count = instances or DEFAULTS["instances"]
    runs = {
        "inert-identity": lambda: inert_identity(seed, count, backend),
        "locality": lambda: locality(seed, count, backend),
        "disjoint-union": lambda: disjoint_union(seed, count, backend),
        "named-figures": lambda: named_figures(backend),
        "d-table": d_table,
    }
    reports = [run() for name, run in runs.items() if name in wanted]
    for r in reports:
        logger.info("%s: %s", r.name, r.verdict)
    return reports
