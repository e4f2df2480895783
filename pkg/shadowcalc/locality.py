"""
Locality of the calculus: cutting a diagram of graphs along a compatible
family of internal whites does not change what its arrows evaluate to, and a
disjoint union of maps evaluates componentwise.
"""
import logging
from typing import Dict, Mapping, Set, Tuple

from shadowcalc.colorings import embed_obj
from shadowcalc.errors import ShadowcalcError, ShapeMismatch, StampMismatch
from shadowcalc.graph_core import Cell
from shadowcalc.labeled_graphs import (GraphDiagram, LabeledGraphMap, cut_along, cut_caps,
                                       disjoint_union, labeled_map, union_shift,
                                       validate_cut_set)
from shadowcalc.plans import FAMILY_BACKEND, Assignment, Backend, evaluate, plan_from
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CUT AND UNION MAPS
# =============================================================================

def cut_map(P: LabeledGraphMap, T_source: Set[int], T_target: Set[int]) -> LabeledGraphMap:
    """The map between the cut graphs; each cap goes to the cap of the image edge at the image vertex."""
    source, target = cut_along(P.source, T_source), cut_along(P.target, T_target)
    src_caps, tgt_caps = cut_caps(P.source, T_source), cut_caps(P.target, T_target)
    vmap = {v: P(v) for v in P.source.graph.vertices if v not in T_source}
    for (e, x), cap in src_caps.items():
        cell = P.edge_image(e)
        if not cell.is_edge:
            raise ShapeMismatch(f"edge {e} at cut vertex {x} is collapsed", edge=e, vertex=x)
        vmap[cap] = tgt_caps[(cell.id, P(x))]
    emap = {e: P.edge_image(e) for e in source.graph.edges}
    iota = {E: P.iota[E] for E in target.graph.edges}
    return labeled_map(source, target, vmap, emap, iota)


def union_map(P1: LabeledGraphMap, P2: LabeledGraphMap) -> Tuple[LabeledGraphMap, int, int]:
    """P1 ⊔ P2 with the second map's ids shifted; returns the map and the source/target shifts."""
    s, t = union_shift(P1.source), union_shift(P1.target)
    source, target = disjoint_union(P1.source, P2.source), disjoint_union(P1.target, P2.target)
    vmap = dict(P1.underlying.vmap)
    vmap.update({v + s: P2(v) + t for v in P2.source.graph.vertices})
    emap = dict(P1.underlying.emap)
    emap.update({e + s: Cell(c.kind, c.id + t) for e, c in P2.underlying.emap.items()})
    iota = dict(P1.iota)
    iota.update({E + t: f for E, f in P2.iota.items()})
    return labeled_map(source, target, vmap, emap, iota), s, t


def _shift_values(a: Assignment, shift: int, backend: Backend) -> Dict:
    return {u + shift: backend.relabel(X, {e: e + shift for e in backend.base_of(X).index})
            for u, X in a.values.items()}


# =============================================================================
# 2. CHECKS
# =============================================================================

def _transport(a: Assignment, P: LabeledGraphMap, backend: Backend) -> Assignment:
    """The same values on the stamp of a cut source; components and glue edges are unchanged by cutting."""
    stamp = embed_obj(P.source)
    if set(stamp.components) != set(a.values):
        raise StampMismatch("cutting changed the components of the source")
    for u in stamp.components:
        if stamp.base(u) != backend.base_of(a.values[u]):
            raise StampMismatch("cutting changed the base of a component", component=u)
    return Assignment(stamp, dict(a.values))


def check_locality(F: GraphDiagram, T: Mapping[str, Set[int]], assignments: Mapping[str, Assignment],
                   backend: Backend = FAMILY_BACKEND) -> CoherenceReport:
    """Evaluate every arrow of F before and after cutting along T and compare the results."""
    report = CoherenceReport("locality", "string diagram calculus, property 3")
    issues = validate_cut_set(F, T)
    if not issues.valid:
        raise ShapeMismatch("cut set is not compatible with the diagram", issues=issues.codes())
    for src, dst, P in F.arrows:
        instance = f"{src}->{dst}"
        try:
            whole = evaluate(plan_from(P), assignments[src], backend)
            Q = cut_map(P, set(T.get(src, set())), set(T.get(dst, set())))
            cut = evaluate(plan_from(Q), _transport(assignments[src], Q, backend), backend)
            diff = [u for u in whole.values if whole.values[u] != cut.values.get(u)]
            witness = {"component": repr(diff[0])} if diff else None
            report.record(instance, not diff, witness)
        except ShadowcalcError as e:
            report.record_error(instance, e)
    logger.info("locality: %d arrows checked", len(F.arrows))
    return report


def check_disjoint_union(P1: LabeledGraphMap, P2: LabeledGraphMap, a1: Assignment, a2: Assignment,
                         backend: Backend = FAMILY_BACKEND) -> CoherenceReport:
    """The union of two maps evaluates to the two separate evaluations side by side."""
    report = CoherenceReport("disjoint-union", "string diagram calculus, property 3")
    try:
        P, s, t = union_map(P1, P2)
        values = dict(a1.values)
        values.update(_shift_values(a2, s, backend))
        together = evaluate(plan_from(P), Assignment(embed_obj(P.source), values), backend)
        expected = dict(evaluate(plan_from(P1), a1, backend).values)
        expected.update(_shift_values(evaluate(plan_from(P2), a2, backend), t, backend))
        diff = sorted(u for u in expected if together.values.get(u) != expected[u])
        report.record("union", not diff, {"component": repr(diff[0])} if diff else None)
    except ShadowcalcError as e:
        report.record_error("union", e)
    return report
