"""
Decorated graphs: orientations of internal white vertices, base labels on
edges and vertices, edge identifications along maps, inert morphisms and the
cutting operations.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from shadowcalc.base_finset import STAR, BaseMap, BaseObject, product
from shadowcalc.errors import (CompositionMismatch, InvalidMorphism, NotInternalWhite,
                               ValidationReport)
from shadowcalc.graph_core import (Cell, Color, ColoredGraph, GraphMap, collapse, compose_maps,
                                   factorize, identity_map, validate_graph,
                                   validate_map)

logger = logging.getLogger(__name__)

# =============================================================================
# 1. LABELED GRAPHS
# =============================================================================

@dataclass(frozen=True)
class LabeledGraph:
    """
    A colored graph with (source, target) edges for every internal white
    vertex, a base object on every edge and a base map on every internal white.
    """
    graph: ColoredGraph
    orient: Mapping[int, Tuple[int, int]]
    edge_label: Mapping[int, BaseObject]
    vertex_label: Mapping[int, BaseMap]

    @classmethod
    def build(cls, graph: ColoredGraph, edge_label: Mapping[int, BaseObject],
              orient: Optional[Mapping[int, Tuple[int, int]]] = None,
              vertex_label: Optional[Mapping[int, BaseMap]] = None) -> "LabeledGraph":
        """Missing orientations follow edge ids; missing vertex labels are identities."""
        orient = dict(orient or {})
        vertex_label = dict(vertex_label or {})
        for v in graph.internal_whites:
            if v not in orient:
                orient[v] = tuple(graph.incidence[v])
            if v not in vertex_label:
                s, t = orient[v]
                if edge_label[s] == edge_label[t]:
                    vertex_label[v] = BaseMap.identity(edge_label[s])
        return cls(graph, orient, dict(edge_label), vertex_label)

    @classmethod
    def empty(cls) -> "LabeledGraph":
        return cls(ColoredGraph.empty(), {}, {}, {})

    def source_edge(self, v: int) -> int:
        return self.orient[v][0]

    def target_edge(self, v: int) -> int:
        return self.orient[v][1]

    def label(self, e: int) -> BaseObject:
        return self.edge_label[e]

    @cached_property
    def black_clusters(self) -> Dict[int, int]:
        """Each black vertex mapped to the least black id of its black-black cluster."""
        g = nx.Graph()
        g.add_nodes_from(self.graph.blacks)
        for e, (a, b) in self.graph.edges.items():
            if self.graph.is_black(a) and self.graph.is_black(b):
                g.add_edge(a, b)
        rep = {}
        for comp in nx.connected_components(g):
            r = min(comp)
            for v in comp:
                rep[v] = r
        return rep

    @cached_property
    def memo(self) -> Dict:
        """Per-graph cache for gray edges and diagram values."""
        return {}

    def with_graph(self, graph: ColoredGraph) -> "LabeledGraph":
        """Same labels on a recolored copy; orientations kept for remaining internal whites."""
        keep = set(graph.internal_whites)
        return LabeledGraph(graph,
                            {v: st for v, st in self.orient.items() if v in keep},
                            dict(self.edge_label),
                            {v: f for v, f in self.vertex_label.items() if v in keep})


def validate_labeled(G: LabeledGraph) -> ValidationReport:
    """Graph invariants plus orientation, chain consistency and label typing."""
    report = validate_graph(G.graph)
    g = G.graph
    for e in sorted(g.edges):
        if e not in G.edge_label:
            report.add("MissingLabel", [e], "edge has no base label")
    if not report.valid:
        return report
    for v in g.internal_whites:
        if v not in G.orient:
            report.add("MissingOrientation", [v], "internal white without orientation")
            continue
        s, t = G.orient[v]
        if s == t:
            report.add("OrientationLoop", [v, s], "source and target edge coincide")
            continue
        if s not in g.incidence[v] or t not in g.incidence[v]:
            report.add("OrientationNotIncident", [v, s, t], "oriented edge not incident to vertex")
            continue
        if v not in G.vertex_label:
            report.add("MissingLabel", [v], "internal white has no base map")
            continue
        f = G.vertex_label[v]
        if f.source != G.edge_label[s] or f.target != G.edge_label[t]:
            report.add("LabelTypeMismatch", [v, s, t], "vertex label does not match edge labels")
    if not report.valid:
        return report
    for e, (a, b) in sorted(g.edges.items()):
        if a != b and g.is_internal_white(a) and g.is_internal_white(b):
            if (G.source_edge(a) == e) != (G.target_edge(b) == e):
                report.add("ChainInconsistent", [e, a, b], "orientation flips along a white string")
    return report


# =============================================================================
# 2. LABELED GRAPH MAPS
# =============================================================================

def preimage_product(source: LabeledGraph, preimages: Sequence[int]) -> BaseObject:
    if not preimages:
        return STAR
    return product(*(source.label(e) for e in preimages))


@dataclass(frozen=True)
class LabeledGraphMap:
    """
    A graph map with an edge identification for every target edge:
    iota[E] : label(E) -> product of the labels of the edges over E (by EdgeId).
    """
    source: LabeledGraph
    target: LabeledGraph
    underlying: GraphMap
    iota: Mapping[int, BaseMap]

    def __call__(self, v: int) -> int:
        return self.underlying.vmap[v]

    @property
    def edge_preimages(self) -> Dict[int, List[int]]:
        return self.underlying.edge_preimages

    def edge_image(self, e: int) -> Cell:
        return self.underlying.emap[e]

    def identification(self, E: int, e: int) -> BaseMap:
        """label(E) -> label(e) for an edge e over E: iota followed by projection."""
        pre = self.edge_preimages[E]
        i = pre.index(e)
        iota = self.iota[E]
        return BaseMap.from_function(iota.source, self.source.label(e), lambda x: iota(x)[i])

    def pull_coloring(self, colors: Mapping[int, object]) -> Dict[int, object]:
        return {v: colors[self(v)] for v in self.source.graph.vertices}


def default_iota(source: LabeledGraph, target: LabeledGraph, underlying: GraphMap,
                 given: Optional[Mapping[int, BaseMap]] = None) -> Dict[int, BaseMap]:
    """
    Identifications chosen by shape: the empty product for edges outside the
    image, tupling for a single preimage, and the identity on tuples otherwise.
    """
    iota = dict(given or {})
    for E, pre in underlying.edge_preimages.items():
        if E in iota:
            continue
        label = target.label(E)
        prod = preimage_product(source, pre)
        if not pre:
            iota[E] = BaseMap.from_function(label, STAR, lambda x: ())
        elif len(pre) == 1:
            iota[E] = BaseMap.from_function(label, prod, lambda x: (x,))
        else:
            iota[E] = BaseMap.from_function(label, prod, lambda x: tuple(x))
    return iota


def labeled_map(source: LabeledGraph, target: LabeledGraph, vmap: Mapping[int, int],
                emap: Mapping[int, Cell], iota: Optional[Mapping[int, BaseMap]] = None) -> LabeledGraphMap:
    underlying = GraphMap(source.graph, target.graph, dict(vmap), dict(emap))
    report = validate_map(underlying)
    if not report.valid:
        raise InvalidMorphism("underlying graph map is invalid", issues=report.codes())
    return LabeledGraphMap(source, target, underlying, default_iota(source, target, underlying, iota))


def identity_labeled(G: LabeledGraph) -> LabeledGraphMap:
    m = identity_map(G.graph)
    return LabeledGraphMap(G, G, m, default_iota(G, G, m))


def _white_chains(P: LabeledGraphMap, w: int) -> List[Tuple[int, int, BaseMap]]:
    """
    Preimage strings of an internal white w: (in-edge over s(w), out-edge over
    t(w), composite label along the string).
    """
    src = P.source
    collapsed = set(P.underlying.collapsed_edges[w])
    chains = []
    for e_in in P.edge_preimages[P.target.source_edge(w)]:
        a, b = src.graph.edges[e_in]
        v = a if P(a) == w else b
        label = BaseMap.identity(src.label(e_in))
        edge = e_in
        seen = set()
        while True:
            if v in seen or not src.graph.is_internal_white(v):
                return []
            seen.add(v)
            if src.source_edge(v) != edge:
                return []
            label = label.then(src.vertex_label[v])
            out = src.target_edge(v)
            if out not in collapsed:
                chains.append((e_in, out, label))
                break
            edge = out
            v = src.graph.other_end(out, v)
    return chains


def validate_labeled_map(P: LabeledGraphMap) -> ValidationReport:
    """Graph map conditions, orientation square, identification squares."""
    report = validate_map(P.underlying)
    report.extend(validate_labeled(P.source))
    report.extend(validate_labeled(P.target))
    if not report.valid:
        return report
    src, tgt = P.source, P.target
    for v in src.graph.internal_whites:
        w = P(v)
        if not tgt.graph.is_internal_white(w):
            continue
        for e, expected in ((src.source_edge(v), tgt.source_edge(w)), (src.target_edge(v), tgt.target_edge(w))):
            cell = P.edge_image(e)
            if cell.is_edge and cell.id != expected:
                report.add("OrientationMismatch", [v, e, w], "orientation square does not commute")
    for E, pre in sorted(P.edge_preimages.items()):
        iota = P.iota.get(E)
        expected = preimage_product(src, pre)
        if iota is None or iota.source != tgt.label(E) or iota.target != expected:
            report.add("IotaTypeMismatch", [E], "edge identification has the wrong type")
        elif not iota.is_bijective:
            report.add("IotaNotBijective", [E], "edge identification is not a bijection")
    if not report.valid:
        return report
    for w in tgt.graph.internal_whites:
        chains = _white_chains(P, w)
        s_pre = P.edge_preimages[tgt.source_edge(w)]
        t_pre = P.edge_preimages[tgt.target_edge(w)]
        if len(chains) != len(s_pre) or sorted(c[1] for c in chains) != sorted(t_pre):
            report.add("IdentificationMismatch", [w], "preimage strings do not match the factors")
            continue
        by_out = {out: (e_in, lab) for e_in, out, lab in chains}
        iota_s, iota_t = P.iota[tgt.source_edge(w)], P.iota[tgt.target_edge(w)]
        for x in tgt.label(tgt.source_edge(w)).elems:
            xs = dict(zip(s_pre, iota_s(x)))
            lhs = iota_t(tgt.vertex_label[w](x))
            rhs = tuple(by_out[out][1](xs[by_out[out][0]]) for out in t_pre)
            if lhs != rhs:
                report.add("IdentificationMismatch", [w, x], "identification square does not commute")
                break
    return report


def compose_labeled(P: LabeledGraphMap, Q: LabeledGraphMap) -> LabeledGraphMap:
    """Q ∘ P, with identifications composed and flattened in EdgeId order."""
    if P.target != Q.source:
        raise CompositionMismatch("labeled maps are not composable")
    underlying = compose_maps(P.underlying, Q.underlying)
    iota = {}
    for E, pre in underlying.edge_preimages.items():
        q_pre = Q.edge_preimages[E]
        q_iota = Q.iota[E]
        target = preimage_product(P.source, pre)

        def flatten(x, q_iota=q_iota, q_pre=q_pre, pre=pre):
            values = {}
            for e_mid, y in zip(q_pre, q_iota(x)):
                values.update(zip(P.edge_preimages[e_mid], P.iota[e_mid](y)))
            return tuple(values[e] for e in pre)

        iota[E] = BaseMap.from_function(Q.target.label(E), target, flatten)
    return LabeledGraphMap(P.source, Q.target, underlying, iota)


def darkening(G: LabeledGraph, vertices: Iterable[int]) -> LabeledGraphMap:
    """The darkening of the given internal whites, identity on ids."""
    vertices = set(vertices)
    bad = [v for v in vertices if not G.graph.is_internal_white(v)]
    if bad:
        raise NotInternalWhite(f"cannot darken {bad}", vertices=bad)
    colors = {v: (Color.BLACK if v in vertices else c) for v, c in G.graph.vertices.items()}
    H = G.with_graph(ColoredGraph(colors, dict(G.graph.edges)))
    return labeled_map(G, H, {v: v for v in G.graph.vertices}, {e: Cell.edge(e) for e in G.graph.edges})


def collapse_blacks(G: LabeledGraph) -> LabeledGraphMap:
    """Collapse every edge between two blacks; clusters are named by their least id."""
    g = G.graph
    m = collapse(g, [e for e, (a, b) in g.edges.items() if g.is_black(a) and g.is_black(b)])
    H = LabeledGraph(m.target,
                     {v: st for v, st in G.orient.items() if v in m.target.internal_whites},
                     {e: G.label(e) for e in m.target.edges},
                     {v: f for v, f in G.vertex_label.items() if v in m.target.internal_whites})
    return labeled_map(G, H, m.vmap, m.emap)


# =============================================================================
# 3. CUTTING & CONSTELLATIONS
# =============================================================================

@dataclass(frozen=True)
class Constellation:
    """A disjoint union of stars; components are named by their least black id."""
    graph: LabeledGraph
    components: Tuple[int, ...]
    edges_of: Mapping[int, Tuple[int, ...]]

    def component_of_edge(self, e: int) -> int:
        for u, es in self.edges_of.items():
            if e in es:
                return u
        raise KeyError(e)


def maximal_cut(G: LabeledGraph) -> Constellation:
    """
    Collapse black-black edges, delete internal whites and white-white edges,
    and cap the dangling ends with fresh external whites. Edge ids and labels
    are kept; fresh vertex ids start above the largest id of G.
    """
    g = G.graph
    cluster = G.black_clusters
    fresh = g.max_id() + 1
    vertices: Dict[int, Color] = {r: Color.BLACK for r in set(cluster.values())}
    edges: Dict[int, Tuple[int, int]] = {}
    for e, (a, b) in sorted(g.edges.items()):
        black_ends = [x for x in (a, b) if g.is_black(x)]
        if len(black_ends) != 1:
            continue
        center = cluster[black_ends[0]]
        other = b if black_ends[0] == a else a
        if g.is_external_white(other):
            leaf = other
        else:
            leaf = fresh
            fresh += 1
        vertices[leaf] = Color.WHITE
        edges[e] = tuple(sorted((center, leaf)))
    graph = ColoredGraph(dict(sorted(vertices.items())), edges)
    labels = {e: G.label(e) for e in edges}
    comps = tuple(sorted(set(cluster.values())))
    edges_of = {u: tuple(e for e, ends in sorted(edges.items()) if u in ends and graph.is_black(u))
                for u in comps}
    return Constellation(LabeledGraph(graph, {}, labels, {}), comps, edges_of)


def component_map(P: LabeledGraphMap) -> Dict[int, int]:
    """π0Ψ of a map: the black cluster of each source component goes to the cluster of its image."""
    src_cluster = P.source.black_clusters
    tgt_cluster = P.target.black_clusters
    return {r: tgt_cluster[P(r)] for r in sorted(set(src_cluster.values()))}


def cut_caps(G: LabeledGraph, T: Iterable[int]) -> Dict[Tuple[int, int], int]:
    """Fresh cap ids, one per (edge, end in T) of every edge that keeps its other end."""
    T = set(T)
    fresh = G.graph.max_id() + 1
    caps = {}
    for e, (a, b) in sorted(G.graph.edges.items()):
        if a in T and b in T:
            continue
        for x in (a, b):
            if x in T:
                caps[(e, x)] = fresh
                fresh += 1
    return caps


def cut_along(G: LabeledGraph, T: Iterable[int]) -> LabeledGraph:
    """Delete the internal whites in T, capping edges that lose exactly one end."""
    T = set(T)
    bad = sorted(v for v in T if not G.graph.is_internal_white(v))
    if bad:
        raise NotInternalWhite(f"cut set contains {bad}", vertices=bad)
    g = G.graph
    caps = cut_caps(G, T)
    vertices = {v: c for v, c in g.vertices.items() if v not in T}
    vertices.update({cap: Color.WHITE for cap in caps.values()})
    edges = {}
    for e, (a, b) in sorted(g.edges.items()):
        if a in T and b in T:
            continue
        edges[e] = tuple(sorted(caps.get((e, x), x) for x in (a, b)))
    graph = ColoredGraph(dict(sorted(vertices.items())), edges)
    labels = {e: G.label(e) for e in edges}
    return LabeledGraph(graph,
                        {v: st for v, st in G.orient.items() if v in graph.vertices},
                        labels,
                        {v: f for v, f in G.vertex_label.items() if v in graph.vertices})


@dataclass(frozen=True)
class GraphDiagram:
    """A finite diagram of labeled graphs: named objects and arrows between them."""
    objects: Mapping[str, LabeledGraph]
    arrows: Tuple[Tuple[str, str, LabeledGraphMap], ...] = field(default_factory=tuple)


def validate_cut_set(F: GraphDiagram, T: Mapping[str, Set[int]]) -> ValidationReport:
    """Every arrow must pull the cut set of its target back to the cut set of its source."""
    report = ValidationReport()
    for name, G in sorted(F.objects.items()):
        bad = sorted(v for v in T.get(name, set()) if not G.graph.is_internal_white(v))
        if bad:
            report.add("NotInternalWhite", [name, *bad], "cut vertex is not an internal white")
    for src, dst, P in F.arrows:
        pulled = {v for v in P.source.graph.internal_whites if P(v) in T.get(dst, set())}
        if pulled != set(T.get(src, set())):
            diff = sorted(pulled ^ set(T.get(src, set())))
            report.add("CutSetNotPreserved", [src, dst, *diff], "preimage of the cut set differs")
    return report


def shift_ids(G: LabeledGraph, shift: int) -> LabeledGraph:
    g = G.graph
    graph = ColoredGraph({v + shift: c for v, c in g.vertices.items()},
                         {e + shift: (a + shift, b + shift) for e, (a, b) in g.edges.items()})
    return LabeledGraph(graph,
                        {v + shift: (s + shift, t + shift) for v, (s, t) in G.orient.items()},
                        {e + shift: lab for e, lab in G.edge_label.items()},
                        {v + shift: f for v, f in G.vertex_label.items()})


def union_shift(G1: LabeledGraph) -> int:
    return G1.graph.max_id() + 1 if G1.graph.vertices else 0


def disjoint_union(G1: LabeledGraph, G2: LabeledGraph) -> LabeledGraph:
    """G1 keeps its ids; G2 is shifted by union_shift(G1)."""
    H2 = shift_ids(G2, union_shift(G1))
    graph = ColoredGraph({**G1.graph.vertices, **H2.graph.vertices}, {**G1.graph.edges, **H2.graph.edges})
    return LabeledGraph(graph, {**G1.orient, **H2.orient}, {**G1.edge_label, **H2.edge_label},
                        {**G1.vertex_label, **H2.vertex_label})


# =============================================================================
# 4. INERT MORPHISMS
# =============================================================================

def _inert_darkening(G: LabeledGraph, darkened: Set[int]) -> bool:
    """Darkened strings must carry identity labels and join one black to one white."""
    g = G.graph
    sub = nx.Graph()
    sub.add_nodes_from(darkened)
    for e, (a, b) in g.edges.items():
        if a in darkened and b in darkened and a != b:
            sub.add_edge(a, b)
    for string in nx.connected_components(sub):
        if any(not G.vertex_label[v].is_identity for v in string):
            return False
        outside = []
        for v in string:
            for e in g.incidence[v]:
                other = g.other_end(e, v)
                if other not in string:
                    outside.append(other)
        if len(outside) != 2:
            return False
        colors = sorted(g.vertices[x].value for x in outside)
        if colors != ["black", "white"]:
            return False
    return True


def is_inert(P: LabeledGraphMap) -> bool:
    """
    Composite of collapses, identity-labeled darkenings between a white and a
    black, and inclusions of all-white components: the darkening part passes
    the string test, the covering part is injective with all-white complement,
    and every identification with one preimage is plain tupling.
    """
    report = validate_labeled_map(P)
    if not report.valid:
        raise InvalidMorphism("is_inert needs a valid labeled map", issues=report.codes())
    d, c, v = factorize(P.underlying)
    darkened = {x for x in P.source.graph.vertices
                if P.source.graph.vertices[x] != d.target.vertices[x]}
    if not _inert_darkening(P.source, darkened):
        return False
    vimg = list(v.vmap.values())
    eimg = [cell.id for cell in v.emap.values()]
    if len(set(vimg)) != len(vimg) or len(set(eimg)) != len(eimg):
        return False
    tgt = P.target.graph
    outside = set(tgt.vertices) - set(vimg)
    if any(tgt.is_black(x) for x in outside):
        return False
    for x in outside:
        if any(tgt.other_end(e, x) in vimg for e in tgt.incidence[x]):
            return False
    if any(E not in eimg and set(ends) & set(vimg) for E, ends in tgt.edges.items()):
        return False
    for E, pre in P.edge_preimages.items():
        if len(pre) == 1:
            iota = P.iota[E]
            if P.source.label(pre[0]) != P.target.label(E):
                return False
            if any(iota(x) != (x,) for x in iota.source.elems):
                return False
    return True


def constellation_iso(P: LabeledGraphMap) -> Optional[Dict[int, int]]:
    """Component bijection Ψ(source) ≅ Ψ(target) if P induces a label-preserving one."""
    comp = component_map(P)
    if len(set(comp.values())) != len(comp):
        return None
    target_comps = set(maximal_cut(P.target).components)
    if set(comp.values()) != target_comps:
        return None
    return comp
