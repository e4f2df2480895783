"""
Partial darkenings of a labeled graph: three-color colorings, gray edges and
their containment maps, canonical forms of zig-zags and the gigantic graph
category the calculus lives on.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from shadowcalc.base_finset import BaseMap, LabeledProduct
from shadowcalc.errors import (CompositionMismatch, GraphMismatch, InconsistentGlue,
                               InvalidMorphism, NotAFlipSquare, OrderViolation,
                               OrientationClash, UnsupportedGrayCycle, ValidationReport)
from shadowcalc.graph_core import Color
from shadowcalc.labeled_graphs import (LabeledGraph, LabeledGraphMap, component_map,
                                       compose_labeled, identity_labeled, maximal_cut)

logger = logging.getLogger(__name__)

# =============================================================================
# 1. COLORINGS
# =============================================================================

class Color3(str, Enum):
    WHITE = "white"
    GRAY = "gray"
    BLACK = "black"


DARKNESS = {Color3.WHITE: 0, Color3.GRAY: 1, Color3.BLACK: 2}


@dataclass(frozen=True)
class Coloring:
    """A color for every vertex; only internal whites may be gray or darkened."""
    graph: LabeledGraph
    colors: Mapping[int, Color3]

    @classmethod
    def all_white(cls, G: LabeledGraph) -> "Coloring":
        return cls(G, {v: (Color3.BLACK if c == Color.BLACK else Color3.WHITE)
                       for v, c in sorted(G.graph.vertices.items())})

    @classmethod
    def of(cls, G: LabeledGraph, free: Mapping[int, str]) -> "Coloring":
        """All-white coloring overridden at the given internal whites."""
        base = dict(cls.all_white(G).colors)
        base.update({v: Color3(c) for v, c in free.items()})
        return cls(G, base)

    def __getitem__(self, v: int) -> Color3:
        return self.colors[v]

    @cached_property
    def key(self) -> Tuple[Tuple[int, str], ...]:
        return tuple((v, c.value) for v, c in sorted(self.colors.items()))

    def with_color(self, v: int, color: Color3) -> "Coloring":
        colors = dict(self.colors)
        colors[v] = Color3(color)
        return Coloring(self.graph, colors)

    def free(self) -> Dict[int, Color3]:
        return {v: self.colors[v] for v in self.graph.graph.internal_whites}

    def diff(self, other: "Coloring") -> List[int]:
        return sorted(v for v in self.colors if self.colors[v] != other.colors[v])


def validate_coloring(c: Coloring) -> ValidationReport:
    report = ValidationReport()
    g = c.graph.graph
    for v, color in sorted(g.vertices.items()):
        got = c.colors.get(v)
        if got is None:
            report.add("MissingColor", [v], "vertex has no color")
        elif color == Color.BLACK and got != Color3.BLACK:
            report.add("BlackNotFixed", [v], "black vertices must stay black")
        elif g.is_external_white(v) and got != Color3.WHITE:
            report.add("ExternalNotWhite", [v], "external whites must stay white")
    return report


def _same_graph(c: Coloring, d: Coloring) -> None:
    if c.graph is not d.graph and c.graph != d.graph:
        raise GraphMismatch("colorings live on different graphs")


def grayer_leq(c: Coloring, d: Coloring) -> bool:
    """True iff d is grayer than c."""
    _same_graph(c, d)
    return all(c[v] == d[v] or d[v] == Color3.GRAY for v in c.colors)


def darker_leq(c: Coloring, d: Coloring) -> bool:
    """True iff d is darker than c (white < gray < black at every vertex)."""
    _same_graph(c, d)
    return all(DARKNESS[c[v]] <= DARKNESS[d[v]] for v in c.colors)


def common_graying(c: Coloring, d: Coloring) -> Coloring:
    """The join in the grayer order: gray wherever c and d differ."""
    _same_graph(c, d)
    return Coloring(c.graph, {v: (c[v] if c[v] == d[v] else Color3.GRAY) for v in c.colors})


# =============================================================================
# 2. GRAY EDGES
# =============================================================================

@dataclass(frozen=True)
class GrayEdge:
    """
    A maximal oriented string of edges through gray vertices. `interior[i]`
    sits between edges[i] and edges[i+1] (and closes the loop for a cycle).
    """
    rep: int
    edges: Tuple[int, ...]
    interior: Tuple[int, ...]
    ends: Optional[Tuple[int, int]]

    @property
    def is_cycle(self) -> bool:
        return self.ends is None

    def path_label(self, G: LabeledGraph, to_edge: int) -> BaseMap:
        """Composite of vertex labels from the representative to `to_edge`."""
        label = BaseMap.identity(G.label(self.rep))
        for i, e in enumerate(self.edges):
            if e == to_edge:
                return label
            label = label.then(G.vertex_label[self.interior[i]])
        raise KeyError(to_edge)


@dataclass(frozen=True)
class GrayEdgeSet:
    edges: Tuple[GrayEdge, ...]

    @cached_property
    def by_rep(self) -> Dict[int, GrayEdge]:
        return {s.rep: s for s in self.edges}

    @cached_property
    def owner(self) -> Dict[int, int]:
        return {e: s.rep for s in self.edges for e in s.edges}

    @property
    def reps(self) -> Tuple[int, ...]:
        return tuple(s.rep for s in self.edges)

    def containing(self, e: int) -> Optional[int]:
        return self.owner.get(e)

    def __len__(self) -> int:
        return len(self.edges)


def _is_white(c: Coloring, v: int) -> bool:
    return c[v] == Color3.WHITE


def gray_edges(c: Coloring) -> GrayEdgeSet:
    """The admissible gray strings of c, ordered by representative EdgeId."""
    memo = c.graph.memo.setdefault("gray_edges", {})
    if c.key in memo:
        return memo[c.key]
    G = c.graph
    g = G.graph
    gray = [v for v in g.internal_whites if c[v] == Color3.GRAY]
    classes = nx.Graph()
    classes.add_nodes_from(g.edges)
    for v in gray:
        e1, e2 = g.incidence[v]
        classes.add_edge(e1, e2)
    result = []
    for comp in nx.connected_components(classes):
        members = [v for v in gray if g.incidence[v][0] in comp]
        by_source = {G.source_edge(v): v for v in members}
        targets = {G.target_edge(v) for v in members}
        starts = sorted(e for e in comp if e not in targets)
        cycle = not starts
        if len(starts) > 1:
            raise OrientationClash(f"gray string {sorted(comp)} has several first edges", edges=sorted(comp))
        rep = min(comp) if cycle else starts[0]
        edges, interior = [rep], []
        current = rep
        while current in by_source:
            v = by_source[current]
            interior.append(v)
            nxt = G.target_edge(v)
            if nxt == rep:
                break
            edges.append(nxt)
            current = nxt
        if len(edges) != len(comp):
            raise OrientationClash(f"gray string {sorted(comp)} is not consistently oriented", edges=sorted(comp))
        if cycle:
            s = GrayEdge(rep, tuple(edges), tuple(interior), None)
            loop = s.path_label(G, edges[-1]).then(G.vertex_label[interior[-1]])
            if not loop.is_identity:
                raise UnsupportedGrayCycle("all-gray cycle with a non-identity composite label", rep=rep)
            result.append(s)
            continue
        a, b = g.edges[rep]
        start = a if not interior or b == interior[0] else b
        if interior and a == interior[0] and b == interior[0]:
            start = a
        x, y = g.edges[edges[-1]]
        end = y if not interior or x == interior[-1] else x
        if len(edges) == 1:
            colors = sorted((_is_white(c, a), _is_white(c, b)))
            if colors != [False, True]:
                continue
        result.append(GrayEdge(rep, tuple(edges), tuple(interior), (start, end)))
    gset = GrayEdgeSet(tuple(sorted(result, key=lambda s: s.rep)))
    memo[c.key] = gset
    return gset


def gray_edges_map(src: Coloring, dst: Coloring) -> Dict[int, int]:
    """Containment 𝔊(src) -> 𝔊(dst) for dst grayer than src."""
    if not grayer_leq(src, dst):
        raise OrderViolation("target coloring is not grayer than the source")
    target = gray_edges(dst)
    result = {}
    for s in gray_edges(src).edges:
        t = target.containing(s.rep)
        if t is None:
            raise OrderViolation(f"gray edge {s.rep} has no containing gray edge")
        result[s.rep] = t
    return result


def pull_coloring(P: LabeledGraphMap, c: Coloring) -> Coloring:
    """h*c on the source of P."""
    return Coloring(P.source, P.pull_coloring(c.colors))


def gray_edges_map_along(P: LabeledGraphMap, c: Coloring) -> Dict[int, int]:
    """𝔊(h*c) -> 𝔊(c): each string goes to the gray edge containing its image."""
    target = gray_edges(c)
    result = {}
    for s in gray_edges(pull_coloring(P, c)).edges:
        for e in s.edges:
            cell = P.edge_image(e)
            if cell.is_edge:
                t = target.containing(cell.id)
                if t is None:
                    raise OrderViolation(f"image of gray edge {s.rep} lies in no gray edge")
                result[s.rep] = t
                break
        else:
            raise UnsupportedGrayCycle("gray cycle collapsed to a vertex", rep=s.rep)
    return result


def _flip(c: Coloring, d: Coloring) -> Tuple[int, Color3]:
    diff = c.diff(d)
    if len(diff) != 1 or d[diff[0]] != Color3.GRAY or c[diff[0]] == Color3.GRAY:
        raise NotAFlipSquare("side of the square is not a single flip to gray")
    return diff[0], c[diff[0]]


def check_pushout(c: Coloring, c1: Coloring, c2: Coloring, c12: Coloring) -> bool:
    """
    Whether 𝔊 sends the flip square c -> c1, c2 -> c12 to a pushout of finite
    sets, by computing the colimit explicitly. One side flips a white vertex,
    the other a black one.
    """
    v1, col1 = _flip(c, c1)
    v2, col2 = _flip(c, c2)
    if v1 == v2 or {col1, col2} != {Color3.WHITE, Color3.BLACK} or common_graying(c1, c2) != c12:
        raise NotAFlipSquare("square must flip one white and one black vertex to gray")
    m1, m2 = gray_edges_map(c, c1), gray_edges_map(c, c2)
    n1, n2 = gray_edges_map(c1, c12), gray_edges_map(c2, c12)
    colimit = nx.Graph()
    colimit.add_nodes_from(("1", s) for s in m1.values())
    colimit.add_nodes_from(("1", s) for s in gray_edges(c1).reps)
    colimit.add_nodes_from(("2", s) for s in gray_edges(c2).reps)
    for t in gray_edges(c).reps:
        colimit.add_edge(("1", m1[t]), ("2", m2[t]))
    induced = []
    for cls in nx.connected_components(colimit):
        images = {n1[s] if side == "1" else n2[s] for side, s in cls}
        if len(images) != 1:
            return False
        induced.append(images.pop())
    return sorted(induced) == sorted(gray_edges(c12).reps)


def induced_glue(coloring: Coloring, pieces: Sequence[Tuple[Coloring, Mapping[int, Hashable]]]) -> Dict[int, Hashable]:
    """
    The glue on 𝔊(coloring) induced by maps out of less gray colorings; every
    gray edge must be reached and all pieces must agree.
    """
    glue: Dict[int, Hashable] = {}
    for piece, values in pieces:
        for s, t in gray_edges_map(piece, coloring).items():
            if t in glue and glue[t] != values[s]:
                raise InconsistentGlue(f"gray edge {t} glued to {glue[t]!r} and {values[s]!r}", edge=t)
            glue[t] = values[s]
    missing = [t for t in gray_edges(coloring).reps if t not in glue]
    if missing:
        raise InconsistentGlue(f"gray edges {missing} are not reached by any piece", edges=missing)
    return glue


@dataclass(frozen=True)
class CanonicalForm:
    start: Coloring
    end: Coloring
    join: Coloring
    glue: Mapping[int, Hashable]


def canonical_form(colorings: Sequence[Coloring], glues: Sequence[Mapping[int, Hashable]]) -> CanonicalForm:
    """
    Reduce a zig-zag of one-vertex flips, each coloring carrying a map of its
    gray edges to U, to the pair (start, end) and the glue on their join.
    """
    if len(colorings) != len(glues) or not colorings:
        raise OrderViolation("zig-zag needs one glue map per coloring")
    for x, gx, y, gy in zip(colorings, glues, colorings[1:], glues[1:]):
        if len(x.diff(y)) != 1:
            raise OrderViolation("consecutive colorings must differ at exactly one vertex")
        low, g_low, high, g_high = (x, gx, y, gy) if grayer_leq(x, y) else (y, gy, x, gx)
        if not grayer_leq(low, high):
            raise OrderViolation("zig-zag step is not a flip to or from gray")
        for s, t in gray_edges_map(low, high).items():
            if g_low[s] != g_high[t]:
                raise InconsistentGlue(f"zig-zag maps disagree on gray edge {s}", edge=s)
    start, end = colorings[0], colorings[-1]
    join = common_graying(start, end)
    pieces = [(c, g) for c, g in zip(colorings, glues) if grayer_leq(c, join)]
    return CanonicalForm(start, end, join, induced_glue(join, pieces))


# =============================================================================
# 3. THE GIGANTIC GRAPH CATEGORY
# =============================================================================

@dataclass(frozen=True)
class GiganticObject:
    """(U, graph, coloring, glue: 𝔊(coloring) -> U)."""
    components: Tuple[Hashable, ...]
    coloring: Coloring
    glue: Mapping[int, Hashable]

    @property
    def graph(self) -> LabeledGraph:
        return self.coloring.graph

    @cached_property
    def glue_sets(self) -> Dict[Hashable, Tuple[int, ...]]:
        sets = {u: [] for u in self.components}
        for s in sorted(self.glue):
            sets[self.glue[s]].append(s)
        return {u: tuple(es) for u, es in sets.items()}

    def base(self, u: Hashable) -> LabeledProduct:
        G = self.graph
        return LabeledProduct.of({s: G.label(s) for s in self.glue_sets[u]})

    def with_components(self, components: Sequence[Hashable], set_map: Mapping) -> "GiganticObject":
        return GiganticObject(tuple(sorted(components)), self.coloring,
                              {s: set_map[u] for s, u in self.glue.items()})

    def with_coloring(self, coloring: Coloring, glue: Mapping[int, Hashable]) -> "GiganticObject":
        return GiganticObject(self.components, coloring, dict(glue))


def embed_obj(G: LabeledGraph) -> GiganticObject:
    """(π0Ψ G, G, all-white, each edge at a black vertex glued to its cluster)."""
    cut = maximal_cut(G)
    c = Coloring.all_white(G)
    cluster = G.black_clusters
    glue = {}
    for s in gray_edges(c).edges:
        a, b = G.graph.edges[s.rep]
        black = a if G.graph.is_black(a) else b
        glue[s.rep] = cluster[black]
    return GiganticObject(cut.components, c, glue)


@dataclass(frozen=True)
class GiganticMorphism:
    source: GiganticObject
    target: GiganticObject
    set_map: Mapping[Hashable, Hashable]
    graph_map: LabeledGraphMap
    glue: Mapping[int, Hashable]

    @cached_property
    def pulled(self) -> Coloring:
        """h*d on the source graph."""
        return pull_coloring(self.graph_map, self.target.coloring)

    @cached_property
    def join(self) -> Coloring:
        """c ∨ h*d."""
        return common_graying(self.source.coloring, self.pulled)


def validate_gigantic(m: GiganticMorphism) -> ValidationReport:
    report = ValidationReport()
    if not darker_leq(m.source.coloring, m.pulled):
        report.add("DarknessViolation", m.source.coloring.diff(m.pulled), "h*d is not darker than c")
        return report
    reps = set(gray_edges(m.join).reps)
    if set(m.glue) != reps:
        report.add("GlueNotTotal", sorted(reps ^ set(m.glue)), "glue is not defined on 𝔊(c ∨ h*d)")
        return report
    for s, t in gray_edges_map(m.source.coloring, m.join).items():
        if m.set_map[m.source.glue[s]] != m.glue[t]:
            report.add("GlueMismatch", [s, t], "glue disagrees with the set map")
    along = gray_edges_map_along(m.graph_map, m.target.coloring)
    for s, t in gray_edges_map(m.pulled, m.join).items():
        if m.target.glue[along[s]] != m.glue[t]:
            report.add("GlueMismatch", [s, t], "glue disagrees with the target glue")
    return report


def _string_anchor(s, join: Coloring) -> int:
    if s.interior:
        return s.interior[0]
    a, b = join.graph.graph.edges[s.rep]
    return a if join[a] == Color3.BLACK else b


def embed(h: LabeledGraphMap) -> GiganticMorphism:
    """The gigantic morphism of an E𝒢 map: π0Ψ on components, strings glued to image clusters."""
    source, target = embed_obj(h.source), embed_obj(h.target)
    phi = component_map(h)
    pulled = pull_coloring(h, target.coloring)
    join = common_graying(source.coloring, pulled)
    cluster = h.target.black_clusters
    glue = {s.rep: cluster[h(_string_anchor(s, join))] for s in gray_edges(join).edges}
    m = GiganticMorphism(source, target, phi, h, glue)
    report = validate_gigantic(m)
    if not report.valid:
        raise InvalidMorphism("embedding produced an invalid gigantic morphism", issues=report.codes())
    return m


def identity_gigantic(obj: GiganticObject) -> GiganticMorphism:
    return GiganticMorphism(obj, obj, {u: u for u in obj.components}, identity_labeled(obj.graph),
                            dict(obj.glue))


def compose_gigantic(m1: GiganticMorphism, m2: GiganticMorphism) -> GiganticMorphism:
    """m2 ∘ m1, with the glue induced on the pushout 𝔊(c ∨ (jh)*e)."""
    if m1.target != m2.source:
        raise CompositionMismatch("gigantic morphisms are not composable")
    h = compose_labeled(m1.graph_map, m2.graph_map)
    phi = {u: m2.set_map[v] for u, v in m1.set_map.items()}
    pulled = pull_coloring(h, m2.target.coloring)
    join = common_graying(m1.source.coloring, pulled)
    first = (m1.join, {s: m2.set_map[v] for s, v in m1.glue.items()})
    pulled_join2 = pull_coloring(m1.graph_map, m2.join)
    along = gray_edges_map_along(m1.graph_map, m2.join)
    second = (pulled_join2, {s: m2.glue[t] for s, t in along.items()})
    glue = induced_glue(join, [first, second])
    return GiganticMorphism(m1.source, m2.target, phi, h, glue)
