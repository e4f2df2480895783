"""
The category of colored graphs: black/white vertices, multigraph edges,
morphisms that may send edges to vertices, classification and the canonical
darkening / collapsing / covering factorization.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

import networkx as nx

from shadowcalc.errors import CompositionMismatch, InvalidMorphism, ValidationReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

GRAPH_ISSUES = {
    "IsolatedVertex": "vertex is not an endpoint of any edge",
    "WhiteDegreeExceeded": "white vertex has degree above 2",
    "WhiteLoop": "loop at a white vertex",
    "DanglingEdge": "edge endpoint is not a vertex",
}

MAP_ISSUES = {
    "MissingImage": "a vertex or edge has no image",
    "UnknownImage": "image is not a cell of the target",
    "EndpointMismatch": "edge image is incompatible with its endpoints",
    "ColorViolation": "vertex image violates the color conditions",
}


class Color(str, Enum):
    BLACK = "black"
    WHITE = "white"


class MorphismClass(str, Enum):
    DARKENING = "darkening"
    COLLAPSING = "collapsing"
    COVERING = "covering"
    GENERAL = "general"
    INVALID = "invalid"


# =============================================================================
# 2. GRAPHS AND MAPS
# =============================================================================

@dataclass(frozen=True)
class ColoredGraph:
    """Vertices with colors and edges with unordered endpoint pairs (stored sorted)."""
    vertices: Mapping[int, Color]
    edges: Mapping[int, Tuple[int, int]]

    @classmethod
    def build(cls, vertices: Mapping[int, str], edges: Mapping[int, Tuple[int, int]]) -> "ColoredGraph":
        return cls({v: Color(c) for v, c in sorted(vertices.items())},
                   {e: tuple(sorted(ends)) for e, ends in sorted(edges.items())})

    @classmethod
    def empty(cls) -> "ColoredGraph":
        return cls({}, {})

    @cached_property
    def incidence(self) -> Dict[int, List[int]]:
        """Edges at each vertex, ascending; a loop is listed twice."""
        inc: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for e, (a, b) in self.edges.items():
            if a in inc:
                inc[a].append(e)
            if b in inc:
                inc[b].append(e)
        return {v: sorted(es) for v, es in inc.items()}

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def is_black(self, v: int) -> bool:
        return self.vertices[v] == Color.BLACK

    def is_internal_white(self, v: int) -> bool:
        return self.vertices[v] == Color.WHITE and self.degree(v) == 2

    def is_external_white(self, v: int) -> bool:
        return self.vertices[v] == Color.WHITE and self.degree(v) == 1

    @cached_property
    def internal_whites(self) -> Tuple[int, ...]:
        return tuple(v for v in sorted(self.vertices) if self.is_internal_white(v))

    @cached_property
    def external_whites(self) -> Tuple[int, ...]:
        return tuple(v for v in sorted(self.vertices) if self.is_external_white(v))

    @cached_property
    def blacks(self) -> Tuple[int, ...]:
        return tuple(v for v in sorted(self.vertices) if self.is_black(v))

    def other_end(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        return b if a == v else a

    def max_id(self) -> int:
        return max(list(self.vertices) + list(self.edges) + [0])

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e, (a, b) in self.edges.items():
            g.add_edge(a, b, key=e)
        return g


@dataclass(frozen=True)
class Cell:
    """Image of an edge: either an edge or a single vertex."""
    kind: str
    id: int

    @classmethod
    def edge(cls, e: int) -> "Cell":
        return cls("edge", e)

    @classmethod
    def vertex(cls, v: int) -> "Cell":
        return cls("vertex", v)

    @property
    def is_edge(self) -> bool:
        return self.kind == "edge"


@dataclass(frozen=True)
class GraphMap:
    source: ColoredGraph
    target: ColoredGraph
    vmap: Mapping[int, int]
    emap: Mapping[int, Cell]

    def edge_image(self, e: int) -> Cell:
        return self.emap[e]

    @cached_property
    def edge_preimages(self) -> Dict[int, List[int]]:
        pre: Dict[int, List[int]] = {e: [] for e in self.target.edges}
        for e in sorted(self.source.edges):
            cell = self.emap[e]
            if cell.is_edge:
                pre[cell.id].append(e)
        return pre

    @cached_property
    def vertex_preimages(self) -> Dict[int, List[int]]:
        pre: Dict[int, List[int]] = {v: [] for v in self.target.vertices}
        for v in sorted(self.source.vertices):
            pre[self.vmap[v]].append(v)
        return pre

    @cached_property
    def collapsed_edges(self) -> Dict[int, List[int]]:
        """Source edges sent to each target vertex."""
        pre: Dict[int, List[int]] = {v: [] for v in self.target.vertices}
        for e in sorted(self.source.edges):
            cell = self.emap[e]
            if not cell.is_edge:
                pre[cell.id].append(e)
        return pre


# =============================================================================
# 3. VALIDATION & CLASSIFICATION
# =============================================================================

def validate_graph(g: ColoredGraph) -> ValidationReport:
    """Lists every violated graph invariant with the offending ids."""
    report = ValidationReport()
    for e, (a, b) in sorted(g.edges.items()):
        missing = [v for v in (a, b) if v not in g.vertices]
        if missing:
            report.add("DanglingEdge", [e, *missing], GRAPH_ISSUES["DanglingEdge"])
    for v, color in sorted(g.vertices.items()):
        deg = g.degree(v)
        if deg == 0:
            report.add("IsolatedVertex", [v], GRAPH_ISSUES["IsolatedVertex"])
        if color == Color.WHITE:
            loops = [e for e in g.incidence[v] if g.edges[e] == (v, v)]
            if loops:
                report.add("WhiteLoop", [v, loops[0]], GRAPH_ISSUES["WhiteLoop"])
            if deg > 2:
                report.add("WhiteDegreeExceeded", [v], GRAPH_ISSUES["WhiteDegreeExceeded"])
    return report


def _vertex_kind(g: ColoredGraph, v: int) -> str:
    if g.is_black(v):
        return "black"
    return "internal" if g.degree(v) == 2 else "external"


def validate_map(m: GraphMap) -> ValidationReport:
    """Endpoint compatibility and color conditions for a graph map."""
    report = ValidationReport()
    src, tgt = m.source, m.target
    for v in sorted(src.vertices):
        if v not in m.vmap:
            report.add("MissingImage", [v], MAP_ISSUES["MissingImage"])
            continue
        w = m.vmap[v]
        if w not in tgt.vertices:
            report.add("UnknownImage", [v, w], MAP_ISSUES["UnknownImage"])
            continue
        kind_v, kind_w = _vertex_kind(src, v), _vertex_kind(tgt, w)
        allowed = {"black": {"black"}, "external": {"external"}, "internal": {"internal", "black"}}
        if kind_w not in allowed[kind_v]:
            report.add("ColorViolation", [v, w], f"{kind_v} vertex sent to {kind_w} vertex")
    if not report.valid:
        return report
    for e in sorted(src.edges):
        if e not in m.emap:
            report.add("MissingImage", [e], MAP_ISSUES["MissingImage"])
            continue
        cell = m.emap[e]
        a, b = src.edges[e]
        ends = tuple(sorted((m.vmap[a], m.vmap[b])))
        if cell.is_edge:
            if cell.id not in tgt.edges:
                report.add("UnknownImage", [e, cell.id], MAP_ISSUES["UnknownImage"])
            elif tgt.edges[cell.id] != ends:
                report.add("EndpointMismatch", [e, cell.id], MAP_ISSUES["EndpointMismatch"])
        else:
            if cell.id not in tgt.vertices:
                report.add("UnknownImage", [e, cell.id], MAP_ISSUES["UnknownImage"])
            elif ends != (cell.id, cell.id):
                report.add("EndpointMismatch", [e, cell.id], MAP_ISSUES["EndpointMismatch"])
    return report


def _color_preserving(m: GraphMap) -> bool:
    return all(m.source.vertices[v] == m.target.vertices[m.vmap[v]] for v in m.source.vertices)


def _vertex_preimage_connected(m: GraphMap, w: int) -> bool:
    verts = m.vertex_preimages[w]
    if not verts:
        return False
    sub = nx.MultiGraph()
    sub.add_nodes_from(verts)
    for e in m.collapsed_edges[w]:
        a, b = m.source.edges[e]
        sub.add_edge(a, b, key=e)
    return nx.is_connected(sub)


def is_collapsing(m: GraphMap) -> bool:
    if not validate_map(m).valid or not _color_preserving(m):
        return False
    if any(len(pre) != 1 for pre in m.edge_preimages.values()):
        return False
    return all(_vertex_preimage_connected(m, w) for w in m.target.vertices)


def is_covering(m: GraphMap) -> bool:
    if not validate_map(m).valid or not _color_preserving(m):
        return False
    return all(cell.is_edge for cell in m.emap.values())


def is_isomorphism(m: GraphMap) -> bool:
    if not all(cell.is_edge for cell in m.emap.values()):
        return False
    vimg = list(m.vmap.values())
    eimg = [c.id for c in m.emap.values()]
    return (len(set(vimg)) == len(vimg) == len(m.target.vertices)
            and len(set(eimg)) == len(eimg) == len(m.target.edges))


def is_darkening(m: GraphMap) -> bool:
    """Isomorphism that only recolors internal whites to black (identities included)."""
    if not validate_map(m).valid or not is_isomorphism(m):
        return False
    for v, color in m.source.vertices.items():
        image = m.target.vertices[m.vmap[v]]
        if color != image and not (color == Color.WHITE and image == Color.BLACK):
            return False
    return True


def classify_map(m: GraphMap) -> MorphismClass:
    """Precedence: invalid, collapsing, covering, darkening, general."""
    if not validate_map(m).valid:
        return MorphismClass.INVALID
    if is_collapsing(m):
        return MorphismClass.COLLAPSING
    if is_covering(m):
        return MorphismClass.COVERING
    if is_darkening(m):
        return MorphismClass.DARKENING
    return MorphismClass.GENERAL


# =============================================================================
# 4. COMPOSITION & FACTORIZATION
# =============================================================================

def identity_map(g: ColoredGraph) -> GraphMap:
    return GraphMap(g, g, {v: v for v in g.vertices}, {e: Cell.edge(e) for e in g.edges})


def compose_maps(f: GraphMap, g: GraphMap) -> GraphMap:
    """g ∘ f."""
    if f.target != g.source:
        raise CompositionMismatch("target of the first map is not the source of the second")
    vmap = {v: g.vmap[w] for v, w in f.vmap.items()}
    emap = {}
    for e, cell in f.emap.items():
        emap[e] = g.emap[cell.id] if cell.is_edge else Cell.vertex(g.vmap[cell.id])
    return GraphMap(f.source, g.target, vmap, emap)


def darken(g: ColoredGraph, vertices: Iterable[int]) -> ColoredGraph:
    darkened = set(vertices)
    return ColoredGraph({v: (Color.BLACK if v in darkened else c) for v, c in g.vertices.items()},
                        dict(g.edges))


def darkening_map(g: ColoredGraph, vertices: Iterable[int]) -> GraphMap:
    h = darken(g, vertices)
    return GraphMap(g, h, {v: v for v in g.vertices}, {e: Cell.edge(e) for e in g.edges})


def collapse(g: ColoredGraph, edges: Iterable[int]) -> GraphMap:
    """Collapse the given edges; each class of vertices is named by its least id."""
    collapsed = set(edges)
    joined = nx.Graph()
    joined.add_nodes_from(g.vertices)
    for e in collapsed:
        joined.add_edge(*g.edges[e])
    rep = {}
    for comp in nx.connected_components(joined):
        r = min(comp)
        for v in comp:
            rep[v] = r
    vertices = {}
    for v in sorted(g.vertices):
        r = rep[v]
        if r not in vertices or g.vertices[v] == Color.BLACK:
            vertices[r] = Color.BLACK if g.vertices[v] == Color.BLACK else vertices.get(r, g.vertices[v])
    edges = {e: tuple(sorted((rep[a], rep[b]))) for e, (a, b) in g.edges.items() if e not in collapsed}
    target = ColoredGraph(vertices, edges)
    emap = {e: (Cell.vertex(rep[g.edges[e][0]]) if e in collapsed else Cell.edge(e)) for e in g.edges}
    return GraphMap(g, target, rep, emap)


def factorize(m: GraphMap) -> Tuple[GraphMap, GraphMap, GraphMap]:
    """
    Canonical factorization m = v ∘ c ∘ d: darken every internal white whose
    image is black, collapse every edge whose image is a vertex, and keep the
    remaining covering map. Intermediate graphs may contain isolated blacks.
    """
    report = validate_map(m)
    if not report.valid:
        raise InvalidMorphism("cannot factorize an invalid map", issues=report.codes())
    src = m.source
    to_darken = [v for v in src.internal_whites if m.target.is_black(m.vmap[v])]
    d = darkening_map(src, to_darken)
    c = collapse(d.target, [e for e, cell in m.emap.items() if not cell.is_edge])
    vmap = {r: m.vmap[r] for r in c.target.vertices}
    emap = {e: m.emap[e] for e in c.target.edges}
    v = GraphMap(c.target, m.target, vmap, emap)
    logger.debug("factorized map: darkened %s, collapsed %d edges", to_darken,
                 len(d.target.edges) - len(c.target.edges))
    return d, c, v


def path_graph(colors: List[str], first_edge: int = 1, first_vertex: Optional[int] = None) -> ColoredGraph:
    """Path with vertices colored in order; edge ids follow vertex order."""
    start = first_vertex if first_vertex is not None else 100
    vertices = {start + i: c for i, c in enumerate(colors)}
    edges = {first_edge + i: (start + i, start + i + 1) for i in range(len(colors) - 1)}
    return ColoredGraph.build(vertices, edges)


def circle_graph(colors: List[str], first_edge: int = 1, first_vertex: int = 100) -> ColoredGraph:
    n = len(colors)
    vertices = {first_vertex + i: c for i, c in enumerate(colors)}
    edges = {first_edge + i: (first_vertex + i, first_vertex + (i + 1) % n) for i in range(n)}
    return ColoredGraph.build(vertices, edges)
