"""
The diagram D on partially darkened graphs: colorings go to labeled products
over their gray edges, flips and graph maps go to labeled product maps.
"""
import itertools
import logging
from typing import Dict, List

from shadowcalc.base_finset import (BaseMap, LabeledProduct, LabeledProductMap,
                                    Square, is_beck_chevalley)
from shadowcalc.colorings import (Color3, Coloring, gray_edges, gray_edges_map,
                                  gray_edges_map_along, pull_coloring)
from shadowcalc.errors import GraphMismatch, NotSingleFlip, ShadowcalcError, ValidationReport
from shadowcalc.labeled_graphs import LabeledGraph, LabeledGraphMap

logger = logging.getLogger(__name__)


def _check_graph(G: LabeledGraph, c: Coloring) -> None:
    if c.graph is not G and c.graph != G:
        raise GraphMismatch("coloring does not live on the given graph")


def d_object(G: LabeledGraph, c: Coloring) -> LabeledProduct:
    """Π over 𝔊(c) of the representative edge labels."""
    _check_graph(G, c)
    return LabeledProduct.of({s.rep: G.label(s.rep) for s in gray_edges(c).edges})


def d_between(G: LabeledGraph, hi: Coloring, lo: Coloring) -> LabeledProductMap:
    """
    D(hi) -> D(lo) for hi grayer than lo: each gray edge of lo reads the gray
    edge containing it, transported along the labels from ⌊s⌋ to ⌊t⌋.
    """
    _check_graph(G, hi)
    memo = G.memo.setdefault("d_between", {})
    key = (hi.key, lo.key)
    if key in memo:
        return memo[key]
    containing = gray_edges_map(lo, hi)
    outer = gray_edges(hi).by_rep
    p, comps = {}, {}
    for t, s in containing.items():
        p[t] = s
        comps[t] = outer[s].path_label(G, t)
    result = LabeledProductMap.build(d_object(G, hi), d_object(G, lo), p, comps)
    memo[key] = result
    return result


def d_arrow(G: LabeledGraph, c_gray: Coloring, c_prime: Coloring) -> LabeledProductMap:
    """D of a single flip from gray to white or black."""
    diff = c_gray.diff(c_prime)
    if len(diff) != 1 or c_gray[diff[0]] != Color3.GRAY or c_prime[diff[0]] == Color3.GRAY:
        raise NotSingleFlip(f"colorings differ at {diff}, expected one gray vertex flipped")
    return d_between(G, c_gray, c_prime)


def _forward_label(G: LabeledGraph, s, start: int) -> BaseMap:
    """Labels along s from edge `start` forward to ⌊s⌋, wrapping once around a cycle."""
    label = BaseMap.identity(G.label(start))
    if start == s.rep:
        return label
    i = s.edges.index(start)
    for j in range(i, len(s.edges)):
        label = label.then(G.vertex_label[s.interior[j]])
    return label


def d_along_graphmap(h: LabeledGraphMap, c: Coloring) -> LabeledProductMap:
    """
    D(h) at c: D_target(c) -> D_source(h*c). The factor at s comes from the
    gray edge t containing its image, transported to the image edge, read
    through the identification and projected to the sheet of s.
    """
    memo = h.source.memo.setdefault("d_along", {})
    key = (id(h), c.key)
    if key in memo and memo[key][0] is h:
        return memo[key][1]
    pulled = pull_coloring(h, c)
    along = gray_edges_map_along(h, c)
    outer = gray_edges(c).by_rep
    p, comps = {}, {}
    for s in gray_edges(pulled).edges:
        first = next(e for e in s.edges if h.edge_image(e).is_edge)
        E = h.edge_image(first).id
        t = outer[along[s.rep]]
        p[s.rep] = t.rep
        comps[s.rep] = (t.path_label(h.target, E)
                        .then(h.identification(E, first))
                        .then(_forward_label(h.source, s, first)))
    result = LabeledProductMap.build(d_object(h.target, c), d_object(h.source, pulled), p, comps)
    memo[key] = (h, result)
    return result


def colorings_of(G: LabeledGraph) -> List[Coloring]:
    """Every coloring of the internal whites, in lexicographic order."""
    whites = G.graph.internal_whites
    base = Coloring.all_white(G)
    result = []
    for choice in itertools.product(list(Color3), repeat=len(whites)):
        colors = dict(base.colors)
        colors.update(zip(whites, choice))
        result.append(Coloring(G, colors))
    return result


def rotation_square(G: LabeledGraph, k: Coloring, v: int, w: int) -> Square:
    """
    The flip square at k (v and w gray): v goes white on the left, w goes
    black on top.
    """
    top_c = k.with_color(w, Color3.BLACK)
    left_c = k.with_color(v, Color3.WHITE)
    corner = top_c.with_color(v, Color3.WHITE)
    return Square(top=d_arrow(G, k, top_c), left=d_arrow(G, k, left_c),
                  right=d_arrow(G, top_c, corner), bottom=d_arrow(G, left_c, corner))


def check_rotation_bc(G: LabeledGraph) -> ValidationReport:
    """Every one-white one-black flip square of the cube must go to a Beck-Chevalley square."""
    report = ValidationReport()
    whites = G.graph.internal_whites
    for k in colorings_of(G):
        gray = [v for v in whites if k[v] == Color3.GRAY]
        for v, w in itertools.permutations(gray, 2):
            try:
                if not is_beck_chevalley(rotation_square(G, k, v, w)):
                    report.add("NotBeckChevalley", [v, w, *k.key], "flip square is not Beck-Chevalley")
            except ShadowcalcError as e:
                logging.error(f"Rotation square at {k.key} failed: {e}")
                report.add(e.code, [v, w], str(e))
    logger.debug("checked rotation squares on %d internal whites: %d issues", len(whites), len(report.issues))
    return report


def d_table(G: LabeledGraph, colorings: List[Coloring]) -> Dict[tuple, LabeledProduct]:
    """D evaluated on a list of colorings, keyed by coloring."""
    return {c.key: d_object(G, c) for c in colorings}
