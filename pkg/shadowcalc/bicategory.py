"""
Derived isomorphisms of the shadowed bicategory and their coherence suites.

Every structural isomorphism is read off a figure: a labeled graph with a few
named covers, and two orders of moves on it. A move darkens a set of white
vertices, applies a cover, or collapses every black-black edge. Both orders
compose to the same E𝒢 map, so their routes are joined by relation
isomorphisms; a coherence suite walks two paths of adjacent orders and
checks the composite isomorphisms agree.

    associator, left/right unitor      open strings of cells and units
    shadow twist θ                     a ring of two cells
    base-change composition            open strings of base-change whites
    ⊠ vs ⊙ (m_⊠, π)                    copies of a string covering their product
    untwisting τ                       a ring of n copies covering one copy
    ϑ                                  copies covered twice, twisted at either end
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from shadowcalc import generators as gen
from shadowcalc.base_finset import BaseMap, BaseObject, LabeledProduct, product
from shadowcalc.colorings import GiganticMorphism, embed, embed_obj
from shadowcalc.errors import BaseMismatch, PathMismatch, ShadowcalcError, ShapeMismatch
from shadowcalc.graph_core import Cell, ColoredGraph, circle_graph, path_graph
from shadowcalc.labeled_graphs import (LabeledGraph, LabeledGraphMap, collapse_blacks, darkening, disjoint_union,
                                       labeled_map, preimage_product, union_shift)
from shadowcalc.named_ops import figure_assignment
from shadowcalc.plans import FAMILY_BACKEND, Assignment, AssignmentMap, Backend, get_backend
from shadowcalc.relations import CoherenceReport, Rewrite, route_compare, route_iso

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

CELL = "cell"
UNIT = "unit"
COLLAPSE = "collapse"

SUITE_DEFAULTS = {
    "instances": 3,
    "base_size": 2,
    "copies": 2,
    "shadow_cells": 3,
}

Token = Union[str, BaseMap]
Step = Union[FrozenSet[int], str]
Order = Tuple[Step, ...]


def _step(step) -> Step:
    if isinstance(step, str):
        return step
    if isinstance(step, (int, np.integer)):
        return frozenset({int(step)})
    return frozenset(int(v) for v in step)


def order(*steps) -> Order:
    """Normalize moves: ints and iterables of ints darken, strings name a cover or the collapse."""
    return tuple(_step(s) for s in steps)


# =============================================================================
# 2. STRINGS
# =============================================================================

@dataclass(frozen=True)
class StringLayout:
    """A string of tokens separated by joining whites; `cells` holds (vertex, left edge, right edge)."""
    graph: LabeledGraph
    tokens: Tuple[int, ...]
    joins: Tuple[int, ...]
    cells: Tuple[Tuple[int, int, int], ...]

    @property
    def whites(self) -> Tuple[int, ...]:
        return tuple(v for v in self.tokens if v not in {c[0] for c in self.cells})

    def shifted(self, shift: int) -> "StringLayout":
        return StringLayout(self.graph, tuple(v + shift for v in self.tokens),
                            tuple(v + shift for v in self.joins),
                            tuple((v + shift, l + shift, r + shift) for v, l, r in self.cells))


def build_string(tokens: Sequence[Token], objs: Sequence[BaseObject], closed: bool = False) -> StringLayout:
    """
    Tokens alternate with joining whites. A cell token is black, a unit token
    is an identity white, a base map token is a white labeled by that map.
    Open strings take len(tokens)+1 objects, rings take len(tokens).
    """
    m = len(tokens)
    if m == 0:
        raise ShapeMismatch("a string needs at least one token")
    if len(objs) != (m if closed else m + 1):
        raise ShapeMismatch(f"{m} tokens need {m if closed else m + 1} objects, got {len(objs)}")

    def obj(k):
        return objs[k % m] if closed else objs[k]

    for k, t in enumerate(tokens):
        if isinstance(t, BaseMap):
            if t.source != obj(k) or t.target != obj(k + 1):
                raise BaseMismatch(f"base-change token {k} does not fit its objects")
        elif t == UNIT and obj(k) != obj(k + 1):
            raise BaseMismatch(f"unit token {k} sits between different objects")
        elif t not in (CELL, UNIT):
            raise ShapeMismatch(f"unknown token {t!r}")

    colors = []
    for k, t in enumerate(tokens):
        colors.append("black" if t == CELL else "white")
        if closed or k < m - 1:
            colors.append("white")
    n = len(colors)
    if closed:
        g = circle_graph(colors)
        vid = [100 + p for p in range(n)]
        sides = [((p if p else n), p + 1) for p in range(n)]
    else:
        g = path_graph(["white"] + colors + ["white"])
        vid = [101 + p for p in range(n)]
        sides = [(p + 1, p + 2) for p in range(n)]
    labels = {e: (obj((e + 1) // 2) if closed else objs[e // 2]) for e in g.edges}
    orient, vertex_label, cells = {}, {}, []
    for p in range(n):
        v = vid[p]
        if colors[p] == "black":
            cells.append((v, *sides[p]))
            continue
        orient[v] = sides[p]
        t = tokens[p // 2] if p % 2 == 0 else None
        if isinstance(t, BaseMap):
            vertex_label[v] = t
    G = LabeledGraph.build(g, labels, orient=orient, vertex_label=vertex_label)
    return StringLayout(G, tuple(vid[0::2]), tuple(vid[1::2]), tuple(cells))


# =============================================================================
# 3. COVERS
# =============================================================================

@dataclass(frozen=True)
class Cover:
    target: LabeledGraph
    vmap: Mapping[int, int]
    emap: Mapping[int, Cell]
    iota: Mapping[int, BaseMap]


def _reorder(label: BaseObject, source: BaseObject, perm: Sequence[int]) -> BaseMap:
    """Tuples listed in `perm` order, rewritten in sorted order."""
    back = sorted(range(len(perm)), key=lambda i: perm[i])
    return BaseMap.from_function(label, source, lambda x: tuple(x[i] for i in back))


def quotient_cover(source: LabeledGraph, target_graph: ColoredGraph, vmap: Mapping[int, int],
                   emap: Mapping[int, int], listing: Optional[Mapping[int, Sequence[int]]] = None) -> Cover:
    """
    The cover of `source` onto `target_graph` with product labels. Each target
    edge is labeled by the product of its preimages, listed in edge-id order
    unless `listing` names another order; target whites get the product of
    their preimage labels.
    """
    listing = dict(listing or {})
    pre: Dict[int, List[int]] = {E: [] for E in target_graph.edges}
    for e in sorted(source.graph.edges):
        pre[emap[e]].append(e)
    order_of = {}
    for E, es in pre.items():
        if not es:
            raise ShapeMismatch(f"target edge {E} is not covered")
        listed = list(listing.get(E, es))
        if sorted(listed) != es:
            raise ShapeMismatch(f"listing of edge {E} is not a permutation of its preimages")
        order_of[E] = listed
    labels = {E: product(*(source.label(e) for e in order_of[E])) for E in target_graph.edges}
    iota = {E: _reorder(labels[E], preimage_product(source, pre[E]), [pre[E].index(e) for e in order_of[E]])
            for E in target_graph.edges}

    orient, vertex_label = {}, {}
    for w in target_graph.internal_whites:
        whites = [v for v in sorted(source.graph.vertices) if vmap[v] == w]
        s0, t0 = source.orient[whites[0]]
        S, T = emap[s0], emap[t0]
        orient[w] = (S, T)
        legs = []
        for v in whites:
            s, t = source.orient[v]
            if (emap[s], emap[t]) != (S, T):
                raise ShapeMismatch(f"preimages of white {w} disagree on orientation")
            legs.append((order_of[S].index(s), order_of[T].index(t), source.vertex_label[v]))

        def fn(x, legs=legs, k=len(order_of[T])):
            y = [None] * k
            for i, j, f in legs:
                y[j] = f(x[i])
            return tuple(y)

        vertex_label[w] = BaseMap.from_function(labels[S], labels[T], fn)
    target = LabeledGraph.build(target_graph, labels, orient=orient, vertex_label=vertex_label)
    return Cover(target, dict(vmap), {e: Cell.edge(E) for e, E in emap.items()}, iota)


def cover_at(c: Cover, current: LabeledGraph, darkened: Iterable[int]) -> LabeledGraphMap:
    """The cover applied after some whites were darkened: the target is darkened at their images."""
    images = {c.vmap[v] for v in darkened}
    target = darkening(c.target, images).target if images else c.target
    return labeled_map(current, target, c.vmap, c.emap, c.iota)


# =============================================================================
# 4. ORDER FIGURES
# =============================================================================

@dataclass
class OrderFigure:
    """A graph, the edges each input sits on, and the covers its orders may use."""
    name: str
    graph: LabeledGraph
    inputs: Tuple[Tuple[int, ...], ...]
    covers: Dict[str, Cover] = field(default_factory=dict)
    description: str = ""
    _routes: Dict[Order, List[GiganticMorphism]] = field(default_factory=dict, repr=False)

    def route(self, steps: Sequence) -> List[GiganticMorphism]:
        key = order(*steps)
        if key not in self._routes:
            self._routes[key] = self._build(key)
        return self._routes[key]

    def _build(self, key: Order) -> List[GiganticMorphism]:
        current, darkened, cover, collapsed = self.graph, set(), None, False
        route = []
        for step in key:
            if step == COLLAPSE:
                h = collapse_blacks(current)
                collapsed = True
            elif isinstance(step, str):
                if cover is not None or collapsed:
                    raise ShapeMismatch(f"{self.name}: a cover must come once and before the collapse")
                if step not in self.covers:
                    raise ShapeMismatch(f"{self.name} has no cover {step!r}")
                cover = self.covers[step]
                h = cover_at(cover, current, darkened)
            else:
                ids = {cover.vmap[v] for v in step} if cover else set(step)
                ids = {v for v in ids if current.graph.is_internal_white(v)}
                if not ids:
                    raise ShapeMismatch(f"{self.name}: step {sorted(step)} darkens nothing")
                h = darkening(current, ids)
                darkened |= step
            route.append(embed(h))
            current = h.target
        if not route:
            raise ShapeMismatch(f"{self.name}: an order needs at least one move")
        return route

    def assignment(self, inputs: Sequence, backend: Backend = FAMILY_BACKEND) -> Assignment:
        return figure_assignment(self, embed_obj(self.graph), inputs, backend)


def rewrites(fig: OrderFigure, path: Sequence[Sequence]) -> List[Rewrite]:
    """Window rewrites between consecutive orders: common prefix and suffix stay put."""
    result = []
    orders = [order(*o) for o in path]
    for o1, o2 in zip(orders, orders[1:]):
        i = 0
        while i < min(len(o1), len(o2)) and o1[i] == o2[i]:
            i += 1
        s = 0
        while s < min(len(o1), len(o2)) - i and o1[-1 - s] == o2[-1 - s]:
            s += 1
        if i == len(o1) == len(o2):
            raise PathMismatch("consecutive orders in a path are equal")
        r2 = fig.route(o2)
        result.append((i, len(o1) - s, r2[i:len(o2) - s]))
    return result


def compare_paths(fig: OrderFigure, path1: Sequence[Sequence], path2: Sequence[Sequence],
                  inputs: Sequence[Sequence], backend: Backend = FAMILY_BACKEND,
                  name: Optional[str] = None) -> CoherenceReport:
    """Compose window isomorphisms along both paths of orders and compare them per input list."""
    if order(*path1[0]) != order(*path2[0]) or order(*path1[-1]) != order(*path2[-1]):
        raise PathMismatch("the two paths do not share their ends")
    start, end = fig.route(path1[0]), fig.route(path1[-1])
    assignments = [fig.assignment(xs, backend) for xs in inputs]
    return route_compare(start, end, rewrites(fig, path1), rewrites(fig, path2), assignments, backend,
                         name=name or fig.name, figure=fig.description)


def derived_iso(fig: OrderFigure, o1: Sequence, o2: Sequence, inputs: Sequence,
                backend: Backend = FAMILY_BACKEND) -> AssignmentMap:
    """The isomorphism between the values of two orders with the same composite."""
    a = fig.assignment(inputs, backend)
    return route_iso(fig.route(o1), fig.route(o2), a, backend)


def _single(iso: AssignmentMap):
    if len(iso.maps) != 1:
        raise ShapeMismatch(f"expected one result component, got {len(iso.maps)}")
    return next(iter(iso.maps.values()))


# -----------------------------------------------------------------------------
# figures
# -----------------------------------------------------------------------------

def string_figure(name: str, tokens: Sequence[Token], objs: Sequence[BaseObject],
                  closed: bool = False, description: str = "") -> Tuple[OrderFigure, StringLayout]:
    layout = build_string(tokens, objs, closed)
    inputs = tuple((l, r) for _, l, r in layout.cells)
    return OrderFigure(name, layout.graph, inputs, description=description), layout


def _union(graphs: Sequence[LabeledGraph]) -> Tuple[LabeledGraph, List[int]]:
    total, shifts = graphs[0], [0]
    for G in graphs[1:]:
        shifts.append(union_shift(total))
        total = disjoint_union(total, G)
    return total, shifts


def copies_figure(name: str, tokens_per_copy: Sequence[Sequence[Token]], objs_per_copy: Sequence[Sequence[BaseObject]],
                  description: str = "") -> Tuple[OrderFigure, List[StringLayout]]:
    """Disjoint open strings of the same shape covering their product string (cover 'x')."""
    layouts = [build_string(t, o) for t, o in zip(tokens_per_copy, objs_per_copy)]
    shapes = {tuple(CELL if t == CELL else UNIT for t in ts) for ts in tokens_per_copy}
    if len(shapes) != 1:
        raise ShapeMismatch("copies must have the same shape")
    source, shifts = _union([l.graph for l in layouts])
    base = layouts[0].graph.graph
    vmap = {v + s: v for s in shifts for v in base.vertices}
    emap = {e + s: e for s in shifts for e in base.edges}
    cover = quotient_cover(source, base, vmap, emap)
    shifted = [l.shifted(s) for l, s in zip(layouts, shifts)]
    inputs = tuple((l, r) for lay in shifted for _, l, r in lay.cells)
    return OrderFigure(name, source, inputs, {"x": cover}, description), shifted


def ring_cover_figure(name: str, tokens_per_copy: Sequence[Token], objs: Sequence[BaseObject], copies: int,
                      description: str = "") -> Tuple[OrderFigure, StringLayout]:
    """
    A ring of `copies` consecutive copies of a token string, covering a ring of
    one copy (cover 'x'); `objs` runs around the whole ring.
    """
    m = len(tokens_per_copy)
    if tokens_per_copy[0] != CELL:
        raise ShapeMismatch("each copy must start with a cell")
    layout = build_string(list(tokens_per_copy) * copies, objs, closed=True)
    target = circle_graph([c for t in tokens_per_copy for c in ("black" if t == CELL else "white", "white")])
    n = 2 * m
    vmap = {100 + p: 100 + p % n for p in range(n * copies)}
    emap = {e: (e - 1) % n + 1 for e in layout.graph.graph.edges}
    cover = quotient_cover(layout.graph, target, vmap, emap)
    inputs = tuple((l, r) for _, l, r in layout.cells)
    return OrderFigure(name, layout.graph, inputs, {"x": cover}, description), layout


def vartheta_figure(name: str, inner: Sequence[Token], objs_per_copy: Sequence[Sequence[BaseObject]],
                    description: str = "") -> Tuple[OrderFigure, List[StringLayout]]:
    """
    Copies of ○─t─(inner)─s─○ with two covers onto one copy: 'a' lists the first
    edge with copies shifted by one, so t becomes the twist; 'b' shifts every
    edge but the last, so s becomes the twist.
    """
    tokens = [UNIT] + list(inner) + [UNIT]
    layouts = [build_string(tokens, o) for o in objs_per_copy]
    source, shifts = _union([l.graph for l in layouts])
    base = layouts[0].graph.graph
    vmap = {v + s: v for s in shifts for v in base.vertices}
    emap = {e + s: e for s in shifts for e in base.edges}
    k = len(shifts)
    last = max(base.edges)

    def rotated(edges):
        return {E: [E + shifts[(c + 1) % k] for c in range(k)] for E in edges}

    covers = {"a": quotient_cover(source, base, vmap, emap, rotated([1])),
              "b": quotient_cover(source, base, vmap, emap, rotated(range(1, last)))}
    shifted = [l.shifted(s) for l, s in zip(layouts, shifts)]
    inputs = tuple((l, r) for lay in shifted for _, l, r in lay.cells)
    return OrderFigure(name, source, inputs, covers, description), shifted


def _chain_objects(backend: Backend, cells: Sequence) -> List[BaseObject]:
    objs = [backend.base_of(cells[0]).factors[0]]
    for X in cells:
        left, right = backend.base_of(X).factors
        if left != objs[-1]:
            raise BaseMismatch("consecutive 1-cells do not share their middle object")
        objs.append(right)
    return objs


# =============================================================================
# 5. DERIVED ISOMORPHISMS
# =============================================================================

def associator(M, N, P, backend: Backend = FAMILY_BACKEND):
    """(M ⊙ N) ⊙ P ≅ M ⊙ (N ⊙ P)."""
    fig, lay = string_figure("associator", [CELL] * 3, _chain_objects(backend, [M, N, P]))
    j0, j1 = lay.joins
    return _single(derived_iso(fig, (j0, j1), (j1, j0), [M, N, P], backend))


def left_unitor(M, backend: Backend = FAMILY_BACKEND):
    """U_A ⊙ M ≅ M, the target being M extended over the darkened unit."""
    A, B = backend.base_of(M).factors
    fig, lay = string_figure("left-unitor", [UNIT, CELL], [A, A, B])
    u, (j0,) = lay.tokens[0], lay.joins
    return _single(derived_iso(fig, (u, j0), ({u, j0},), [M], backend))


def right_unitor(M, backend: Backend = FAMILY_BACKEND):
    """M ⊙ U_B ≅ M."""
    A, B = backend.base_of(M).factors
    fig, lay = string_figure("right-unitor", [CELL, UNIT], [A, B, B])
    u, (j0,) = lay.tokens[1], lay.joins
    return _single(derived_iso(fig, (u, j0), ({u, j0},), [M], backend))


def shadow_twist(M, N, backend: Backend = FAMILY_BACKEND):
    """θ: ⟪M ⊙ N⟫ ≅ ⟪N ⊙ M⟫."""
    A, B = backend.base_of(M).factors
    fig, lay = string_figure("shadow-twist", [CELL, CELL], [A, B], closed=True)
    j0, j1 = lay.joins
    return _single(derived_iso(fig, (j0, j1), (j1, j0), [M, N], backend))


def base_change_composition(f: BaseMap, g: BaseMap, backend: Backend = FAMILY_BACKEND):
    """⟨f] ⊙ ⟨g] ≅ ⟨g∘f]."""
    fig, lay = string_figure("base-change-composition", [f, g], [f.source, f.target, g.target])
    b0, b1 = lay.tokens
    (j0,) = lay.joins
    return _single(derived_iso(fig, ({b0, b1}, j0), ({b0, j0, b1},), [], backend))


def boxtimes_odot(M, N, M2, N2, backend: Backend = FAMILY_BACKEND):
    """m_⊠: (M ⊠ M2) ⊙ (N ⊠ N2) ≅ (M ⊙ N) ⊠ (M2 ⊙ N2)."""
    objs = [_chain_objects(backend, [M, N]), _chain_objects(backend, [M2, N2])]
    fig, lays = copies_figure("boxtimes-odot", [[CELL, CELL]] * 2, objs)
    J = {l.joins[0] for l in lays}
    return _single(derived_iso(fig, ("x", J), (J, "x"), [M, N, M2, N2], backend))


def twisted_boxtimes_odot(Qs: Sequence, Ms: Sequence, backend: Backend = FAMILY_BACKEND):
    """m_⊠ over n copies, Q_i ⊙ M_i in copy i; the twist lives in how Q_i's left objects are indexed."""
    if len(Qs) != len(Ms):
        raise ShapeMismatch("twisted ⊠ needs as many left as right 1-cells")
    objs = [_chain_objects(backend, [Q, M]) for Q, M in zip(Qs, Ms)]
    fig, lays = copies_figure("twisted-boxtimes-odot", [[CELL, CELL]] * len(Qs), objs)
    J = {l.joins[0] for l in lays}
    inputs = [X for pair in zip(Qs, Ms) for X in pair]
    iso = derived_iso(fig, ("x", J), (J, "x"), inputs, backend)
    return _single(iso)


def pi_iso(fs: Sequence[BaseMap], backend: Backend = FAMILY_BACKEND):
    """π: ⊠⟨f_i] ≅ ⟨Πf_i]."""
    fig, lays = copies_figure("pi", [[f] for f in fs], [[f.source, f.target] for f in fs])
    F = {l.tokens[0] for l in lays}
    return _single(derived_iso(fig, ("x", F), (F, "x"), [], backend))


def untwist(Ps: Sequence, backend: Backend = FAMILY_BACKEND):
    """τ: ⟪⊙P_i⟫ ≅ ⟪⊠P_i⟫ for P_i over B_i × B_{i+1}, read around the ring."""
    objs = _chain_objects(backend, Ps)
    if objs[-1] != objs[0]:
        raise BaseMismatch("the 1-cells do not close up into a ring")
    fig, lay = ring_cover_figure("untwist", [CELL], objs[:-1], len(Ps))
    J = set(lay.joins)
    return _single(derived_iso(fig, ("x", J), (J, "x"), list(Ps), backend))


def vartheta(Ms: Sequence, backend: Backend = FAMILY_BACKEND):
    """ϑ: T_A ⊙ ⊠M ≅ ⊠M_{+1} ⊙ T_B for M_i over A_i × B_i."""
    objs = []
    for M in Ms:
        A, B = backend.base_of(M).factors
        objs.append([A, A, B, B])
    fig, lays = vartheta_figure("vartheta", [CELL], objs)
    T = {l.tokens[0] for l in lays}
    S = {l.tokens[2] for l in lays}
    K = {j for l in lays for j in l.joins}
    return _single(derived_iso(fig, ("a", T, K, S, COLLAPSE), ("b", S, K, T, COLLAPSE), list(Ms), backend))


DERIVED_ISOS = {
    "associator": associator,
    "left_unitor": left_unitor,
    "right_unitor": right_unitor,
    "shadow_twist": shadow_twist,
    "base_change_composition": base_change_composition,
    "boxtimes_odot": boxtimes_odot,
    "twisted_boxtimes_odot": twisted_boxtimes_odot,
    "pi": pi_iso,
    "untwist": untwist,
    "vartheta": vartheta,
}


# =============================================================================
# 6. COHERENCE SUITES
# =============================================================================

SuiteCase = Tuple[OrderFigure, List[Order], List[Order]]


def random_inputs(fig: OrderFigure, rng: np.random.Generator, backend_name: str = "family") -> List:
    """One random fiber object per input, over its edges' labels in index order."""
    return [gen.fiber_object(rng, LabeledProduct.of({i: fig.graph.label(e) for i, e in enumerate(edges)}),
                             backend_name)
            for edges in fig.inputs]


def _objs(rng: np.random.Generator, n: int) -> List[BaseObject]:
    return [gen.base_object(rng, f"A{i}", SUITE_DEFAULTS["base_size"]) for i in range(n)]


def _hexagon(a, b, c, prefix=(), suffix=()) -> Tuple[List[Order], List[Order]]:
    """The two sides of the permutohedron from (a, b, c) to (c, b, a)."""
    def o(*xs):
        return order(*prefix, *xs, *suffix)
    return ([o(a, b, c), o(b, a, c), o(b, c, a), o(c, b, a)],
            [o(a, b, c), o(a, c, b), o(c, a, b), o(c, b, a)])


def _unit_paths(u, w1, w2) -> Tuple[List[Order], List[Order]]:
    """Swapping the two joins next to a unit, directly or by carrying the unit around."""
    return ([order(u, w1, w2), order(w1, u, w2)],
            [order(u, w1, w2), order(u, w2, w1), order(w2, u, w1), order(w2, w1, u),
             order(w1, w2, u), order(w1, u, w2)])


def case_associativity(rng, backend_name) -> SuiteCase:
    fig, lay = string_figure("associativity", [CELL] * 4, _objs(rng, 5),
                             description="bicategory associativity")
    return (fig, *_hexagon(*lay.joins))


def case_unit(rng, backend_name) -> SuiteCase:
    A, B, C = _objs(rng, 3)
    fig, lay = string_figure("unit-triangle", [CELL, UNIT, CELL], [A, B, B, C],
                             description="bicategory unit coherence")
    return (fig, *_unit_paths(lay.tokens[1], *lay.joins))


def case_shadow_assoc(rng, backend_name) -> SuiteCase:
    fig, lay = string_figure("shadow-associativity", [CELL] * 3, _objs(rng, 3), closed=True,
                             description="shadow and associator")
    return (fig, *_hexagon(*lay.joins))


def case_shadow_unit(rng, backend_name) -> SuiteCase:
    (A,) = _objs(rng, 1)
    fig, lay = string_figure("shadow-unit", [CELL, UNIT], [A, A], closed=True,
                             description="shadow and unitors")
    return (fig, *_unit_paths(lay.tokens[1], *lay.joins))


def case_twist_square(rng, backend_name) -> SuiteCase:
    fig, lay = string_figure("twist-square", [CELL, CELL], _objs(rng, 2), closed=True,
                             description="θ twice is the identity")
    j0, j1 = lay.joins
    return fig, [order(j0, j1), order(j1, j0), order(j0, j1)], [order(j0, j1)]


def case_base_change(rng, backend_name) -> SuiteCase:
    objs = _objs(rng, 4)
    f, g, k = (gen.base_map(rng, objs[i], objs[i + 1]) for i in range(3))
    fig, lay = string_figure("base-change-composition", [f, g, k], objs,
                             description="base change and composition")
    b0, b1, b2 = lay.tokens
    j0, j1 = lay.joins
    B = {b0, b1, b2}
    everything = B | {j0, j1}
    return (fig,
            [order(B, j0, j1), order(B, {j0, j1}), order(everything)],
            [order(B, j0, j1), order({b0, b1, j0}, b2, j1), order({b0, b1, j0}, {b2, j1}), order(everything)])


def case_boxtimes_assoc(rng, backend_name) -> SuiteCase:
    copies = SUITE_DEFAULTS["copies"]
    fig, lays = copies_figure("boxtimes-associativity", [[CELL] * 3] * copies,
                              [_objs(rng, 4) for _ in range(copies)],
                              description="⊠ and associator")
    J0, J1 = ({l.joins[k] for l in lays} for k in range(2))
    return (fig, *_hexagon("x", J0, J1))


def case_boxtimes_unit(rng, backend_name) -> SuiteCase:
    copies = SUITE_DEFAULTS["copies"]
    objs = []
    for _ in range(copies):
        A, B = _objs(rng, 2)
        objs.append([A, B, B])
    fig, lays = copies_figure("boxtimes-unit", [[CELL, UNIT]] * copies, objs, description="⊠ and unitors")
    U = {l.tokens[1] for l in lays}
    J = {l.joins[0] for l in lays}
    return (fig,
            [order("x", U, J), order(U, "x", J), order(U, J, "x"), order(J, U, "x")],
            [order("x", U, J), order("x", J, U), order(J, "x", U), order(J, U, "x")])


def case_base_change_boxtimes(rng, backend_name) -> SuiteCase:
    copies = SUITE_DEFAULTS["copies"]
    tokens, objs = [], []
    for _ in range(copies):
        o = _objs(rng, 3)
        tokens.append([gen.base_map(rng, o[0], o[1]), gen.base_map(rng, o[1], o[2])])
        objs.append(o)
    fig, lays = copies_figure("base-change-boxtimes", tokens, objs, description="π and m_⊠")
    F, G = ({l.tokens[k] for l in lays} for k in range(2))
    J = {l.joins[0] for l in lays}
    whole = F | G | J
    return (fig,
            [order("x", F, G, J), order("x", whole), order(whole, "x")],
            [order("x", F, G, J), order(F, "x", G, J), order(F, G, "x", J), order(F, G, J, "x"),
             order(whole, "x")])


def case_untwist_theta(rng, backend_name) -> SuiteCase:
    copies = SUITE_DEFAULTS["copies"]
    fig, lay = ring_cover_figure("untwist-theta", [CELL, CELL], _objs(rng, 2 * copies), copies,
                                 description="τ and θ")
    A, B = set(lay.joins[0::2]), set(lay.joins[1::2])
    return (fig,
            [order("x", A, B), order(A, "x", B), order(A, B, "x"), order(B, A, "x")],
            [order("x", A, B), order("x", B, A), order(B, "x", A), order(B, A, "x")])


def case_untwist_unit(rng, backend_name) -> SuiteCase:
    copies = SUITE_DEFAULTS["copies"]
    xs = _objs(rng, copies)
    objs = [x for c in range(copies) for x in (xs[c], xs[(c + 1) % copies])]
    fig, lay = ring_cover_figure("untwist-unit", [CELL, UNIT], objs, copies, description="τ and unitors")
    U = set(lay.tokens[1::2])
    J = set(lay.joins)
    return (fig,
            [order("x", U, J), order(U, "x", J), order(U, J, "x"), order(J, U, "x")],
            [order("x", U, J), order("x", J, U), order(J, "x", U), order(J, U, "x")])


def case_vartheta_composition(rng, backend_name) -> SuiteCase:
    copies = SUITE_DEFAULTS["copies"]
    objs = []
    for _ in range(copies):
        A, B, C = _objs(rng, 3)
        objs.append([A, A, B, C, C])
    fig, lays = vartheta_figure("vartheta-composition", [CELL, CELL], objs, description="ϑ and composition")
    T = {l.tokens[0] for l in lays}
    S = {l.tokens[3] for l in lays}
    J = {l.joins[1] for l in lays}
    K = {l.joins[0] for l in lays} | {l.joins[2] for l in lays}
    return (fig,
            [order("a", K, T, J, S, COLLAPSE), order("a", K, J, T, S, COLLAPSE),
             order("b", K, J, S, T, COLLAPSE)],
            [order("a", K, T, J, S, COLLAPSE), order("b", K, S, T, J, COLLAPSE),
             order("b", K, J, S, T, COLLAPSE)])


def case_vartheta_unit(rng, backend_name) -> SuiteCase:
    copies = SUITE_DEFAULTS["copies"]
    objs = [[A] * 4 for A in _objs(rng, copies)]
    fig, lays = vartheta_figure("vartheta-unit", [UNIT], objs, description="ϑ and units")
    T, U, S = ({l.tokens[k] for l in lays} for k in range(3))
    K = {j for l in lays for j in l.joins}
    return (fig,
            [order("a", T, U, S, K, COLLAPSE), order("b", S, U, T, K, COLLAPSE)],
            [order("a", T, U, S, K, COLLAPSE), order("a", U, T, S, K, COLLAPSE),
             order("b", U, S, T, K, COLLAPSE), order("b", S, U, T, K, COLLAPSE)])


SUITES: Dict[str, Callable[[np.random.Generator, str], SuiteCase]] = {
    "associativity": case_associativity,
    "unit-triangle": case_unit,
    "shadow-associativity": case_shadow_assoc,
    "shadow-unit": case_shadow_unit,
    "twist-square": case_twist_square,
    "base-change-composition": case_base_change,
    "boxtimes-associativity": case_boxtimes_assoc,
    "boxtimes-unit": case_boxtimes_unit,
    "base-change-boxtimes": case_base_change_boxtimes,
    "untwist-theta": case_untwist_theta,
    "untwist-unit": case_untwist_unit,
    "vartheta-composition": case_vartheta_composition,
    "vartheta-unit": case_vartheta_unit,
}


def run_suite(name: str, seed: int = 0, instances: Optional[int] = None,
              backend_name: str = "family") -> CoherenceReport:
    """Build `instances` random figures for the named suite and compare both paths on each."""
    if name not in SUITES:
        raise ShapeMismatch(f"unknown suite {name!r}", known=sorted(SUITES))
    backend = get_backend(backend_name)
    count = instances or SUITE_DEFAULTS["instances"]
    report = None
    for n in range(count):
        rng = gen.make_rng(seed + n)
        try:
            fig, path1, path2 = SUITES[name](rng, backend_name)
            part = compare_paths(fig, path1, path2, [random_inputs(fig, rng, backend_name)], backend, name)
        except ShadowcalcError as e:
            part = CoherenceReport(name)
            part.record_error(seed + n, e)
        for v in part.verdicts:
            v["instance"] = seed + n
        if report is None:
            report = part
        else:
            report.extend(part)
    logger.info("suite %s: %d instances, verdict %s", name, count, report.verdict)
    return report


def _bubble_path(start: Sequence[int], end: Sequence[int]) -> List[Tuple[int, ...]]:
    """Adjacent transpositions taking `start` to `end`."""
    pos = {v: i for i, v in enumerate(end)}
    current, path = list(start), [tuple(start)]
    changed = True
    while changed:
        changed = False
        for i in range(len(current) - 1):
            if pos[current[i]] > pos[current[i + 1]]:
                current[i], current[i + 1] = current[i + 1], current[i]
                path.append(tuple(current))
                changed = True
    return path


def shadow_coherence_suite(n: int, seed: int = 0, instances: Optional[int] = None,
                           backend_name: str = "family") -> CoherenceReport:
    """
    Rings of n cells with random units in between. Two random walks of adjacent
    swaps between the same two darkening orders must give the same isomorphism.
    """
    if n < 1:
        raise ShapeMismatch("a ring needs at least one cell")
    backend = get_backend(backend_name)
    report = CoherenceReport(f"shadow-random-{n}", "shadow coherence on random rings")
    for k in range(instances or SUITE_DEFAULTS["instances"]):
        instance = seed + k
        rng = gen.make_rng(instance)
        try:
            tokens = []
            for _ in range(n):
                tokens.append(CELL)
                if rng.random() < 0.5:
                    tokens.append(UNIT)
            fig, lay = string_figure(report.name, tokens, _ring_objects(rng, tokens), closed=True)
            whites = list(lay.joins) + list(lay.whites)
            start = [whites[i] for i in rng.permutation(len(whites))]
            end = [whites[i] for i in rng.permutation(len(whites))]
            middle = list(start)
            for _ in range(len(whites)):
                i = int(rng.integers(0, len(middle) - 1)) if len(middle) > 1 else 0
                middle[i:i + 2] = middle[i:i + 2][::-1]
            path1 = _bubble_path(start, end)
            path2 = _bubble_path(start, middle)[:-1] + _bubble_path(middle, end)
            part = compare_paths(fig, [order(*p) for p in path1], [order(*p) for p in path2],
                                 [random_inputs(fig, rng, backend_name)], backend, report.name)
            for v in part.verdicts:
                v["instance"] = instance
            report.extend(part)
        except ShadowcalcError as e:
            report.record_error(instance, e)
    logger.info("shadow coherence on %d-cell rings: %s", n, report.verdict)
    return report


def _ring_objects(rng: np.random.Generator, tokens: Sequence[Token]) -> List[BaseObject]:
    """Left objects of each token around a ring; a unit keeps the object it sits on."""
    objs: List[Optional[BaseObject]] = []
    for k, t in enumerate(tokens):
        if k and tokens[k - 1] == UNIT:
            objs.append(objs[-1])
        else:
            objs.append(gen.base_object(rng, f"A{k}", SUITE_DEFAULTS["base_size"]))
    k = len(tokens) - 1
    while k > 0 and tokens[k] == UNIT:
        objs[k] = objs[0]
        k -= 1
    return objs
