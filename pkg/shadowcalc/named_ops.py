"""
Named operations as figures: each operation is one E𝒢 map whose plan,
evaluated on the inputs, gives the familiar formula.

    op_unit        Δ_! π* I                      ○─w─○  ->  ○─●─○
    op_base_change (id, f)_! π* I, (f, id)_! π* I
    op_odot        π_! Δ* (M ⊠ N)                ○─●─w─●─○  ->  darken w
    op_shadow      π_! Δ* M                      ●─w─ (circle)  ->  darken w
    op_I           the unit                      ∅  ->  ● with a loop
    op_pull        f* X,  op_push  f_! X         ●─w─○ / ○─w─●  ->  darken w
    op_boxtimes    M ⊠ N                         two cells covering one
    op_cover_pullback  M pulled along a bijective identification
"""
import logging
from dataclasses import dataclass
from typing import Dict, Hashable, Optional, Sequence, Tuple

from shadowcalc.base_finset import STAR, BaseMap, BaseObject, product
from shadowcalc.colorings import GiganticObject, embed
from shadowcalc.errors import BaseMismatch, ShapeMismatch
from shadowcalc.graph_core import Cell, ColoredGraph, circle_graph, path_graph
from shadowcalc.labeled_graphs import LabeledGraph, LabeledGraphMap, darkening, labeled_map
from shadowcalc.plans import (FAMILY_BACKEND, Assignment, Backend, evaluate,
                              generator_decomposition)

logger = logging.getLogger(__name__)

# =============================================================================
# 1. FIGURES
# =============================================================================

@dataclass(frozen=True)
class Figure:
    """An E𝒢 map with the edges each input sits on (in base-index order) and the result edges."""
    name: str
    map: LabeledGraphMap
    inputs: Tuple[Tuple[int, ...], ...]
    output: Tuple[int, ...]


def figure_assignment(fig: Figure, stamp: GiganticObject, inputs: Sequence,
                      backend: Backend = FAMILY_BACKEND) -> Assignment:
    """Relabel each input onto its figure edges and place it at the component it is glued to."""
    if len(inputs) != len(fig.inputs):
        raise ShapeMismatch(f"{fig.name} takes {len(fig.inputs)} inputs, got {len(inputs)}")
    values: Dict[Hashable, object] = {}
    for n, (X, edges) in enumerate(zip(inputs, fig.inputs)):
        base = backend.base_of(X)
        if len(base.index) != len(edges):
            raise ShapeMismatch(f"input {n} of {fig.name} has {len(base.index)} factors, expected {len(edges)}")
        u = stamp.glue[edges[0]]
        value = backend.relabel(X, dict(zip(base.index, edges)))
        if backend.base_of(value) != stamp.base(u):
            raise BaseMismatch(f"input {n} of {fig.name} lives over the wrong base",
                               expected=repr(stamp.base(u)), got=repr(backend.base_of(value)))
        values[u] = value
    missing = set(stamp.components) - set(values)
    if missing:
        raise ShapeMismatch(f"{fig.name}: components {sorted(missing)} have no input")
    return Assignment(stamp, values)


def run_figure(fig: Figure, inputs: Sequence, backend: Backend = FAMILY_BACKEND,
               order: str = "ascending"):
    """Evaluate the figure's plan and return the result over indices 0..k-1."""
    m = embed(fig.map)
    plan = generator_decomposition(m, order)
    out = evaluate(plan, figure_assignment(fig, m.source, inputs, backend), backend)
    component = m.target.glue[fig.output[0]] if fig.output else m.target.components[0]
    value = out.values[component]
    index = backend.base_of(value).index
    if set(index) != set(fig.output):
        raise ShapeMismatch(f"{fig.name}: result lives over {list(index)}, not {list(fig.output)}")
    logger.debug("%s evaluated with %d steps", fig.name, len(plan.steps))
    return backend.relabel(value, {e: i for i, e in enumerate(fig.output)})


def _label(backend: Backend, X, i: int) -> BaseObject:
    return backend.base_of(X).factors[i]


# -----------------------------------------------------------------------------
# figure builders
# -----------------------------------------------------------------------------

def figure_unit(B: BaseObject) -> Figure:
    G = LabeledGraph.build(path_graph(["white", "white", "white"]), {1: B, 2: B})
    return Figure("unit", darkening(G, [101]), (), (1, 2))


def figure_base_change(f: BaseMap, side: str = "left") -> Figure:
    """⟨A f B] on the left (over A×B) or [B f A⟩ on the right (over B×A)."""
    if side == "left":
        labels, orient = {1: f.source, 2: f.target}, (1, 2)
    elif side == "right":
        labels, orient = {1: f.target, 2: f.source}, (2, 1)
    else:
        raise ShapeMismatch(f"unknown side {side!r}")
    G = LabeledGraph.build(path_graph(["white", "white", "white"]), labels,
                           orient={101: orient}, vertex_label={101: f})
    return Figure(f"base-change-{side}", darkening(G, [101]), (), (1, 2))


def figure_odot(A: BaseObject, B: BaseObject, C: BaseObject) -> Figure:
    G = LabeledGraph.build(path_graph(["white", "black", "white", "black", "white"]),
                           {1: A, 2: B, 3: B, 4: C})
    return Figure("odot", darkening(G, [102]), ((1, 2), (3, 4)), (1, 4))


def figure_shadow(B: BaseObject) -> Figure:
    G = LabeledGraph.build(circle_graph(["black", "white"]), {1: B, 2: B})
    return Figure("shadow", darkening(G, [101]), ((2, 1),), ())


def figure_I() -> Figure:
    H = LabeledGraph.build(ColoredGraph.build({100: "black"}, {1: (100, 100)}), {1: STAR})
    return Figure("I", labeled_map(LabeledGraph.empty(), H, {}, {}), (), ())


def figure_pull(f: BaseMap) -> Figure:
    G = LabeledGraph.build(path_graph(["black", "white", "white"]), {1: f.target, 2: f.source},
                           orient={101: (2, 1)}, vertex_label={101: f})
    return Figure("pull", darkening(G, [101]), ((1,),), (2,))


def figure_push(f: BaseMap) -> Figure:
    G = LabeledGraph.build(path_graph(["white", "white", "black"]), {1: f.target, 2: f.source},
                           orient={101: (2, 1)}, vertex_label={101: f})
    return Figure("push", darkening(G, [101]), ((2,),), (1,))


def _cell(first_vertex: int, first_edge: int, left: BaseObject, right: BaseObject) -> LabeledGraph:
    g = path_graph(["white", "black", "white"], first_edge=first_edge, first_vertex=first_vertex)
    return LabeledGraph.build(g, {first_edge: left, first_edge + 1: right})


def figure_boxtimes(A: BaseObject, B: BaseObject, C: BaseObject, D: BaseObject) -> Figure:
    """Two 1-cells over A×B and C×D covering one over (A×C)×(B×D)."""
    first, second = _cell(100, 1, A, B), _cell(103, 3, C, D)
    G = LabeledGraph.build(ColoredGraph({**first.graph.vertices, **second.graph.vertices},
                                        {**first.graph.edges, **second.graph.edges}),
                           {1: A, 2: B, 3: C, 4: D})
    H = _cell(100, 1, product(A, C), product(B, D))
    vmap = {100: 100, 101: 101, 102: 102, 103: 100, 104: 101, 105: 102}
    emap = {1: Cell.edge(1), 2: Cell.edge(2), 3: Cell.edge(1), 4: Cell.edge(2)}
    return Figure("boxtimes", labeled_map(G, H, vmap, emap), ((1, 2), (3, 4)), (1, 2))


def figure_cover_pullback(iota_left: BaseMap, iota_right: BaseMap) -> Figure:
    """The identity shape ○─●─○ with bijective identifications on both edges."""
    for name, iota in (("left", iota_left), ("right", iota_right)):
        if not iota.is_bijective:
            raise ShapeMismatch(f"the {name} identification of a covering must be bijective")
    G = _cell(100, 1, iota_left.target, iota_right.target)
    H = _cell(100, 1, iota_left.source, iota_right.source)
    wrapped = {1: BaseMap.from_function(iota_left.source, product(iota_left.target), lambda x: (iota_left(x),)),
               2: BaseMap.from_function(iota_right.source, product(iota_right.target), lambda x: (iota_right(x),))}
    h = labeled_map(G, H, {v: v for v in G.graph.vertices}, {e: Cell.edge(e) for e in G.graph.edges}, wrapped)
    return Figure("cover-pullback", h, ((1, 2),), (1, 2))


# =============================================================================
# 2. OPERATIONS
# =============================================================================

def op_unit(B: BaseObject, backend: Backend = FAMILY_BACKEND):
    """U_B = Δ_! π* I over B×B."""
    return run_figure(figure_unit(B), [], backend)


def op_base_change_l(f: BaseMap, backend: Backend = FAMILY_BACKEND):
    """⟨A f B] = (id, f)_! π* I over A×B."""
    return run_figure(figure_base_change(f, "left"), [], backend)


def op_base_change_r(f: BaseMap, backend: Backend = FAMILY_BACKEND):
    """[B f A⟩ = (f, id)_! π* I over B×A."""
    return run_figure(figure_base_change(f, "right"), [], backend)


def op_odot(M, N, backend: Backend = FAMILY_BACKEND):
    A, B, B2, C = _label(backend, M, 0), _label(backend, M, 1), _label(backend, N, 0), _label(backend, N, 1)
    if B != B2:
        raise BaseMismatch("cannot compose 1-cells over different middle objects",
                           left=repr(B), right=repr(B2))
    return run_figure(figure_odot(A, B, C), [M, N], backend)


def op_shadow(M, backend: Backend = FAMILY_BACKEND):
    B, B2 = _label(backend, M, 0), _label(backend, M, 1)
    if B != B2:
        raise BaseMismatch("the shadow needs an endo-1-cell", left=repr(B), right=repr(B2))
    return run_figure(figure_shadow(B), [M], backend)


def op_I(backend: Backend = FAMILY_BACKEND):
    return run_figure(figure_I(), [], backend)


def op_pull(f: BaseMap, X, backend: Backend = FAMILY_BACKEND):
    if _label(backend, X, 0) != f.target:
        raise BaseMismatch("pullback input does not live over the map's target")
    return run_figure(figure_pull(f), [X], backend)


def op_push(f: BaseMap, X, backend: Backend = FAMILY_BACKEND):
    if _label(backend, X, 0) != f.source:
        raise BaseMismatch("pushforward input does not live over the map's source")
    return run_figure(figure_push(f), [X], backend)


def op_boxtimes(M, N, backend: Backend = FAMILY_BACKEND):
    fig = figure_boxtimes(_label(backend, M, 0), _label(backend, M, 1),
                          _label(backend, N, 0), _label(backend, N, 1))
    return run_figure(fig, [M, N], backend)


def op_cover_pullback(M, iota_left: BaseMap, iota_right: BaseMap, backend: Backend = FAMILY_BACKEND):
    return run_figure(figure_cover_pullback(iota_left, iota_right), [M], backend)


NAMED_OPS = {
    "unit": op_unit,
    "base_change_l": op_base_change_l,
    "base_change_r": op_base_change_r,
    "odot": op_odot,
    "shadow": op_shadow,
    "I": op_I,
    "pull": op_pull,
    "push": op_push,
    "boxtimes": op_boxtimes,
    "cover_pullback": op_cover_pullback,
}
