"""
Seeded random instances: base objects and maps, labeled products and their
maps, families, matrix objects, fiberwise maps and small colored graphs.
Every builder draws from a numpy Generator so a seed fixes the whole instance.
"""
import itertools
from typing import List, Optional, Sequence, Tuple

import numpy as np

from shadowcalc.base_finset import (BaseMap, BaseObject, LabeledProduct, LabeledProductMap, Square,
                                    extern_lp)
from shadowcalc.colorings import GiganticObject
from shadowcalc.errors import ShapeMismatch
from shadowcalc.families import Family, FamilyMap
from shadowcalc.graph_core import circle_graph, path_graph
from shadowcalc.labeled_graphs import (LabeledGraph, LabeledGraphMap, collapse_blacks, darkening,
                                       identity_labeled)
from shadowcalc.matrices import MatrixMap, MatrixObject
from shadowcalc.plans import Assignment

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

LIMITS = {
    "base_size": 3,
    "fiber_size": 2,
    "rank": 2,
    "entry": 3,
}


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


# =============================================================================
# 2. BASE DATA
# =============================================================================

def base_object(rng: np.random.Generator, name: str = "", max_size: Optional[int] = None,
                min_size: int = 1) -> BaseObject:
    n = int(rng.integers(min_size, (max_size or LIMITS["base_size"]) + 1))
    return BaseObject(tuple(range(n)), name=name)


def base_map(rng: np.random.Generator, source: BaseObject, target: BaseObject) -> BaseMap:
    return BaseMap(source, target, tuple(target.elems[int(i)] for i in rng.integers(0, len(target), len(source))))


def bijection(rng: np.random.Generator, source: BaseObject) -> BaseMap:
    return BaseMap(source, source, tuple(source.elems[int(i)] for i in rng.permutation(len(source))))


def labeled_product(rng: np.random.Generator, index: Sequence, max_size: Optional[int] = None) -> LabeledProduct:
    return LabeledProduct.of({t: base_object(rng, f"A{t}", max_size) for t in index})


def lp_map(rng: np.random.Generator, source: LabeledProduct, target: LabeledProduct) -> LabeledProductMap:
    """Random index map target -> source with random components."""
    if not source.index and target.index:
        raise ShapeMismatch("a map out of the empty product needs an empty target")
    p, comps = {}, {}
    for u in target.index:
        t = source.index[int(rng.integers(0, len(source.index)))]
        p[u] = t
        comps[u] = base_map(rng, source.factor(t), target.factor(u))
    return LabeledProductMap.build(source, target, p, comps)


def lp_map_from(rng: np.random.Generator, source: LabeledProduct, target_index: Sequence) -> LabeledProductMap:
    """A random map out of `source` to a fresh product over `target_index`."""
    return lp_map(rng, source, labeled_product(rng, target_index))


def product_grid(rng: np.random.Generator, width: int, height: int,
                 index: Tuple[int, int] = (0, 1)) -> List[List[Square]]:
    """
    grid[i][j] is the product square with f_i across (on index[0]) and g_j down
    (on index[1]); adjacent squares share an edge, so any block pastes.
    """
    across, down = index
    As = [labeled_product(rng, (across,)) for _ in range(width + 1)]
    Cs = [labeled_product(rng, (down,)) for _ in range(height + 1)]
    fs = [lp_map(rng, As[i], As[i + 1]) for i in range(width)]
    gs = [lp_map(rng, Cs[j], Cs[j + 1]) for j in range(height)]
    ida = [LabeledProductMap.identity(A) for A in As]
    idc = [LabeledProductMap.identity(C) for C in Cs]
    return [[Square(top=extern_lp(fs[i], idc[j]), left=extern_lp(ida[i], gs[j]),
                    right=extern_lp(ida[i + 1], gs[j]), bottom=extern_lp(fs[i], idc[j + 1]))
             for j in range(height)]
            for i in range(width)]


def product_square(rng: np.random.Generator, index: Tuple[int, int] = (0, 1)) -> Square:
    """The Beck-Chevalley square of f × g around A × C."""
    return product_grid(rng, 1, 1, index)[0][0]


def lp_chain(rng: np.random.Generator, length: int, max_index: int = 2, offset: int = 0) -> List[LabeledProductMap]:
    """Composable random maps between products over offset, offset+1, ..."""
    products = [labeled_product(rng, tuple(range(offset, offset + int(rng.integers(1, max_index + 1)))))
                for _ in range(length + 1)]
    return [lp_map(rng, products[k], products[k + 1]) for k in range(length)]


# =============================================================================
# 3. FIBER OBJECTS AND MAPS
# =============================================================================

def family(rng: np.random.Generator, base: LabeledProduct, max_count: Optional[int] = None) -> Family:
    top = (LIMITS["fiber_size"] if max_count is None else max_count) + 1
    return Family.from_counts(base, {a: int(rng.integers(0, top)) for a in base.elements})


def matrix_object(rng: np.random.Generator, base: LabeledProduct, max_rank: Optional[int] = None) -> MatrixObject:
    top = (LIMITS["rank"] if max_rank is None else max_rank) + 1
    return MatrixObject.from_ranks(base, {a: int(rng.integers(0, top)) for a in base.elements})


def fiber_object(rng: np.random.Generator, base: LabeledProduct, backend_name: str = "family"):
    return family(rng, base) if backend_name == "family" else matrix_object(rng, base)


def one_cell(rng: np.random.Generator, A: BaseObject, B: BaseObject, backend_name: str = "family"):
    """A random 1-cell over A × B, indexed 0 and 1."""
    return fiber_object(rng, LabeledProduct.of({0: A, 1: B}), backend_name)


def family_map(rng: np.random.Generator, X: Family, Y: Family) -> FamilyMap:
    """A random fiberwise map; fibers of X over anchors with an empty Y-fiber must be empty."""
    mapping = {}
    for k, a in X.elements:
        fiber = Y.fiber(a)
        if not fiber:
            raise ShapeMismatch(f"no fiberwise map: anchor {a!r} has an empty target fiber")
        mapping[k] = fiber[int(rng.integers(0, len(fiber)))]
    return FamilyMap(X, Y, mapping)


def matrix_map(rng: np.random.Generator, X: MatrixObject, Y: MatrixObject) -> MatrixMap:
    hi = LIMITS["entry"]
    blocks = tuple(rng.integers(-hi, hi + 1, (len(t), len(s))).astype(object)
                   for s, t in zip(X.basis, Y.basis))
    return MatrixMap(X, Y, blocks)


def square_matrix(rng: np.random.Generator, k: int) -> np.ndarray:
    hi = LIMITS["entry"]
    return rng.integers(-hi, hi + 1, (k, k)).astype(object)


# =============================================================================
# 4. GRAPHS
# =============================================================================

def white_path(n_whites: int) -> LabeledGraph:
    """○ ─ w ─ … ─ w ─ ● with n internal whites and a single-point label on every edge."""
    one = BaseObject((0,), name="1")
    g = path_graph(["white"] + ["white"] * n_whites + ["black"])
    return LabeledGraph.build(g, {e: one for e in g.edges})


def random_labeled_path(rng: np.random.Generator, n_internal: int, black_share: float = 0.3,
                        force_black: bool = False) -> LabeledGraph:
    """A path ○ … ○ with random black/white internal vertices and identity labels on one base object."""
    A = base_object(rng, "A", 2)
    colors = ["black" if rng.random() < black_share else "white" for _ in range(n_internal)]
    if force_black and n_internal and "black" not in colors:
        colors[int(rng.integers(0, n_internal))] = "black"
    g = path_graph(["white"] + colors + ["white"])
    return LabeledGraph.build(g, {e: A for e in g.edges})


def random_labeled_cycle(rng: np.random.Generator, n_whites: int) -> LabeledGraph:
    """A cycle with one black vertex and n internal whites."""
    A = base_object(rng, "A", 2)
    g = circle_graph(["black"] + ["white"] * n_whites)
    return LabeledGraph.build(g, {e: A for e in g.edges})


def subsets(items: Sequence) -> List[tuple]:
    return [c for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def random_darkening_chain(rng: np.random.Generator, G: LabeledGraph, length: int,
                           share: float = 0.4) -> List[LabeledGraphMap]:
    """Composable darkenings, each of a random subset of the whites still internal."""
    maps, current = [], G
    for _ in range(length):
        chosen = [v for v in current.graph.internal_whites if rng.random() < share]
        P = darkening(current, chosen)
        maps.append(P)
        current = P.target
    return maps


def random_inert_map(rng: np.random.Generator, G: LabeledGraph) -> LabeledGraphMap:
    """An identity, the collapse of black edges, or the darkening of a white between a black and a white."""
    g = G.graph
    options = [identity_labeled(G)]
    if any(g.is_black(a) and g.is_black(b) for a, b in g.edges.values()):
        options.append(collapse_blacks(G))
    for w in g.internal_whites:
        ends = sorted(g.vertices[g.other_end(e, w)].value for e in g.incidence[w])
        if ends == ["black", "white"] and G.vertex_label[w].is_identity:
            options.append(darkening(G, [w]))
    return options[int(rng.integers(0, len(options)))]


def random_assignment(rng: np.random.Generator, stamp: GiganticObject, backend_name: str = "family") -> Assignment:
    """A random fiber object over the base of every component of the stamp."""
    return Assignment(stamp, {u: fiber_object(rng, stamp.base(u), backend_name) for u in stamp.components})
