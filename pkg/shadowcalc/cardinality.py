"""
The cardinality map H from the family backend to the matrix backend, its
structure isomorphisms, and the coherence polyhedra a map of symmetric
monoidal bifibrations must satisfy.

H keeps the base, sends a family to the free module on its fibers (basis
labels are the keys) and a fiberwise function to its 0/1 matrix. Each
structure map is a permutation read off the labels.
"""
import logging
from typing import Dict, Hashable, Mapping, Sequence, Tuple

from shadowcalc.base_finset import LabeledProductMap, Square, compose_lp, extern_many
from shadowcalc.errors import ShapeMismatch
from shadowcalc.families import (Family, FamilyMap, Tree, bc_map, build_tree, comp_pull, comp_push,
                                 counit_map, pullback, pushforward, regroup_iso, split_tensor_key,
                                 tensor_key, tensor_many, tensor_pull, tensor_push, unit_map, unpull_key)
from shadowcalc.matrices import (MatrixMap, MatrixObject, m_bc_map, m_build_tree, m_compose,
                                 m_counit_map, m_extern, m_identity, m_pull_map, m_pull_word_iso,
                                 m_pullback, m_push_map, m_push_word_iso, m_pushforward, m_regroup,
                                 m_relabel, m_tensor_map, m_tensor_pull, m_tensor_push, m_unit,
                                 m_unit_map)

logger = logging.getLogger(__name__)

# =============================================================================
# 1. THE MAP AND ITS STRUCTURE ISOMORPHISMS
# =============================================================================

def h_obj(X: Family) -> MatrixObject:
    return MatrixObject(X.base, tuple(tuple(X.fiber(a)) for a in X.base.elements))


def h_map(phi: FamilyMap) -> MatrixMap:
    if phi.base_map is not None:
        raise ShapeMismatch("H is applied to fiberwise maps only")
    return m_relabel(h_obj(phi.source), h_obj(phi.target), lambda a, k: phi(k))


def h_pull(f: LabeledProductMap, Y: Family) -> MatrixMap:
    """H(f*Y) -> f*H(Y)."""
    return m_relabel(h_obj(pullback(f, Y)), m_pullback(f, h_obj(Y)), lambda a, k: unpull_key(f, k))


def h_push(f: LabeledProductMap, X: Family) -> MatrixMap:
    """H(f_!X) -> f_!H(X)."""
    return m_relabel(h_obj(pushforward(f, X)), m_pushforward(f, h_obj(X)), lambda b, x: (X.anchor(x), x))


def h_tensor(Xs: Sequence[Family]) -> MatrixMap:
    """H(⊠X) -> ⊠H(X); the labels agree and only the basis order moves."""
    return m_relabel(h_obj(tensor_many(list(Xs))), m_extern([h_obj(X) for X in Xs]), lambda a, k: k)


def h_unit() -> MatrixMap:
    return m_identity(m_unit())


def h_tree(tree: Tree, leaves: Mapping[Hashable, Family]) -> MatrixMap:
    """H of a nested external product, moved inside every node."""
    if not isinstance(tree, tuple):
        return m_identity(h_obj(leaves[tree]))
    children = [build_tree(t, leaves) for t in tree]
    return h_tensor(children).then(m_tensor_map([h_tree(t, leaves) for t in tree]))


def h_summary(X: Family) -> Dict[str, object]:
    H = h_obj(X)
    return {"base": list(X.base.index), "ranks": H.rank_array().tolist(), "total": H.total_rank()}


# =============================================================================
# 2. COHERENCE POLYHEDRA
# =============================================================================
# Each function returns the two composites around one polyhedron.

def h_comp_pull(f: LabeledProductMap, g: LabeledProductMap, Y: Family) -> Tuple[MatrixMap, MatrixMap]:
    gf = compose_lp(f, g)
    lhs = h_map(comp_pull(f, g, Y)).then(h_pull(gf, Y))
    rhs = m_compose(h_pull(f, pullback(g, Y)),
                    m_pull_map(f, h_pull(g, Y)),
                    m_pull_word_iso([f, g], [gf], h_obj(Y)))
    return lhs, rhs


def h_comp_push(f: LabeledProductMap, g: LabeledProductMap, X: Family) -> Tuple[MatrixMap, MatrixMap]:
    gf = compose_lp(f, g)
    lhs = h_map(comp_push(f, g, X)).then(h_push(gf, X))
    rhs = m_compose(h_push(g, pushforward(f, X)),
                    m_push_map(g, h_push(f, X)),
                    m_push_word_iso([f, g], [gf], h_obj(X)))
    return lhs, rhs


def h_unit_square(f: LabeledProductMap, X: Family) -> Tuple[MatrixMap, MatrixMap]:
    lhs = m_unit_map(f, h_obj(X))
    rhs = m_compose(h_map(unit_map(f, X)),
                    h_pull(f, pushforward(f, X)),
                    m_pull_map(f, h_push(f, X)))
    return lhs, rhs


def h_counit_square(f: LabeledProductMap, Y: Family) -> Tuple[MatrixMap, MatrixMap]:
    lhs = h_map(counit_map(f, Y))
    rhs = m_compose(h_push(f, pullback(f, Y)),
                    m_push_map(f, h_pull(f, Y)),
                    m_counit_map(f, h_obj(Y)))
    return lhs, rhs


def h_beck_chevalley(sq: Square, X: Family) -> Tuple[MatrixMap, MatrixMap]:
    lhs = m_compose(h_map(bc_map(sq, X)),
                    h_pull(sq.right, pushforward(sq.bottom, X)),
                    m_pull_map(sq.right, h_push(sq.bottom, X)))
    rhs = m_compose(h_push(sq.top, pullback(sq.left, X)),
                    m_push_map(sq.top, h_pull(sq.left, X)),
                    m_bc_map(sq, h_obj(X)))
    return lhs, rhs


def h_regroup(source_tree: Tree, target_tree: Tree, leaves: Mapping[Hashable, Family]) -> Tuple[MatrixMap, MatrixMap]:
    h_leaves = {k: h_obj(X) for k, X in leaves.items()}
    lhs = h_map(regroup_iso(source_tree, target_tree, leaves)).then(h_tree(target_tree, leaves))
    rhs = h_tree(source_tree, leaves).then(m_regroup(source_tree, target_tree, h_leaves))
    return lhs, rhs


def h_tensor_pull(maps: Sequence[LabeledProductMap], Xs: Sequence[Family]) -> Tuple[MatrixMap, MatrixMap]:
    F = extern_many(maps)
    lhs = m_compose(h_map(tensor_pull(maps, Xs)),
                    h_tensor([pullback(m, X) for m, X in zip(maps, Xs)]),
                    m_tensor_map([h_pull(m, X) for m, X in zip(maps, Xs)]))
    rhs = m_compose(h_pull(F, tensor_many(list(Xs))),
                    m_pull_map(F, h_tensor(Xs)),
                    m_tensor_pull(maps, [h_obj(X) for X in Xs]))
    return lhs, rhs


def h_tensor_push(maps: Sequence[LabeledProductMap], Xs: Sequence[Family]) -> Tuple[MatrixMap, MatrixMap]:
    F = extern_many(maps)
    lhs = m_compose(h_map(tensor_push(maps, Xs)),
                    h_tensor([pushforward(m, X) for m, X in zip(maps, Xs)]),
                    m_tensor_map([h_push(m, X) for m, X in zip(maps, Xs)]))
    rhs = m_compose(h_push(F, tensor_many(list(Xs))),
                    m_push_map(F, h_tensor(Xs)),
                    m_tensor_push(maps, [h_obj(X) for X in Xs]))
    return lhs, rhs


H_COHERENCES = {
    "H**": h_comp_pull,
    "H!!": h_comp_push,
    "Hu": h_unit_square,
    "Hc": h_counit_square,
    "H*!": h_beck_chevalley,
    "H⊠⊠": h_regroup,
    "H⊠*": h_tensor_pull,
    "H⊠!": h_tensor_push,
}
