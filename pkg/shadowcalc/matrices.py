"""
The free-module backend: an object is a rank per base anchor, a map is a
block of integer matrices, one per anchor. Blocks are object-dtype numpy
arrays of Python ints so no product ever overflows.

Every basis vector carries a label. Pullback keeps labels, pushforward pairs
a label with the anchor it came from, and an n-fold external product uses
n-tuples in row-major order, which is the order `np.kron` produces. All
canonical isomorphisms are then permutation matrices read off the labels.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Hashable, List, Mapping, Sequence, Tuple

import numpy as np

from shadowcalc.base_finset import (Anchor, LabeledProduct, LabeledProductMap, Square,
                                    compose_lp, extern_many, merge_all)
from shadowcalc.errors import BaseMismatch, NotBeckChevalley, NotCommuting, ShapeMismatch
from shadowcalc.families import (Tree, join_tree_key, split_tensor_key, split_tree_key,
                                 tensor_key, tree_leaves)

logger = logging.getLogger(__name__)

Label = Hashable

# =============================================================================
# 1. OBJECTS AND MAPS
# =============================================================================

@dataclass(frozen=True)
class MatrixObject:
    """Basis labels per anchor, aligned with `base.elements`."""
    base: LabeledProduct
    basis: Tuple[Tuple[Label, ...], ...]

    def __post_init__(self):
        if len(self.basis) != len(self.base.elements):
            raise ShapeMismatch("basis is not aligned with the base elements")
        for labels in self.basis:
            if len(set(labels)) != len(labels):
                raise ShapeMismatch("basis labels repeat inside a fiber")

    @classmethod
    def from_ranks(cls, base: LabeledProduct, ranks: Mapping[Anchor, int]) -> "MatrixObject":
        return cls(base, tuple(tuple(range(ranks.get(a, 0))) for a in base.elements))

    def labels(self, a: Anchor) -> Tuple[Label, ...]:
        return self.basis[self.base.element_position(a)]

    def rank(self, a: Anchor) -> int:
        return len(self.labels(a))

    @cached_property
    def _label_positions(self) -> Tuple[Dict[Label, int], ...]:
        return tuple({l: i for i, l in enumerate(labels)} for labels in self.basis)

    def label_position(self, a: Anchor, label: Label) -> int:
        return self._label_positions[self.base.element_position(a)][label]

    def ranks(self) -> Dict[Anchor, int]:
        return {a: len(l) for a, l in zip(self.base.elements, self.basis)}

    def rank_array(self) -> np.ndarray:
        shape = tuple(len(f) for f in self.base.factors)
        out = np.zeros(shape, dtype=int)
        for a, labels in zip(self.base.elements, self.basis):
            out[tuple(f.index_of(x) for f, x in zip(self.base.factors, a))] = len(labels)
        return out

    def total_rank(self) -> int:
        return sum(len(l) for l in self.basis)


def zero_block(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=object)


def block_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0:
        return zero_block(a.shape[0], b.shape[1])
    return (a @ b).astype(object)


@dataclass(frozen=True, eq=False)
class MatrixMap:
    """A fiberwise linear map: one (target rank x source rank) block per anchor."""
    source: MatrixObject
    target: MatrixObject
    blocks: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.source.base != self.target.base:
            raise BaseMismatch("matrix maps are fiberwise over one base")
        if len(self.blocks) != len(self.source.basis):
            raise ShapeMismatch("one block per base anchor is required")
        for block, s, t in zip(self.blocks, self.source.basis, self.target.basis):
            if block.shape != (len(t), len(s)):
                raise ShapeMismatch(f"block shape {block.shape} does not match ranks {(len(t), len(s))}")

    def block(self, a: Anchor) -> np.ndarray:
        return self.blocks[self.source.base.element_position(a)]

    def then(self, other: "MatrixMap") -> "MatrixMap":
        """Diagrammatic composite: first self, then other."""
        if self.target != other.source:
            raise BaseMismatch("matrix maps are not composable")
        return MatrixMap(self.source, other.target,
                         tuple(block_matmul(b2, b1) for b1, b2 in zip(self.blocks, other.blocks)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(np.array_equal(x, y) for x, y in zip(self.blocks, other.blocks)))

    __hash__ = None

    def is_permutation(self) -> bool:
        for b in self.blocks:
            if b.shape[0] != b.shape[1]:
                return False
            if b.size and not (np.all((b == 0) | (b == 1)) and np.all(b.sum(axis=0) == 1)
                               and np.all(b.sum(axis=1) == 1)):
                return False
        return True

    def inverse(self) -> "MatrixMap":
        if not self.is_permutation():
            raise ShapeMismatch("only permutation blocks are inverted")
        return MatrixMap(self.target, self.source, tuple(b.T.copy() for b in self.blocks))

    def trace(self) -> int:
        return sum(int(np.trace(b)) if b.size else 0 for b in self.blocks)


def m_identity(X: MatrixObject) -> MatrixMap:
    return MatrixMap(X, X, tuple(np.identity(len(l), dtype=int).astype(object) for l in X.basis))


def m_compose(*maps: MatrixMap) -> MatrixMap:
    result = maps[0]
    for m in maps[1:]:
        result = result.then(m)
    return result


def m_relabel(source: MatrixObject, target: MatrixObject,
              fn: Callable[[Anchor, Label], Label]) -> MatrixMap:
    """The 0/1 map sending the basis vector `label` over a to `fn(a, label)`."""
    if source.base != target.base:
        raise BaseMismatch("relabeling needs a common base")
    blocks = []
    for a, labels in zip(source.base.elements, source.basis):
        block = zero_block(target.rank(a), len(labels))
        for j, label in enumerate(labels):
            block[target.label_position(a, fn(a, label)), j] = 1
        blocks.append(block)
    return MatrixMap(source, target, tuple(blocks))


def m_from_blocks(source: MatrixObject, target: MatrixObject, blocks: Mapping[Anchor, Sequence]) -> MatrixMap:
    """Blocks given as nested lists per anchor; missing anchors must have a zero-size block."""
    out = []
    for a in source.base.elements:
        rows, cols = target.rank(a), source.rank(a)
        if a in blocks:
            out.append(np.array(blocks[a], dtype=object).reshape(rows, cols))
        else:
            out.append(zero_block(rows, cols))
    return MatrixMap(source, target, tuple(out))


# =============================================================================
# 2. THE FOUR OPERATIONS
# =============================================================================

def m_unit() -> MatrixObject:
    return MatrixObject(LabeledProduct.empty(), (((),),))


def m_pullback(f: LabeledProductMap, Y: MatrixObject) -> MatrixObject:
    if Y.base != f.target:
        raise BaseMismatch(f"cannot pull {Y.base!r} back along {f!r}")
    return MatrixObject(f.source, tuple(Y.labels(f(a)) for a in f.source.elements))


def m_pushforward(f: LabeledProductMap, X: MatrixObject) -> MatrixObject:
    if X.base != f.source:
        raise BaseMismatch(f"cannot push {X.base!r} forward along {f!r}")
    return MatrixObject(f.target, tuple(tuple((a, l) for a in f.fibers[b] for l in X.labels(a))
                                        for b in f.target.elements))


def m_extern(objs: Sequence[MatrixObject]) -> MatrixObject:
    """Row-major external product; one factor is returned as is, none gives the unit."""
    if not objs:
        return m_unit()
    if len(objs) == 1:
        return objs[0]
    base = merge_all([X.base for X in objs])
    by_anchor = {}
    for combo in itertools.product(*(X.base.elements for X in objs)):
        a = base.assemble(list(zip((X.base for X in objs), combo)))
        by_anchor[a] = tuple(itertools.product(*(X.labels(c) for X, c in zip(objs, combo))))
    return MatrixObject(base, tuple(by_anchor[a] for a in base.elements))


def m_pull_map(f: LabeledProductMap, phi: MatrixMap) -> MatrixMap:
    source, target = m_pullback(f, phi.source), m_pullback(f, phi.target)
    return MatrixMap(source, target, tuple(phi.block(f(a)) for a in f.source.elements))


def _block_diag(blocks: List[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zero_block(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r, c = r + b.shape[0], c + b.shape[1]
    return out


def m_push_map(f: LabeledProductMap, phi: MatrixMap) -> MatrixMap:
    source, target = m_pushforward(f, phi.source), m_pushforward(f, phi.target)
    return MatrixMap(source, target,
                     tuple(_block_diag([phi.block(a) for a in f.fibers[b]]) for b in f.target.elements))


def m_tensor_map(maps: Sequence[MatrixMap]) -> MatrixMap:
    if not maps:
        return m_identity(m_unit())
    if len(maps) == 1:
        return maps[0]
    source = m_extern([m.source for m in maps])
    target = m_extern([m.target for m in maps])
    blocks = {}
    for combo in itertools.product(*(m.source.base.elements for m in maps)):
        a = source.base.assemble(list(zip((m.source.base for m in maps), combo)))
        block = np.ones((1, 1), dtype=object)
        for m, c in zip(maps, combo):
            block = np.kron(block, m.block(c)).astype(object)
        blocks[a] = block.reshape(target.rank(a), source.rank(a))
    return MatrixMap(source, target, tuple(blocks[a] for a in source.base.elements))


# =============================================================================
# 3. CANONICAL ISOMORPHISMS
# =============================================================================

def _composite(maps: Sequence[LabeledProductMap], base: LabeledProduct) -> LabeledProductMap:
    if not maps:
        return LabeledProductMap.identity(base)
    result = maps[0]
    for m in maps[1:]:
        result = compose_lp(result, m)
    return result


def m_pull_word(maps: Sequence[LabeledProductMap], X: MatrixObject) -> MatrixObject:
    for m in reversed(maps):
        X = m_pullback(m, X)
    return X


def m_push_word(maps: Sequence[LabeledProductMap], X: MatrixObject) -> MatrixObject:
    for m in maps:
        X = m_pushforward(m, X)
    return X


def m_pull_word_iso(maps1, maps2, X: MatrixObject) -> MatrixMap:
    """Pullback labels never change, so both words carry the same basis."""
    if _composite(maps1, X.base) != _composite(maps2, X.base):
        raise ShapeMismatch("pullback words have different composites")
    return m_relabel(m_pull_word(maps1, X), m_pull_word(maps2, X), lambda a, l: l)


def _push_wind(maps: Sequence[LabeledProductMap], a0: Anchor, label: Label) -> Label:
    a = a0
    for m in maps:
        label = (a, label)
        a = m(a)
    return label


def m_push_word_iso(maps1, maps2, X: MatrixObject) -> MatrixMap:
    if _composite(maps1, X.base) != _composite(maps2, X.base):
        raise ShapeMismatch("pushforward words have different composites")
    source, target = m_push_word(maps1, X), m_push_word(maps2, X)

    def relabel(b, label):
        if not maps1:
            return _push_wind(maps2, b, label)
        inner = label
        for _ in range(len(maps1) - 1):
            inner = inner[1]
        a0, l0 = inner
        return _push_wind(maps2, a0, l0)

    return m_relabel(source, target, relabel)


def m_bc_map(sq: Square, X: MatrixObject) -> MatrixMap:
    """top_! left* X -> right* bottom_! X: the basis vector (d, l) goes to (left(d), l)."""
    if not sq.commutes():
        raise NotCommuting("Beck-Chevalley map needs a commuting square")
    source = m_pushforward(sq.top, m_pullback(sq.left, X))
    target = m_pullback(sq.right, m_pushforward(sq.bottom, X))
    return m_relabel(source, target, lambda b, dl: (sq.left(dl[0]), dl[1]))


def m_bc_iso(sq: Square, X: MatrixObject) -> MatrixMap:
    m = m_bc_map(sq, X)
    if not m.is_permutation():
        raise NotBeckChevalley("Beck-Chevalley map is not invertible on this square")
    return m


def m_unit_map(f: LabeledProductMap, X: MatrixObject) -> MatrixMap:
    """X -> f*f_!X, the inclusion of the summand of a."""
    return m_relabel(X, m_pullback(f, m_pushforward(f, X)), lambda a, l: (a, l))


def m_counit_map(f: LabeledProductMap, Y: MatrixObject) -> MatrixMap:
    """f_!f*Y -> Y, the fold [I ... I]."""
    return m_relabel(m_pushforward(f, m_pullback(f, Y)), Y, lambda b, al: al[1])


def m_tensor_pull(maps: Sequence[LabeledProductMap], Xs: Sequence[MatrixObject]) -> MatrixMap:
    F = extern_many(maps)
    source = m_pullback(F, m_extern(list(Xs)))
    target = m_extern([m_pullback(m, X) for m, X in zip(maps, Xs)])
    return m_relabel(source, target, lambda a, l: l)


def m_tensor_push(maps: Sequence[LabeledProductMap], Xs: Sequence[MatrixObject]) -> MatrixMap:
    F = extern_many(maps)
    source = m_pushforward(F, m_extern(list(Xs)))
    target = m_extern([m_pushforward(m, X) for m, X in zip(maps, Xs)])

    def relabel(b, label):
        a, inner = label
        parts = split_tensor_key(inner, len(maps))
        return tensor_key([(F.source.project(a, m.source), l) for m, l in zip(maps, parts)])

    return m_relabel(source, target, relabel)


def m_build_tree(tree: Tree, leaves: Mapping[Hashable, MatrixObject]) -> MatrixObject:
    if isinstance(tree, tuple):
        return m_extern([m_build_tree(t, leaves) for t in tree])
    return leaves[tree]


def m_regroup(source_tree: Tree, target_tree: Tree, leaves: Mapping[Hashable, MatrixObject]) -> MatrixMap:
    if sorted(map(repr, tree_leaves(source_tree))) != sorted(map(repr, tree_leaves(target_tree))):
        raise ShapeMismatch("regrouping must use the same leaves")
    source, target = m_build_tree(source_tree, leaves), m_build_tree(target_tree, leaves)
    return m_relabel(source, target,
                     lambda a, l: join_tree_key(target_tree, split_tree_key(source_tree, l)))


M_CANONICAL_ISOS = {
    "compPull": m_pull_word_iso,
    "compPush": m_push_word_iso,
    "beckChevalley": m_bc_map,
    "unit": m_unit_map,
    "counit": m_counit_map,
    "tensorPull": m_tensor_pull,
    "tensorPush": m_tensor_push,
    "tensorComp": m_regroup,
}


def m_canonical_iso(kind: str, *data) -> MatrixMap:
    if kind not in M_CANONICAL_ISOS:
        raise ShapeMismatch(f"the matrix backend has no canonical map of kind {kind!r}")
    return M_CANONICAL_ISOS[kind](*data)
