"""
The finite-set family backend: families of elements anchored in labeled
products, pullback / pushforward / external product, fiberwise maps and every
canonical isomorphism as a fixed key formula.

Keys follow one convention everywhere: pulling back along a relabeling keeps
the key, any other pullback pairs it with its new anchor, pushforward keeps
keys, and an external product of n >= 2 families uses n-tuples of keys.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from shadowcalc.base_finset import (Anchor, LabeledProduct, LabeledProductMap, Square,
                                    compose_chain, compose_lp, extern_many, merge_all,
                                    relabeling)
from shadowcalc.errors import BaseMismatch, NotBeckChevalley, NotCommuting, ShapeMismatch

logger = logging.getLogger(__name__)

Key = Hashable

# =============================================================================
# 1. FAMILIES
# =============================================================================

@dataclass(frozen=True)
class Family:
    """A finite set of keys, each anchored at an element of `base`."""
    base: LabeledProduct
    elements: Tuple[Tuple[Key, Anchor], ...]

    @classmethod
    def build(cls, base: LabeledProduct, pairs) -> "Family":
        pairs = list(pairs)
        for key, anchor in pairs:
            if anchor not in base:
                raise BaseMismatch(f"anchor {anchor!r} of {key!r} is not in {base!r}")
        if len({k for k, _ in pairs}) != len(pairs):
            raise ShapeMismatch("family keys must be unique")
        pairs.sort(key=lambda p: (base.element_position(p[1]), repr(p[0])))
        return cls(base, tuple(pairs))

    @classmethod
    def from_counts(cls, base: LabeledProduct, counts: Mapping[Anchor, int]) -> "Family":
        """Integer keys 0..n-1, `counts[a]` of them over each anchor a."""
        pairs, n = [], 0
        for a in base.elements:
            for _ in range(counts.get(a, 0)):
                pairs.append((n, a))
                n += 1
        return cls.build(base, pairs)

    @cached_property
    def _anchor_of(self) -> Dict[Key, Anchor]:
        return dict(self.elements)

    @cached_property
    def _fibers(self) -> Dict[Anchor, List[Key]]:
        fibers: Dict[Anchor, List[Key]] = {}
        for k, a in self.elements:
            fibers.setdefault(a, []).append(k)
        return fibers

    @cached_property
    def _fiber_positions(self) -> Dict[Key, int]:
        return {k: i for keys in self._fibers.values() for i, k in enumerate(keys)}

    def keys(self) -> List[Key]:
        return [k for k, _ in self.elements]

    def anchor(self, key: Key) -> Anchor:
        return self._anchor_of[key]

    def fiber(self, a: Anchor) -> List[Key]:
        return self._fibers.get(a, [])

    def fiber_position(self, key: Key) -> int:
        return self._fiber_positions[key]

    def __contains__(self, key) -> bool:
        return key in self._anchor_of

    def __len__(self) -> int:
        return len(self.elements)

    def cardinalities(self) -> Dict[Anchor, int]:
        return {a: len(self.fiber(a)) for a in self.base.elements}


def count_array(X: Family) -> np.ndarray:
    """Fiber sizes as an integer array with one axis per base factor."""
    shape = tuple(len(f) for f in X.base.factors)
    counts = np.zeros(shape, dtype=int)
    for a in X.base.elements:
        pos = tuple(f.index_of(x) for f, x in zip(X.base.factors, a))
        counts[pos] = len(X.fiber(a))
    return counts


def unit() -> Family:
    """The monoidal unit: one element over the empty product."""
    return Family(LabeledProduct.empty(), (((), ()),))


def pull_key(f: LabeledProductMap, a: Anchor, y: Key) -> Key:
    return y if f.is_relabeling else (a, y)


def unpull_key(f: LabeledProductMap, key: Key) -> Key:
    return key if f.is_relabeling else key[1]


def pullback(f: LabeledProductMap, Y: Family) -> Family:
    """f*Y: the elements of Y over f(a), re-anchored at a."""
    if Y.base != f.target:
        raise BaseMismatch(f"cannot pull {Y.base!r} back along {f!r}")
    if f.is_relabeling:
        return Family.build(f.source, [(y, f.relabel_preimage(a)) for y, a in Y.elements])
    pairs = [((a, y), a) for a in f.source.elements for y in Y.fiber(f(a))]
    return Family.build(f.source, pairs)


def pushforward(f: LabeledProductMap, X: Family) -> Family:
    """f_!X: same keys, anchors pushed through f."""
    if X.base != f.source:
        raise BaseMismatch(f"cannot push {X.base!r} forward along {f!r}")
    return Family.build(f.target, [(x, f(a)) for x, a in X.elements])


def tensor_key(keys: Sequence[Key]) -> Key:
    if len(keys) == 1:
        return keys[0]
    return tuple(keys)


def split_tensor_key(key: Key, n: int) -> List[Key]:
    if n == 1:
        return [key]
    return list(key)


def tensor_many(families: Sequence[Family]) -> Family:
    """External product; one factor is returned as is, none gives the unit."""
    if not families:
        return unit()
    if len(families) == 1:
        return families[0]
    base = merge_all([F.base for F in families])
    pairs = []
    for combo in itertools.product(*(F.elements for F in families)):
        key = tuple(k for k, _ in combo)
        anchor = base.assemble([(F.base, a) for F, (_, a) in zip(families, combo)])
        pairs.append((key, anchor))
    return Family.build(base, pairs)


def extern(X: Family, Y: Family) -> Family:
    return tensor_many([X, Y])


def internal_tensor(X: Family, Y: Family) -> Family:
    """Fiberwise product over a common base."""
    if X.base != Y.base:
        raise BaseMismatch("internal tensor needs a common base")
    pairs = [((x, y), a) for a in X.base.elements for x in X.fiber(a) for y in Y.fiber(a)]
    return Family.build(X.base, pairs)


def relabel_family(X: Family, rename: Mapping[Hashable, Hashable]) -> Family:
    """The same family with base indices renamed."""
    return pullback(relabeling(X.base, dict(rename)), X)


# =============================================================================
# 2. MAPS OF FAMILIES
# =============================================================================

@dataclass(frozen=True)
class FamilyMap:
    """
    A function on keys. Without `base_map` it is fiberwise over a common base;
    with one, anchor(f(x)) = base_map(anchor(x)).
    """
    source: Family
    target: Family
    mapping: Mapping[Key, Key]
    base_map: Optional[LabeledProductMap] = field(default=None)

    def __post_init__(self):
        if self.base_map is None and self.source.base != self.target.base:
            raise ShapeMismatch("fiberwise map between families over different bases")
        for k, a in self.source.elements:
            if k not in self.mapping or self.mapping[k] not in self.target:
                raise ShapeMismatch(f"key {k!r} has no image in the target family")
            expected = a if self.base_map is None else self.base_map(a)
            if self.target.anchor(self.mapping[k]) != expected:
                raise ShapeMismatch(f"key {k!r} is sent outside its fiber")

    @classmethod
    def from_function(cls, source: Family, target: Family, fn, base_map=None) -> "FamilyMap":
        return cls(source, target, {k: fn(k) for k in source.keys()}, base_map)

    def __call__(self, key: Key) -> Key:
        return self.mapping[key]

    @cached_property
    def is_bijective(self) -> bool:
        values = [self.mapping[k] for k in self.source.keys()]
        return len(set(values)) == len(values) == len(self.target)

    def then(self, other: "FamilyMap") -> "FamilyMap":
        """Diagrammatic composite: first self, then other."""
        if self.target != other.source:
            raise BaseMismatch("family maps are not composable")
        if self.base_map is None:
            base_map = other.base_map
        elif other.base_map is None:
            base_map = self.base_map
        else:
            base_map = compose_lp(self.base_map, other.base_map)
        mapping = {k: other(v) for k, v in self.mapping.items() if k in self.source}
        return _wrap(self.source, other.target, mapping, base_map,
                     isinstance(self, Bijection) and isinstance(other, Bijection))

    def same_as(self, other: "FamilyMap") -> bool:
        return (self.source == other.source and self.target == other.target
                and all(self(k) == other(k) for k in self.source.keys()))


@dataclass(frozen=True)
class Bijection(FamilyMap):
    """An invertible fiberwise map."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_bijective:
            raise ShapeMismatch("map is not a bijection")

    def inverse(self) -> "Bijection":
        if self.base_map is not None:
            raise ShapeMismatch("only fiberwise bijections are inverted")
        return Bijection(self.target, self.source, {v: k for k, v in self.mapping.items()})


def _wrap(source: Family, target: Family, mapping, base_map=None, bijective: bool = False) -> FamilyMap:
    if bijective and base_map is None:
        return Bijection(source, target, mapping)
    return FamilyMap(source, target, mapping, base_map)


def identity(X: Family) -> Bijection:
    return Bijection(X, X, {k: k for k in X.keys()})


def compose(*maps: FamilyMap) -> FamilyMap:
    """Composite of maps in the order they are applied."""
    result = maps[0]
    for m in maps[1:]:
        result = result.then(m)
    return result


def pull_map(f: LabeledProductMap, phi: FamilyMap) -> FamilyMap:
    """f*(phi) : f*X -> f*X'."""
    source, target = pullback(f, phi.source), pullback(f, phi.target)
    mapping = {k: pull_key(f, a, phi(unpull_key(f, k))) for k, a in source.elements}
    return _wrap(source, target, mapping, bijective=isinstance(phi, Bijection))


def push_map(f: LabeledProductMap, phi: FamilyMap) -> FamilyMap:
    """f_!(phi) : f_!X -> f_!X'."""
    source, target = pushforward(f, phi.source), pushforward(f, phi.target)
    return _wrap(source, target, dict(phi.mapping), bijective=isinstance(phi, Bijection))


def tensor_map(maps: Sequence[FamilyMap]) -> FamilyMap:
    if not maps:
        return identity(unit())
    if len(maps) == 1:
        return maps[0]
    source = tensor_many([m.source for m in maps])
    target = tensor_many([m.target for m in maps])
    mapping = {k: tuple(m(x) for m, x in zip(maps, k)) for k in source.keys()}
    return _wrap(source, target, mapping, bijective=all(isinstance(m, Bijection) for m in maps))


def internal_tensor_map(phi: FamilyMap, psi: FamilyMap) -> FamilyMap:
    source = internal_tensor(phi.source, psi.source)
    target = internal_tensor(phi.target, psi.target)
    mapping = {(x, y): (phi(x), psi(y)) for x, y in source.keys()}
    return _wrap(source, target, mapping, bijective=isinstance(phi, Bijection) and isinstance(psi, Bijection))


# =============================================================================
# 3. CANONICAL ISOMORPHISMS
# =============================================================================

def pull_word(maps: Sequence[LabeledProductMap], X: Family) -> Family:
    """m1* ... mn* X for maps listed in the order they are applied (m1 first)."""
    for m in reversed(maps):
        X = pullback(m, X)
    return X


def push_word(maps: Sequence[LabeledProductMap], X: Family) -> Family:
    """(mn)_! ... (m1)_! X."""
    for m in maps:
        X = pushforward(m, X)
    return X


def _unwind(maps: Sequence[LabeledProductMap], key: Key) -> Key:
    for m in maps:
        key = unpull_key(m, key)
    return key


def _wind(maps: Sequence[LabeledProductMap], a0: Anchor, x: Key) -> Key:
    anchors = [a0]
    for m in maps[:-1]:
        anchors.append(m(anchors[-1]))
    key = x
    for m, a in zip(reversed(maps), reversed(anchors)):
        key = pull_key(m, a, key)
    return key


def _composite(maps: Sequence[LabeledProductMap], base: LabeledProduct) -> LabeledProductMap:
    return compose_chain(list(maps)) if maps else LabeledProductMap.identity(base)


def pull_word_iso(maps1: Sequence[LabeledProductMap], maps2: Sequence[LabeledProductMap], X: Family) -> Bijection:
    """The (**) isomorphism between two pullback words with the same composite."""
    c1 = _composite(maps1, X.base)
    c2 = _composite(maps2, X.base)
    if c1 != c2:
        raise ShapeMismatch("pullback words have different composites")
    source, target = pull_word(maps1, X), pull_word(maps2, X)
    mapping = {k: _wind(maps2, a0, _unwind(maps1, k)) if maps2 else _unwind(maps1, k)
               for k, a0 in source.elements}
    return Bijection(source, target, mapping)


def push_word_iso(maps1: Sequence[LabeledProductMap], maps2: Sequence[LabeledProductMap], X: Family) -> Bijection:
    """The (!!) isomorphism between two pushforward words with the same composite."""
    c1 = _composite(maps1, X.base)
    c2 = _composite(maps2, X.base)
    if c1 != c2:
        raise ShapeMismatch("pushforward words have different composites")
    source, target = push_word(maps1, X), push_word(maps2, X)
    return Bijection(source, target, {k: k for k in source.keys()})


def comp_pull(f: LabeledProductMap, g: LabeledProductMap, X: Family) -> Bijection:
    """f*g*X -> (gf)*X."""
    return pull_word_iso([f, g], [compose_lp(f, g)], X)


def comp_push(f: LabeledProductMap, g: LabeledProductMap, X: Family) -> Bijection:
    """g_!f_!X -> (gf)_!X."""
    return push_word_iso([f, g], [compose_lp(f, g)], X)


def id_pull(X: Family) -> Bijection:
    return pull_word_iso([LabeledProductMap.identity(X.base)], [], X)


def bc_map(sq: Square, X: Family) -> FamilyMap:
    """
    top_! left* X -> right* bottom_! X for X over the bottom-left corner; an
    element pulled to d is sent to the pullback of itself at top(d).
    """
    if not sq.commutes():
        raise NotCommuting("Beck-Chevalley map needs a commuting square")
    pulled = pullback(sq.left, X)
    source = pushforward(sq.top, pulled)
    target = pullback(sq.right, pushforward(sq.bottom, X))
    mapping = {k: pull_key(sq.right, sq.top(d), unpull_key(sq.left, k)) for k, d in pulled.elements}
    return _wrap(source, target, mapping, bijective=len(set(mapping.values())) == len(mapping) == len(target))


def bc_iso(sq: Square, X: Family) -> Bijection:
    m = bc_map(sq, X)
    if not isinstance(m, Bijection):
        raise NotBeckChevalley("Beck-Chevalley map is not invertible on this square")
    return m


def unit_map(f: LabeledProductMap, X: Family) -> FamilyMap:
    """X -> f*f_!X."""
    target = pullback(f, pushforward(f, X))
    return FamilyMap(X, target, {x: pull_key(f, a, x) for x, a in X.elements})


def counit_map(f: LabeledProductMap, Y: Family) -> FamilyMap:
    """f_!f*Y -> Y."""
    source = pushforward(f, pullback(f, Y))
    return FamilyMap(source, Y, {k: unpull_key(f, k) for k in source.keys()})


def tensor_pull(maps: Sequence[LabeledProductMap], Xs: Sequence[Family]) -> Bijection:
    """(⊠f)*(⊠X) -> ⊠(f*X)."""
    F = extern_many(maps)
    source = pullback(F, tensor_many(list(Xs)))
    target = tensor_many([pullback(m, X) for m, X in zip(maps, Xs)])
    mapping = {}
    for k, a in source.elements:
        parts = split_tensor_key(unpull_key(F, k), len(maps))
        mapping[k] = tensor_key([pull_key(m, F.source.project(a, m.source), x)
                                 for m, x in zip(maps, parts)])
    return Bijection(source, target, mapping)


def tensor_push(maps: Sequence[LabeledProductMap], Xs: Sequence[Family]) -> Bijection:
    """(⊠f)_!(⊠X) -> ⊠(f_!X)."""
    F = extern_many(maps)
    source = pushforward(F, tensor_many(list(Xs)))
    target = tensor_many([pushforward(m, X) for m, X in zip(maps, Xs)])
    return Bijection(source, target, {k: k for k in source.keys()})


Tree = Union[Hashable, tuple]


def build_tree(tree: Tree, leaves: Mapping[Hashable, Family]) -> Family:
    """A nested external product; leaves are non-tuple labels, nodes are tuples."""
    if isinstance(tree, tuple):
        return tensor_many([build_tree(t, leaves) for t in tree])
    return leaves[tree]


def tree_leaves(tree: Tree) -> List[Hashable]:
    if isinstance(tree, tuple):
        return [leaf for t in tree for leaf in tree_leaves(t)]
    return [tree]


def split_tree_key(tree: Tree, key: Key) -> Dict[Hashable, Key]:
    if not isinstance(tree, tuple):
        return {tree: key}
    result: Dict[Hashable, Key] = {}
    for t, k in zip(tree, split_tensor_key(key, len(tree))):
        result.update(split_tree_key(t, k))
    return result


def join_tree_key(tree: Tree, keys: Mapping[Hashable, Key]) -> Key:
    if not isinstance(tree, tuple):
        return keys[tree]
    return tensor_key([join_tree_key(t, keys) for t in tree])


def regroup_iso(source_tree: Tree, target_tree: Tree, leaves: Mapping[Hashable, Family]) -> Bijection:
    """Associativity, symmetry and unitors of ⊠ in one formula: split keys by leaf, regroup."""
    if sorted(map(repr, tree_leaves(source_tree))) != sorted(map(repr, tree_leaves(target_tree))):
        raise ShapeMismatch("regrouping must use the same leaves")
    source, target = build_tree(source_tree, leaves), build_tree(target_tree, leaves)
    mapping = {k: join_tree_key(target_tree, split_tree_key(source_tree, k)) for k in source.keys()}
    return Bijection(source, target, mapping)


def proj_formula(f: LabeledProductMap, M: Family, N: Family) -> Bijection:
    """f_!(f*M ⊗ N) -> M ⊗ f_!N."""
    source = pushforward(f, internal_tensor(pullback(f, M), N))
    target = internal_tensor(M, pushforward(f, N))
    return Bijection(source, target, {(pk, n): (unpull_key(f, pk), n) for pk, n in source.keys()})


CANONICAL_ISOS = {
    "compPull": comp_pull,
    "compPush": comp_push,
    "beckChevalley": bc_map,
    "unit": unit_map,
    "counit": counit_map,
    "tensorPull": tensor_pull,
    "tensorPush": tensor_push,
    "tensorComp": regroup_iso,
    "projFormula": proj_formula,
}


def canonical_iso(kind: str, *data) -> FamilyMap:
    """Dispatch to the formula of the given kind."""
    if kind not in CANONICAL_ISOS:
        raise ShapeMismatch(f"unknown canonical isomorphism {kind!r}")
    return CANONICAL_ISOS[kind](*data)


# =============================================================================
# 4. CARTESIAN AND COCARTESIAN ARROWS
# =============================================================================

def cartesian_arrow(f: LabeledProductMap, Y: Family) -> FamilyMap:
    """f*Y -> Y over f."""
    source = pullback(f, Y)
    return FamilyMap(source, Y, {k: unpull_key(f, k) for k in source.keys()}, base_map=f)


def cocartesian_arrow(f: LabeledProductMap, X: Family) -> FamilyMap:
    """X -> f_!X over f."""
    target = pushforward(f, X)
    return FamilyMap(X, target, {k: k for k in X.keys()}, base_map=f)


def factor_through_cartesian(f: LabeledProductMap, Y: Family, phi: FamilyMap, k: LabeledProductMap) -> FamilyMap:
    """
    The unique psi : Z -> f*Y over k with cart ∘ psi = phi, for phi : Z -> Y
    over f∘k. Raises ShapeMismatch when phi does not lie over f∘k.
    """
    if phi.base_map is None or phi.base_map != compose_lp(k, f):
        raise ShapeMismatch("test arrow does not lie over the composite base map")
    target = pullback(f, Y)
    psi = FamilyMap(phi.source, target,
                    {z: pull_key(f, k(a), phi(z)) for z, a in phi.source.elements}, base_map=k)
    if not psi.then(cartesian_arrow(f, Y)).same_as(phi):
        raise ShapeMismatch("factorization through the cartesian arrow failed")
    return psi


def factor_through_cocartesian(f: LabeledProductMap, X: Family, phi: FamilyMap, k: LabeledProductMap) -> FamilyMap:
    """The unique psi : f_!X -> Z over k with psi ∘ cocart = phi, for phi over k∘f."""
    if phi.base_map is None or phi.base_map != compose_lp(f, k):
        raise ShapeMismatch("test arrow does not lie over the composite base map")
    source = pushforward(f, X)
    psi = FamilyMap(source, phi.target, dict(phi.mapping), base_map=k)
    if not cocartesian_arrow(f, X).then(psi).same_as(phi):
        raise ShapeMismatch("factorization through the cocartesian arrow failed")
    return psi
