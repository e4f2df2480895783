"""
Finite sets as the base category, labeled products over them, and the
Beck-Chevalley predicate for squares of labeled products.
"""
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple

from shadowcalc.errors import BaseMismatch, NotCommuting, ShapeMismatch

# =============================================================================
# 1. BASE OBJECTS AND MAPS
# =============================================================================

Element = Hashable
Anchor = Tuple[Element, ...]


@dataclass(frozen=True)
class BaseObject:
    """A finite set with a fixed element order."""
    elems: Tuple[Element, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.elems)) != len(self.elems):
            raise ShapeMismatch(f"duplicate elements in base object {self.name!r}")

    @cached_property
    def _positions(self) -> Dict[Element, int]:
        return {x: i for i, x in enumerate(self.elems)}

    def __contains__(self, x) -> bool:
        return x in self._positions

    def __len__(self) -> int:
        return len(self.elems)

    def index_of(self, x) -> int:
        return self._positions[x]

    def __repr__(self) -> str:
        label = self.name or "set"
        return f"{label}{list(self.elems)}"


STAR = BaseObject(((),), name="*")


@dataclass(frozen=True)
class BaseMap:
    """A total function between base objects, tabulated along the source order."""
    source: BaseObject
    target: BaseObject
    table: Tuple[Element, ...]

    def __post_init__(self):
        if len(self.table) != len(self.source.elems):
            raise ShapeMismatch("base map table does not cover its source")
        for y in self.table:
            if y not in self.target:
                raise ShapeMismatch(f"base map value {y!r} outside target {self.target!r}")

    @classmethod
    def from_function(cls, source: BaseObject, target: BaseObject, fn) -> "BaseMap":
        return cls(source, target, tuple(fn(x) for x in source.elems))

    @classmethod
    def from_dict(cls, source: BaseObject, target: BaseObject, mapping: Dict) -> "BaseMap":
        return cls(source, target, tuple(mapping[x] for x in source.elems))

    @classmethod
    def identity(cls, obj: BaseObject) -> "BaseMap":
        return cls(obj, obj, obj.elems)

    @classmethod
    def to_star(cls, obj: BaseObject) -> "BaseMap":
        return cls(obj, STAR, tuple(() for _ in obj.elems))

    def __call__(self, x):
        return self.table[self.source.index_of(x)]

    @cached_property
    def is_identity(self) -> bool:
        return self.source == self.target and self.table == self.source.elems

    @cached_property
    def is_bijective(self) -> bool:
        return len(set(self.table)) == len(self.table) == len(self.target.elems)

    def then(self, other: "BaseMap") -> "BaseMap":
        """Diagrammatic composite: first self, then other."""
        if self.target != other.source:
            raise BaseMismatch("base maps are not composable")
        return BaseMap(self.source, other.target, tuple(other(y) for y in self.table))


def compose_base(*maps: BaseMap) -> BaseMap:
    """Composite of maps listed in the order they are applied."""
    result = maps[0]
    for m in maps[1:]:
        result = result.then(m)
    return result


def product(*objs: BaseObject) -> BaseObject:
    """Cartesian product with elements as tuples; the empty product is STAR."""
    if not objs:
        return STAR
    name = "x".join(o.name or "?" for o in objs)
    return BaseObject(tuple(itertools.product(*(o.elems for o in objs))), name=name)


# =============================================================================
# 2. LABELED PRODUCTS
# =============================================================================

@dataclass(frozen=True)
class LabeledProduct:
    """Π_T A_t with T sorted ascending. Anchors are tuples aligned with `index`."""
    index: Tuple[Hashable, ...]
    factors: Tuple[BaseObject, ...]

    def __post_init__(self):
        if len(self.index) != len(self.factors):
            raise ShapeMismatch("index and factors differ in length")
        if list(self.index) != sorted(self.index):
            raise ShapeMismatch(f"labeled product index must be sorted: {self.index}")
        if len(set(self.index)) != len(self.index):
            raise ShapeMismatch("labeled product index has duplicates")

    @classmethod
    def of(cls, factors: Dict[Hashable, BaseObject]) -> "LabeledProduct":
        keys = sorted(factors)
        return cls(tuple(keys), tuple(factors[k] for k in keys))

    @classmethod
    def empty(cls) -> "LabeledProduct":
        return cls((), ())

    @cached_property
    def _positions(self) -> Dict[Hashable, int]:
        return {t: i for i, t in enumerate(self.index)}

    def position(self, t) -> int:
        return self._positions[t]

    def factor(self, t) -> BaseObject:
        return self.factors[self._positions[t]]

    def as_dict(self) -> Dict[Hashable, BaseObject]:
        return dict(zip(self.index, self.factors))

    @cached_property
    def elements(self) -> Tuple[Anchor, ...]:
        return tuple(itertools.product(*(f.elems for f in self.factors)))

    @cached_property
    def _element_positions(self) -> Dict[Anchor, int]:
        return {a: i for i, a in enumerate(self.elements)}

    def element_position(self, a: Anchor) -> int:
        return self._element_positions[a]

    def __contains__(self, a) -> bool:
        return (isinstance(a, tuple) and len(a) == len(self.index)
                and all(x in f for x, f in zip(a, self.factors)))

    def size(self) -> int:
        n = 1
        for f in self.factors:
            n *= len(f)
        return n

    def restrict(self, keep: Iterable) -> "LabeledProduct":
        keep = set(keep)
        return LabeledProduct(tuple(t for t in self.index if t in keep),
                              tuple(f for t, f in zip(self.index, self.factors) if t in keep))

    def merge(self, other: "LabeledProduct") -> "LabeledProduct":
        """Product over the disjoint union of the two index sets."""
        if set(self.index) & set(other.index):
            raise BaseMismatch(f"indices overlap: {set(self.index) & set(other.index)}")
        combined = dict(self.as_dict())
        combined.update(other.as_dict())
        return LabeledProduct.of(combined)

    def project(self, a: Anchor, sub: "LabeledProduct") -> Anchor:
        """Restriction of an anchor to the indices of `sub`."""
        return tuple(a[self._positions[t]] for t in sub.index)

    def assemble(self, parts: Sequence[Tuple["LabeledProduct", Anchor]]) -> Anchor:
        """Inverse of `project` over a partition of the index."""
        values = {}
        for lp, a in parts:
            values.update(zip(lp.index, a))
        return tuple(values[t] for t in self.index)

    def __repr__(self) -> str:
        inner = ", ".join(f"{t}:{f!r}" for t, f in zip(self.index, self.factors))
        return f"Π[{inner}]"


def merge_all(products: Sequence[LabeledProduct]) -> LabeledProduct:
    result = LabeledProduct.empty()
    for lp in products:
        result = result.merge(lp)
    return result


@dataclass(frozen=True)
class LabeledProductMap:
    """
    A map Π_T A_t -> Π_U B_u: an index map p: U -> T and, for each u,
    a base map A_{p(u)} -> B_u. Both tuples are aligned with target.index.
    """
    source: LabeledProduct
    target: LabeledProduct
    p: Tuple[Hashable, ...]
    components: Tuple[BaseMap, ...]

    def __post_init__(self):
        if len(self.p) != len(self.target.index) or len(self.components) != len(self.target.index):
            raise ShapeMismatch("labeled product map is not aligned with its target index")
        for u, t, comp in zip(self.target.index, self.p, self.components):
            if t not in self.source._positions:
                raise ShapeMismatch(f"index map sends {u!r} outside the source index")
            if comp.source != self.source.factor(t) or comp.target != self.target.factor(u):
                raise ShapeMismatch(f"component at {u!r} has the wrong type")

    @classmethod
    def build(cls, source: LabeledProduct, target: LabeledProduct,
              p: Dict, components: Dict) -> "LabeledProductMap":
        return cls(source, target,
                   tuple(p[u] for u in target.index),
                   tuple(components[u] for u in target.index))

    @classmethod
    def identity(cls, lp: LabeledProduct) -> "LabeledProductMap":
        return cls(lp, lp, lp.index, tuple(BaseMap.identity(f) for f in lp.factors))

    def index_map(self) -> Dict[Hashable, Hashable]:
        return dict(zip(self.target.index, self.p))

    def component(self, u) -> BaseMap:
        return self.components[self.target.position(u)]

    @cached_property
    def _source_positions(self) -> Tuple[int, ...]:
        return tuple(self.source.position(t) for t in self.p)

    def __call__(self, a: Anchor) -> Anchor:
        return tuple(comp(a[i]) for comp, i in zip(self.components, self._source_positions))

    @cached_property
    def fibers(self) -> Dict[Anchor, List[Anchor]]:
        """Preimages of every target anchor, in source element order."""
        result: Dict[Anchor, List[Anchor]] = {b: [] for b in self.target.elements}
        for a in self.source.elements:
            result[self(a)].append(a)
        return result

    @cached_property
    def is_relabeling(self) -> bool:
        """True for an index bijection with identity components."""
        return (len(set(self.p)) == len(self.p) == len(self.source.index)
                and all(c.is_identity for c in self.components))

    def relabel_preimage(self, b: Anchor) -> Anchor:
        values = dict(zip(self.p, b))
        return tuple(values[t] for t in self.source.index)

    def is_identity(self) -> bool:
        return self.source == self.target and self.p == self.source.index and self.is_relabeling

    def restrict(self, source_keep: Iterable, target_keep: Iterable) -> "LabeledProductMap":
        """Sub-map between sub-products; p must send target_keep into source_keep."""
        src = self.source.restrict(source_keep)
        tgt = self.target.restrict(target_keep)
        p = {}
        comps = {}
        for u in tgt.index:
            t = self.p[self.target.position(u)]
            if t not in src._positions:
                raise ShapeMismatch(f"restriction leaves {u!r} without its source factor {t!r}")
            p[u] = t
            comps[u] = self.component(u)
        return LabeledProductMap.build(src, tgt, p, comps)

    def __repr__(self) -> str:
        return f"LPMap({self.source!r} -> {self.target!r}, p={dict(zip(self.target.index, self.p))})"


def compose_lp(f: LabeledProductMap, g: LabeledProductMap) -> LabeledProductMap:
    """g ∘ f. Index maps compose contravariantly, components pointwise."""
    if f.target != g.source:
        raise BaseMismatch(f"cannot compose {f!r} then {g!r}")
    p = {}
    comps = {}
    for w, u, cg in zip(g.target.index, g.p, g.components):
        p[w] = f.p[f.target.position(u)]
        comps[w] = f.component(u).then(cg)
    return LabeledProductMap.build(f.source, g.target, p, comps)


def compose_chain(maps: Sequence[LabeledProductMap]) -> LabeledProductMap:
    """Composite of maps listed in the order they are applied."""
    result = maps[0]
    for m in maps[1:]:
        result = compose_lp(result, m)
    return result


def extern_lp(f: LabeledProductMap, g: LabeledProductMap) -> LabeledProductMap:
    """Diagrammatic external product f × g over disjoint indices."""
    source = f.source.merge(g.source)
    target = f.target.merge(g.target)
    p = {**f.index_map(), **g.index_map()}
    comps = {u: f.component(u) for u in f.target.index}
    comps.update({u: g.component(u) for u in g.target.index})
    return LabeledProductMap.build(source, target, p, comps)


def projection(lp: LabeledProduct, keep: Iterable) -> LabeledProductMap:
    """The projection Π_T A -> Π_{keep} A."""
    tgt = lp.restrict(keep)
    return LabeledProductMap(lp, tgt, tgt.index, tuple(BaseMap.identity(f) for f in tgt.factors))


# =============================================================================
# 3. BECK-CHEVALLEY SQUARES
# =============================================================================

@dataclass(frozen=True)
class Square:
    """
    A square of labeled products with top-left corner `top.source`:

        TL --top--> TR
        |            |
       left        right
        v            v
        BL --bottom--> BR
    """
    top: LabeledProductMap
    left: LabeledProductMap
    right: LabeledProductMap
    bottom: LabeledProductMap

    def commutes(self) -> bool:
        if self.top.source != self.left.source or self.right.target != self.bottom.target:
            return False
        if self.top.target != self.right.source or self.left.target != self.bottom.source:
            return False
        return compose_lp(self.top, self.right) == compose_lp(self.left, self.bottom)


def _component_fiber_square(sq: Square, t) -> bool:
    tl = sq.top.source
    top_idx = [u for u in sq.top.target.index if sq.top.index_map()[u] == t]
    left_idx = [v for v in sq.left.target.index if sq.left.index_map()[v] == t]
    right_p = sq.right.index_map()
    bottom_p = sq.bottom.index_map()
    corner = [w for w in sq.right.target.index if right_p[w] in top_idx]

    def to_top(a):
        return tuple(sq.top.component(u)(a) for u in top_idx)

    def to_left(a):
        return tuple(sq.left.component(v)(a) for v in left_idx)

    def top_to_corner(b):
        vals = dict(zip(top_idx, b))
        return tuple(sq.right.component(w)(vals[right_p[w]]) for w in corner)

    def left_to_corner(c):
        vals = dict(zip(left_idx, c))
        return tuple(sq.bottom.component(w)(vals[bottom_p[w]]) for w in corner)

    tops = list(itertools.product(*(sq.top.target.factor(u).elems for u in top_idx)))
    lefts = list(itertools.product(*(sq.left.target.factor(v).elems for v in left_idx)))
    by_corner: Dict[Tuple, List] = {}
    for c in lefts:
        by_corner.setdefault(left_to_corner(c), []).append(c)
    fiber_product = {(b, c) for b in tops for c in by_corner.get(top_to_corner(b), [])}
    images = [(to_top(a), to_left(a)) for a in tl.factor(t).elems]
    return len(set(images)) == len(images) and set(images) == fiber_product


def is_beck_chevalley(sq: Square) -> bool:
    """
    True iff for each top-left index t the component square of finite sets is
    a pullback, checked by building the fiber product explicitly.
    """
    if not sq.commutes():
        raise NotCommuting("square does not commute")
    return all(_component_fiber_square(sq, t) for t in sq.top.source.index)


def product_square_is_pullback(sq: Square) -> bool:
    """Pullback test on the underlying products (weaker than is_beck_chevalley)."""
    if not sq.commutes():
        raise NotCommuting("square does not commute")
    by_corner: Dict[Anchor, List[Anchor]] = {}
    for c in sq.bottom.source.elements:
        by_corner.setdefault(sq.bottom(c), []).append(c)
    fiber_product = {(b, c) for b in sq.right.source.elements for c in by_corner.get(sq.right(b), [])}
    images = [(sq.top(a), sq.left(a)) for a in sq.top.source.elements]
    return len(set(images)) == len(images) and set(images) == fiber_product


def extern_many(maps: Sequence[LabeledProductMap]) -> LabeledProductMap:
    """External product of any number of maps; the empty product is the identity of Π_∅."""
    if not maps:
        return LabeledProductMap.identity(LabeledProduct.empty())
    result = maps[0]
    for m in maps[1:]:
        result = extern_lp(result, m)
    return result


def relabeling(lp: LabeledProduct, rename: Dict[Hashable, Hashable]) -> LabeledProductMap:
    """The relabeling Π_{rename(T)} -> Π_T that renames indices without touching factors."""
    renamed = LabeledProduct.of({rename[t]: f for t, f in zip(lp.index, lp.factors)})
    forward = {t: rename[t] for t in lp.index}
    return LabeledProductMap.build(renamed, lp, forward, {t: BaseMap.identity(lp.factor(t)) for t in lp.index})
