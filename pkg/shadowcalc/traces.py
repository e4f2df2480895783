"""
Traces in the bicategory of free modules over finite sets.

A 1-cell A -|-> B is a basis per pair (a, b); a 2-cell is one integer block
per pair of endpoints. Composites stay flat: a basis element of
X1 ⊙ ... ⊙ Xk at (x, y) is the tuple of points (x, c1, ..., y) together with
one label per cell, and the shadow of an endo-word drops the repeated last
point. Maps between shadows act on sparse vectors, so only the two ends of a
trace are ever tabulated.
"""
import functools
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from shadowcalc import generators as gen
from shadowcalc.base_finset import BaseObject, product
from shadowcalc.errors import NotDualizable, ShadowcalcError, ShapeMismatch
from shadowcalc.matrices import block_matmul, zero_block
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

FULLER_LIMITS = {
    "max_cells": 4,
    "max_rank": 3,
    "max_base": 2,
    "max_side_rank": 1,
}

FULLER_INSTANCES = 100
UNIT_LABEL = "u"
POINT = BaseObject(("pt",), name="pt")

Point = Hashable
Label = Hashable
Basis = Tuple[tuple, tuple]
Vector = Dict[Basis, int]


# =============================================================================
# 2. 1-CELLS AND WORDS
# =============================================================================

@dataclass(frozen=True)
class Cell:
    """A 1-cell source -|-> target: the basis labels over each pair of points."""
    source: BaseObject
    target: BaseObject
    basis: Mapping[Tuple[Point, Point], Tuple[Label, ...]]
    name: str = field(default="", compare=False)

    @classmethod
    def free(cls, source: BaseObject, target: BaseObject, ranks: Mapping, name: str = "") -> "Cell":
        return cls(source, target, {(a, b): tuple(range(ranks.get((a, b), 0)))
                                    for a in source.elems for b in target.elems}, name)

    def labels(self, a: Point, b: Point) -> Tuple[Label, ...]:
        return self.basis.get((a, b), ())

    def total_rank(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def __repr__(self) -> str:
        return f"Cell({self.name or '?'}: {self.source!r} -|-> {self.target!r})"


Word = Tuple[Cell, ...]


def unit_cell(A: BaseObject) -> Cell:
    """U_A: rank one on the diagonal."""
    return Cell(A, A, {(a, a): (UNIT_LABEL,) for a in A.elems}, name=f"U_{A.name}")


def dual(M: Cell) -> Cell:
    """The transpose cell, the standard right dual of M."""
    return Cell(M.target, M.source, {(b, a): labels for (a, b), labels in M.basis.items()},
                name=f"{M.name}^v")


def check_word(word: Sequence[Cell]) -> Word:
    word = tuple(word)
    for c1, c2 in zip(word, word[1:]):
        if c1.target != c2.source:
            raise ShapeMismatch(f"{c1!r} and {c2!r} are not composable")
    return word


def word_basis(word: Sequence[Cell], x: Point, y: Point) -> List[Basis]:
    """Basis of X1 ⊙ ... ⊙ Xk at (x, y); the empty word is the unit."""
    if not word:
        return [((x,), ())] if x == y else []
    out = []
    for inner in itertools.product(*(c.target.elems for c in word[:-1])):
        points = (x,) + inner + (y,)
        per_cell = [c.labels(points[i], points[i + 1]) for i, c in enumerate(word)]
        out.extend((points, labels) for labels in itertools.product(*per_cell))
    return out


def shadow_basis(word: Sequence[Cell]) -> List[Basis]:
    if not word:
        raise ShapeMismatch("the shadow of an empty word needs an explicit unit cell")
    if word[-1].target != word[0].source:
        raise ShapeMismatch("only endo-words have a shadow")
    return [(points[:-1], labels)
            for x in word[0].source.elems for points, labels in word_basis(word, x, x)]


def compose_cell(word: Sequence[Cell], name: str = "") -> Cell:
    """X1 ⊙ ... ⊙ Xk as one cell whose labels are the word basis."""
    word = check_word(word)
    S, T = word[0].source, word[-1].target
    return Cell(S, T, {(x, y): tuple(word_basis(word, x, y)) for x in S.elems for y in T.elems},
                name=name or "⊙".join(c.name or "?" for c in word))


def boxtimes(cells: Sequence[Cell]) -> Cell:
    """The external product ⊠Xi over the products of sources and targets."""
    S = product(*(c.source for c in cells))
    T = product(*(c.target for c in cells))
    basis = {(a, b): tuple(itertools.product(*(c.labels(x, y) for c, x, y in zip(cells, a, b))))
             for a in S.elems for b in T.elems}
    return Cell(S, T, basis, name="⊠".join(c.name or "?" for c in cells))


def twisted_boxtimes(cells: Sequence[Cell]) -> Cell:
    """
    The twisted product of Xi: A(i-1) -|-> Bi. Source factor i is the source
    of cell i+1, and the label at (α, β) is the tuple of labels of cell i at
    (α[i-1], β[i]), indices taken cyclically.
    """
    n = len(cells)
    S = product(*(cells[(j + 1) % n].source for j in range(n)))
    T = product(*(c.target for c in cells))
    basis = {}
    for a in S.elems:
        for b in T.elems:
            basis[(a, b)] = tuple(itertools.product(*(c.labels(a[j - 1], b[j]) for j, c in enumerate(cells))))
    return Cell(S, T, basis, name="⊠~".join(c.name or "?" for c in cells))


# =============================================================================
# 3. 2-CELLS
# =============================================================================

@dataclass(frozen=True, eq=False)
class TwoCell:
    """A map of words between the same endpoints; blocks are (target basis x source basis)."""
    source: Word
    target: Word
    left: BaseObject
    right: BaseObject
    blocks: Mapping[Tuple[Point, Point], np.ndarray]

    def __post_init__(self):
        for key, block in self.blocks.items():
            if block.shape != self.shape(*key):
                raise ShapeMismatch(f"block at {key!r} has shape {block.shape}, expected {self.shape(*key)}")

    @cached_property
    def _tables(self) -> Tuple[Dict, Dict]:
        cols, rows = {}, {}
        for x in self.left.elems:
            for y in self.right.elems:
                cols[(x, y)] = {b: j for j, b in enumerate(word_basis(self.source, x, y))}
                rows[(x, y)] = word_basis(self.target, x, y)
        return cols, rows

    def shape(self, x: Point, y: Point) -> Tuple[int, int]:
        cols, rows = self._tables
        return len(rows[(x, y)]), len(cols[(x, y)])

    def block(self, x: Point, y: Point) -> np.ndarray:
        if (x, y) in self.blocks:
            return self.blocks[(x, y)]
        return zero_block(*self.shape(x, y))

    def column(self, basis: Basis) -> List[Tuple[Basis, int]]:
        """Image of one source basis element as (target basis, coefficient) pairs."""
        points = basis[0]
        key = (points[0], points[-1])
        block = self.blocks.get(key)
        if block is None:
            return []
        cols, rows = self._tables
        j = cols[key][basis]
        return [(rows[key][i], c) for i, c in enumerate(block[:, j]) if c != 0]

    def then(self, other: "TwoCell") -> "TwoCell":
        if self.target != other.source or (self.left, self.right) != (other.left, other.right):
            raise ShapeMismatch("2-cells are not composable")
        blocks = {(x, y): block_matmul(other.block(x, y), self.block(x, y))
                  for x in self.left.elems for y in self.right.elems}
        return TwoCell(self.source, other.target, self.left, self.right, blocks)

    def inverse(self) -> "TwoCell":
        """Inverse of a relabeling."""
        for block in self.blocks.values():
            if block.shape[0] != block.shape[1] or (block.size and not (
                    np.all((block == 0) | (block == 1)) and np.all(block.sum(axis=0) == 1))):
                raise ShapeMismatch("only relabelings are inverted")
        return TwoCell(self.target, self.source, self.left, self.right,
                       {k: b.T.copy() for k, b in self.blocks.items()})

    def apply(self, v: Vector) -> Vector:
        return whisker_vector(v, 0, len(self.source), self)


def two_cell(source: Sequence[Cell], target: Sequence[Cell], blocks: Mapping,
             left: Optional[BaseObject] = None, right: Optional[BaseObject] = None) -> TwoCell:
    """A 2-cell from nested lists or arrays; the endpoints default to the ends of the source word."""
    source, target = check_word(source), check_word(target)
    left = left or (source[0].source if source else target[0].source)
    right = right or (source[-1].target if source else target[-1].target)
    return TwoCell(source, target, left, right,
                   {k: np.array(b, dtype=object).reshape(np.shape(b)) for k, b in blocks.items()})


def relabeling(source: Sequence[Cell], target: Sequence[Cell], left: BaseObject, right: BaseObject,
               fn: Callable[[Point, Point, Basis], Basis]) -> TwoCell:
    """The 0/1 2-cell sending each source basis element at (x, y) to fn(x, y, basis)."""
    source, target = tuple(source), tuple(target)
    blocks = {}
    for x in left.elems:
        for y in right.elems:
            cols = word_basis(source, x, y)
            rows = {b: i for i, b in enumerate(word_basis(target, x, y))}
            block = zero_block(len(rows), len(cols))
            for j, b in enumerate(cols):
                block[rows[fn(x, y, b)], j] = 1
            blocks[(x, y)] = block
    return TwoCell(source, target, left, right, blocks)


def whisker_vector(v: Vector, start: int, stop: int, phi: TwoCell) -> Vector:
    """
    Apply phi to cells start..stop-1 of every basis element of v. Works for
    open words (k+1 points) and shadows (k points, the window may end at the
    wrap-around point).
    """
    out: Dict[Basis, int] = defaultdict(int)
    for (points, labels), coeff in v.items():
        n = len(points)
        x, y = points[start % n], points[stop % n]
        window = ((x,) + points[start + 1:stop] + (y,), labels[start:stop]) if stop > start else ((x,), ())
        if stop == start and x != y:
            continue
        for (rp, rl), c in phi.column(window):
            out[(points[:start] + rp[:-1] + points[stop:], labels[:start] + rl + labels[stop:])] += coeff * c
    return {b: c for b, c in out.items() if c != 0}


# =============================================================================
# 4. SHADOWS
# =============================================================================

@dataclass(frozen=True, eq=False)
class ShadowMap:
    """A linear map sh(source) -> sh(target), evaluated on sparse vectors."""
    source: Word
    target: Word
    action: Callable[[Vector], Vector]

    def __call__(self, v: Vector) -> Vector:
        return self.action(v)

    def then(self, other: "ShadowMap") -> "ShadowMap":
        if self.target != other.source:
            raise ShapeMismatch("shadow maps are not composable")
        first, second = self.action, other.action
        return ShadowMap(self.source, other.target, lambda v: second(first(v)))

    def matrix(self) -> np.ndarray:
        cols = shadow_basis(self.source)
        rows = {b: i for i, b in enumerate(shadow_basis(self.target))}
        out = zero_block(len(rows), len(cols))
        for j, b in enumerate(cols):
            for r, c in self.action({b: 1}).items():
                out[rows[r], j] += c
        return out

    def scalar(self) -> int:
        m = self.matrix()
        if m.shape != (1, 1):
            raise ShapeMismatch(f"a scalar needs one-dimensional shadows, got {m.shape}")
        return int(m[0, 0])


def compose_shadow(maps: Sequence[ShadowMap]) -> ShadowMap:
    return functools.reduce(lambda f, g: f.then(g), maps)


def shadow_whisker(word: Sequence[Cell], start: int, stop: int, phi: TwoCell) -> ShadowMap:
    """sh(... ⊙ phi ⊙ ...) with phi on cells start..stop-1."""
    word = tuple(word)
    if word[start:stop] != phi.source:
        raise ShapeMismatch(f"cells {start}..{stop - 1} are not the source of the 2-cell")
    new = check_word(word[:start] + phi.target + word[stop:])
    return ShadowMap(word, new, lambda v: whisker_vector(v, start, stop, phi))


def theta(word: Sequence[Cell], j: int) -> ShadowMap:
    """The cyclicity isomorphism sh(X1...Xk) -> sh(X(j+1)...Xk X1...Xj)."""
    word = tuple(word)

    def act(v: Vector) -> Vector:
        return {(p[j:] + p[:j], l[j:] + l[:j]): c for (p, l), c in v.items()}

    return ShadowMap(word, word[j:] + word[:j], act)


def untwist(cells: Sequence[Cell]) -> ShadowMap:
    """τ: sh(⊠~Xi) -> sh(X1 ⊙ ... ⊙ Xn) for an endo-chain of cells."""
    cells = check_word(cells)
    tw = twisted_boxtimes(cells)

    def act(v: Vector) -> Vector:
        return {((a[-1],) + tuple(a[:-1]), tuple(labels[0])): c for ((a,), labels), c in v.items()}

    return ShadowMap((tw,), cells, act)


# =============================================================================
# 5. DUALITY AND TRACES
# =============================================================================

@dataclass(frozen=True)
class Duality:
    """Right duality data: eta: U_A -> M ⊙ Mv and eps: Mv ⊙ M -> U_B."""
    cell: Cell
    dual: Cell
    eta: TwoCell
    eps: TwoCell


def standard_duality(M: Cell) -> Duality:
    """The transpose dual; eta sums matching label pairs and eps pairs them."""
    D = dual(M)
    eta, eps = {}, {}
    for a in M.source.elems:
        rows = word_basis((M, D), a, a)
        block = zero_block(len(rows), 1)
        for i, (_, (l1, l2)) in enumerate(rows):
            if l1 == l2:
                block[i, 0] = 1
        eta[(a, a)] = block
    for b in M.target.elems:
        cols = word_basis((D, M), b, b)
        block = zero_block(1, len(cols))
        for j, (_, (l1, l2)) in enumerate(cols):
            if l1 == l2:
                block[0, j] = 1
        eps[(b, b)] = block
    return Duality(M, D,
                   TwoCell((), (M, D), M.source, M.source, eta),
                   TwoCell((D, M), (), M.target, M.target, eps))


def check_duality(d: Duality) -> None:
    """Raise NotDualizable unless both triangle identities hold."""
    M, D = d.cell, d.dual
    if (D.source, D.target) != (M.target, M.source):
        raise NotDualizable(f"{D!r} cannot be a dual of {M!r}")
    triangles = [(M, 0, (1, 3)), (D, 1, (0, 2))]
    for cell, at, (s, e) in triangles:
        for (x, y) in cell.basis:
            for b in word_basis((cell,), x, y):
                out = whisker_vector(whisker_vector({b: 1}, at, at, d.eta), s, e, d.eps)
                if out != {b: 1}:
                    raise NotDualizable(f"triangle identity fails for {cell!r}", element=b, image=out)


def trace(phi: TwoCell, duality: Optional[Duality] = None) -> ShadowMap:
    """tr(phi) for phi: Q ⊙ M -> M ⊙ P, through sh(Q M Mv) -> sh(M P Mv) -> sh(P Mv M)."""
    if len(phi.source) != 2 or len(phi.target) != 2 or phi.source[1] != phi.target[0]:
        raise ShapeMismatch("a trace needs a 2-cell Q ⊙ M -> M ⊙ P")
    (Q, M), P = phi.source, phi.target[1]
    if duality is None:
        duality = standard_duality(M)
    else:
        check_duality(duality)
    D = duality.dual
    return compose_shadow([shadow_whisker((Q,), 1, 1, duality.eta),
                           shadow_whisker((Q, M, D), 0, 2, phi),
                           theta((M, P, D), 1),
                           shadow_whisker((P, D, M), 1, 3, duality.eps)])


def multitrace(phis: Sequence[TwoCell], dualities: Optional[Sequence[Duality]] = None) -> ShadowMap:
    """
    tr(phi1, ..., phin) for phi_i: Q_i ⊙ M_i -> M_(i-1) ⊙ P_i, from sh(Q1 ... Qn)
    to sh(P1 ... Pn): insert every unit, apply every phi, rotate once, evaluate.
    """
    n = len(phis)
    Ms = [p.source[1] for p in phis]
    for j, p in enumerate(phis):
        if len(p.source) != 2 or len(p.target) != 2 or p.target[0] != Ms[j - 1]:
            raise ShapeMismatch(f"2-cell {j} is not of the form Q ⊙ M_{j} -> M_{j - 1} ⊙ P")
    if dualities is None:
        dualities = [standard_duality(M) for M in Ms]
    else:
        for d in dualities:
            check_duality(d)

    steps: List[ShadowMap] = []
    word = check_word([p.source[0] for p in phis])

    def push(step: ShadowMap) -> None:
        nonlocal word
        steps.append(step)
        word = step.target

    for j in range(n):
        push(shadow_whisker(word, 3 * j + 1, 3 * j + 1, dualities[j].eta))
    for j in range(n):
        push(shadow_whisker(word, 3 * j, 3 * j + 2, phis[j]))
    push(theta(word, 1))
    for j in reversed(range(n)):
        push(shadow_whisker(word, 3 * j + 1, 3 * j + 3, dualities[j].eps))
    return compose_shadow(steps)


# =============================================================================
# 6. THE FULLER CONSTRUCTION
# =============================================================================

def twisted_map(phis: Sequence[TwoCell]) -> TwoCell:
    """⊠~phi_i between the twisted products of the composite cells, blocks as Kronecker products."""
    sources = [compose_cell(p.source) for p in phis]
    targets = [compose_cell(p.target) for p in phis]
    src, tgt = twisted_boxtimes(sources), twisted_boxtimes(targets)
    blocks = {}
    for a in src.source.elems:
        for b in src.target.elems:
            parts = [p.block(a[j - 1], b[j]) for j, p in enumerate(phis)]
            blocks[(a, b)] = functools.reduce(np.kron, parts).astype(object)
    return TwoCell((src,), (tgt,), src.source, src.target, blocks)


def fuller(phis: Sequence[TwoCell]) -> TwoCell:
    """
    The Fuller map ⊠~Q ⊙ ⊠M -> ⊠M ⊙ ⊠~P: regroup into ⊠~(Q_i ⊙ M_i), apply
    ⊠~phi_i, and regroup ⊠~(M_(i-1) ⊙ P_i) back.
    """
    Qs = [p.source[0] for p in phis]
    Ms = [p.source[1] for p in phis]
    Ps = [p.target[1] for p in phis]
    tq, bm, tp = twisted_boxtimes(Qs), boxtimes(Ms), twisted_boxtimes(Ps)
    middle = twisted_map(phis)

    def regroup_q(x, y, basis):
        (a, mid, b), (qs, ms) = basis
        return ((a, b), (tuple(((a[j - 1], mid[j], b[j]), (qs[j], ms[j])) for j in range(len(phis))),))

    def regroup_p(x, y, basis):
        (a, mid, b), (ms, ps) = basis
        return ((a, b), (tuple(((a[j - 1], mid[j - 1], b[j]), (ms[j - 1], ps[j])) for j in range(len(phis))),))

    into = relabeling((tq, bm), middle.source, tq.source, bm.target, regroup_q)
    back = relabeling((bm, tp), middle.target, tq.source, bm.target, regroup_p)
    return into.then(middle).then(back.inverse())


def fuller_square(phis: Sequence[TwoCell]) -> Tuple[np.ndarray, np.ndarray]:
    """Both ways around sh(⊠~Q) -> sh(P1 ... Pn): τ then multitrace, and tr(Fuller) then τ."""
    Qs = [p.source[0] for p in phis]
    Ps = [p.target[1] for p in phis]
    via_multitrace = untwist(Qs).then(multitrace(phis)).matrix()
    via_fuller = trace(fuller(phis)).then(untwist(Ps)).matrix()
    return via_multitrace, via_fuller


# =============================================================================
# 7. ORACLES AND INSTANCES
# =============================================================================

def index_sum_trace(Fs: Sequence[np.ndarray]) -> int:
    """Σ F1[i1, i2] F2[i2, i3] ... Fn[in, i1], summed by brute force."""
    n, k = len(Fs), Fs[0].shape[0]
    total = 0
    for idx in itertools.product(range(k), repeat=n):
        term = 1
        for j, F in enumerate(Fs):
            term *= int(F[idx[j], idx[(j + 1) % n]])
        total += term
    return total


def cyclic_kron_trace(Fs: Sequence[np.ndarray]) -> int:
    """tr(σ ∘ (F1 ⊗ ... ⊗ Fn)) with σ moving the first tensor factor last."""
    n, k = len(Fs), Fs[0].shape[0]
    shape = (k,) * n
    sigma = zero_block(k ** n, k ** n)
    for r in itertools.product(range(k), repeat=n):
        sigma[np.ravel_multi_index(r[1:] + r[:1], shape), np.ravel_multi_index(r, shape)] = 1
    kron = functools.reduce(np.kron, [np.asarray(F, dtype=object) for F in Fs])
    return int(np.trace(block_matmul(sigma, kron)))


def point_phis(Fs: Sequence[np.ndarray]) -> List[TwoCell]:
    """Over a point with Q = P = U: phi_i is F_i: M_i -> M_(i-1), each M_i of rank k."""
    k = Fs[0].shape[0]
    U = unit_cell(POINT)
    Ms = [Cell.free(POINT, POINT, {("pt", "pt"): k}, name=f"M{j}") for j in range(len(Fs))]
    return [two_cell((U, Ms[j]), (Ms[j - 1], U), {("pt", "pt"): F}) for j, F in enumerate(Fs)]


def _random_cell(rng: np.random.Generator, A: BaseObject, B: BaseObject, max_rank: int, name: str) -> Cell:
    return Cell.free(A, B, {(a, b): int(rng.integers(0, max_rank + 1)) for a in A.elems for b in B.elems}, name)


def random_phis(rng: np.random.Generator, n: int, max_rank: Optional[int] = None,
                max_base: Optional[int] = None) -> List[TwoCell]:
    """Random bases A_i, B_i, cells Q_i, M_i, P_i and integer 2-cells phi_i."""
    max_rank = FULLER_LIMITS["max_rank"] if max_rank is None else max_rank
    max_base = FULLER_LIMITS["max_base"] if max_base is None else max_base
    side = FULLER_LIMITS["max_side_rank"]
    As = [gen.base_object(rng, f"A{j}", max_base) for j in range(n)]
    Bs = [gen.base_object(rng, f"B{j}", max_base) for j in range(n)]
    Qs = [_random_cell(rng, As[j - 1], As[j], side, f"Q{j}") for j in range(n)]
    Ms = [_random_cell(rng, As[j], Bs[j], max_rank, f"M{j}") for j in range(n)]
    Ps = [_random_cell(rng, Bs[j - 1], Bs[j], side, f"P{j}") for j in range(n)]
    hi = gen.LIMITS["entry"]
    phis = []
    for j in range(n):
        source, target = (Qs[j], Ms[j]), (Ms[j - 1], Ps[j])
        blocks = {}
        for x in As[j - 1].elems:
            for y in Bs[j].elems:
                shape = (len(word_basis(target, x, y)), len(word_basis(source, x, y)))
                blocks[(x, y)] = rng.integers(-hi, hi + 1, shape).astype(object)
        phis.append(two_cell(source, target, blocks, As[j - 1], Bs[j]))
    return phis


# =============================================================================
# 8. COMPARISON RUNNERS
# =============================================================================

def fuller_vs_multitrace(seed: int = 0, instances: Optional[int] = None) -> CoherenceReport:
    """
    Over a point: τ∘multitrace, tr(Fuller)∘τ, the index-sum oracle and the
    cyclic Kronecker trace must all agree on random integer matrices.
    """
    report = CoherenceReport("fuller-multitrace", "trace comparison square over a point")
    for k_inst in range(instances or FULLER_INSTANCES):
        rng = gen.make_rng(seed + k_inst)
        n = int(rng.integers(1, FULLER_LIMITS["max_cells"] + 1))
        k = int(rng.integers(1, FULLER_LIMITS["max_rank"] + 1))
        Fs = [gen.square_matrix(rng, k) for _ in range(n)]
        try:
            lhs, rhs = fuller_square(point_phis(Fs))
            oracle = index_sum_trace(Fs)
            kron = cyclic_kron_trace(Fs)
            values = {"multitrace": int(lhs[0, 0]), "fuller": int(rhs[0, 0]), "oracle": oracle, "kron": kron}
            equal = len(set(values.values())) == 1
            report.record(seed + k_inst, equal, None if equal else {"n": n, "k": k, **values})
        except ShadowcalcError as e:
            report.record_error(seed + k_inst, e)
    logger.info("fuller vs multitrace over a point: %s", report.verdict)
    return report


def fuller_vs_multitrace_bases(seed: int = 0, instances: Optional[int] = None,
                               max_cells: int = 3) -> CoherenceReport:
    """The same square with random finite bases and random cells, compared as matrices."""
    report = CoherenceReport("fuller-multitrace-bases", "trace comparison square over finite bases")
    for k_inst in range(instances or FULLER_INSTANCES):
        rng = gen.make_rng(seed + k_inst)
        n = int(rng.integers(1, max_cells + 1))
        try:
            lhs, rhs = fuller_square(random_phis(rng, n, max_rank=2))
            equal = lhs.shape == rhs.shape and bool(np.all(lhs == rhs))
            witness = None if equal else {"n": n, "multitrace": lhs.tolist(), "fuller": rhs.tolist()}
            report.record(seed + k_inst, equal, witness)
        except ShadowcalcError as e:
            report.record_error(seed + k_inst, e)
    return report
