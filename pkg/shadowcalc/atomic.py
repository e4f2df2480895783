"""
The atomic coherences of a symmetric monoidal bifibration, the pasting and
rearrangement lemmas for Beck-Chevalley maps, and the coherences of the
cardinality map H. Each check builds a random instance, computes the two
composites around one polyhedron and compares them exactly.
"""
import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from shadowcalc import families as fam
from shadowcalc import generators as gen
from shadowcalc import matrices as mat
from shadowcalc.base_finset import Square, compose_lp, extern_lp
from shadowcalc.cardinality import H_COHERENCES
from shadowcalc.errors import ShadowcalcError, ShapeMismatch
from shadowcalc.plans import Backend, get_backend
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

UNIT_MAPS = {"family": fam.unit_map, "matrix": mat.m_unit_map}
COUNIT_MAPS = {"family": fam.counit_map, "matrix": mat.m_counit_map}

ATOMIC_INSTANCES = 200
H_INSTANCES = 100

Pair = Tuple[object, object]


def _compose(*maps):
    result = maps[0]
    for m in maps[1:]:
        result = result.then(m)
    return result


def _obj(rng, base, b: Backend):
    return gen.fiber_object(rng, base, b.name)


# =============================================================================
# 2. PASTING HELPERS
# =============================================================================

def paste_down(up: Square, down: Square) -> Square:
    return Square(top=up.top, left=compose_lp(up.left, down.left),
                  right=compose_lp(up.right, down.right), bottom=down.bottom)


def paste_across(left: Square, right: Square) -> Square:
    return Square(top=compose_lp(left.top, right.top), left=left.left,
                  right=right.right, bottom=compose_lp(left.bottom, right.bottom))


def bc_down(up: Square, down: Square, bc_up: Callable, bc_lower: Callable, X, b: Backend):
    """The Beck-Chevalley map of a vertical pasting, through the two small ones."""
    l1, l2, r1, r2 = up.left, down.left, up.right, down.right
    return _compose(b.push_map(up.top, b.pull_word_iso([compose_lp(l1, l2)], [l1, l2], X)),
                    bc_up(b.pullback(l2, X)),
                    b.pull_map(r1, bc_lower(X)),
                    b.pull_word_iso([r1, r2], [compose_lp(r1, r2)], b.pushforward(down.bottom, X)))


def bc_across(left: Square, right: Square, bc_left: Callable, bc_right: Callable, X, b: Backend):
    """The Beck-Chevalley map of a horizontal pasting, through the two small ones."""
    t1, t2, b1, b2 = left.top, right.top, left.bottom, right.bottom
    pulled = b.pullback(left.left, X)
    return _compose(b.push_word_iso([compose_lp(t1, t2)], [t1, t2], pulled),
                    b.push_map(t2, bc_left(X)),
                    bc_right(b.pushforward(b1, X)),
                    b.pull_map(right.right, b.push_word_iso([b1, b2], [compose_lp(b1, b2)], X)))


def _bc(sq: Square, b: Backend) -> Callable:
    return lambda X: b.bc_map(sq, X)


# =============================================================================
# 3. ATOMIC COHERENCES
# =============================================================================

def pull_pull_pull(rng, b: Backend) -> Pair:
    f, g, h = gen.lp_chain(rng, 3)
    Y = _obj(rng, h.target, b)
    gh, fg = compose_lp(g, h), compose_lp(f, g)
    whole = compose_lp(fg, h)
    lhs = b.pull_word_iso([f, g, h], [f, gh], Y).then(b.pull_word_iso([f, gh], [whole], Y))
    rhs = b.pull_word_iso([f, g, h], [fg, h], Y).then(b.pull_word_iso([fg, h], [whole], Y))
    return lhs, rhs


def push_push_push(rng, b: Backend) -> Pair:
    f, g, h = gen.lp_chain(rng, 3)
    X = _obj(rng, f.source, b)
    gh, fg = compose_lp(g, h), compose_lp(f, g)
    whole = compose_lp(fg, h)
    lhs = b.push_word_iso([f, g, h], [f, gh], X).then(b.push_word_iso([f, gh], [whole], X))
    rhs = b.push_word_iso([f, g, h], [fg, h], X).then(b.push_word_iso([fg, h], [whole], X))
    return lhs, rhs


def pull_pull_push(rng, b: Backend) -> Pair:
    """Beck-Chevalley of a vertical pasting against the two small maps."""
    (up, down), = gen.product_grid(rng, 1, 2)
    X = _obj(rng, down.left.target, b)
    return b.bc_map(paste_down(up, down), X), bc_down(up, down, _bc(up, b), _bc(down, b), X, b)


def pull_push_push(rng, b: Backend) -> Pair:
    """Beck-Chevalley of a horizontal pasting against the two small maps."""
    (left,), (right,) = gen.product_grid(rng, 2, 1)
    X = _obj(rng, left.left.target, b)
    return b.bc_map(paste_across(left, right), X), bc_across(left, right, _bc(left, b), _bc(right, b), X, b)


# Prisms over a commuting square; in Square terms h = top, f = left,
# k = right, g = bottom for the ! prisms and k = top, h = left, g = right,
# f = bottom for the * prisms.

def unit_push_prism(sq: Square, X, b: Backend) -> Pair:
    """h_! -> h_!f*f_! -> k*g_!f_!  against  h_! -> k*k_!h_! ~ k*g_!f_!, X over the top-left corner."""
    unit = UNIT_MAPS[b.name]
    lhs = b.push_map(sq.top, unit(sq.left, X)).then(b.bc_map(sq, b.pushforward(sq.left, X)))
    rhs = unit(sq.right, b.pushforward(sq.top, X)).then(
        b.pull_map(sq.right, b.push_word_iso([sq.top, sq.right], [sq.left, sq.bottom], X)))
    return lhs, rhs


def unit_pull_prism(sq: Square, X, b: Backend) -> Pair:
    """h* -> h*f*f_! ~ k*g*f_!  against  h* -> k*k_!h* -> k*g*f_!, X over the bottom-left corner."""
    unit = UNIT_MAPS[b.name]
    lhs = b.pull_map(sq.left, unit(sq.bottom, X)).then(
        b.pull_word_iso([sq.left, sq.bottom], [sq.top, sq.right], b.pushforward(sq.bottom, X)))
    rhs = unit(sq.top, b.pullback(sq.left, X)).then(b.pull_map(sq.top, b.bc_map(sq, X)))
    return lhs, rhs


def counit_push_prism(sq: Square, Y, b: Backend) -> Pair:
    """g_!f_!f* -> g_!  against  g_!f_!f* ~ k_!h_!f* -> k_!k*g_! -> g_!, Y over the bottom-left corner."""
    counit = COUNIT_MAPS[b.name]
    lhs = b.push_map(sq.bottom, counit(sq.left, Y))
    rhs = _compose(b.push_word_iso([sq.left, sq.bottom], [sq.top, sq.right], b.pullback(sq.left, Y)),
                   b.push_map(sq.right, b.bc_map(sq, Y)),
                   counit(sq.right, b.pushforward(sq.bottom, Y)))
    return lhs, rhs


def counit_pull_prism(sq: Square, Y, b: Backend) -> Pair:
    """k_!h*f* -> g*f_!f* -> g*  against  k_!h*f* ~ k_!k*g* -> g*, Y over the bottom-right corner."""
    counit = COUNIT_MAPS[b.name]
    lhs = b.bc_map(sq, b.pullback(sq.bottom, Y)).then(b.pull_map(sq.right, counit(sq.bottom, Y)))
    rhs = b.push_map(sq.top, b.pull_word_iso([sq.left, sq.bottom], [sq.top, sq.right], Y)).then(
        counit(sq.top, b.pullback(sq.right, Y)))
    return lhs, rhs


def unit_push(rng, b: Backend) -> Pair:
    sq = gen.product_square(rng)
    return unit_push_prism(sq, _obj(rng, sq.top.source, b), b)


def unit_pull(rng, b: Backend) -> Pair:
    sq = gen.product_square(rng)
    return unit_pull_prism(sq, _obj(rng, sq.left.target, b), b)


def counit_push(rng, b: Backend) -> Pair:
    sq = gen.product_square(rng)
    return counit_push_prism(sq, _obj(rng, sq.left.target, b), b)


def counit_pull(rng, b: Backend) -> Pair:
    sq = gen.product_square(rng)
    return counit_pull_prism(sq, _obj(rng, sq.right.target, b), b)


def unit_composite(rng, b: Backend) -> Pair:
    """The unit of a composite through the two units."""
    f, g = gen.lp_chain(rng, 2)
    X = _obj(rng, f.source, b)
    gf = compose_lp(f, g)
    unit = UNIT_MAPS[b.name]
    pushed = b.pushforward(g, b.pushforward(f, X))
    lhs = unit(gf, X)
    rhs = _compose(unit(f, X),
                   b.pull_map(f, unit(g, b.pushforward(f, X))),
                   b.pull_word_iso([f, g], [gf], pushed),
                   b.pull_map(gf, b.push_word_iso([f, g], [gf], X)))
    return lhs, rhs


def counit_composite(rng, b: Backend) -> Pair:
    """The counit of a composite through the two counits."""
    f, g = gen.lp_chain(rng, 2)
    Y = _obj(rng, g.target, b)
    gf = compose_lp(f, g)
    counit = COUNIT_MAPS[b.name]
    pulled = b.pullback(f, b.pullback(g, Y))
    lhs = counit(gf, Y)
    rhs = _compose(b.push_map(gf, b.pull_word_iso([gf], [f, g], Y)),
                   b.push_word_iso([gf], [f, g], pulled),
                   b.push_map(g, counit(f, b.pullback(g, Y))),
                   counit(g, Y))
    return lhs, rhs


def triangle_push(rng, b: Backend) -> Pair:
    """f_!(unit) followed by the counit is the identity of f_!X."""
    (f,) = gen.lp_chain(rng, 1)
    X = _obj(rng, f.source, b)
    pushed = b.pushforward(f, X)
    lhs = b.push_map(f, UNIT_MAPS[b.name](f, X)).then(COUNIT_MAPS[b.name](f, pushed))
    return lhs, b.identity(pushed)


def triangle_pull(rng, b: Backend) -> Pair:
    """The unit at f*Y followed by f*(counit) is the identity of f*Y."""
    (f,) = gen.lp_chain(rng, 1)
    Y = _obj(rng, f.target, b)
    pulled = b.pullback(f, Y)
    lhs = UNIT_MAPS[b.name](f, pulled).then(b.pull_map(f, COUNIT_MAPS[b.name](f, Y)))
    return lhs, b.identity(pulled)


def _two_chains(rng, length: int):
    return gen.lp_chain(rng, length, offset=0), gen.lp_chain(rng, length, offset=10)


def pull_pull_tensor(rng, b: Backend) -> Pair:
    (f1, f2), (g1, g2) = _two_chains(rng, 2)
    X, Y = _obj(rng, f2.target, b), _obj(rng, g2.target, b)
    F1, F2 = extern_lp(f1, g1), extern_lp(f2, g2)
    f21, g21 = compose_lp(f1, f2), compose_lp(g1, g2)
    XY = b.tensor_many([X, Y])
    lhs = b.pull_word_iso([F1, F2], [compose_lp(F1, F2)], XY).then(b.tensor_pull([f21, g21], [X, Y]))
    rhs = _compose(b.pull_map(F1, b.tensor_pull([f2, g2], [X, Y])),
                   b.tensor_pull([f1, g1], [b.pullback(f2, X), b.pullback(g2, Y)]),
                   b.tensor_map([b.pull_word_iso([f1, f2], [f21], X), b.pull_word_iso([g1, g2], [g21], Y)]))
    return lhs, rhs


def push_push_tensor(rng, b: Backend) -> Pair:
    (f1, f2), (g1, g2) = _two_chains(rng, 2)
    X, Y = _obj(rng, f1.source, b), _obj(rng, g1.source, b)
    F1, F2 = extern_lp(f1, g1), extern_lp(f2, g2)
    f21, g21 = compose_lp(f1, f2), compose_lp(g1, g2)
    XY = b.tensor_many([X, Y])
    lhs = b.push_word_iso([F1, F2], [compose_lp(F1, F2)], XY).then(b.tensor_push([f21, g21], [X, Y]))
    rhs = _compose(b.push_map(F2, b.tensor_push([f1, g1], [X, Y])),
                   b.tensor_push([f2, g2], [b.pushforward(f1, X), b.pushforward(g1, Y)]),
                   b.tensor_map([b.push_word_iso([f1, f2], [f21], X), b.push_word_iso([g1, g2], [g21], Y)]))
    return lhs, rhs


def pull_push_tensor(rng, b: Backend) -> Pair:
    """Beck-Chevalley of an external product of squares against the two factors."""
    s1 = gen.product_square(rng, (0, 1))
    s2 = gen.product_square(rng, (2, 3))
    X, Y = _obj(rng, s1.left.target, b), _obj(rng, s2.left.target, b)
    sq = Square(top=extern_lp(s1.top, s2.top), left=extern_lp(s1.left, s2.left),
                right=extern_lp(s1.right, s2.right), bottom=extern_lp(s1.bottom, s2.bottom))
    XY = b.tensor_many([X, Y])
    lhs = _compose(b.bc_map(sq, XY),
                   b.pull_map(sq.right, b.tensor_push([s1.bottom, s2.bottom], [X, Y])),
                   b.tensor_pull([s1.right, s2.right], [b.pushforward(s1.bottom, X), b.pushforward(s2.bottom, Y)]))
    rhs = _compose(b.push_map(sq.top, b.tensor_pull([s1.left, s2.left], [X, Y])),
                   b.tensor_push([s1.top, s2.top], [b.pullback(s1.left, X), b.pullback(s2.left, Y)]),
                   b.tensor_map([b.bc_map(s1, X), b.bc_map(s2, Y)]))
    return lhs, rhs


def unit_tensor(rng, b: Backend) -> Pair:
    (f,), (g,) = _two_chains(rng, 1)
    X, Y = _obj(rng, f.source, b), _obj(rng, g.source, b)
    F = extern_lp(f, g)
    unit = UNIT_MAPS[b.name]
    lhs = _compose(unit(F, b.tensor_many([X, Y])),
                   b.pull_map(F, b.tensor_push([f, g], [X, Y])),
                   b.tensor_pull([f, g], [b.pushforward(f, X), b.pushforward(g, Y)]))
    return lhs, b.tensor_map([unit(f, X), unit(g, Y)])


def counit_tensor(rng, b: Backend) -> Pair:
    (f,), (g,) = _two_chains(rng, 1)
    X, Y = _obj(rng, f.target, b), _obj(rng, g.target, b)
    F = extern_lp(f, g)
    counit = COUNIT_MAPS[b.name]
    lhs = counit(F, b.tensor_many([X, Y]))
    rhs = _compose(b.push_map(F, b.tensor_pull([f, g], [X, Y])),
                   b.tensor_push([f, g], [b.pullback(f, X), b.pullback(g, Y)]),
                   b.tensor_map([counit(f, X), counit(g, Y)]))
    return lhs, rhs


def _three_maps(rng):
    return [gen.lp_chain(rng, 1, offset=10 * k)[0] for k in range(3)]


def pull_tensor_tensor(rng, b: Backend) -> Pair:
    """Pulling a nested product back, then flattening, in either order."""
    f, g, h = _three_maps(rng)
    leaves = {0: _obj(rng, f.target, b), 1: _obj(rng, g.target, b), 2: _obj(rng, h.target, b)}
    nested, flat = ((0, 1), 2), (0, 1, 2)
    F = extern_lp(extern_lp(f, g), h)
    pulled = {0: b.pullback(f, leaves[0]), 1: b.pullback(g, leaves[1]), 2: b.pullback(h, leaves[2])}
    lhs = b.pull_map(F, b.regroup(nested, flat, leaves)).then(b.tensor_pull([f, g, h], [leaves[0], leaves[1], leaves[2]]))
    rhs = _compose(b.tensor_pull([extern_lp(f, g), h], [b.tensor_many([leaves[0], leaves[1]]), leaves[2]]),
                   b.tensor_map([b.tensor_pull([f, g], [leaves[0], leaves[1]]), b.identity(pulled[2])]),
                   b.regroup(nested, flat, pulled))
    return lhs, rhs


def push_tensor_tensor(rng, b: Backend) -> Pair:
    f, g, h = _three_maps(rng)
    leaves = {0: _obj(rng, f.source, b), 1: _obj(rng, g.source, b), 2: _obj(rng, h.source, b)}
    nested, flat = ((0, 1), 2), (0, 1, 2)
    F = extern_lp(extern_lp(f, g), h)
    pushed = {0: b.pushforward(f, leaves[0]), 1: b.pushforward(g, leaves[1]), 2: b.pushforward(h, leaves[2])}
    lhs = b.push_map(F, b.regroup(nested, flat, leaves)).then(b.tensor_push([f, g, h], [leaves[0], leaves[1], leaves[2]]))
    rhs = _compose(b.tensor_push([extern_lp(f, g), h], [b.tensor_many([leaves[0], leaves[1]]), leaves[2]]),
                   b.tensor_map([b.tensor_push([f, g], [leaves[0], leaves[1]]), b.identity(pushed[2])]),
                   b.regroup(nested, flat, pushed))
    return lhs, rhs


def pasting(rng, b: Backend) -> Pair:
    """The big square of a 2x2 grid against the pasting of its columns."""
    (s00, s01), (s10, s11) = gen.product_grid(rng, 2, 2)
    col0, col1 = paste_down(s00, s01), paste_down(s10, s11)
    X = _obj(rng, s01.left.target, b)
    lhs = b.bc_map(paste_across(col0, col1), X)
    rhs = bc_across(col0, col1,
                    lambda Z: bc_down(s00, s01, _bc(s00, b), _bc(s01, b), Z, b),
                    lambda Z: bc_down(s10, s11, _bc(s10, b), _bc(s11, b), Z, b), X, b)
    return lhs, rhs


def rearrangement(rng, b: Backend) -> Pair:
    """A 2x2 grid pasted column-first against row-first."""
    (s00, s01), (s10, s11) = gen.product_grid(rng, 2, 2)
    col0, col1 = paste_down(s00, s01), paste_down(s10, s11)
    row0, row1 = paste_across(s00, s10), paste_across(s01, s11)
    X = _obj(rng, s01.left.target, b)
    lhs = bc_across(col0, col1,
                    lambda Z: bc_down(s00, s01, _bc(s00, b), _bc(s01, b), Z, b),
                    lambda Z: bc_down(s10, s11, _bc(s10, b), _bc(s11, b), Z, b), X, b)
    rhs = bc_down(row0, row1,
                  lambda Z: bc_across(s00, s10, _bc(s00, b), _bc(s10, b), Z, b),
                  lambda Z: bc_across(s01, s11, _bc(s01, b), _bc(s11, b), Z, b), X, b)
    return lhs, rhs


ATOMIC_COHERENCES: Dict[str, Callable] = {
    "***": pull_pull_pull,
    "**!": pull_pull_push,
    "*!!": pull_push_push,
    "!!!": push_push_push,
    "u*": unit_pull,
    "u!": unit_push,
    "c*": counit_pull,
    "c!": counit_push,
    "**⊠": pull_pull_tensor,
    "!!⊠": push_push_tensor,
    "*!⊠": pull_push_tensor,
    "u⊠": unit_tensor,
    "c⊠": counit_tensor,
    "*⊠⊠": pull_tensor_tensor,
    "!⊠⊠": push_tensor_tensor,
}

LEMMAS: Dict[str, Callable] = {
    "pasting": pasting,
    "rearrangement": rearrangement,
    "triangle!": triangle_push,
    "triangle*": triangle_pull,
    "unit-composite": unit_composite,
    "counit-composite": counit_composite,
}


# =============================================================================
# 4. H COHERENCES
# =============================================================================

def _h_args(name: str, rng: np.random.Generator) -> tuple:
    if name in ("H**", "H!!"):
        f, g = gen.lp_chain(rng, 2)
        base = g.target if name == "H**" else f.source
        return f, g, gen.family(rng, base)
    if name in ("Hu", "Hc"):
        (f,) = gen.lp_chain(rng, 1)
        return f, gen.family(rng, f.source if name == "Hu" else f.target)
    if name == "H*!":
        sq = gen.product_square(rng)
        return sq, gen.family(rng, sq.left.target)
    if name == "H⊠⊠":
        leaves = {k: gen.family(rng, gen.labeled_product(rng, (10 * k,))) for k in range(3)}
        return ((0, 1), 2), (0, (1, 2)), leaves
    if name in ("H⊠*", "H⊠!"):
        maps = [gen.lp_chain(rng, 1, offset=10 * k)[0] for k in range(2)]
        side = "target" if name == "H⊠*" else "source"
        return maps, [gen.family(rng, getattr(m, side)) for m in maps]
    raise ShapeMismatch(f"unknown H coherence {name!r}")


# =============================================================================
# 5. RUNNERS
# =============================================================================

def check_pair(report: CoherenceReport, instance, build: Callable[[], Pair], b: Backend) -> None:
    try:
        lhs, rhs = build()
        witness = b.witness(lhs, rhs)
        if witness is None and not b.same(lhs, rhs):
            witness = {"reason": "source or target differs"}
        report.record(instance, witness is None, witness)
    except ShadowcalcError as e:
        report.record_error(instance, e)


def run_atomic(name: str, seed: int = 0, instances: Optional[int] = None,
               backend_name: str = "family") -> CoherenceReport:
    """One of the fifteen atomic coherences, or a pasting lemma, on seeded instances."""
    table = {**ATOMIC_COHERENCES, **LEMMAS}
    if name not in table:
        raise ShapeMismatch(f"unknown atomic coherence {name!r}", known=sorted(table))
    b = get_backend(backend_name)
    report = CoherenceReport(f"atomic {name}", "atomic coherences" if name in ATOMIC_COHERENCES else name)
    for k in range(instances or ATOMIC_INSTANCES):
        rng = gen.make_rng(seed + k)
        check_pair(report, seed + k, lambda: table[name](rng, b), b)
    logger.info("atomic %s on %s: %s", name, backend_name, report.verdict)
    return report


def run_h(name: str, seed: int = 0, instances: Optional[int] = None) -> CoherenceReport:
    """One coherence polyhedron of the cardinality map H, compared as matrices."""
    if name not in H_COHERENCES:
        raise ShapeMismatch(f"unknown H coherence {name!r}", known=sorted(H_COHERENCES))
    b = get_backend("matrix")
    report = CoherenceReport(f"H {name}", "coherences of the cardinality map")
    for k in range(instances or H_INSTANCES):
        rng = gen.make_rng(seed + k)
        check_pair(report, seed + k, lambda: H_COHERENCES[name](*_h_args(name, rng)), b)
    return report
