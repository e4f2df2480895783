"""
A rotated diagram of functors that is not coherent. Two 3x3 grids of finite
sets share their outer edges; each grid gives an isomorphism between the
top-right and left-bottom routes X -> X ⊠ B through its centre, and when the
centre of one grid twists by a nontrivial bijection f the two isomorphisms
differ.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

from shadowcalc import families as fam
from shadowcalc.base_finset import (BaseMap, BaseObject, LabeledProduct, LabeledProductMap,
                                    Square, is_beck_chevalley)
from shadowcalc.errors import ShadowcalcError
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

ROTATION_DEFAULTS = {
    "base": (0, 1),
    "fiber_size": 1,
}

# the flipped arrows: rightward out of the middle column, downward out of the middle row
FLIPPED = {"h01", "h11", "h21", "v10", "v11", "v12"}


# =============================================================================
# 2. THE GLUED GRIDS
# =============================================================================

@dataclass(frozen=True)
class Grid:
    """
    Maps of a 3x3 grid around the centre (1, 1). h{r}{c}: (r, 1) -> (r, 2c)
    along row r; v{r}{c}: (1, c) -> (2r, c) along column c.
    """
    maps: Dict[str, LabeledProductMap]

    def __getitem__(self, name: str) -> LabeledProductMap:
        return self.maps[name]

    def squares(self) -> Dict[str, Square]:
        """The two mixed squares, oriented for the Beck-Chevalley map."""
        return {
            "top-right": Square(top=self["h11"], left=self["v01"], right=self["v02"], bottom=self["h01"]),
            "bottom-left": Square(top=self["v11"], left=self["h10"], right=self["h20"], bottom=self["v10"]),
        }


def _spaces(B: BaseObject):
    point = LabeledProduct.empty()
    space = LabeledProduct.of({0: B})
    to_point = LabeledProductMap(space, point, (), ())
    return point, space, to_point


def build_grid(B: BaseObject, f: Optional[BaseMap] = None) -> Grid:
    """One grid over B; f (default identity) labels the centre's left and downward maps."""
    _, space, to_point = _spaces(B)
    ident = LabeledProductMap.identity(space)
    twist = ident if f is None else LabeledProductMap(space, space, (0,), (f,))
    return Grid({
        "h00": to_point, "h01": ident,
        "h10": twist, "h11": ident,
        "h20": ident, "h21": to_point,
        "v00": to_point, "v10": ident,
        "v01": ident, "v11": twist,
        "v02": ident, "v12": to_point,
    })


def check_grid_bc(grid: Grid) -> List[str]:
    """Names of the mixed squares that are not Beck-Chevalley; the rotation needs none."""
    return [name for name, sq in grid.squares().items() if not is_beck_chevalley(sq)]


# =============================================================================
# 3. ROUTE ISOMORPHISM THROUGH THE CENTRE
# =============================================================================

def top_right(grid: Grid, X: fam.Family) -> fam.Family:
    return fam.pushforward(grid["v12"], fam.pullback(grid["v02"], fam.pushforward(
        grid["h01"], fam.pullback(grid["h00"], X))))


def left_bottom(grid: Grid, X: fam.Family) -> fam.Family:
    return fam.pushforward(grid["h21"], fam.pullback(grid["h20"], fam.pushforward(
        grid["v10"], fam.pullback(grid["v00"], X))))


def route_iso(grid: Grid, X: fam.Family) -> fam.FamilyMap:
    """
    top-right -> left-bottom: undo Beck-Chevalley in the top-right square,
    regroup the pushforwards and the pullbacks, then Beck-Chevalley in the
    bottom-left square.
    """
    g = grid
    squares = grid.squares()
    Y = fam.pullback(g["h00"], X)
    Z = fam.pullback(g["v00"], X)
    return fam.compose(
        fam.push_map(g["v12"], fam.bc_iso(squares["top-right"], Y).inverse()),
        fam.push_word_iso([g["h11"], g["v12"]], [g["v11"], g["h21"]], fam.pullback(g["v01"], Y)),
        fam.push_map(g["h21"], fam.push_map(g["v11"], fam.pull_word_iso([g["v01"], g["h00"]],
                                                                          [g["h10"], g["v00"]], X))),
        fam.push_map(g["h21"], fam.bc_map(squares["bottom-left"], Z)),
    )


# =============================================================================
# 4. NEGATIVE TEST
# =============================================================================

def swap(B: BaseObject) -> BaseMap:
    """The bijection reversing the element order of B."""
    return BaseMap(B, B, tuple(reversed(B.elems)))


def compare_grids(B: BaseObject, f: Optional[BaseMap], X: fam.Family) -> Optional[Dict]:
    """A witness where the two glued grids disagree, or None."""
    twisted, plain = build_grid(B, f), build_grid(B)
    first, second = route_iso(twisted, X), route_iso(plain, X)
    for key in first.source.keys():
        if first(key) != second(key):
            return {"element": repr(key), "twisted": repr(first(key)), "plain": repr(second(key))}
    return None


def negative_test_rotation(seed: int = 0, base=None, f: Optional[BaseMap] = None,
                           fiber_size: Optional[int] = None, expected: str = "unequal") -> CoherenceReport:
    """
    Compare the two route automorphisms of X -> X ⊠ B. With f a nontrivial
    bijection the verdict must be unequal; f = id or a one-point B are controls.
    """
    B = BaseObject(tuple(ROTATION_DEFAULTS["base"] if base is None else base), name="B")
    f = swap(B) if f is None else f
    size = ROTATION_DEFAULTS["fiber_size"] if fiber_size is None else fiber_size
    report = CoherenceReport("rotation-negative", "two glued squares", expected=expected)
    try:
        bad = check_grid_bc(build_grid(B, f))
        if bad:
            logger.warning("rotation does not respect Beck-Chevalley in %s", bad)
        X = fam.Family.from_counts(LabeledProduct.empty(), {(): size + seed % 2})
        witness = compare_grids(B, f, X)
        if witness is None and expected == "unequal":
            logging.error(f"rotation counterexample came out coherent for f={f.table}")
        report.record(seed, witness is None, witness)
    except ShadowcalcError as e:
        report.record_error(seed, e)
    return report
