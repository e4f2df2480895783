"""
Exhaustive check that the gray-edges functor sends every flip square (one
white and one black vertex turned gray) to a pushout of finite sets.
"""
import itertools
import logging
from typing import Iterable, List, Optional

from shadowcalc.base_finset import BaseObject
from shadowcalc.colorings import Color3, check_pushout
from shadowcalc.d_diagram import colorings_of
from shadowcalc.errors import ShadowcalcError, UnsupportedGrayCycle
from shadowcalc.graph_core import circle_graph, path_graph
from shadowcalc.labeled_graphs import LabeledGraph
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Gray-Edge Pushouts"
SUITE_NAMES = ["gray-edge-pushouts"]
DEFAULTS = {"max_whites": 5}
ENDS = [("white", "white"), ("white", "black"), ("black", "white"), ("black", "black")]


# =============================================================================
# 2. INSTANCE GENERATION
# =============================================================================

def test_graphs(max_whites: int):
    """Paths with every endpoint pattern and one-black cycles, up to max_whites internal whites."""
    one = BaseObject((0,), name="1")
    for n in range(1, max_whites + 1):
        for left, right in ENDS:
            g = path_graph([left] + ["white"] * n + [right])
            yield f"path {left}-{n}-{right}", LabeledGraph.build(g, {e: one for e in g.edges})
        g = circle_graph(["black"] + ["white"] * n)
        yield f"cycle {n}", LabeledGraph.build(g, {e: one for e in g.edges})


def flip_squares(G: LabeledGraph):
    whites = G.graph.internal_whites
    for c in colorings_of(G):
        for v1, v2 in itertools.permutations(whites, 2):
            if c[v1] == Color3.WHITE and c[v2] == Color3.BLACK:
                c1, c2 = c.with_color(v1, Color3.GRAY), c.with_color(v2, Color3.GRAY)
                yield c, c1, c2, c1.with_color(v2, Color3.GRAY)


# =============================================================================
# 3. ANALYSIS LOGIC (CORE ENGINE)
# =============================================================================

def check_all(max_whites: int) -> CoherenceReport:
    report = CoherenceReport("gray-edge-pushouts", "flip squares to pushouts")
    skipped = 0
    for name, G in test_graphs(max_whites):
        for c, c1, c2, c12 in flip_squares(G):
            instance = f"{name} {c.key} {c.diff(c12)}"
            try:
                ok = check_pushout(c, c1, c2, c12)
                report.record(instance, ok, None if ok else {"coloring": repr(c.key)})
            except UnsupportedGrayCycle:
                skipped += 1
            except ShadowcalcError as e:
                report.record_error(instance, e)
    logger.info("%s: %d squares, %d all-gray cycles skipped", TITLE, len(report.verdicts), skipped)
    return report


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    # exhaustive; seed and instances do not apply
    if only is not None and "gray-edge-pushouts" not in set(only):
        return []
    return [check_all(DEFAULTS["max_whites"])]
