import logging
from typing import Iterable, List, Optional

from shadowcalc.bicategory import run_suite, shadow_coherence_suite
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Bicategory and Shadow Coherences"
FIGURE_SUITES = ["associativity", "unit-triangle", "shadow-associativity", "shadow-unit", "twist-square"]
RING_SIZES = [1, 2, 3, 4]
SUITE_NAMES = FIGURE_SUITES + [f"shadow-random-{n}" for n in RING_SIZES]
DEFAULTS = {"instances": 100}


# =============================================================================
# 3. ANALYSIS LOGIC (CORE ENGINE)
# =============================================================================

def run_rings(seed: int, instances: int, backend: str, wanted) -> List[CoherenceReport]:
    """Random route pairs between darkening orders of rings with up to four cells."""
    return [shadow_coherence_suite(n, seed, instances, backend)
            for n in RING_SIZES if f"shadow-random-{n}" in wanted]


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    wanted = set(only) if only is not None else set(SUITE_NAMES)
    count = instances or DEFAULTS["instances"]
    reports = [run_suite(name, seed, count, backend) for name in FIGURE_SUITES if name in wanted]
    reports += run_rings(seed, count, backend, wanted)
    logger.info("%s: %d suites", TITLE, len(reports))
    return reports
