import logging
from typing import Iterable, List, Optional

from shadowcalc.atomic import H_INSTANCES, run_h
from shadowcalc.cardinality import H_COHERENCES
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Cardinality Map Coherences"
SUITE_NAMES = [f"H {name}" for name in H_COHERENCES]
DEFAULTS = {"instances": H_INSTANCES}


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "matrix",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    # H lands in matrices whatever the backend flag says
    wanted = set(only) if only is not None else set(SUITE_NAMES)
    reports = [run_h(name, seed, instances or DEFAULTS["instances"])
               for name in H_COHERENCES if f"H {name}" in wanted]
    logger.info("%s: %d polyhedra", TITLE, len(reports))
    return reports
