import logging
from typing import Iterable, List, Optional

from shadowcalc.bicategory import run_suite
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "External Product Coherences"
SUITE_NAMES = ["boxtimes-associativity", "boxtimes-unit", "base-change-boxtimes"]
DEFAULTS = {"instances": 100}


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    wanted = set(only) if only is not None else set(SUITE_NAMES)
    count = instances or DEFAULTS["instances"]
    reports = [run_suite(name, seed, count, backend) for name in SUITE_NAMES if name in wanted]
    logger.info("%s: %d suites", TITLE, len(reports))
    return reports
