import logging
from typing import Iterable, List, Optional

from shadowcalc.bicategory import run_suite
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Base Change Composition"
SUITE_NAMES = ["base-change-composition"]
DEFAULTS = {"instances": 100}


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    if only is not None and not set(only) & set(SUITE_NAMES):
        return []
    report = run_suite("base-change-composition", seed, instances or DEFAULTS["instances"], backend)
    logger.info("%s: %s", TITLE, report.verdict)
    return [report]
