import logging
from typing import Iterable, List, Optional

import pandas as pd

from shadowcalc.atomic import ATOMIC_COHERENCES, ATOMIC_INSTANCES, LEMMAS, run_atomic
from shadowcalc.relations import CoherenceReport
from shadowcalc.report import summary_frame

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Atomic Coherences"
SUITE_NAMES = [f"atomic {name}" for name in ATOMIC_COHERENCES] + [f"atomic {name}" for name in LEMMAS]
DEFAULTS = {"instances": ATOMIC_INSTANCES}


# =============================================================================
# 2. INSTANCE GENERATION
# =============================================================================
# instances are drawn inside run_atomic from make_rng(seed + k)


# =============================================================================
# 3. ANALYSIS LOGIC (CORE ENGINE)
# =============================================================================

def selected(only: Optional[Iterable[str]]) -> List[str]:
    names = list(ATOMIC_COHERENCES) + list(LEMMAS)
    if only is None:
        return names
    wanted = set(only)
    return [n for n in names if f"atomic {n}" in wanted]


# =============================================================================
# 4. REPORT GENERATION
# =============================================================================

def build_summary(reports: List[CoherenceReport]) -> pd.DataFrame:
    return summary_frame(reports)


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    count = instances or DEFAULTS["instances"]
    reports = []
    for name in selected(only):
        reports.append(run_atomic(name, seed, count, backend))
    logger.info("%s: %d polyhedra on the %s backend", TITLE, len(reports), backend)
    return reports
