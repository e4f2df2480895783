import logging
from typing import Iterable, List, Optional

import pandas as pd

from shadowcalc.relations import CoherenceReport
from shadowcalc.traces import FULLER_INSTANCES, fuller_vs_multitrace, fuller_vs_multitrace_bases

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Fuller Trace and Multitrace"
SUITE_NAMES = ["fuller-multitrace", "fuller-multitrace-bases"]
DEFAULTS = {"instances": FULLER_INSTANCES, "base_cells": 3}


# =============================================================================
# 4. REPORT GENERATION
# =============================================================================

def witness_table(report: CoherenceReport) -> pd.DataFrame:
    """The four computed traces of every disagreeing instance."""
    rows = [{"instance": v["instance"], **v["witness"]} for v in report.verdicts if v["witness"]]
    return pd.DataFrame(rows)


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "matrix",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    # traces are integer matrices; the backend flag does not apply
    wanted = set(only) if only is not None else set(SUITE_NAMES)
    count = instances or DEFAULTS["instances"]
    reports = []
    if "fuller-multitrace" in wanted:
        reports.append(fuller_vs_multitrace(seed, count))
    if "fuller-multitrace-bases" in wanted:
        reports.append(fuller_vs_multitrace_bases(seed, count, DEFAULTS["base_cells"]))
    for r in reports:
        if not r.passed:
            logging.error(f"{r.name} disagreed on {len(witness_table(r))} instances")
    return reports
