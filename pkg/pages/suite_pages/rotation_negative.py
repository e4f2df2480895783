"""
The rotated diagram over two glued grids. With a nontrivial bijection in the
centre the two route isomorphisms must differ; the identity and a one-point
base are controls that must agree.
"""
import logging
from typing import Iterable, List, Optional

from shadowcalc.base_finset import BaseMap, BaseObject
from shadowcalc.relations import CoherenceReport
from shadowcalc.rotation import negative_test_rotation

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Rotation Counterexample"
SUITE_NAMES = ["rotation-negative", "rotation-control-identity", "rotation-control-point"]
DEFAULTS = {"instances": 10}


# =============================================================================
# 3. ANALYSIS LOGIC (CORE ENGINE)
# =============================================================================

def _seeds(name: str, seed: int, count: int, **kwargs) -> CoherenceReport:
    report = None
    for k in range(count):
        part = negative_test_rotation(seed + k, **kwargs)
        if report is None:
            report = part
            report.name = name
        else:
            report.extend(part)
    return report


def negative(seed: int, count: int) -> CoherenceReport:
    return _seeds("rotation-negative", seed, count)


def control_identity(seed: int, count: int) -> CoherenceReport:
    B = BaseObject((0, 1), name="B")
    return _seeds("rotation-control-identity", seed, count, base=B.elems, f=BaseMap.identity(B),
                  expected="equal")


def control_point(seed: int, count: int) -> CoherenceReport:
    return _seeds("rotation-control-point", seed, count, base=(0,), expected="equal")


CHECKS = {
    "rotation-negative": negative,
    "rotation-control-identity": control_identity,
    "rotation-control-point": control_point,
}


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    # the grids are evaluated on families only
    wanted = set(only) if only is not None else set(SUITE_NAMES)
    count = instances or DEFAULTS["instances"]
    reports = [CHECKS[name](seed, count) for name in SUITE_NAMES if name in wanted]
    for r in reports:
        logger.info("%s: %s", r.name, r.verdict)
    return reports
