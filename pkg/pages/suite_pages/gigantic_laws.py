import logging
from typing import Dict, Iterable, List, Optional

from shadowcalc import generators as gen
from shadowcalc.colorings import GiganticMorphism, compose_gigantic, embed, identity_gigantic
from shadowcalc.errors import ShadowcalcError
from shadowcalc.labeled_graphs import compose_labeled
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

TITLE = "Gigantic Category Laws"
SUITE_NAMES = ["gigantic-identity", "gigantic-associativity", "embed-functoriality"]
DEFAULTS = {"instances": 500, "max_whites": 6}
FIELDS = ("source", "target", "set_map", "graph_map", "glue")


# =============================================================================
# 2. INSTANCE GENERATION
# =============================================================================

def composable_triple(rng):
    """Three composable labeled maps on a random path: two darkenings and a darkening or black collapse."""
    G = gen.random_labeled_path(rng, int(rng.integers(1, DEFAULTS["max_whites"] + 1)), force_black=True)
    P1, P2 = gen.random_darkening_chain(rng, G, 2)
    if rng.random() < 0.5:
        P3 = gen.random_inert_map(rng, P2.target)
    else:
        P3 = gen.random_darkening_chain(rng, P2.target, 1)[0]
    return P1, P2, P3


# =============================================================================
# 3. ANALYSIS LOGIC (CORE ENGINE)
# =============================================================================

def difference(a: GiganticMorphism, b: GiganticMorphism) -> Optional[Dict]:
    for name in FIELDS:
        if getattr(a, name) != getattr(b, name):
            return {"field": name, "first": repr(getattr(a, name))[:200], "second": repr(getattr(b, name))[:200]}
    return None


def identity_law(m: GiganticMorphism) -> Optional[Dict]:
    return (difference(compose_gigantic(identity_gigantic(m.source), m), m)
            or difference(compose_gigantic(m, identity_gigantic(m.target)), m))


def associativity_law(m1, m2, m3) -> Optional[Dict]:
    return difference(compose_gigantic(compose_gigantic(m1, m2), m3),
                      compose_gigantic(m1, compose_gigantic(m2, m3)))


def functoriality_law(P1, P2) -> Optional[Dict]:
    return difference(embed(compose_labeled(P1, P2)), compose_gigantic(embed(P1), embed(P2)))


def check_laws(seed: int, count: int, wanted) -> List[CoherenceReport]:
    reports = {name: CoherenceReport(name, "composition in the gigantic graph category") for name in SUITE_NAMES}
    for k in range(count):
        instance = seed + k
        rng = gen.make_rng(instance)
        try:
            P1, P2, P3 = composable_triple(rng)
            m1, m2, m3 = embed(P1), embed(P2), embed(P3)
        except ShadowcalcError as e:
            for r in reports.values():
                r.record_error(instance, e)
            continue
        checks = {
            "gigantic-identity": lambda: identity_law(m1),
            "gigantic-associativity": lambda: associativity_law(m1, m2, m3),
            "embed-functoriality": lambda: functoriality_law(P1, P2),
        }
        for name, check in checks.items():
            if name not in wanted:
                continue
            try:
                witness = check()
                reports[name].record(instance, witness is None, witness)
            except ShadowcalcError as e:
                reports[name].record_error(instance, e)
    return [reports[name] for name in SUITE_NAMES if name in wanted]


# =============================================================================
# 5. MAIN EXECUTION
# =============================================================================

def run_analysis(seed: int = 0, instances: Optional[int] = None, backend: str = "family",
                 only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    wanted = set(only) if only is not None else set(SUITE_NAMES)
    reports = check_laws(seed, instances or DEFAULTS["instances"], wanted)
    for r in reports:
        logger.info("%s: %s", r.name, r.verdict)
    return reports
