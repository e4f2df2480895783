import importlib
import logging
import sys
from typing import Dict, Iterable, List, Optional

from joblib import Parallel, delayed

from shadowcalc.config import Settings
from shadowcalc.errors import ShapeMismatch
from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

PAGE_PACKAGE = "pages.suite_pages"

features = [
    {"title": "Atomic Coherences", "summary": "The fifteen atomic polyhedra of a symmetric monoidal bifibration, plus the pasting and rearrangement lemmas.", "file": "atomic_coherences"},
    {"title": "Cardinality Map", "summary": "Coherence polyhedra of the map from families to matrices.", "file": "h_coherences"},
    {"title": "Bicategory and Shadow", "summary": "Pentagon, unit triangle, shadow axioms and random shadow rings.", "file": "bicategory_coherences"},
    {"title": "External Product", "summary": "Associativity, unit and base change of the external product.", "file": "boxtimes_coherences"},
    {"title": "Base Change", "summary": "Composition of base change objects.", "file": "base_change_coherences"},
    {"title": "Untwisting", "summary": "Untwisting isomorphism and the Fuller structure maps.", "file": "untwisting"},
    {"title": "Fuller and Multitrace", "summary": "The Fuller trace of a twisted product against the multitrace and an index-sum oracle.", "file": "fuller_multitrace"},
    {"title": "Rotation Counterexample", "summary": "A rotated diagram of functors that must not be coherent, with controls.", "file": "rotation_negative"},
    {"title": "Calculus Properties", "summary": "Inert maps, locality, named figures and the generator table of D.", "file": "calculus_properties"},
    {"title": "Gray-Edge Pushouts", "summary": "Every flip square goes to a pushout of gray edges.", "file": "gray_edge_pushouts"},
    {"title": "Gigantic Category Laws", "summary": "Identity, associativity and functoriality of the embedding.", "file": "gigantic_laws"},
]


def load_feature(file: str):
    module_name = f"{PAGE_PACKAGE}.{file}"
    try:
        if module_name in sys.modules:
            return sys.modules[module_name]
        return importlib.import_module(module_name)
    except ModuleNotFoundError as e:
        logging.error(f"Module not found: {module_name}: {e}")
        raise ShapeMismatch(f"suite page {file!r} is missing", module=module_name)


def suite_index() -> Dict[str, str]:
    """Every suite name with the page that runs it."""
    index = {}
    for feature in features:
        module = load_feature(feature["file"])
        for name in module.SUITE_NAMES:
            index[name] = feature["file"]
    return index


def resolve(name: str) -> Dict[str, Optional[List[str]]]:
    """Pages to run and the suites wanted from each; a page file name selects the whole page."""
    if name == "all":
        return {f["file"]: None for f in features}
    if name in {f["file"] for f in features}:
        return {name: None}
    index = suite_index()
    if name in index:
        return {index[name]: [name]}
    prefixed = {n: page for n, page in index.items() if n.startswith(name)}
    if prefixed:
        pages: Dict[str, List[str]] = {}
        for n, page in prefixed.items():
            pages.setdefault(page, []).append(n)
        return pages
    raise ShapeMismatch(f"unknown suite {name!r}", known=sorted(index))


def run_feature(file: str, settings: Settings, only: Optional[Iterable[str]] = None) -> List[CoherenceReport]:
    module = load_feature(file)
    if not hasattr(module, "run_analysis"):
        raise ShapeMismatch(f"suite page {file!r} has no run_analysis")
    return module.run_analysis(seed=settings.seed, instances=settings.instances,
                               backend=settings.backend, only=only)


def run_suites(name: str, settings: Settings) -> List[CoherenceReport]:
    """Run the named suite, page or `all`; pages run in parallel when jobs > 1."""
    plan = resolve(name)
    if settings.jobs > 1 and len(plan) > 1:
        parts = Parallel(n_jobs=settings.jobs)(
            delayed(run_feature)(file, settings, only) for file, only in plan.items())
    else:
        parts = [run_feature(file, settings, only) for file, only in plan.items()]
    reports = [r for part in parts for r in part]
    logger.info("ran %d suites from %d pages", len(reports), len(plan))
    return reports
