"""
Relation isomorphisms between words of plan steps, the merge of two adjacent
plans into the plan of their composite, routes of gigantic morphisms and the
comparison of two relation paths between routes.

A rewrite replaces a window of steps by another window with the same end
stamps. Its bijection is computed on the value at the window start and
whiskered through the rest of the word, so the accumulated map always goes
from the evaluation of the original word to that of the current one.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import pandas as pd

from shadowcalc.base_finset import Square
from shadowcalc.colorings import GiganticMorphism, compose_gigantic, pull_coloring
from shadowcalc.d_diagram import d_along_graphmap, d_between
from shadowcalc.errors import PathMismatch, ShadowcalcError, ShapeMismatch, StampMismatch
from shadowcalc.plans import (FAMILY_BACKEND, PULL_LIKE, Assignment, AssignmentMap, Backend,
                              GiganticObject, PlanStep, StepKind, evaluate, evaluate_map,
                              generator_decomposition, glue_below, identity_assignment_map,
                              run_steps, run_steps_map)

logger = logging.getLogger(__name__)

# =============================================================================
# 1. RELATION ISOMORPHISMS
# =============================================================================

class RelationKind(str, Enum):
    FIN_COMPOSE = "fin-compose"
    FIN_IDENTITY = "fin-identity"
    FIN_GRAPH = "fin-graph"
    FIN_WHITE = "fin-white"
    FIN_BLACK = "fin-black"
    GRAPH_COMPOSE = "graph-compose"
    GRAPH_IDENTITY = "graph-identity"
    FLIP_WHITE_WHITE = "flip-white-white"
    FLIP_BLACK_BLACK = "flip-black-black"
    FLIP_WHITE_BLACK = "flip-white-black"
    SWAP_GRAPH_WHITE = "swap-graph-white"
    SWAP_GRAPH_BLACK = "swap-graph-black"


# The canonical isomorphism each relation class is built from.
RELATION_SOURCES = {
    RelationKind.FIN_COMPOSE: "tensorComp",
    RelationKind.FIN_IDENTITY: "tensorComp",
    RelationKind.FIN_GRAPH: "tensorPull",
    RelationKind.FIN_WHITE: "tensorPull",
    RelationKind.FIN_BLACK: "tensorPush",
    RelationKind.GRAPH_COMPOSE: "compPull",
    RelationKind.GRAPH_IDENTITY: "compPull",
    RelationKind.FLIP_WHITE_WHITE: "compPull",
    RelationKind.FLIP_BLACK_BLACK: "compPush",
    RelationKind.FLIP_WHITE_BLACK: "beckChevalley",
    RelationKind.SWAP_GRAPH_WHITE: "compPull",
    RelationKind.SWAP_GRAPH_BLACK: "beckChevalley",
}


def _kinds(steps: Sequence[PlanStep]) -> List[StepKind]:
    return [s.kind for s in steps]


def _check_window(old: Sequence[PlanStep], new: Sequence[PlanStep], start: GiganticObject) -> GiganticObject:
    """Both windows must run from `start` to the same stamp; returns that stamp."""
    def end(steps):
        current = start
        for s in steps:
            if s.source != current:
                raise StampMismatch("window steps are not chained", kind=s.kind.value)
            current = s.target
        return current
    old_end, new_end = end(old), end(new)
    if old_end != new_end:
        raise StampMismatch("rewrite windows end at different stamps")
    return old_end


def _tensor_swap(old, new, a, old_val, new_val, backend) -> Dict:
    """[X, T] -> [T, X']: inverse of the tensor-pull or tensor-push isomorphism per fiber."""
    X, T = old
    maps = {}
    for w in T.target.components:
        fiber = T.fiber(w)
        sub = [X.restricted(v) for v in fiber]
        values = [a.values[v] for v in fiber]
        iso = backend.tensor_pull(sub, values) if X.kind in PULL_LIKE else backend.tensor_push(sub, values)
        maps[w] = iso.inverse()
    return maps


def _regroup(old, new, a, backend) -> Dict:
    """[T1, T2] -> [T]: reassociate nested external products."""
    T1, T2 = old
    maps = {}
    for w in T2.target.components:
        inner = tuple(tuple(T1.fiber(v)) for v in T2.fiber(w))
        flat = tuple(u for u in new[0].fiber(w))
        source_tree = tuple(t[0] if len(t) == 1 else t for t in inner)
        if len(source_tree) == 1:
            source_tree = source_tree[0]
        target_tree = flat[0] if len(flat) == 1 else flat
        maps[w] = backend.regroup(source_tree, target_tree, dict(a.values))
    return maps


def relation_iso(kind: RelationKind, old: Sequence[PlanStep], new: Sequence[PlanStep],
                 a: Assignment, backend: Backend = FAMILY_BACKEND) -> AssignmentMap:
    """
    The bijection eval(old window) -> eval(new window) at the value `a` of the
    window start. The construction follows the shapes of the two windows.
    """
    old, new = list(old), list(new)
    _check_window(old, new, a.stamp)
    old_val, new_val = run_steps(old, a, backend), run_steps(new, a, backend)
    ko, kn = _kinds(old), _kinds(new)
    if StepKind.TENSOR in ko or StepKind.TENSOR in kn:
        if ko == [StepKind.TENSOR, StepKind.TENSOR] and kn == [StepKind.TENSOR]:
            maps = _regroup(old, new, a, backend)
        elif len(old) == 2 and ko[1] == StepKind.TENSOR and kn[0] == StepKind.TENSOR:
            maps = _tensor_swap(old, new, a, old_val, new_val, backend)
        elif (ko, kn) in (([StepKind.TENSOR], []), ([], [StepKind.TENSOR])):
            maps = {v: backend.identity(old_val.values[v]) for v in old_val.stamp.components}
        else:
            raise ShapeMismatch(f"no tensor relation between {ko} and {kn}")
    else:
        maps = {}
        everything = ko + kn
        for v in a.stamp.components:
            X = a.values[v]
            if all(k in PULL_LIKE for k in everything):
                maps[v] = backend.pull_word_iso([s.restricted(v) for s in reversed(old)],
                                                [s.restricted(v) for s in reversed(new)], X)
            elif all(k == StepKind.PUSH for k in everything):
                maps[v] = backend.push_word_iso([s.restricted(v) for s in old],
                                                [s.restricted(v) for s in new], X)
            elif ko == [StepKind.PUSH, StepKind.PULL] and kn[0] in PULL_LIKE and kn[1] == StepKind.PUSH:
                sq = Square(top=new[1].restricted(v), left=new[0].restricted(v),
                            right=old[1].restricted(v), bottom=old[0].restricted(v))
                maps[v] = backend.bc_map(sq, X).inverse()
            elif ko[0] in PULL_LIKE and ko[1] == StepKind.PUSH and kn[0] == StepKind.PUSH and kn[1] in PULL_LIKE:
                sq = Square(top=old[1].restricted(v), left=old[0].restricted(v),
                            right=new[1].restricted(v), bottom=new[0].restricted(v))
                maps[v] = backend.bc_map(sq, X)
            else:
                raise ShapeMismatch(f"no relation between {ko} and {kn}")
    result = AssignmentMap(old_val, new_val, maps)
    for v, f in maps.items():
        if f.source != old_val.values[v] or f.target != new_val.values[v]:
            raise PathMismatch(f"{kind.value} relation does not connect the two windows", component=v)
    return result


# =============================================================================
# 2. REWRITING A WORD
# =============================================================================

@dataclass
class RouteState:
    """A word of steps together with the map from the original evaluation to the current one."""
    steps: List[PlanStep]
    start: Assignment
    backend: Backend = FAMILY_BACKEND
    total: Optional[AssignmentMap] = None
    log: List[Tuple[str, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.total is None:
            self.total = identity_assignment_map(run_steps(self.steps, self.start, self.backend), self.backend)

    def value_at(self, i: int) -> Assignment:
        return run_steps(self.steps[:i], self.start, self.backend)

    def stamp_at(self, i: int) -> GiganticObject:
        return self.start.stamp if i == 0 else self.steps[i - 1].target

    def rewrite(self, kind: RelationKind, i: int, j: int, new: Sequence[PlanStep]) -> None:
        x = self.value_at(i)
        iso = relation_iso(kind, self.steps[i:j], new, x, self.backend)
        self.total = self.total.then(run_steps_map(self.steps[j:], iso, self.backend))
        self.steps[i:j] = list(new)
        self.log.append((kind.value, i))

    def find(self, kind: StepKind, start: int = 0) -> List[int]:
        return [i for i in range(start, len(self.steps)) if self.steps[i].kind == kind]


def _swap_tensor_left(state: RouteState, t: int) -> None:
    """[X, T] -> [T', X'] with T' regrouping the source components of X."""
    X, T = state.steps[t - 1], state.steps[t]
    tensor = PlanStep(StepKind.TENSOR, X.source, X.source.with_components(T.target.components, T.set_map),
                      set_map=dict(T.set_map))
    moved = PlanStep(X.kind, tensor.target, T.target, lmap=X.lmap, vertex=X.vertex)
    kind = {StepKind.GRAPH: RelationKind.FIN_GRAPH, StepKind.PULL: RelationKind.FIN_WHITE,
            StepKind.PUSH: RelationKind.FIN_BLACK}[X.kind]
    state.rewrite(kind, t - 1, t + 1, [tensor, moved])


def _collapse_stage(state: RouteState, i: int, j: int, kind: StepKind, lmap, end: GiganticObject) -> None:
    """Replace steps[i:j] (all of `kind`, possibly none) by one step along `lmap`."""
    if j - i == 1 and state.steps[i].lmap == lmap:
        return
    step = PlanStep(kind, state.stamp_at(i), end, lmap=lmap)
    if j == i:
        relation = RelationKind.GRAPH_IDENTITY
    else:
        relation = RelationKind.FLIP_WHITE_WHITE if kind == StepKind.PULL else RelationKind.FLIP_BLACK_BLACK
    state.rewrite(relation, i, j, [step])


def _stage_bounds(state: RouteState, start: int, kind: StepKind) -> int:
    j = start
    while j < len(state.steps) and state.steps[j].kind == kind:
        j += 1
    return j


def collapse_plan(m: GiganticMorphism, a: Assignment, backend: Backend = FAMILY_BACKEND,
                  order: str = "ascending") -> RouteState:
    """The plan of m with each flip stage folded into one step: [T, P, Q, G]."""
    plan = generator_decomposition(m, order)
    state = RouteState(list(plan.steps), a, backend)
    G, J = m.source.graph, m.join
    p_end = _stage_bounds(state, 1, StepKind.PULL)
    _collapse_stage(state, 1, p_end, StepKind.PULL, d_between(G, J, m.source.coloring),
                    state.stamp_at(p_end))
    q_end = _stage_bounds(state, 2, StepKind.PUSH)
    _collapse_stage(state, 2, q_end, StepKind.PUSH, d_between(G, J, m.pulled), state.stamp_at(q_end))
    return state


def merge2(m1: GiganticMorphism, m2: GiganticMorphism, a: Assignment,
           backend: Backend = FAMILY_BACKEND, order: str = "ascending") -> AssignmentMap:
    """
    eval(plan(m2)) ∘ eval(plan(m1)) -> eval(plan(m2 ∘ m1)) at a, built only
    from relation isomorphisms: move the second tensor stage left and fuse it,
    fold the flip stages, swap the graph pullback past the second flips, swap
    the first pushforwards past the second pullbacks, and compose.
    """
    m = compose_gigantic(m1, m2)
    p1, p2 = generator_decomposition(m1, order), generator_decomposition(m2, order)
    state = RouteState(list(p1.steps) + list(p2.steps), a, backend)
    G, H = m1.source.graph, m1.target.graph
    h = m1.graph_map
    J = m.join
    W = m.target.components

    def sg(k):
        return GiganticObject(W, k, glue_below(J, m.glue, k))

    def sh(k):
        return GiganticObject(W, k, glue_below(m2.join, m2.glue, k))

    # tensor stage of m2 moves to the front and fuses with that of m1
    t = len(p1.steps)
    while state.steps[t - 1].kind != StepKind.TENSOR:
        _swap_tensor_left(state, t)
        t -= 1
    T1, T2 = state.steps[0], state.steps[1]
    fused = PlanStep(StepKind.TENSOR, T1.source, T2.target,
                     set_map={u: T2.set_map[v] for u, v in T1.set_map.items()})
    state.rewrite(RelationKind.FIN_COMPOSE, 0, 2, [fused])

    c, join1, hd = m1.source.coloring, m1.join, m1.pulled
    hdje = pull_coloring(h, m2.join)
    hje = m.pulled

    # fold m1's flip stages
    p_end = _stage_bounds(state, 1, StepKind.PULL)
    _collapse_stage(state, 1, p_end, StepKind.PULL, d_between(G, join1, c), sg(join1))
    q_end = _stage_bounds(state, 2, StepKind.PUSH)
    _collapse_stage(state, 2, q_end, StepKind.PUSH, d_between(G, join1, hd), sg(hd))
    # word: [T, A, B1, g1, P2..., Q2..., G2]
    p2_end = _stage_bounds(state, 4, StepKind.PULL)
    _collapse_stage(state, 4, p2_end, StepKind.PULL, d_between(H, m2.join, m1.target.coloring), sh(m2.join))
    q2_end = _stage_bounds(state, 5, StepKind.PUSH)
    _collapse_stage(state, 5, q2_end, StepKind.PUSH, d_between(H, m2.join, m2.pulled), sh(m2.pulled))
    # word: [T, A, B1, g1, p2, B2, G2]

    p2_moved = PlanStep(StepKind.PULL, sg(hd), sg(hdje), lmap=d_between(G, hdje, hd))
    g_mid = PlanStep(StepKind.GRAPH, sg(hdje), sh(m2.join), lmap=d_along_graphmap(h, m2.join))
    state.rewrite(RelationKind.SWAP_GRAPH_WHITE, 3, 5, [p2_moved, g_mid])
    # word: [T, A, B1, p2', g', B2, G2]

    w = PlanStep(StepKind.PULL, sg(join1), sg(J), lmap=d_between(G, J, join1))
    z = PlanStep(StepKind.PUSH, sg(J), sg(hdje), lmap=d_between(G, J, hdje))
    state.rewrite(RelationKind.FLIP_WHITE_BLACK, 2, 4, [w, z])
    # word: [T, A, w, z, g', B2, G2]

    b2_moved = PlanStep(StepKind.PUSH, sg(hdje), sg(hje), lmap=d_between(G, hdje, hje))
    g_end = PlanStep(StepKind.GRAPH, sg(hje), sh(m2.pulled), lmap=d_along_graphmap(h, m2.pulled))
    state.rewrite(RelationKind.SWAP_GRAPH_BLACK, 4, 6, [b2_moved, g_end])
    # word: [T, A, w, z, B2', g'', G2]

    state.rewrite(RelationKind.FLIP_WHITE_WHITE, 1, 3,
                  [PlanStep(StepKind.PULL, state.stamp_at(1), sg(J), lmap=d_between(G, J, c))])
    state.rewrite(RelationKind.FLIP_BLACK_BLACK, 2, 4,
                  [PlanStep(StepKind.PUSH, sg(J), sg(hje), lmap=d_between(G, J, hje))])
    state.rewrite(RelationKind.GRAPH_COMPOSE, 3, 5,
                  [PlanStep(StepKind.GRAPH, sg(hje), m.target,
                            lmap=d_along_graphmap(m.graph_map, m.target.coloring))])

    reference = collapse_plan(m, a, backend, order)
    if state.steps != reference.steps:
        for i, (x, y) in enumerate(zip(state.steps, reference.steps)):
            if x != y:
                raise PathMismatch("merged word differs from the plan of the composite",
                                   step=i, kind=x.kind.value)
        raise PathMismatch("merged word has a different length from the plan of the composite")
    logger.debug("merged two plans with %d rewrites", len(state.log))
    return state.total.then(reference.total.inverse())


# =============================================================================
# 3. ROUTES
# =============================================================================

Route = Sequence[GiganticMorphism]


def compose_route(route: Route) -> GiganticMorphism:
    result = route[0]
    for m in route[1:]:
        result = compose_gigantic(result, m)
    return result


def evaluate_route(route: Route, a: Assignment, backend: Backend = FAMILY_BACKEND) -> Assignment:
    for m in route:
        a = evaluate(generator_decomposition(m), a, backend)
    return a


def merge_route(route: Route, a: Assignment, backend: Backend = FAMILY_BACKEND,
                order: str = "ascending") -> AssignmentMap:
    """evaluate_route(route) -> evaluate(plan(composite)), folded from the left."""
    if not route:
        raise ShapeMismatch("an empty route has no composite")
    first = route[0]
    total = identity_assignment_map(evaluate(generator_decomposition(first, order), a, backend), backend)
    composite = first
    for m in route[1:]:
        total = evaluate_map(generator_decomposition(m, order), total, backend)
        total = total.then(merge2(composite, m, a, backend, order))
        composite = compose_gigantic(composite, m)
    return total


def route_iso(r1: Route, r2: Route, a: Assignment, backend: Backend = FAMILY_BACKEND,
              order: str = "ascending") -> AssignmentMap:
    """The derived isomorphism evaluate_route(r1) -> evaluate_route(r2)."""
    if compose_route(r1) != compose_route(r2):
        raise PathMismatch("routes compose to different morphisms")
    return merge_route(r1, a, backend, order).then(merge_route(r2, a, backend, order).inverse())


def window_iso(route: Route, i: int, j: int, new_window: Route, a: Assignment,
               backend: Backend = FAMILY_BACKEND) -> Tuple[List[GiganticMorphism], AssignmentMap]:
    """Replace route[i:j] by new_window; returns the new route and the whiskered isomorphism."""
    x = evaluate_route(route[:i], a, backend)
    local = route_iso(route[i:j], new_window, x, backend)
    for m in route[j:]:
        local = evaluate_map(generator_decomposition(m), local, backend)
    return list(route[:i]) + list(new_window) + list(route[j:]), local


Rewrite = Tuple[int, int, Route]


def path_iso(route: Route, path: Sequence[Rewrite], a: Assignment,
             backend: Backend = FAMILY_BACKEND) -> Tuple[List[GiganticMorphism], AssignmentMap]:
    """Compose the window isomorphisms of a relation path starting at `route`."""
    current = list(route)
    total = identity_assignment_map(evaluate_route(current, a, backend), backend)
    for i, j, window in path:
        current, iso = window_iso(current, i, j, window, a, backend)
        total = total.then(iso)
    return current, total


# =============================================================================
# 4. COHERENCE REPORTS
# =============================================================================

@dataclass
class CoherenceReport:
    """Per-instance verdicts for one coherence check; `expected` is 'equal' or 'unequal'."""
    name: str
    figure: str = ""
    expected: str = "equal"
    verdicts: List[Dict] = field(default_factory=list)

    def record(self, instance: Hashable, equal: bool, witness: Optional[Dict] = None,
               error: Optional[str] = None) -> None:
        self.verdicts.append({"instance": instance, "equal": equal, "witness": witness, "error": error})

    def record_error(self, instance: Hashable, e: ShadowcalcError) -> None:
        logging.error(f"{self.name} instance {instance} failed: {e}")
        self.verdicts.append({"instance": instance, "equal": False, "witness": None,
                              "error": f"{e.code}: {e.message}"})

    @property
    def passed(self) -> bool:
        if not self.verdicts:
            return False
        if any(v["error"] for v in self.verdicts):
            return False
        if self.expected == "equal":
            return all(v["equal"] for v in self.verdicts)
        return all(not v["equal"] and v["witness"] is not None for v in self.verdicts)

    @property
    def verdict(self) -> str:
        if self.expected == "unequal":
            return "unequal-as-expected" if self.passed else "unexpected-equal"
        return "equal" if self.passed else "unequal"

    def to_frame(self) -> pd.DataFrame:
        rows = [{"suite": self.name, "figure": self.figure, "instance": v["instance"],
                 "equal": v["equal"], "error": v["error"] or ""} for v in self.verdicts]
        return pd.DataFrame(rows, columns=["suite", "figure", "instance", "equal", "error"])

    def to_dict(self) -> Dict:
        return {"name": self.name, "figure": self.figure, "expected": self.expected,
                "verdict": self.verdict, "passed": self.passed, "verdicts": self.verdicts}

    def extend(self, other: "CoherenceReport") -> None:
        self.verdicts.extend(other.verdicts)


def route_compare(r1: Route, r2: Route, path1: Sequence[Rewrite], path2: Sequence[Rewrite],
                  inputs: Sequence[Assignment], backend: Backend = FAMILY_BACKEND,
                  name: str = "route-compare", figure: str = "") -> CoherenceReport:
    """Compose relation isomorphisms along both paths from r1 and compare them on every input."""
    report = CoherenceReport(name, figure)
    for n, a in enumerate(inputs):
        try:
            end1, iso1 = path_iso(r1, path1, a, backend)
            end2, iso2 = path_iso(r1, path2, a, backend)
            if end1 != list(r2) or end2 != list(r2):
                raise PathMismatch("relation path does not end at the second route")
            witness = iso1.witness(iso2, backend)
            report.record(n, witness is None, witness)
        except ShadowcalcError as e:
            report.record_error(n, e)
    return report
