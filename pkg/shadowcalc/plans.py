"""
Operation plans: a gigantic morphism compiled to a word of tensor, pullback,
pushforward and graph-pullback steps, evaluated on assignments in either
backend.

A plan for m : (U, G, c, α) -> (V, H, d, β) always reads

    T          tensor over the fibers of U -> V
    P ...      one pullback per vertex flipped white -> gray (c to c ∨ h*d)
    Q ...      one pushforward per vertex flipped gray -> black (to h*d)
    G          pullback along D(h) at d

and every step carries the gigantic objects it starts and ends at.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from shadowcalc import families as fam
from shadowcalc import matrices as mat
from shadowcalc.base_finset import LabeledProductMap, compose_lp, relabeling
from shadowcalc.colorings import (Color3, Coloring, GiganticMorphism, GiganticObject,
                                  embed, gray_edges_map)
from shadowcalc.d_diagram import d_along_graphmap, d_between
from shadowcalc.errors import ShapeMismatch, StampMismatch
from shadowcalc.labeled_graphs import LabeledGraphMap

logger = logging.getLogger(__name__)

# =============================================================================
# 1. BACKENDS
# =============================================================================

@dataclass(frozen=True)
class Backend:
    """The operations an evaluation needs, bound to one fiber representation."""
    name: str
    pullback: Callable
    pushforward: Callable
    tensor_many: Callable
    base_of: Callable
    identity: Callable
    same: Callable
    pull_map: Callable
    push_map: Callable
    tensor_map: Callable
    pull_word_iso: Callable
    push_word_iso: Callable
    bc_map: Callable
    tensor_pull: Callable
    tensor_push: Callable
    regroup: Callable
    summary: Callable
    witness: Callable

    def relabel(self, X, rename: Mapping) -> object:
        """The same object with base indices renamed."""
        return self.pullback(relabeling(self.base_of(X), dict(rename)), X)


def _family_witness(a: fam.FamilyMap, b: fam.FamilyMap):
    for k in a.source.keys():
        if k not in b.mapping or a(k) != b(k):
            return {"element": repr(k), "first": repr(a(k)), "second": repr(b.mapping.get(k))}
    return None


def _matrix_witness(a: mat.MatrixMap, b: mat.MatrixMap):
    for anchor, x, y in zip(a.source.base.elements, a.blocks, b.blocks):
        if x.shape != y.shape or not (x == y).all():
            return {"anchor": repr(anchor), "first": x.tolist(), "second": y.tolist()}
    return None


def _family_summary(X: fam.Family) -> Dict:
    return {"base": list(X.base.index), "cardinalities": fam.count_array(X).tolist(), "total": len(X)}


def _matrix_summary(X: mat.MatrixObject) -> Dict:
    return {"base": list(X.base.index), "ranks": X.rank_array().tolist(), "total": X.total_rank()}


FAMILY_BACKEND = Backend(
    name="family",
    pullback=fam.pullback,
    pushforward=fam.pushforward,
    tensor_many=fam.tensor_many,
    base_of=lambda X: X.base,
    identity=fam.identity,
    same=lambda a, b: a.same_as(b),
    pull_map=fam.pull_map,
    push_map=fam.push_map,
    tensor_map=fam.tensor_map,
    pull_word_iso=fam.pull_word_iso,
    push_word_iso=fam.push_word_iso,
    bc_map=fam.bc_map,
    tensor_pull=fam.tensor_pull,
    tensor_push=fam.tensor_push,
    regroup=fam.regroup_iso,
    summary=_family_summary,
    witness=_family_witness,
)

MATRIX_BACKEND = Backend(
    name="matrix",
    pullback=mat.m_pullback,
    pushforward=mat.m_pushforward,
    tensor_many=mat.m_extern,
    base_of=lambda X: X.base,
    identity=mat.m_identity,
    same=lambda a, b: a == b,
    pull_map=mat.m_pull_map,
    push_map=mat.m_push_map,
    tensor_map=mat.m_tensor_map,
    pull_word_iso=mat.m_pull_word_iso,
    push_word_iso=mat.m_push_word_iso,
    bc_map=mat.m_bc_map,
    tensor_pull=mat.m_tensor_pull,
    tensor_push=mat.m_tensor_push,
    regroup=mat.m_regroup,
    summary=_matrix_summary,
    witness=_matrix_witness,
)

BACKENDS = {"family": FAMILY_BACKEND, "matrix": MATRIX_BACKEND}


def get_backend(name: str) -> Backend:
    if name not in BACKENDS:
        raise ShapeMismatch(f"unknown backend {name!r}; expected one of {sorted(BACKENDS)}")
    return BACKENDS[name]


# =============================================================================
# 2. PLANS
# =============================================================================

class StepKind(str, Enum):
    TENSOR = "tensor"
    PULL = "pull"
    PUSH = "push"
    GRAPH = "graph"


PULL_LIKE = (StepKind.PULL, StepKind.GRAPH)


@dataclass(frozen=True)
class PlanStep:
    """
    One step between two stamps. Pull-like steps pull back along `lmap`
    (target-stamp diagram -> source-stamp diagram), pushes push forward along
    it, and the tensor step uses `set_map`.
    """
    kind: StepKind
    source: GiganticObject
    target: GiganticObject
    lmap: Optional[LabeledProductMap] = None
    set_map: Optional[Mapping[Hashable, Hashable]] = None
    vertex: Optional[int] = None

    def restricted(self, v: Hashable) -> LabeledProductMap:
        """The part of `lmap` between the glue sets of component v."""
        if self.kind in PULL_LIKE:
            return self.lmap.restrict(self.target.glue_sets[v], self.source.glue_sets[v])
        return self.lmap.restrict(self.source.glue_sets[v], self.target.glue_sets[v])

    def fiber(self, v: Hashable) -> List[Hashable]:
        return sorted(u for u in self.source.components if self.set_map[u] == v)

    def describe(self) -> Dict:
        out = {"kind": self.kind.value,
               "source": _stamp_summary(self.source), "target": _stamp_summary(self.target)}
        if self.vertex is not None:
            out["vertex"] = self.vertex
        if self.set_map is not None:
            out["set_map"] = {repr(u): repr(v) for u, v in sorted(self.set_map.items(), key=repr)}
        return out


def _stamp_summary(obj: GiganticObject) -> Dict:
    return {"components": [repr(u) for u in obj.components],
            "coloring": {str(v): c for v, c in obj.coloring.key},
            "glue": {str(s): repr(u) for s, u in sorted(obj.glue.items())}}


@dataclass(frozen=True)
class OperationPlan:
    source: GiganticObject
    target: GiganticObject
    steps: Tuple[PlanStep, ...]

    def __post_init__(self):
        chain = [self.source] + [s.target for s in self.steps]
        for prev, step in zip(chain, self.steps):
            if step.source != prev:
                raise StampMismatch("adjacent plan stamps do not match", kind=step.kind.value)
        if chain[-1] != self.target:
            raise StampMismatch("last step does not end at the plan target")

    def describe(self) -> List[Dict]:
        return [s.describe() for s in self.steps]


def glue_below(join: Coloring, glue: Mapping[int, Hashable], k: Coloring) -> Dict[int, Hashable]:
    """Glue on 𝔊(k) for k less gray than `join`, read through containment."""
    return {s: glue[t] for s, t in gray_edges_map(k, join).items()}


def generator_decomposition(m: GiganticMorphism, order: str = "ascending") -> OperationPlan:
    """The plan T, P..., Q..., G of a gigantic morphism; `order` sorts the flips inside a stage."""
    if order not in ("ascending", "descending"):
        raise ShapeMismatch(f"unknown stage order {order!r}")
    G = m.source.graph
    c, pulled, join = m.source.coloring, m.pulled, m.join
    components = m.target.components
    reverse = order == "descending"

    def stamp(k: Coloring) -> GiganticObject:
        return GiganticObject(components, k, glue_below(join, m.glue, k))

    tensored = m.source.with_components(components, m.set_map)
    steps = [PlanStep(StepKind.TENSOR, m.source, tensored, set_map=dict(m.set_map))]
    current = tensored
    whites = sorted((v for v in G.graph.internal_whites if c[v] == Color3.WHITE and join[v] == Color3.GRAY),
                    reverse=reverse)
    k = c
    for v in whites:
        nxt = k.with_color(v, Color3.GRAY)
        target = stamp(nxt)
        steps.append(PlanStep(StepKind.PULL, current, target, lmap=d_between(G, nxt, k), vertex=v))
        k, current = nxt, target
    blacks = sorted((v for v in G.graph.internal_whites if pulled[v] == Color3.BLACK and c[v] != Color3.BLACK),
                    reverse=reverse)
    for v in blacks:
        nxt = k.with_color(v, Color3.BLACK)
        target = stamp(nxt)
        steps.append(PlanStep(StepKind.PUSH, current, target, lmap=d_between(G, k, nxt), vertex=v))
        k, current = nxt, target
    steps.append(PlanStep(StepKind.GRAPH, current, m.target,
                          lmap=d_along_graphmap(m.graph_map, m.target.coloring)))
    logger.debug("plan: %d pullbacks, %d pushforwards", len(whites), len(blacks))
    return OperationPlan(m.source, m.target, tuple(steps))


def plan_from(h: LabeledGraphMap, order: str = "ascending") -> OperationPlan:
    return generator_decomposition(embed(h), order)


# =============================================================================
# 3. ASSIGNMENTS AND EVALUATION
# =============================================================================

@dataclass(frozen=True)
class Assignment:
    """One fiber object per component of `stamp`, over that component's base."""
    stamp: GiganticObject
    values: Mapping[Hashable, object]

    def check(self, backend: Backend) -> None:
        if set(self.values) != set(self.stamp.components):
            raise StampMismatch("assignment components differ from the stamp")
        for u in self.stamp.components:
            if backend.base_of(self.values[u]) != self.stamp.base(u):
                raise StampMismatch(f"value at component {u!r} lives over the wrong base", component=u)

    def __getitem__(self, u):
        return self.values[u]


@dataclass(frozen=True)
class AssignmentMap:
    """Componentwise maps between two assignments with the same stamp."""
    source: Assignment
    target: Assignment
    maps: Mapping[Hashable, object] = field(default_factory=dict)

    def then(self, other: "AssignmentMap") -> "AssignmentMap":
        return AssignmentMap(self.source, other.target,
                             {u: self.maps[u].then(other.maps[u]) for u in self.maps})

    def inverse(self) -> "AssignmentMap":
        return AssignmentMap(self.target, self.source, {u: f.inverse() for u, f in self.maps.items()})

    def same(self, other: "AssignmentMap", backend: Backend) -> bool:
        return all(backend.same(self.maps[u], other.maps[u]) for u in self.maps)

    def witness(self, other: "AssignmentMap", backend: Backend) -> Optional[Dict]:
        for u in sorted(self.maps, key=repr):
            w = backend.witness(self.maps[u], other.maps[u])
            if w is not None:
                return {"component": repr(u), **w}
        return None


def identity_assignment_map(a: Assignment, backend: Backend) -> AssignmentMap:
    return AssignmentMap(a, a, {u: backend.identity(X) for u, X in a.values.items()})


def apply_step(step: PlanStep, a: Assignment, backend: Backend) -> Assignment:
    if a.stamp != step.source:
        raise StampMismatch("assignment stamp does not match the step source", kind=step.kind.value)
    values = {}
    for v in step.target.components:
        if step.kind == StepKind.TENSOR:
            values[v] = backend.tensor_many([a.values[u] for u in step.fiber(v)])
        elif step.kind in PULL_LIKE:
            values[v] = backend.pullback(step.restricted(v), a.values[v])
        else:
            values[v] = backend.pushforward(step.restricted(v), a.values[v])
    return Assignment(step.target, values)


def apply_step_map(step: PlanStep, phi: AssignmentMap, backend: Backend) -> AssignmentMap:
    """Whisker componentwise maps through one step."""
    source = apply_step(step, phi.source, backend)
    target = apply_step(step, phi.target, backend)
    maps = {}
    for v in step.target.components:
        if step.kind == StepKind.TENSOR:
            maps[v] = backend.tensor_map([phi.maps[u] for u in step.fiber(v)])
        elif step.kind in PULL_LIKE:
            maps[v] = backend.pull_map(step.restricted(v), phi.maps[v])
        else:
            maps[v] = backend.push_map(step.restricted(v), phi.maps[v])
    return AssignmentMap(source, target, maps)


def run_steps(steps: Sequence[PlanStep], a: Assignment, backend: Backend) -> Assignment:
    for step in steps:
        a = apply_step(step, a, backend)
    return a


def run_steps_map(steps: Sequence[PlanStep], phi: AssignmentMap, backend: Backend) -> AssignmentMap:
    for step in steps:
        phi = apply_step_map(step, phi, backend)
    return phi


def evaluate(plan: OperationPlan, a: Assignment, backend: Backend = FAMILY_BACKEND) -> Assignment:
    """Fold the plan's steps over the assignment."""
    if a.stamp != plan.source:
        raise StampMismatch("assignment does not match the plan source")
    a.check(backend)
    result = run_steps(plan.steps, a, backend)
    logger.debug("evaluated %d steps with the %s backend", len(plan.steps), backend.name)
    return result


def evaluate_map(plan: OperationPlan, phi: AssignmentMap, backend: Backend = FAMILY_BACKEND) -> AssignmentMap:
    return run_steps_map(plan.steps, phi, backend)


# =============================================================================
# 4. INERT PLANS
# =============================================================================

def _invert_relabeling(f: LabeledProductMap) -> LabeledProductMap:
    p = {t: u for u, t in f.index_map().items()}
    return LabeledProductMap.build(f.target, f.source, p,
                                   {t: f.component(u) for u, t in f.index_map().items()})


def inert_relabeling(plan: OperationPlan) -> Dict[Hashable, Tuple[Hashable, LabeledProductMap]]:
    """
    For a plan made only of relabelings and singleton tensors: each target
    component with its source component and the relabeling R such that the
    result is R* of the input. Raises ShapeMismatch otherwise.
    """
    track: Dict[Hashable, Tuple[Hashable, LabeledProductMap]] = {
        u: (u, LabeledProductMap.identity(plan.source.base(u))) for u in plan.source.components}
    for step in plan.steps:
        new = {}
        for v in step.target.components:
            if step.kind == StepKind.TENSOR:
                fiber = step.fiber(v)
                if len(fiber) != 1:
                    raise ShapeMismatch(f"component {v!r} is a tensor of {len(fiber)} inputs")
                new[v] = track[fiber[0]]
                continue
            f = step.restricted(v)
            if not f.is_relabeling:
                raise ShapeMismatch(f"step {step.kind.value} is not a relabeling at {v!r}")
            u, R = track[v]
            if step.kind in PULL_LIKE:
                new[v] = (u, compose_lp(f, R))
            else:
                new[v] = (u, compose_lp(_invert_relabeling(f), R))
        track = new
    return track
