"""
JSON documents in and out, and Graphviz DOT export.

Every input is validated against a jsonschema document before decoding.
Elements of base objects may be JSON scalars or arrays (arrays decode to
tuples); map tables are keyed by the compact JSON text of the element.
Output is UTF-8 JSON with sorted keys.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Hashable, List, Mapping, Optional, Union

import jsonschema
import numpy as np

from shadowcalc.base_finset import BaseMap, BaseObject, LabeledProduct
from shadowcalc.colorings import Color3, Coloring
from shadowcalc.errors import BaseMismatch, ParseError, ShadowcalcError, ShapeMismatch
from shadowcalc.families import Family
from shadowcalc.graph_core import Cell, ColoredGraph, GraphMap
from shadowcalc.labeled_graphs import Constellation, LabeledGraph, LabeledGraphMap, labeled_map
from shadowcalc.matrices import MatrixMap, MatrixObject, m_from_blocks
from shadowcalc.named_ops import Figure, run_figure
from shadowcalc.plans import OperationPlan, get_backend

logger = logging.getLogger(__name__)

# =============================================================================
# 1. SCHEMAS
# =============================================================================

_INT_PAIR = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}

BASE_OBJECT_SCHEMA = {
    "type": "object",
    "required": ["elems"],
    "properties": {"elems": {"type": "array"}, "name": {"type": "string"}},
}

BASE_MAP_SCHEMA = {
    "type": "object",
    "required": ["map"],
    "properties": {
        "map": {"type": "object"},
        "source": BASE_OBJECT_SCHEMA,
        "target": BASE_OBJECT_SCHEMA,
    },
}

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {"type": "array", "items": {
            "type": "object", "required": ["id", "color"],
            "properties": {"id": {"type": "integer"}, "color": {"enum": ["black", "white"]}}}},
        "edges": {"type": "array", "items": {
            "type": "object", "required": ["id", "ends"],
            "properties": {"id": {"type": "integer"}, "ends": _INT_PAIR}}},
    },
}

LABELED_GRAPH_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges", "edgeLabel"],
    "properties": {
        **GRAPH_SCHEMA["properties"],
        "edgeLabel": {"type": "object", "additionalProperties": BASE_OBJECT_SCHEMA},
        "orient": {"type": "object", "additionalProperties": _INT_PAIR},
        "vertexLabel": {"type": "object", "additionalProperties": {"type": "object", "required": ["map"]}},
    },
}

_EMAP = {"type": "object", "additionalProperties": {
    "oneOf": [
        {"type": "object", "required": ["edge"], "properties": {"edge": {"type": "integer"}}},
        {"type": "object", "required": ["vertex"], "properties": {"vertex": {"type": "integer"}}},
    ]}}

GRAPH_MAP_SCHEMA = {
    "type": "object",
    "required": ["source", "target", "vmap", "emap"],
    "properties": {
        "source": GRAPH_SCHEMA,
        "target": GRAPH_SCHEMA,
        "vmap": {"type": "object", "additionalProperties": {"type": "integer"}},
        "emap": _EMAP,
    },
}

LABELED_MAP_SCHEMA = {
    "type": "object",
    "required": ["source", "target", "vmap", "emap"],
    "properties": {
        "source": LABELED_GRAPH_SCHEMA,
        "target": LABELED_GRAPH_SCHEMA,
        "vmap": {"type": "object", "additionalProperties": {"type": "integer"}},
        "emap": _EMAP,
        "iota": {"type": "object", "additionalProperties": {"type": "object", "required": ["map"]}},
    },
}

COLORING_SCHEMA = {
    "type": "object",
    "required": ["colors"],
    "properties": {"colors": {"type": "object",
                              "additionalProperties": {"enum": [c.value for c in Color3]}}},
}

LABELED_PRODUCT_SCHEMA = {
    "type": "object",
    "required": ["index", "factors"],
    "properties": {"index": {"type": "array"}, "factors": {"type": "array", "items": BASE_OBJECT_SCHEMA}},
}

FAMILY_SCHEMA = {
    "type": "object",
    "required": ["base", "elems"],
    "properties": {
        "base": LABELED_PRODUCT_SCHEMA,
        "elems": {"type": "array", "items": {
            "type": "object", "required": ["id", "anchor"],
            "properties": {"anchor": {"type": "array"}}}},
    },
}

MATRIX_OBJECT_SCHEMA = {
    "type": "object",
    "required": ["base", "ranks"],
    "properties": {
        "base": LABELED_PRODUCT_SCHEMA,
        "ranks": {"type": "array", "items": {
            "type": "object", "required": ["anchor", "rank"],
            "properties": {"anchor": {"type": "array"}, "rank": {"type": "integer", "minimum": 0},
                           "labels": {"type": "array"}}}},
    },
}

MATRIX_MAP_SCHEMA = {
    "type": "object",
    "required": ["source", "target", "blocks"],
    "properties": {
        "source": MATRIX_OBJECT_SCHEMA,
        "target": MATRIX_OBJECT_SCHEMA,
        "blocks": {"type": "array", "items": {
            "type": "object", "required": ["anchor", "block"],
            "properties": {"anchor": {"type": "array"},
                           "block": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}}}},
    },
}

EVAL_SCHEMA = {
    "type": "object",
    "required": ["map"],
    "properties": {
        "map": LABELED_MAP_SCHEMA,
        "inputs": {"type": "array", "items": {
            "type": "object", "required": ["edges", "value"],
            "properties": {"edges": {"type": "array", "items": {"type": "integer"}},
                           "value": {"type": "object"}}}},
        "output": {"type": "array", "items": {"type": "integer"}},
        "backend": {"enum": ["family", "matrix"]},
        "order": {"enum": ["ascending", "descending"]},
    },
}

SCHEMAS = {
    "base-object": BASE_OBJECT_SCHEMA,
    "base-map": BASE_MAP_SCHEMA,
    "graph": GRAPH_SCHEMA,
    "graph-map": GRAPH_MAP_SCHEMA,
    "labeled-graph": LABELED_GRAPH_SCHEMA,
    "labeled-map": LABELED_MAP_SCHEMA,
    "coloring": COLORING_SCHEMA,
    "labeled-product": LABELED_PRODUCT_SCHEMA,
    "family": FAMILY_SCHEMA,
    "matrix-object": MATRIX_OBJECT_SCHEMA,
    "matrix-map": MATRIX_MAP_SCHEMA,
    "eval": EVAL_SCHEMA,
}

DOT_STYLES = {
    "black": 'shape=circle, style=filled, fillcolor=black, width=0.2',
    "white": 'shape=circle, width=0.2',
    "gray": 'shape=circle, style=filled, fillcolor=gray70, width=0.2',
}


# =============================================================================
# 2. PARSING
# =============================================================================

def parse_text(text: str, kind: str) -> Dict:
    """Decode JSON text and validate it against the schema for `kind`."""
    if kind not in SCHEMAS:
        raise ParseError(f"unknown document kind {kind!r}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno)
    try:
        jsonschema.validate(data, SCHEMAS[kind])
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ParseError(f"{kind} document invalid at {where}: {e.message}", path=where)
    return data


def load_file(path: Union[str, Path], kind: str) -> Dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}")
    return parse_text(text, kind)


def _json_default(x: Any) -> Any:
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return repr(x)


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2, default=_json_default)


def from_json_value(x: Any) -> Hashable:
    """JSON arrays become tuples, recursively."""
    if isinstance(x, list):
        return tuple(from_json_value(y) for y in x)
    return x


def to_json_value(x: Any) -> Any:
    if isinstance(x, tuple):
        return [to_json_value(y) for y in x]
    return x


def element_key(x: Hashable) -> str:
    return json.dumps(to_json_value(x), separators=(",", ":"))


def _decoding(kind: str):
    """Turn lookup failures inside a decoder into ParseError."""
    def wrap(fn):
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except (KeyError, ValueError, TypeError, ShapeMismatch, BaseMismatch) as e:
                raise ParseError(f"{kind}: {e}")
        inner.__name__ = fn.__name__
        inner.__doc__ = fn.__doc__
        return inner
    return wrap


# =============================================================================
# 3. BASE DATA
# =============================================================================

def base_object_to_json(B: BaseObject) -> Dict:
    out = {"elems": [to_json_value(x) for x in B.elems]}
    if B.name:
        out["name"] = B.name
    return out


@_decoding("base object")
def base_object_from_json(data: Mapping) -> BaseObject:
    return BaseObject(tuple(from_json_value(x) for x in data["elems"]), name=data.get("name", ""))


def base_map_to_json(f: BaseMap, with_ends: bool = True) -> Dict:
    out = {"map": {element_key(x): to_json_value(y) for x, y in zip(f.source.elems, f.table)}}
    if with_ends:
        out["source"] = base_object_to_json(f.source)
        out["target"] = base_object_to_json(f.target)
    return out


@_decoding("base map")
def base_map_from_json(data: Mapping, source: Optional[BaseObject] = None,
                       target: Optional[BaseObject] = None) -> BaseMap:
    source = source or base_object_from_json(data["source"])
    target = target or base_object_from_json(data["target"])
    table = data["map"]
    return BaseMap(source, target, tuple(from_json_value(table[element_key(x)]) for x in source.elems))


def labeled_product_to_json(lp: LabeledProduct) -> Dict:
    return {"index": [to_json_value(t) for t in lp.index],
            "factors": [base_object_to_json(f) for f in lp.factors]}


@_decoding("labeled product")
def labeled_product_from_json(data: Mapping) -> LabeledProduct:
    index = [from_json_value(t) for t in data["index"]]
    factors = [base_object_from_json(f) for f in data["factors"]]
    return LabeledProduct.of(dict(zip(index, factors)))


# =============================================================================
# 4. GRAPHS
# =============================================================================

def graph_to_json(g: ColoredGraph) -> Dict:
    return {"vertices": [{"id": v, "color": c.value} for v, c in sorted(g.vertices.items())],
            "edges": [{"id": e, "ends": list(ends)} for e, ends in sorted(g.edges.items())]}


@_decoding("graph")
def graph_from_json(data: Mapping) -> ColoredGraph:
    return ColoredGraph.build({v["id"]: v["color"] for v in data["vertices"]},
                              {e["id"]: tuple(e["ends"]) for e in data["edges"]})


def _emap_to_json(emap: Mapping[int, Cell]) -> Dict:
    return {str(e): {c.kind: c.id} for e, c in sorted(emap.items())}


def _emap_from_json(data: Mapping) -> Dict[int, Cell]:
    return {int(e): Cell.edge(c["edge"]) if "edge" in c else Cell.vertex(c["vertex"]) for e, c in data.items()}


def graph_map_to_json(m: GraphMap) -> Dict:
    return {"source": graph_to_json(m.source), "target": graph_to_json(m.target),
            "vmap": {str(v): w for v, w in sorted(m.vmap.items())}, "emap": _emap_to_json(m.emap)}


@_decoding("graph map")
def graph_map_from_json(data: Mapping) -> GraphMap:
    return GraphMap(graph_from_json(data["source"]), graph_from_json(data["target"]),
                    {int(v): w for v, w in data["vmap"].items()}, _emap_from_json(data["emap"]))


def labeled_graph_to_json(G: LabeledGraph) -> Dict:
    out = graph_to_json(G.graph)
    out["edgeLabel"] = {str(e): base_object_to_json(B) for e, B in sorted(G.edge_label.items())}
    out["orient"] = {str(v): list(st) for v, st in sorted(G.orient.items())}
    out["vertexLabel"] = {str(v): base_map_to_json(f, with_ends=False) for v, f in sorted(G.vertex_label.items())}
    return out


@_decoding("labeled graph")
def labeled_graph_from_json(data: Mapping) -> LabeledGraph:
    g = graph_from_json(data)
    labels = {int(e): base_object_from_json(B) for e, B in data["edgeLabel"].items()}
    orient = {int(v): tuple(st) for v, st in data.get("orient", {}).items()}
    G = LabeledGraph.build(g, labels, orient)
    vertex_label = dict(G.vertex_label)
    for v, f in data.get("vertexLabel", {}).items():
        s, t = G.orient[int(v)]
        vertex_label[int(v)] = base_map_from_json(f, labels[s], labels[t])
    return LabeledGraph(G.graph, G.orient, G.edge_label, vertex_label)


def labeled_map_to_json(P: LabeledGraphMap) -> Dict:
    return {"source": labeled_graph_to_json(P.source), "target": labeled_graph_to_json(P.target),
            "vmap": {str(v): w for v, w in sorted(P.underlying.vmap.items())},
            "emap": _emap_to_json(P.underlying.emap),
            "iota": {str(E): base_map_to_json(f) for E, f in sorted(P.iota.items())}}


@_decoding("labeled map")
def labeled_map_from_json(data: Mapping) -> LabeledGraphMap:
    source = labeled_graph_from_json(data["source"])
    target = labeled_graph_from_json(data["target"])
    iota = {int(E): base_map_from_json(f) for E, f in data.get("iota", {}).items()}
    return labeled_map(source, target, {int(v): w for v, w in data["vmap"].items()},
                       _emap_from_json(data["emap"]), iota or None)


def coloring_to_json(c: Coloring) -> Dict:
    return {"colors": {str(v): col for v, col in c.key}}


@_decoding("coloring")
def coloring_from_json(data: Mapping, G: LabeledGraph) -> Coloring:
    """Unlisted vertices keep their all-white color."""
    return Coloring.of(G, {int(v): col for v, col in data["colors"].items()})


# =============================================================================
# 5. FIBER OBJECTS
# =============================================================================

def family_to_json(X: Family) -> Dict:
    return {"base": labeled_product_to_json(X.base),
            "elems": [{"id": to_json_value(k), "anchor": to_json_value(a)} for k, a in X.elements]}


@_decoding("family")
def family_from_json(data: Mapping) -> Family:
    base = labeled_product_from_json(data["base"])
    return Family.build(base, [(from_json_value(e["id"]), from_json_value(e["anchor"])) for e in data["elems"]])


def matrix_object_to_json(X: MatrixObject) -> Dict:
    return {"base": labeled_product_to_json(X.base),
            "ranks": [{"anchor": to_json_value(a), "rank": len(labels),
                       "labels": [to_json_value(l) for l in labels]}
                      for a, labels in zip(X.base.elements, X.basis) if labels]}


@_decoding("matrix object")
def matrix_object_from_json(data: Mapping) -> MatrixObject:
    base = labeled_product_from_json(data["base"])
    given = {}
    for r in data["ranks"]:
        labels = r.get("labels")
        labels = tuple(from_json_value(l) for l in labels) if labels is not None else tuple(range(r["rank"]))
        if len(labels) != r["rank"]:
            raise ValueError(f"rank {r['rank']} does not match {len(labels)} labels")
        given[from_json_value(r["anchor"])] = labels
    return MatrixObject(base, tuple(given.get(a, ()) for a in base.elements))


def matrix_map_to_json(phi: MatrixMap) -> Dict:
    return {"source": matrix_object_to_json(phi.source), "target": matrix_object_to_json(phi.target),
            "blocks": [{"anchor": to_json_value(a), "block": [[int(x) for x in row] for row in b.tolist()]}
                       for a, b in zip(phi.source.base.elements, phi.blocks) if b.size]}


@_decoding("matrix map")
def matrix_map_from_json(data: Mapping) -> MatrixMap:
    source = matrix_object_from_json(data["source"])
    target = matrix_object_from_json(data["target"])
    return m_from_blocks(source, target, {from_json_value(b["anchor"]): b["block"] for b in data["blocks"]})


FIBER_DECODERS = {"family": family_from_json, "matrix": matrix_object_from_json}
FIBER_ENCODERS = {"family": family_to_json, "matrix": matrix_object_to_json}


def fiber_from_json(data: Mapping, backend_name: str):
    kind = "family" if backend_name == "family" else "matrix-object"
    jsonschema_check(data, kind)
    return FIBER_DECODERS[backend_name](data)


def jsonschema_check(data: Any, kind: str) -> None:
    try:
        jsonschema.validate(data, SCHEMAS[kind])
    except jsonschema.ValidationError as e:
        raise ParseError(f"{kind} document invalid: {e.message}")


# =============================================================================
# 6. PLANS AND REPORTS
# =============================================================================

def eval_request(data: Mapping) -> Dict:
    """
    Evaluate a labeled map on the given fiber objects. Inputs are decoded with
    the requested backend and relabeled onto their edges; the result lives over
    indices 0..k-1 in the order of `output`.
    """
    jsonschema_check(data, "eval")
    backend_name = data.get("backend", "family")
    backend = get_backend(backend_name)
    P = labeled_map_from_json(data["map"])
    fig = Figure("eval", P, tuple(tuple(i["edges"]) for i in data.get("inputs", [])),
                 tuple(data.get("output", [])))
    inputs = [fiber_from_json(i["value"], backend_name) for i in data.get("inputs", [])]
    result = run_figure(fig, inputs, backend, data.get("order", "ascending"))
    return {"backend": backend_name, "result": FIBER_ENCODERS[backend_name](result),
            "summary": backend.summary(result)}


def plan_to_json(plan: OperationPlan) -> Dict:
    return {"steps": plan.describe(), "length": len(plan.steps)}


def error_to_json(e: ShadowcalcError) -> Dict:
    out = e.to_dict()
    if isinstance(e, ParseError):
        out["line"], out["column"] = e.line, e.column
    return out


# =============================================================================
# 7. DOT EXPORT
# =============================================================================

def _dot_label(B: BaseObject) -> str:
    return f"{B.name or 'B'}({len(B)})"


def graph_to_dot(G: Union[LabeledGraph, ColoredGraph], coloring: Optional[Coloring] = None,
                 name: str = "G") -> str:
    """Graphviz text: black filled, white open, gray shaded; edges carry id and label."""
    labeled = isinstance(G, LabeledGraph)
    g = G.graph if labeled else G
    lines = [f"graph {name} {{", '  node [label=""];']
    for v, c in sorted(g.vertices.items()):
        color = coloring[v].value if coloring is not None else c.value
        lines.append(f'  v{v} [{DOT_STYLES[color]}, xlabel="{v}"];')
    for e, (a, b) in sorted(g.edges.items()):
        text = f"e{e}" + (f": {_dot_label(G.label(e))}" if labeled and e in G.edge_label else "")
        lines.append(f'  v{a} -- v{b} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def constellation_to_dot(cut: Constellation, name: str = "Psi") -> str:
    """One cluster subgraph per star of the constellation."""
    g = cut.graph.graph
    lines = [f"graph {name} {{", '  node [label=""];']
    for u in cut.components:
        lines.append(f"  subgraph cluster_{u} {{")
        lines.append(f'    label="component {u}";')
        lines.append(f"    v{u} [{DOT_STYLES['black']}];")
        for e in cut.edges_of[u]:
            a, b = g.edges[e]
            leaf = b if a == u else a
            lines.append(f"    v{leaf} [{DOT_STYLES['white']}];")
            lines.append(f'    v{u} -- v{leaf} [label="e{e}: {_dot_label(cut.graph.label(e))}"];')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cardinality_table(values: Mapping[Hashable, Any], summary) -> List[Dict]:
    """Backend summaries of an assignment, one row per component."""
    return [{"component": to_json_value(u), **summary(X)} for u, X in sorted(values.items(), key=lambda p: repr(p[0]))]
