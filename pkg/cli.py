"""
Command line for the string diagram engine. Documents come in as JSON files,
results go to stdout (or --out) as sorted-key UTF-8 JSON, errors go to stderr.

Exit codes: 0 success, 1 engine error, 2 invalid input, 3 unexpected verdict.
"""
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click

from shadowcalc import serialization as io
from shadowcalc.colorings import gray_edges, validate_coloring
from shadowcalc.config import BACKENDS, Settings, load_settings
from shadowcalc.d_diagram import check_rotation_bc
from shadowcalc.errors import ParseError, ShadowcalcError, ValidationReport
from shadowcalc.graph_core import GraphMap, factorize, validate_graph, validate_map
from shadowcalc.labeled_graphs import cut_along, labeled_map, maximal_cut, validate_labeled, validate_labeled_map
from shadowcalc.plans import plan_from
from shadowcalc.report import write_pdf

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

EXIT_OK, EXIT_ENGINE, EXIT_INVALID, EXIT_VERDICT = 0, 1, 2, 3
VALIDATE_KINDS = ("graph", "graph-map", "labeled-graph", "labeled-map", "coloring")
DOT_KINDS = ("graph", "labeled-graph", "constellation")
ORDERS = ("ascending", "descending")


class Context:
    def __init__(self, settings: Settings, out: Optional[str]):
        self.settings = settings
        self.out = out


def setup_logging(level: str) -> None:
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def emit(ctx: Context, data: Any) -> None:
    text = io.dumps(data)
    if ctx.out:
        Path(ctx.out).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


def fail(e: ShadowcalcError) -> None:
    click.echo(io.dumps({"error": io.error_to_json(e)}), err=True)
    sys.exit(EXIT_INVALID if isinstance(e, ParseError) else EXIT_ENGINE)


def guarded(fn):
    """Engine errors become a JSON error on stderr and the matching exit code."""
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ShadowcalcError as e:
            logging.error(f"{fn.__name__} failed: {e}")
            fail(e)
    inner.__name__ = fn.__name__
    inner.__doc__ = fn.__doc__
    return inner


# =============================================================================
# 2. COMMAND GROUP
# =============================================================================

@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="shadowcalc.toml or shadowcalc.yaml; found in the working directory if omitted.")
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write JSON here instead of stdout.")
@click.option("--seed", type=int, default=None, help="Base seed; SHADOWCALC_SEED takes precedence.")
@click.option("--backend", type=click.Choice(BACKENDS), default=None)
@click.pass_context
def cli(ctx, config_path, verbose, out, seed, backend):
    """String diagram calculus for symmetric monoidal bifibrations."""
    level = {0: None, 1: "INFO"}.get(verbose, "DEBUG")
    try:
        settings = load_settings(config_path, {"seed": seed, "backend": backend, "log_level": level})
    except ShadowcalcError as e:
        setup_logging("WARNING")
        fail(e)
    setup_logging(settings.log_level)
    ctx.obj = Context(settings, out)


# =============================================================================
# 3. GRAPH COMMANDS
# =============================================================================

def validation_report(kind: str, path: str, graph_path: Optional[str]) -> ValidationReport:
    if kind == "graph":
        return validate_graph(io.graph_from_json(io.load_file(path, "graph")))
    if kind == "graph-map":
        return validate_map(io.graph_map_from_json(io.load_file(path, "graph-map")))
    if kind == "labeled-graph":
        return validate_labeled(io.labeled_graph_from_json(io.load_file(path, "labeled-graph")))
    if kind == "labeled-map":
        data = io.load_file(path, "labeled-map")
        source = io.labeled_graph_from_json(data["source"])
        target = io.labeled_graph_from_json(data["target"])
        m = io.graph_map_from_json({"source": data["source"], "target": data["target"],
                                    "vmap": data["vmap"], "emap": data["emap"]})
        report = validate_map(m)
        if not report.valid:
            return report
        iota = {int(E): io.base_map_from_json(f) for E, f in data.get("iota", {}).items()}
        return validate_labeled_map(labeled_map(source, target, m.vmap, m.emap, iota or None))
    if graph_path is None:
        raise ParseError("validating a coloring needs --graph")
    G = io.labeled_graph_from_json(io.load_file(graph_path, "labeled-graph"))
    return validate_coloring(io.coloring_from_json(io.load_file(path, "coloring"), G))


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(VALIDATE_KINDS), required=True)
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Labeled graph a coloring lives on.")
@click.pass_obj
@guarded
def validate(ctx: Context, path, kind, graph_path):
    """List every violated invariant of a document."""
    report = validation_report(kind, path, graph_path)
    emit(ctx, report.to_dict())
    if not report.valid:
        sys.exit(EXIT_INVALID)


@cli.command("factorize")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@guarded
def factorize_cmd(ctx: Context, path):
    """Split a graph map into darkening, collapse and embedding."""
    m: GraphMap = io.graph_map_from_json(io.load_file(path, "graph-map"))
    d, c, v = factorize(m)
    emit(ctx, {"darkening": io.graph_map_to_json(d), "collapse": io.graph_map_to_json(c),
               "embedding": io.graph_map_to_json(v)})


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--cut-set", "cut_set", default=None,
              help="Comma separated internal whites; the maximal cut if omitted.")
@click.pass_obj
@guarded
def cut(ctx: Context, path, cut_set):
    """Cut a labeled graph along internal whites."""
    G = io.labeled_graph_from_json(io.load_file(path, "labeled-graph"))
    if cut_set is not None:
        try:
            T = [int(v) for v in cut_set.split(",") if v.strip()]
        except ValueError:
            raise ParseError(f"--cut-set must list vertex ids, got {cut_set!r}")
        emit(ctx, io.labeled_graph_to_json(cut_along(G, T)))
        return
    psi = maximal_cut(G)
    emit(ctx, {"graph": io.labeled_graph_to_json(psi.graph), "components": list(psi.components),
               "edgesOf": {str(u): list(es) for u, es in psi.edges_of.items()}})


@cli.command("gray-edges")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--coloring", "coloring_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.pass_obj
@guarded
def gray_edges_cmd(ctx: Context, path, coloring_path):
    """The gray edges of a coloring, ordered by representative edge."""
    G = io.labeled_graph_from_json(io.load_file(path, "labeled-graph"))
    c = io.coloring_from_json(io.load_file(coloring_path, "coloring"), G)
    report = validate_coloring(c)
    if not report.valid:
        emit(ctx, report.to_dict())
        sys.exit(EXIT_INVALID)
    emit(ctx, {"grayEdges": [{"rep": s.rep, "edges": list(s.edges), "interior": list(s.interior),
                              "ends": list(s.ends) if s.ends is not None else None}
                             for s in gray_edges(c).edges]})


@cli.command("export-dot")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(DOT_KINDS), default="labeled-graph")
@click.option("--coloring", "coloring_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_obj
@guarded
def export_dot(ctx: Context, path, kind, coloring_path):
    """Graphviz text for a graph, a colored labeled graph or its maximal cut."""
    if kind == "graph":
        text = io.graph_to_dot(io.graph_from_json(io.load_file(path, "graph")))
    else:
        G = io.labeled_graph_from_json(io.load_file(path, "labeled-graph"))
        if kind == "constellation":
            text = io.constellation_to_dot(maximal_cut(G))
        else:
            c = io.coloring_from_json(io.load_file(coloring_path, "coloring"), G) if coloring_path else None
            text = io.graph_to_dot(G, c)
    if ctx.out:
        Path(ctx.out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


# =============================================================================
# 4. EVALUATION COMMANDS
# =============================================================================

@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--order", type=click.Choice(ORDERS), default="ascending", help="Order of darkening steps.")
@click.pass_obj
@guarded
def plan(ctx: Context, path, order):
    """The operation plan of a labeled map."""
    P = io.labeled_map_from_json(io.load_file(path, "labeled-map"))
    emit(ctx, io.plan_to_json(plan_from(P, order)))


@cli.command("eval")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@guarded
def eval_cmd(ctx: Context, path):
    """Evaluate a labeled map on fiber objects given in an eval request."""
    data = io.load_file(path, "eval")
    if "backend" not in data and ctx.settings.backend:
        data = {**data, "backend": ctx.settings.backend}
    emit(ctx, io.eval_request(data))


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--expect", type=click.Choice(["coherent", "incoherent"]), default="coherent",
              help="Verdict that counts as success.")
@click.pass_obj
@guarded
def check(ctx: Context, path, expect):
    """Check every one-white one-black flip square of a labeled graph for Beck-Chevalley."""
    G = io.labeled_graph_from_json(io.load_file(path, "labeled-graph"))
    report = check_rotation_bc(G)
    emit(ctx, {"coherent": report.valid, **report.to_dict()})
    if report.valid != (expect == "coherent"):
        sys.exit(EXIT_VERDICT)


# =============================================================================
# 5. SUITES
# =============================================================================

@cli.command()
@click.option("--suite", "name", default="all", show_default=True,
              help="A suite name, a prefix such as shadow-random, a page, or all.")
@click.option("--instances", type=int, default=None)
@click.option("--jobs", type=int, default=None, help="Pages run in parallel when above 1.")
@click.option("--seed", type=int, default=None, help="Overrides the group --seed; SHADOWCALC_SEED still wins.")
@click.option("--backend", type=click.Choice(BACKENDS), default=None, help="Overrides the group --backend.")
@click.option("--pdf", "pdf_path", type=click.Path(dir_okay=False), default=None, help="Also write a PDF report.")
@click.pass_obj
@guarded
def suite(ctx: Context, name, instances, jobs, seed, backend, pdf_path):
    """Run coherence suites; exit 3 when any verdict differs from its expectation."""
    # imported here so the graph commands do not load every page
    from SUITE_analysis import run_suites

    overrides: Dict[str, Any] = {"instances": instances, "jobs": jobs, "seed": seed, "backend": backend}
    settings = load_settings(None, {**ctx.settings.to_dict(), **{k: v for k, v in overrides.items() if v is not None}})
    reports = run_suites(name, settings)
    if pdf_path:
        write_pdf(reports, pdf_path, settings.to_dict())
    emit(ctx, {"settings": settings.to_dict(), "reports": [r.to_dict() for r in reports],
               "passed": all(r.passed for r in reports)})
    if not all(r.passed for r in reports):
        sys.exit(EXIT_VERDICT)


if __name__ == "__main__":
    cli()
