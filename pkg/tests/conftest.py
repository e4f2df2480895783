import os

import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

from shadowcalc import generators as gen
from shadowcalc.base_finset import BaseMap, BaseObject, LabeledProduct
from shadowcalc.graph_core import path_graph
from shadowcalc.labeled_graphs import LabeledGraph

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))


@st.composite
def base_objects(draw, max_size=3, name="B"):
    n = draw(st.integers(1, max_size))
    return BaseObject(tuple(range(n)), name=name)


@st.composite
def base_maps(draw, source=None, target=None):
    source = source or draw(base_objects(name="A"))
    target = target or draw(base_objects(name="B"))
    table = draw(st.lists(st.sampled_from(target.elems), min_size=len(source), max_size=len(source)))
    return BaseMap(source, target, tuple(table))


@st.composite
def labeled_paths(draw, max_internal=4):
    """○ ... ○ with random internal colors and one label on every edge."""
    colors = draw(st.lists(st.sampled_from(["white", "black"]), min_size=1, max_size=max_internal))
    A = draw(base_objects(max_size=2, name="A"))
    g = path_graph(["white"] + colors + ["white"])
    return LabeledGraph.build(g, {e: A for e in g.edges})


seeds = st.integers(0, 10_000)


@pytest.fixture
def rng():
    return gen.make_rng(7)


@pytest.fixture
def two_point():
    return BaseObject((0, 1), name="B")


@pytest.fixture
def square_base(two_point):
    return LabeledProduct.of({0: two_point, 1: two_point})


@pytest.fixture
def black_path():
    """○100 e1 w101 e2 ●102 e3 w103 e4 ○104 over a two point set."""
    B = BaseObject((0, 1), name="B")
    g = path_graph(["white", "white", "black", "white", "white"])
    return LabeledGraph.build(g, {e: B for e in g.edges})
