import pytest
from hypothesis import given
from hypothesis import strategies as st

from shadowcalc import generators as gen
from shadowcalc.base_finset import BaseMap, BaseObject
from shadowcalc.bicategory import cover_at, quotient_cover
from shadowcalc.errors import NotInternalWhite
from shadowcalc.graph_core import circle_graph, factorize, path_graph
from shadowcalc.labeled_graphs import (LabeledGraph, collapse_blacks, compose_labeled, constellation_iso, cut_along,
                                       darkening, disjoint_union, identity_labeled, is_inert, maximal_cut,
                                       validate_labeled, validate_labeled_map)

from conftest import labeled_paths, seeds


def white_string(labels=None):
    """○100 e1 w101 e2 w102 e3 ○103."""
    B = BaseObject((0, 1), name="B")
    g = path_graph(["white", "white", "white", "white"])
    return LabeledGraph.build(g, labels or {1: B, 2: B, 3: B})


def test_build_fills_identity_labels(black_path):
    assert black_path.vertex_label[101].is_identity
    assert black_path.orient[101] == (1, 2)
    assert validate_labeled(black_path).valid


def test_label_type_mismatch_is_reported():
    A, B = BaseObject((0,), name="A"), BaseObject((0, 1), name="B")
    G = white_string({1: A, 2: B, 3: B})
    assert 101 not in G.vertex_label
    report = validate_labeled(G)
    assert report.codes() == ["MissingLabel"]
    bad = LabeledGraph(G.graph, G.orient, G.edge_label, {**G.vertex_label, 101: BaseMap.identity(B)})
    assert validate_labeled(bad).codes() == ["LabelTypeMismatch"]


def test_flipped_orientation_along_a_string():
    G = white_string()
    flipped = LabeledGraph(G.graph, {101: (1, 2), 102: (3, 2)}, G.edge_label, G.vertex_label)
    assert "ChainInconsistent" in validate_labeled(flipped).codes()


def test_darkening_needs_internal_whites(black_path):
    with pytest.raises(NotInternalWhite):
        darkening(black_path, [102])
    with pytest.raises(NotInternalWhite):
        darkening(black_path, [100])


def test_maximal_cut_caps_dangling_ends(black_path):
    psi = maximal_cut(black_path)
    assert psi.components == (102,)
    assert psi.edges_of == {102: (2, 3)}
    assert psi.graph.graph.edges == {2: (102, 105), 3: (102, 106)}
    assert psi.component_of_edge(3) == 102


def test_maximal_cut_merges_black_clusters():
    B = BaseObject((0,), name="1")
    g = path_graph(["white", "black", "black", "white"])
    psi = maximal_cut(LabeledGraph.build(g, {e: B for e in g.edges}))
    assert psi.components == (101,)
    assert psi.edges_of[101] == (1, 3)


def test_cut_along_caps_each_side(black_path):
    H = cut_along(black_path, {101})
    assert H.graph.edges[1] == (100, 105)
    assert H.graph.edges[2] == (102, 106)
    assert 101 not in H.graph.vertices
    assert validate_labeled(H).valid
    with pytest.raises(NotInternalWhite):
        cut_along(black_path, {102})


def test_darkening_next_to_black_is_inert(black_path):
    assert is_inert(darkening(black_path, [101]))
    assert is_inert(darkening(black_path, [101, 103]))
    assert constellation_iso(darkening(black_path, [101])) == {102: 101}


def test_darkening_between_whites_is_not_inert():
    assert not is_inert(darkening(white_string(), [101]))


def test_collapse_and_identity_are_inert():
    B = BaseObject((0, 1), name="B")
    g = path_graph(["white", "black", "black", "white"])
    G = LabeledGraph.build(g, {e: B for e in g.edges})
    assert is_inert(collapse_blacks(G))
    assert is_inert(identity_labeled(G))


def test_disjoint_union_shifts_second_graph(black_path):
    U = disjoint_union(black_path, black_path)
    assert len(U.graph.vertices) == 10
    assert U.orient[101 + 105] == (1 + 105, 2 + 105)
    assert validate_labeled(U).valid


@given(labeled_paths())
def test_identity_is_valid(G):
    assert validate_labeled_map(identity_labeled(G)).valid


@given(seeds)
def test_darkening_chains_compose(seed):
    rng = gen.make_rng(seed)
    G = gen.random_labeled_path(rng, 4, force_black=True)
    P1, P2, P3 = gen.random_darkening_chain(rng, G, 3)
    left = compose_labeled(compose_labeled(P1, P2), P3)
    right = compose_labeled(P1, compose_labeled(P2, P3))
    assert left.underlying == right.underlying
    assert validate_labeled_map(left).valid
    assert left.target == P3.target


def injective_covering_part(P):
    _, _, v = factorize(P.underlying)
    vimg, eimg = list(v.vmap.values()), [cell.id for cell in v.emap.values()]
    return len(set(vimg)) == len(vimg) and len(set(eimg)) == len(eimg)


def inert_by_constellations(P):
    return constellation_iso(P) is not None and injective_covering_part(P)


@given(seeds, st.integers(0, 5))
def test_random_inert_maps_match_constellations(seed, n_internal):
    rng = gen.make_rng(seed)
    P = gen.random_inert_map(rng, gen.random_labeled_path(rng, n_internal, black_share=0.5))
    assert is_inert(P)
    assert inert_by_constellations(P)


@given(seeds, st.integers(1, 6))
def test_random_darkenings_are_inert_iff_constellations_match(seed, n_internal):
    rng = gen.make_rng(seed)
    G = gen.random_labeled_path(rng, n_internal, black_share=0.4)
    (P,) = gen.random_darkening_chain(rng, G, 1, share=0.5)
    assert is_inert(P) == inert_by_constellations(P)


def test_two_fold_ring_cover_is_not_inert():
    B = BaseObject((0, 1), name="B")
    ring = circle_graph(["black", "white", "black", "white"])
    source = LabeledGraph.build(ring, {e: B for e in ring.edges})
    cover = quotient_cover(source, circle_graph(["black", "white"]), {100 + p: 100 + p % 2 for p in range(4)},
                           {e: (e - 1) % 2 + 1 for e in ring.edges})
    P = cover_at(cover, source, [])
    assert validate_labeled_map(P).valid
    assert not injective_covering_part(P)
    assert constellation_iso(P) is None
    assert not is_inert(P)
