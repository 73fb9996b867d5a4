import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupoid_moduli.errors import StructuralError
from groupoid_moduli.surface import (
    CWSurface,
    bordered_cw,
    bordered_presentation,
    closed_presentation,
    genus_g_cw,
    h1_rank,
    invert_word,
    spanning_tree,
    sphere_cw,
    torus_grid,
)


def test_closed_presentations():
    p0 = closed_presentation(0)
    assert p0.generators == () and p0.relator == ()
    p1 = closed_presentation(1)
    assert p1.generators == ("a1", "b1")
    assert p1.relator == (("a1", 1), ("b1", 1), ("a1", -1), ("b1", -1))
    p2 = closed_presentation(2)
    assert p2.generators == ("a1", "b1", "a2", "b2")
    assert len(p2.relator) == 8


def test_bordered_presentations():
    assert bordered_presentation(0).boundary_word == ()
    p1 = bordered_presentation(1)
    assert p1.relator is None and p1.boundary_word == closed_presentation(1).relator
    assert bordered_presentation(2).boundary_word == closed_presentation(2).relator


def test_negative_genus_rejected():
    with pytest.raises(StructuralError):
        closed_presentation(-1)


def test_torus_grid_1_counts():
    c = torus_grid(1)
    assert (c.n_vertices, c.n_edges, len(c.faces)) == (1, 2, 1)
    assert c.euler_characteristic == 0
    # h(0,1) v(0,0) h(0,0)⁻¹ v(1,0)⁻¹ with one vertex: a b a⁻¹ b⁻¹
    assert c.faces[0] == ((0, 1), (1, 1), (0, -1), (1, -1))


def test_euler_characteristics():
    assert sphere_cw().euler_characteristic == 2
    assert genus_g_cw(2).euler_characteristic == -2
    for n in range(1, 5):
        assert torus_grid(n).euler_characteristic == 0
        assert torus_grid(n).genus == 1
    for g in range(4):
        assert genus_g_cw(g).genus == g


@pytest.mark.parametrize("genus", [0, 1, 2])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_bordered_models_match_their_presentation(genus, k):
    c = bordered_cw(genus, k)
    assert c.boundary_components == 1
    assert c.euler_characteristic == 1 - 2 * genus
    assert c.genus == genus
    assert len(c.boundary) == k
    assert c.base in c.boundary_vertices


def test_spanning_tree_examples():
    t1 = spanning_tree(torus_grid(1))
    assert t1.tree_edges == () and t1.loop_edges == (0, 1)
    t2 = spanning_tree(torus_grid(2))
    assert len(t2.tree_edges) == 3 and len(t2.loops) == 5
    ts = spanning_tree(sphere_cw())
    assert len(ts.loops) == 1
    assert h1_rank(sphere_cw()) == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5))
def test_spanning_tree_loop_count_and_homology(n):
    c = torus_grid(n)
    t = spanning_tree(c)
    assert len(t.tree_edges) == c.n_vertices - 1
    assert len(t.loops) == c.n_edges - c.n_vertices + 1
    assert h1_rank(c) == 2
    for _, word in t.loops:
        assert c.word_start(word) == c.base
        assert c.letter_ends(word[0])[1] == c.base


@pytest.mark.parametrize("genus", [0, 1, 2, 3])
def test_homology_rank_of_closed_models(genus):
    assert h1_rank(genus_g_cw(genus)) == 2 * genus
    assert h1_rank(bordered_cw(genus, 2)) == 2 * genus


def test_invert_word():
    w = ((0, 1), (1, -1))
    assert invert_word(w) == ((1, 1), (0, -1))
    assert invert_word(invert_word(w)) == w


def test_malformed_surfaces_are_rejected():
    with pytest.raises(StructuralError):
        CWSurface(1, ((0, 2),), ())
    with pytest.raises(StructuralError):
        # open face word on two vertices
        CWSurface(2, ((0, 1),), (((0, 1),),))
    with pytest.raises(StructuralError):
        spanning_tree(CWSurface(2, (), ()))


def test_surface_json_shape():
    js = bordered_cw(1, 2).to_json()
    assert {"vertices", "edges", "faces", "base", "boundary", "standard_loops", "boundary_loop"} <= set(js)
