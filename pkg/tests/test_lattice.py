import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupoid_moduli.errors import SizeLimitError, StructuralError
from groupoid_moduli.fingroupoid import action_groupoid, base_subgroupoid, group_as_groupoid, pair_groupoid
from groupoid_moduli.groups import cyclic_table, s3_table, symmetric_group
from groupoid_moduli.lattice import (
    GaugeElement,
    LatticeMorphism,
    apply_gauge,
    check_flatness,
    compose_gauge,
    enumerate_flat,
    gauge_orbits,
    holonomy,
    single_vertex_move,
    standard_holonomy,
)
from groupoid_moduli.surface import bordered_cw, genus_g_cw, sphere_cw, torus_grid

import oracles
from strategies import small_groupoids

Z2 = group_as_groupoid(cyclic_table(2))
S3 = group_as_groupoid(s3_table())
SWAP = action_groupoid(cyclic_table(2), [[0, 1], [1, 0]])


def brute_force_flat(c, g, sub=None):
    """Every anchored labelling, filtered by evaluating faces letter by letter."""
    out = []
    for X in itertools.product(g.objects, repeat=c.n_vertices):
        choices = [g.hom(X[u], X[v]) for u, v in c.edges]
        for E in itertools.product(*choices):
            ok = True
            for face in c.faces:
                val = None
                for e, s in reversed(face):
                    a = E[e] if s == 1 else g.inverse[E[e]]
                    val = a if val is None else g.compose(a, val)
                if val != g.identity[g.src[val]]:
                    ok = False
                    break
            if ok and sub is not None:
                ok = all(E[e] in sub.arrows for e in c.boundary) and all(
                    X[v] in sub.objects for v in c.boundary_vertices
                )
            if ok:
                out.append(LatticeMorphism(tuple(X), tuple(E)))
    return sorted(out)


def brute_force_orbits(c, g, fields, sub=None):
    """Orbits under whole gauge elements (all vertices at once)."""
    remaining = set(fields)
    count = 0
    bverts = c.boundary_vertices if sub is not None else frozenset()
    while remaining:
        start = remaining.pop()
        count += 1
        stack = [start]
        while stack:
            m = stack.pop()
            choices = [
                (sub.out_arrows(m.vertex_map[v]) if v in bverts else g.out_arrows(m.vertex_map[v]))
                for v in range(c.n_vertices)
            ]
            for phi in itertools.product(*choices):
                n = apply_gauge(c, g, m, GaugeElement(phi))
                if n in remaining:
                    remaining.discard(n)
                    stack.append(n)
    return count


def identity_field(c, g, x=0):
    return LatticeMorphism((x,) * c.n_vertices, (g.identity[x],) * c.n_edges)


# -- flatness -----------------------------------------------------------------


def test_identity_field_is_flat():
    for c in (sphere_cw(), torus_grid(2), genus_g_cw(2)):
        assert check_flatness(c, identity_field(c, S3), S3).ok


def test_abelian_commutator_is_flat():
    c = torus_grid(1)
    assert check_flatness(c, LatticeMorphism((0,), (1, 1)), Z2).ok


def test_non_commuting_pair_is_not_flat():
    elems, _ = symmetric_group(3)
    transposition = elems.index((1, 0, 2))
    three_cycle = elems.index((1, 2, 0))
    rep = check_flatness(torus_grid(1), LatticeMorphism((0,), (transposition, three_cycle)), S3)
    assert not rep.ok and rep.face_violations == [0]


def test_anchor_violation_is_reported():
    p = pair_groupoid(2)
    c = torus_grid(1)
    rep = check_flatness(c, LatticeMorphism((0,), (1, 0)), p)
    assert rep.anchor_violations == [0]


def test_shape_mismatch_is_structural():
    with pytest.raises(StructuralError):
        check_flatness(torus_grid(1), LatticeMorphism((0,), (0,)), Z2)


# -- gauge action --------------------------------------------------------------


def test_identity_gauge_is_trivial():
    c = torus_grid(2)
    m = enumerate_flat(c, S3)[100]
    assert apply_gauge(c, S3, m, GaugeElement((0,) * c.n_vertices)) == m


def test_constant_gauge_conjugates_every_edge():
    c = torus_grid(2)
    for m in enumerate_flat(c, S3)[::97]:
        for h in range(6):
            n = apply_gauge(c, S3, m, GaugeElement((h,) * c.n_vertices))
            assert n.edge_map == tuple(S3.conjugate(h, a) for a in m.edge_map)


@settings(max_examples=30, deadline=None)
@given(small_groupoids(), st.sampled_from([torus_grid(1), torus_grid(2), genus_g_cw(2), sphere_cw()]), st.data())
def test_gauge_action_preserves_flatness_and_is_an_action(g, c, data):
    fields = enumerate_flat(c, g, limit=10**6)
    m = data.draw(st.sampled_from(fields))

    def draw_gauge(field):
        return GaugeElement(tuple(data.draw(st.sampled_from(g.out_arrows(x))) for x in field.vertex_map))

    phi1 = draw_gauge(m)
    m1 = apply_gauge(c, g, m, phi1)
    assert check_flatness(c, m1, g).ok
    phi2 = draw_gauge(m1)
    m2 = apply_gauge(c, g, m1, phi2)
    assert apply_gauge(c, g, m, compose_gauge(g, phi2, phi1)) == m2
    # holonomy transforms by conjugation with the gauge arrow at the base
    x, vals = holonomy(c, g, m)
    y, vals1 = holonomy(c, g, m1)
    a = phi1.phi[c.base]
    assert y == g.tgt[a]
    assert vals1 == tuple(g.conjugate(a, v) for v in vals)


def test_single_vertex_move_equals_gauge_with_identities_elsewhere():
    c = torus_grid(2)
    g = pair_groupoid(2)
    for m in enumerate_flat(c, g)[:10]:
        for v in range(c.n_vertices):
            for a in g.out_arrows(m.vertex_map[v]):
                phi = [g.identity[x] for x in m.vertex_map]
                phi[v] = a
                assert single_vertex_move(c, g, m, v, a) == apply_gauge(c, g, m, GaugeElement(tuple(phi)))


# -- enumeration ---------------------------------------------------------------


def test_enumeration_examples():
    assert len(enumerate_flat(torus_grid(1), Z2)) == 4
    assert len(enumerate_flat(torus_grid(1), S3)) == oracles.commuting_pairs(oracles.sym(3)) == 18
    assert len(enumerate_flat(sphere_cw(), pair_groupoid(3))) == 3


@pytest.mark.parametrize("c", [sphere_cw(), torus_grid(1), torus_grid(2), genus_g_cw(2), bordered_cw(1, 2)],
                         ids=lambda c: c.name)
@pytest.mark.parametrize("name,g", [("Z2", Z2), ("S3", S3), ("pair2", pair_groupoid(2)), ("swap", SWAP)])
def test_enumeration_matches_brute_force(c, name, g):
    if name == "S3" and c.n_edges > 4:
        pytest.skip("brute force too large")
    sub = base_subgroupoid(g) if c.boundary else None
    assert enumerate_flat(c, g, sub=sub) == brute_force_flat(c, g, sub)


@pytest.mark.parametrize("threads", [1, 4])
def test_enumeration_is_independent_of_thread_count(threads):
    g = action_groupoid(cyclic_table(2), [[0, 1], [0, 1]])
    assert enumerate_flat(torus_grid(2), g, threads=threads) == enumerate_flat(torus_grid(2), g)


def test_gauge_fixed_enumeration_counts_loop_assignments():
    # with tree edges pinned to identities one field remains per (object, holonomy)
    for c in (torus_grid(2), genus_g_cw(2)):
        for g in (Z2, S3, pair_groupoid(3)):
            fixed = enumerate_flat(c, g, gauge_fixed=True)
            assert len(fixed) == len({holonomy(c, g, m) for m in enumerate_flat(c, g)})


def test_enumeration_limit():
    with pytest.raises(SizeLimitError):
        enumerate_flat(torus_grid(3), S3, limit=1000)


# -- orbits --------------------------------------------------------------------


def test_orbit_examples():
    assert len(gauge_orbits(torus_grid(1), pair_groupoid(3), enumerate_flat(torus_grid(1), pair_groupoid(3)))) == 1
    assert len(gauge_orbits(torus_grid(1), Z2, enumerate_flat(torus_grid(1), Z2))) == 4
    assert len(gauge_orbits(torus_grid(2), SWAP, enumerate_flat(torus_grid(2), SWAP))) == 1


@pytest.mark.parametrize("c", [sphere_cw(), torus_grid(1), torus_grid(2), bordered_cw(1, 2)], ids=lambda c: c.name)
@pytest.mark.parametrize("g", [Z2, S3, pair_groupoid(2), SWAP], ids=["Z2", "S3", "pair2", "swap"])
def test_orbits_match_whole_gauge_brute_force(c, g):
    sub = base_subgroupoid(g) if c.boundary else None
    fields = enumerate_flat(c, g, sub=sub)
    if len(fields) > 1000:
        pytest.skip("brute force too large")
    orbits = gauge_orbits(c, g, fields, sub=sub)
    assert len(orbits) == brute_force_orbits(c, g, fields, sub)
    assert sum(o.size for o in orbits) == len(fields)
    for o in orbits:
        assert o.representative == min(o.members)


def test_orbits_require_a_closed_field_set():
    fields = enumerate_flat(torus_grid(1), S3)
    with pytest.raises(ValueError):
        gauge_orbits(torus_grid(1), S3, fields[:5])


def test_standard_holonomy_on_one_vertex_model_reads_edges():
    c = torus_grid(1)
    assert standard_holonomy(c, Z2, LatticeMorphism((0,), (1, 0))) == (0, (1, 0))
    assert holonomy(c, Z2, identity_field(c, Z2)) == (0, (0, 0))


def test_standard_holonomy_product_is_boundary_value():
    from groupoid_moduli.lattice import word_value
    from groupoid_moduli.moduli import commutator_product

    for k in (1, 2, 3):
        c = bordered_cw(1, k)
        for m in enumerate_flat(c, S3, sub=base_subgroupoid(S3))[:50]:
            x, vals = standard_holonomy(c, S3, m)
            assert word_value(c, S3, m, c.boundary_loop, at=c.base) == commutator_product(S3, x, vals)
