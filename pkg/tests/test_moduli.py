import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupoid_moduli.errors import NotASubgroupoid, SizeLimitError, VerificationError
from groupoid_moduli.fingroupoid import (
    action_groupoid,
    base_subgroupoid,
    disjoint_union,
    full_subgroupoid,
    generated_subgroupoid,
    group_as_groupoid,
    leaves,
    pair_groupoid,
)
from groupoid_moduli.groups import coset_action, cyclic_table, s3_table, symmetric_group
from groupoid_moduli.moduli import (
    commutator_product,
    compare_lattice_vs_holonomy,
    count_morphisms,
    moduli_closed,
    moduli_interval,
    moduli_open,
)
from groupoid_moduli.surface import CWSurface, bordered_cw, genus_g_cw, sphere_cw, torus_grid

import oracles
from strategies import action_groupoids, small_groupoids

Z2 = group_as_groupoid(cyclic_table(2))
Z3 = group_as_groupoid(cyclic_table(3))
S3 = group_as_groupoid(s3_table())
TRIV = action_groupoid(cyclic_table(2), [[0, 1], [0, 1]])


def test_commutator_product_of_the_empty_tuple_is_the_identity():
    assert commutator_product(pair_groupoid(3), 2, ()) == pair_groupoid(3).identity[2]


def test_closed_examples():
    for g in (Z2, S3, pair_groupoid(3), TRIV):
        assert moduli_closed(g, 0).class_count == len(leaves(g))
    for n in (1, 2, 3, 4):
        for genus in (1, 2):
            assert moduli_closed(pair_groupoid(n), genus).class_count == 1
    assert moduli_closed(Z3, 1).class_count == 9


@pytest.mark.parametrize("genus", [1, 2])
@pytest.mark.parametrize("n", [3, 4])
def test_closed_classes_match_conjugation_orbits_in_symmetric_groups(n, genus):
    if n == 4 and genus == 2:
        pytest.skip("24^4 tuples is slow in pure Python")
    G = oracles.sym(n)
    reps = oracles.surface_reps(G, genus)
    g = group_as_groupoid(symmetric_group(n)[1])
    r = moduli_closed(g, genus)
    assert r.leaves[0].rep_count == len(reps)
    assert r.class_count == oracles.conjugation_orbits(G, reps)


def test_count_morphisms_examples():
    assert count_morphisms(Z2, 1, 0) == 4
    assert count_morphisms(S3, 1, 0) == oracles.commuting_pairs(oracles.sym(3)) == 18
    for g in (S3, pair_groupoid(3), TRIV):
        for i, objs in enumerate(leaves(g)):
            assert count_morphisms(g, 0, i) == len(objs)


@settings(max_examples=40, deadline=None)
@given(action_groupoids(max_degree=4), st.integers(0, 1))
def test_per_leaf_classes_come_from_one_stabilizer(data, genus):
    g, elems, table = data
    r = moduli_closed(g, genus)
    for lm in r.leaves:
        x = lm.objects[0]
        stab = [elems[i] for i in oracles.stabilizer(elems, x)]
        degree = len(elems[0])
        G = oracles.RawGroup(tuple(stab), lambda p, q: tuple(p[q[i]] for i in range(degree)), tuple(range(degree)))
        reps = oracles.surface_reps(G, genus)
        assert lm.class_count == oracles.conjugation_orbits(G, reps)
        assert lm.rep_count == len(reps) * len(lm.objects)


@settings(max_examples=30, deadline=None)
@given(small_groupoids())
def test_class_sizes_sum_to_representation_count(g):
    r = moduli_closed(g, 1)
    for lm in r.leaves:
        assert sum(c.orbit_size for c in lm.classes) == lm.rep_count
        for c in lm.classes:
            assert r.class_of[c.representative] == c.representative


def test_open_examples():
    assert moduli_open(Z2, 1, base_subgroupoid(Z2)).class_count == 4
    # a one-holed torus has free fundamental group, so with the whole group on
    # the boundary every pair is allowed
    G = oracles.sym(3)
    every = oracles.surface_reps(G, 1, allowed=lambda v: True)
    assert moduli_open(S3, 1, full_subgroupoid(S3)).class_count == oracles.conjugation_orbits(G, every) == 11
    # pinning the boundary holonomy to the identity recovers the closed torus
    closed = oracles.surface_reps(G, 1)
    assert moduli_open(S3, 1, base_subgroupoid(S3)).class_count == oracles.conjugation_orbits(G, closed, by=[G.identity])


def test_disk_moduli_are_the_leaves_of_the_boundary_subgroupoid():
    cases = [
        (pair_groupoid(3), base_subgroupoid(pair_groupoid(3))),
        (pair_groupoid(3), full_subgroupoid(pair_groupoid(3))),
        (S3, generated_subgroupoid(S3, [1])),
        (TRIV, full_subgroupoid(TRIV)),
    ]
    for g, sub in cases:
        assert moduli_open(g, 0, sub).class_count == len(sub.leaves())


def test_open_moduli_with_full_boundary_counts_all_pairs_up_to_conjugation():
    G = oracles.sym(3)
    every = oracles.surface_reps(G, 1, allowed=lambda v: True)
    assert len(every) == 36
    assert moduli_open(S3, 1, full_subgroupoid(S3)).class_count == oracles.conjugation_orbits(G, every)


def test_open_moduli_with_a_subgroup_boundary():
    elems, _ = symmetric_group(3)
    G = oracles.sym(3)
    sub = generated_subgroupoid(S3, [1])
    H = [elems[a] for a in sorted(sub.arrows)]
    reps = oracles.surface_reps(G, 1, allowed=lambda v: v in H)
    assert moduli_open(S3, 1, sub).class_count == oracles.conjugation_orbits(G, reps, by=H)


def test_open_moduli_rejects_foreign_subgroupoid():
    with pytest.raises(NotASubgroupoid):
        moduli_open(S3, 1, base_subgroupoid(Z2))


def test_interval_examples():
    for n in (2, 3, 4):
        p = pair_groupoid(n)
        assert len(moduli_interval(p, base_subgroupoid(p), base_subgroupoid(p))) == n * n
    z2 = generated_subgroupoid(S3, [1])
    assert len(moduli_interval(S3, z2, z2)) == 2
    for g in (S3, pair_groupoid(3), TRIV, disjoint_union(Z2, pair_groupoid(2))):
        assert len(moduli_interval(g, full_subgroupoid(g), full_subgroupoid(g))) == len(leaves(g))


def test_representation_limit():
    with pytest.raises(SizeLimitError):
        moduli_closed(S3, 3, limit=1000)


@pytest.mark.parametrize("threads", [1, 3])
def test_threads_do_not_change_results(threads):
    g = disjoint_union(S3, pair_groupoid(2), TRIV)
    assert moduli_closed(g, 1, threads=threads).to_json() == moduli_closed(g, 1).to_json()


# -- lattice versus holonomy ---------------------------------------------------


def test_compare_examples():
    r = compare_lattice_vs_holonomy(torus_grid(2), Z2)
    assert r.lattice_orbit_count == r.holonomy_class_count == 4
    r = compare_lattice_vs_holonomy(torus_grid(1), pair_groupoid(3))
    assert r.lattice_orbit_count == r.holonomy_class_count == 1
    r = compare_lattice_vs_holonomy(sphere_cw(), TRIV)
    assert r.lattice_orbit_count == r.holonomy_class_count == 2


def test_compare_reports_explicit_bijection():
    r = compare_lattice_vs_holonomy(torus_grid(2), S3)
    assert r.ok and len(r.bijection) == 8
    assert len({str(b["holonomy"]) for b in r.bijection}) == 8


def test_morita_equivalent_groupoids_have_equal_moduli():
    # S3 acting on S3/Z2 is transitive with stabilizer Z2
    elems, table = symmetric_group(3)
    g = action_groupoid(table, coset_action(table, [0, 1]))
    for genus in (0, 1, 2):
        assert moduli_closed(g, genus).class_count == moduli_closed(Z2, genus).class_count
    r = compare_lattice_vs_holonomy(torus_grid(2), g)
    assert r.ok and r.holonomy_class_count == 4


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize(
    "name,g,sub",
    [
        ("Z2-base", Z2, base_subgroupoid(Z2)),
        ("S3-Z2", S3, generated_subgroupoid(S3, [1])),
        ("S3-full", S3, full_subgroupoid(S3)),
        ("pair3-base", pair_groupoid(3), base_subgroupoid(pair_groupoid(3))),
        ("pair3-full", pair_groupoid(3), full_subgroupoid(pair_groupoid(3))),
        ("triv-full", TRIV, full_subgroupoid(TRIV)),
    ],
)
def test_bordered_compare(k, name, g, sub):
    for genus in (0, 1):
        r = compare_lattice_vs_holonomy(bordered_cw(genus, k), g, sub=sub)
        assert r.ok, r.problems


def test_compare_without_standard_loops_counts_only():
    c = torus_grid(1)
    bare = CWSurface(c.n_vertices, c.edges, c.faces, name="bare torus")
    r = compare_lattice_vs_holonomy(bare, S3)
    assert r.ok and r.bijection is None


def test_compare_detects_a_wrong_model():
    # a torus complex whose face does not close up: edges a, b with face a a b⁻¹ b⁻¹
    broken = CWSurface(1, ((0, 0), (0, 0)), (((0, 1), (0, 1), (1, -1), (1, -1)),),
                       standard_loops=(((0, 1),), ((1, 1),)), name="wrong")
    with pytest.raises(VerificationError) as exc:
        compare_lattice_vs_holonomy(broken, S3)
    assert not exc.value.report.ok
