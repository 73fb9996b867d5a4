"""Holonomy-side moduli: isotropy representations modulo adjoint action.

Closed genus-``g`` surface: tuples ``(z1, w1, ..., zg, wg)`` in the isotropy
group at some object ``x`` with ``[z1,w1]...[zg,wg] = id(x)``, modulo
simultaneous conjugation by every arrow of the groupoid leaving ``x`` (which
moves the base object around its leaf).

One boundary circle with a boundary subgroupoid ``H``: free tuples at
``x`` in ``obj(H)`` whose commutator product lies in the isotropy of ``H`` at
``x``, modulo conjugation by arrows of ``H`` only, grouped by leaves of ``H``.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import NotASubgroupoid, SizeLimitError, StructuralError, VerificationError
from .fingroupoid import FiniteGroupoid, Subgroupoid, double_coset, leaves
from .lattice import DEFAULT_LIMIT, enumerate_flat, gauge_orbits, standard_holonomy, word_value
from .surface import CWSurface

DEFAULT_REP_LIMIT = 10**7


@dataclass(frozen=True, order=True)
class FlatRep:
    base: int
    values: tuple[int, ...]
    boundary: bool = False

    def to_json(self) -> dict:
        return {"base": self.base, "values": list(self.values)}


@dataclass(frozen=True)
class ModuliClass:
    representative: FlatRep
    orbit_size: int
    leaf: int

    def to_json(self) -> dict:
        return {"representative": self.representative.to_json(), "orbit_size": self.orbit_size}


@dataclass
class LeafModuli:
    leaf: int
    objects: tuple[int, ...]
    rep_count: int
    classes: list[ModuliClass]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def to_json(self) -> dict:
        return {
            "leaf": self.leaf,
            "objects": list(self.objects),
            "rep_count": self.rep_count,
            "class_count": self.class_count,
            "representatives": [c.to_json() for c in self.classes],
        }


@dataclass
class ModuliResult:
    genus: int
    leaves: list[LeafModuli]
    class_of: dict[FlatRep, FlatRep] = field(repr=False)
    """Every enumerated representation -> its class representative."""

    @property
    def classes(self) -> list[ModuliClass]:
        return [c for leaf in self.leaves for c in leaf.classes]

    @property
    def class_count(self) -> int:
        return sum(l.class_count for l in self.leaves)

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "class_count": self.class_count,
            "leaves": [l.to_json() for l in self.leaves],
        }


def commutator_product(g: FiniteGroupoid, x: int, values: Sequence[int]) -> int:
    """``[z1,w1]...[zg,wg]`` with ``[z,w] = z w z⁻¹ w⁻¹``; ``id(x)`` for genus 0."""
    out = g.identity[x]
    inv = g.inverse
    for i in range(0, len(values), 2):
        z, w = values[i], values[i + 1]
        out = g.product(out, z, w, inv[z], inv[w])
    return out


def _reps_at(g: FiniteGroupoid, x: int, genus: int, accept: Callable[[int], bool], limit: int) -> list[FlatRep]:
    iso = g.isotropy_arrows(x)
    if len(iso) ** (2 * genus) > limit:
        raise SizeLimitError(f"{len(iso)}^{2 * genus} tuples at object {x} exceed the limit {limit}")
    return [
        FlatRep(x, values)
        for values in itertools.product(iso, repeat=2 * genus)
        if accept(commutator_product(g, x, values))
    ]


def _quotient(
    g: FiniteGroupoid,
    reps: list[FlatRep],
    movers: Callable[[int], Sequence[int]],
    leaf: int,
) -> tuple[list[ModuliClass], dict[FlatRep, FlatRep]]:
    index = {r: i for i, r in enumerate(reps)}
    parent = list(range(len(reps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, r in enumerate(reps):
        for gamma in movers(r.base):
            if g.is_identity(gamma):
                continue
            moved = FlatRep(g.tgt[gamma], tuple(g.conjugate(gamma, z) for z in r.values), r.boundary)
            j = index.get(moved)
            if j is None:
                raise ValueError("representation set is not closed under conjugation")
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[FlatRep]] = {}
    for i, r in enumerate(reps):
        groups.setdefault(find(i), []).append(r)
    classes = []
    class_of = {}
    for members in groups.values():
        rep = min(members)
        classes.append(ModuliClass(rep, len(members), leaf))
        for r in members:
            class_of[r] = rep
    classes.sort(key=lambda c: c.representative)
    return classes, class_of


def _run(jobs, threads):
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda f: f(), jobs))
    return [f() for f in jobs]


def moduli_closed(g: FiniteGroupoid, genus: int, limit: int = DEFAULT_REP_LIMIT, threads: int = 1) -> ModuliResult:
    """Generalized flat connections on a closed genus-``g`` surface, per leaf."""
    if genus < 0:
        raise StructuralError("genus must be non-negative")
    leaf_list = leaves(g)

    def job(i, objs):
        def run():
            reps = [r for x in objs for r in _reps_at(g, x, genus, g.is_identity, limit)]
            classes, class_of = _quotient(g, reps, g.out_arrows, i)
            return LeafModuli(i, objs, len(reps), classes), class_of
        return run

    results = _run([job(i, objs) for i, objs in enumerate(leaf_list)], threads)
    class_of: dict[FlatRep, FlatRep] = {}
    for _, co in results:
        class_of.update(co)
    return ModuliResult(genus, [lm for lm, _ in results], class_of)


def moduli_open(
    g: FiniteGroupoid,
    genus: int,
    sub: Subgroupoid,
    limit: int = DEFAULT_REP_LIMIT,
    threads: int = 1,
) -> ModuliResult:
    """One boundary circle with boundary holonomy constrained to ``sub``.

    Leaves are those of ``sub``; the adjoint action uses arrows of ``sub``.
    """
    if genus < 0:
        raise StructuralError("genus must be non-negative")
    if sub.parent is not g and sub.parent.to_json() != g.to_json():
        raise NotASubgroupoid("subgroupoid belongs to a different groupoid")
    leaf_list = sub.leaves()

    def job(i, objs):
        def run():
            reps = []
            for x in objs:
                allowed = set(sub.isotropy_arrows(x))
                reps += [FlatRep(r.base, r.values, True) for r in _reps_at(g, x, genus, allowed.__contains__, limit)]
            classes, class_of = _quotient(g, reps, sub.out_arrows, i)
            return LeafModuli(i, objs, len(reps), classes), class_of
        return run

    results = _run([job(i, objs) for i, objs in enumerate(leaf_list)], threads)
    class_of: dict[FlatRep, FlatRep] = {}
    for _, co in results:
        class_of.update(co)
    return ModuliResult(genus, [lm for lm, _ in results], class_of)


def moduli_interval(g: FiniteGroupoid, sub0: Subgroupoid, sub1: Subgroupoid):
    """Interval moduli with boundary subgroupoids at the two ends.

    This is the double-coset space ``sub1 \\ t⁻¹(sub1) ∩ s⁻¹(sub0) / sub0``;
    with identities-only boundaries it is the arrow set itself.
    """
    return double_coset(g, sub0, sub1)


def count_morphisms(g: FiniteGroupoid, genus: int, leaf: int | Sequence[int], limit: int = DEFAULT_REP_LIMIT) -> int:
    """Number of tuples with trivial commutator product, summed over a leaf's objects.

    This equals the number of flat fields produced by a gauge-fixed lattice
    enumeration whose base vertex lands in the leaf, on any CW model of the
    closed genus-``g`` surface.
    """
    objs = leaves(g)[leaf] if isinstance(leaf, int) else tuple(leaf)
    return sum(len(_reps_at(g, x, genus, g.is_identity, limit)) for x in objs)


# -- lattice versus holonomy cross-check ----------------------------------------


@dataclass
class CompareReport:
    surface: str
    genus: int
    bordered: bool
    leaves: list[dict]
    lattice_field_count: int
    lattice_orbit_count: int
    holonomy_class_count: int
    bijection: list[dict] | None
    problems: list[str]

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {
            "surface": self.surface,
            "genus": self.genus,
            "bordered": self.bordered,
            "ok": self.ok,
            "lattice_field_count": self.lattice_field_count,
            "lattice_orbit_count": self.lattice_orbit_count,
            "holonomy_class_count": self.holonomy_class_count,
            "leaves": self.leaves,
            "bijection": self.bijection,
            "problems": self.problems,
        }


def compare_lattice_vs_holonomy(
    c: CWSurface,
    g: FiniteGroupoid,
    sub: Subgroupoid | None = None,
    limit: int = DEFAULT_LIMIT,
    threads: int = 1,
    strict: bool = True,
) -> CompareReport:
    """Lattice gauge orbits versus holonomy classes, leaf by leaf.

    Both sides are computed independently. When the surface carries standard
    loop words, every lattice orbit is sent to the class of its standard
    holonomy; the map must be constant on orbits and bijective. With
    ``strict`` any mismatch raises :class:`VerificationError` carrying the
    report.
    """
    bordered = bool(c.boundary)
    genus = c.genus
    if bordered:
        if sub is None:
            raise StructuralError("a bordered surface needs a boundary subgroupoid")
        if c.base not in c.boundary_vertices:
            raise StructuralError("the base vertex must lie on the boundary")
        holo = moduli_open(g, genus, sub, threads=threads)
        leaf_list = sub.leaves()
    else:
        holo = moduli_closed(g, genus, threads=threads)
        leaf_list = leaves(g)
    leaf_of = {x: i for i, objs in enumerate(leaf_list) for x in objs}

    fields = enumerate_flat(c, g, sub=sub if bordered else None, limit=limit, threads=threads)
    orbits = gauge_orbits(c, g, fields, sub=sub if bordered else None)

    problems: list[str] = []
    per_leaf = []
    for i, objs in enumerate(leaf_list):
        n_lat = sum(1 for o in orbits if leaf_of.get(o.representative.vertex_map[c.base]) == i)
        n_hol = holo.leaves[i].class_count
        per_leaf.append({"leaf": i, "objects": list(objs), "lattice_orbits": n_lat, "holonomy_classes": n_hol})
        if n_lat != n_hol:
            problems.append(f"leaf {i}: {n_lat} lattice orbits vs {n_hol} holonomy classes")
    if len(orbits) != holo.class_count:
        problems.append(f"total: {len(orbits)} lattice orbits vs {holo.class_count} holonomy classes")

    bijection = None
    if c.standard_loops is not None:
        bijection = []
        hit: dict[FlatRep, int] = {}
        for k, orbit in enumerate(orbits):
            targets = set()
            for m in orbit.members:
                x, values = standard_holonomy(c, g, m)
                rep = FlatRep(x, values, bordered)
                if bordered:
                    bval = word_value(c, g, m, c.boundary_loop or (), at=c.base)
                    if bval != commutator_product(g, x, values):
                        problems.append(f"orbit {k}: boundary holonomy differs from the commutator product")
                cls = holo.class_of.get(rep)
                if cls is None:
                    problems.append(f"orbit {k}: holonomy {rep.to_json()} is not an enumerated representation")
                    continue
                targets.add(cls)
            if len(targets) != 1:
                problems.append(f"orbit {k}: holonomy class is not gauge invariant ({len(targets)} classes)")
                continue
            cls = targets.pop()
            if cls in hit:
                problems.append(f"orbits {hit[cls]} and {k} share a holonomy class")
            hit[cls] = k
            bijection.append({"lattice": orbit.representative.to_json(), "holonomy": cls.to_json()})
        missing = [cl.representative for cl in holo.classes if cl.representative not in hit]
        for rep in missing:
            problems.append(f"holonomy class {rep.to_json()} has no lattice orbit")

    report = CompareReport(
        surface=c.name,
        genus=genus,
        bordered=bordered,
        leaves=per_leaf,
        lattice_field_count=len(fields),
        lattice_orbit_count=len(orbits),
        holonomy_class_count=holo.class_count,
        bijection=bijection,
        problems=problems,
    )
    if strict and problems:
        raise VerificationError("lattice and holonomy moduli disagree: " + "; ".join(problems[:3]), report)
    return report
