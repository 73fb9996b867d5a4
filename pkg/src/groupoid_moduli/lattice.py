"""Groupoid-valued lattice fields on a CW surface and their gauge orbits.

A field assigns an object to every vertex and an arrow to every oriented
edge ``u -> v`` with ``s = X(u)`` and ``t = X(v)``. It is flat when every face
word evaluates to an identity. The gauge groupoid acts pointwise: a gauge
element ``phi`` with ``s(phi(v)) = X(v)`` sends ``X(v)`` to ``t(phi(v))`` and
the arrow on ``u -> v`` to ``phi(v) · arrow · phi(u)⁻¹``.

Gauge orbits are found by union-find over single-vertex moves. Any gauge
element factors as a product of moves supported at one vertex each (the
moves at distinct vertices commute), so these moves generate the whole
pointwise action and the orbits coincide with those of the full gauge
groupoid, which is never materialised.

For bordered surfaces an optional subgroupoid imposes boundary conditions:
boundary vertices map into its objects, boundary edges into its arrows, and
gauge moves at boundary vertices are restricted to its arrows.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import SizeLimitError, StructuralError
from .fingroupoid import UNDEFINED, FiniteGroupoid, Subgroupoid, leaf_index
from .surface import CWSurface, SpanningTree, Word, spanning_tree

DEFAULT_LIMIT = 10**8


@dataclass(frozen=True, order=True)
class LatticeMorphism:
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]

    def to_json(self) -> dict:
        return {"vertex_map": list(self.vertex_map), "edge_map": list(self.edge_map)}


@dataclass(frozen=True)
class GaugeElement:
    phi: tuple[int, ...]


@dataclass
class FlatnessReport:
    anchor_violations: list[int] = field(default_factory=list)
    face_violations: list[int] = field(default_factory=list)
    boundary_violations: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.anchor_violations or self.face_violations or self.boundary_violations)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "anchor_violations": self.anchor_violations,
            "face_violations": self.face_violations,
            "boundary_violations": self.boundary_violations,
        }


def _letter_arrow(g: FiniteGroupoid, m: LatticeMorphism, letter) -> int:
    e, sign = letter
    a = m.edge_map[e]
    return a if sign == 1 else g.inverse[a]


def word_value(c: CWSurface, g: FiniteGroupoid, m: LatticeMorphism, word: Word, at: int | None = None) -> int:
    """Arrow obtained by composing a word's edge arrows (rightmost first).

    The empty word needs ``at`` and evaluates to the identity there.
    """
    if not word:
        if at is None:
            raise ValueError("empty word needs a base vertex")
        return g.identity[m.vertex_map[at]]
    return g.product(*(_letter_arrow(g, m, l) for l in word))


def _check_shapes(c: CWSurface, g: FiniteGroupoid, m: LatticeMorphism):
    if len(m.vertex_map) != c.n_vertices or len(m.edge_map) != c.n_edges:
        raise StructuralError("field does not match the surface's vertex/edge counts")
    if any(not 0 <= x < g.n_objects for x in m.vertex_map):
        raise StructuralError("vertex_map has an object out of range")
    if any(not 0 <= a < g.n_arrows for a in m.edge_map):
        raise StructuralError("edge_map has an arrow out of range")


def check_flatness(c: CWSurface, m: LatticeMorphism, g: FiniteGroupoid, sub: Subgroupoid | None = None) -> FlatnessReport:
    _check_shapes(c, g, m)
    report = FlatnessReport()
    for e, (u, v) in enumerate(c.edges):
        a = m.edge_map[e]
        if g.src[a] != m.vertex_map[u] or g.tgt[a] != m.vertex_map[v]:
            report.anchor_violations.append(e)
    if sub is not None:
        for e in c.boundary:
            if m.edge_map[e] not in sub.arrows:
                report.boundary_violations.append(e)
        for v in sorted(c.boundary_vertices):
            if m.vertex_map[v] not in sub.objects:
                report.boundary_violations.append(-1 - v)
    if report.anchor_violations:
        return report
    for i, face in enumerate(c.faces):
        val = word_value(c, g, m, face)
        if not g.is_identity(val):
            report.face_violations.append(i)
    return report


def apply_gauge(c: CWSurface, g: FiniteGroupoid, m: LatticeMorphism, phi: GaugeElement) -> LatticeMorphism:
    if len(phi.phi) != c.n_vertices:
        raise StructuralError("gauge element needs one arrow per vertex")
    for v, a in enumerate(phi.phi):
        if g.src[a] != m.vertex_map[v]:
            raise ValueError(f"gauge arrow at vertex {v} is not anchored at the field's object")
    verts = tuple(g.tgt[a] for a in phi.phi)
    edges = tuple(
        g.product(phi.phi[v], m.edge_map[e], g.inverse[phi.phi[u]]) for e, (u, v) in enumerate(c.edges)
    )
    return LatticeMorphism(verts, edges)


def compose_gauge(g: FiniteGroupoid, phi2: GaugeElement, phi1: GaugeElement) -> GaugeElement:
    """Pointwise ``phi2 · phi1`` (``phi1`` acts first)."""
    return GaugeElement(tuple(g.compose(b, a) for b, a in zip(phi2.phi, phi1.phi)))


# -- enumeration ---------------------------------------------------------------


@dataclass
class _Step:
    edge: int
    tail: int
    head: int
    tree_child: int | None = None  # vertex first reached through this edge
    forced: tuple | None = None  # (face, position) solving this edge from a face
    check_faces: tuple[int, ...] = ()


def _plan(c: CWSurface, tree: SpanningTree) -> list[_Step]:
    """Tree edges first (parents before children), then non-tree edges
    chosen greedily to close faces as early as possible."""
    steps: list[_Step] = []
    assigned: set[int] = set()
    by_depth = sorted(range(c.n_vertices), key=lambda v: (len(tree.paths[v]), v))
    for v in by_depth:
        if v == tree.base:
            continue
        e = tree.paths[v][0][0]
        u, w = c.edges[e]
        steps.append(_Step(e, u, w, tree_child=v))
        assigned.add(e)
    face_edges = [set(e for e, _ in f) for f in c.faces]
    remaining = [e for e in range(c.n_edges) if e not in assigned]
    while remaining:
        def closes(e):
            return sum(1 for fe in face_edges if e in fe and fe - assigned <= {e})

        e = max(remaining, key=lambda e: (closes(e), -e))
        remaining.remove(e)
        u, w = c.edges[e]
        steps.append(_Step(e, u, w))
        assigned.add(e)
    done: set[int] = set()
    closed: set[int] = set()
    for step in steps:
        done.add(step.edge)
        new = [i for i, fe in enumerate(face_edges) if i not in closed and fe <= done]
        closed.update(new)
        step.check_faces = tuple(new)
        if step.tree_child is None:
            for i in new:
                positions = [p for p, (e, _) in enumerate(c.faces[i]) if e == step.edge]
                if len(positions) == 1:
                    step.forced = (i, positions[0])
                    break
    return steps


def _size_estimate(g: FiniteGroupoid, steps: list[_Step], gauge_fixed: bool) -> int:
    branching = max((len(g.out_arrows(x)) for x in g.objects), default=0)
    est = g.n_objects
    for step in steps:
        if step.forced is not None or (gauge_fixed and step.tree_child is not None):
            continue
        est *= max(branching, 1)
    return est


class _Search:
    def __init__(self, c, g, steps, sub, gauge_fixed):
        self.c, self.g, self.steps, self.sub = c, g, steps, sub
        self.gauge_fixed = gauge_fixed
        self.boundary_edges = frozenset(c.boundary) if sub is not None else frozenset()
        self.boundary_vertices = c.boundary_vertices if sub is not None else frozenset()

    def vertex_ok(self, v, x):
        return v not in self.boundary_vertices or x in self.sub.objects

    def edge_ok(self, e, a):
        return e not in self.boundary_edges or a in self.sub.arrows

    def candidates(self, step, X):
        g = self.g
        xu, xv = X[step.tail], X[step.head]
        if self.gauge_fixed and step.tree_child is not None:
            known = xu if xu != -1 else xv
            return (g.identity[known],)
        if xu != -1:
            out = g.out_arrows(xu)
            return out if xv == -1 else tuple(a for a in out if g.tgt[a] == xv)
        return g.in_arrows(xv)

    def face_ok(self, face, E):
        g = self.g
        val = UNDEFINED
        for e, sign in reversed(face):
            a = E[e] if sign == 1 else g.inverse[E[e]]
            val = a if val == UNDEFINED else g.try_compose(a, val)
            if val == UNDEFINED:
                return False
        return g.is_identity(val)

    def forced_arrow(self, face_idx, pos, E):
        g = self.g
        face = self.c.faces[face_idx]
        letters = [E[e] if s == 1 else g.inverse[E[e]] for e, s in face]
        left, right = letters[:pos], letters[pos + 1:]
        try:
            y = None
            if right:
                y = g.inverse[g.product(*right)]
            if left:
                linv = g.inverse[g.product(*left)]
                y = linv if y is None else g.compose(linv, y)
        except ValueError:
            return UNDEFINED
        if y is None:  # single-letter face: the edge must be an identity
            return UNDEFINED
        return y if face[pos][1] == 1 else g.inverse[y]

    def run(self, X, E, k, out):
        if k == len(self.steps):
            out.append(LatticeMorphism(tuple(X), tuple(E)))
            return
        step = self.steps[k]
        g = self.g
        if step.forced is not None:
            fi, pos = step.forced
            a = self.forced_arrow(fi, pos, E)
            if a == UNDEFINED:
                cands = self.candidates(step, X)
            else:
                ok = g.src[a] == X[step.tail] and g.tgt[a] == X[step.head]
                cands = (a,) if ok else ()
        else:
            cands = self.candidates(step, X)
        child = step.tree_child
        for a in cands:
            if not self.edge_ok(step.edge, a):
                continue
            if child is not None:
                x = g.tgt[a] if child == step.head else g.src[a]
                if not self.vertex_ok(child, x):
                    continue
                X[child] = x
            E[step.edge] = a
            if all(self.face_ok(self.c.faces[i], E) for i in step.check_faces):
                self.run(X, E, k + 1, out)
            E[step.edge] = -1
            if child is not None:
                X[child] = -1


def enumerate_flat(
    c: CWSurface,
    g: FiniteGroupoid,
    sub: Subgroupoid | None = None,
    gauge_fixed: bool = False,
    limit: int = DEFAULT_LIMIT,
    threads: int = 1,
) -> list[LatticeMorphism]:
    """All flat fields, sorted lexicographically.

    With ``gauge_fixed`` every spanning-tree edge carries an identity, which
    leaves one field per (object, loop assignment) instead of one per gauge
    copy. ``sub`` imposes boundary conditions on bordered surfaces.
    """
    tree = spanning_tree(c)
    steps = _plan(c, tree)
    est = _size_estimate(g, steps, gauge_fixed)
    if est > limit:
        raise SizeLimitError(f"enumeration bound {est} exceeds limit {limit}")
    search = _Search(c, g, steps, sub, gauge_fixed)

    roots = [x for x in g.objects if search.vertex_ok(c.base, x)]
    tasks = []
    for x in roots:
        X = [-1] * c.n_vertices
        X[c.base] = x
        tasks.append(X)

    def solve(X0):
        out: list[LatticeMorphism] = []
        search.run(list(X0), [-1] * c.n_edges, 0, out)
        return out

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(solve, tasks))
    else:
        parts = [solve(t) for t in tasks]
    return sorted(m for part in parts for m in part)


# -- gauge orbits ----------------------------------------------------------------


@dataclass(frozen=True)
class GaugeOrbit:
    representative: LatticeMorphism
    members: tuple[LatticeMorphism, ...]
    leaf: int

    @property
    def size(self) -> int:
        return len(self.members)


def single_vertex_move(c: CWSurface, g: FiniteGroupoid, m: LatticeMorphism, v: int, a: int) -> LatticeMorphism:
    """Gauge by ``a`` at ``v`` (``s(a) = X(v)``) and identities elsewhere."""
    ainv = g.inverse[a]
    X = list(m.vertex_map)
    X[v] = g.tgt[a]
    E = list(m.edge_map)
    for e, (u, w) in enumerate(c.edges):
        if u == v and w == v:
            E[e] = g.product(a, E[e], ainv)
        elif w == v:
            E[e] = g.compose(a, E[e])
        elif u == v:
            E[e] = g.compose(E[e], ainv)
    return LatticeMorphism(tuple(X), tuple(E))


def gauge_orbits(
    c: CWSurface,
    g: FiniteGroupoid,
    fields: list[LatticeMorphism],
    sub: Subgroupoid | None = None,
) -> list[GaugeOrbit]:
    """Partition a gauge-closed field set into orbits.

    Representatives are the lexicographically least members; orbits are
    sorted by representative. ``leaf`` is the leaf index (of ``g``) of the
    base vertex's object.
    """
    index = {m: i for i, m in enumerate(fields)}
    parent = list(range(len(fields)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    boundary = c.boundary_vertices if sub is not None else frozenset()
    for i, m in enumerate(fields):
        for v in range(c.n_vertices):
            movers = sub.out_arrows(m.vertex_map[v]) if v in boundary else g.out_arrows(m.vertex_map[v])
            for a in movers:
                if g.is_identity(a):
                    continue
                j = index.get(single_vertex_move(c, g, m, v, a))
                if j is None:
                    raise ValueError("field set is not closed under gauge moves")
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[LatticeMorphism]] = {}
    for i, m in enumerate(fields):
        groups.setdefault(find(i), []).append(m)
    leaf_of = leaf_index(g)
    orbits = []
    for members in groups.values():
        members.sort()
        rep = members[0]
        orbits.append(GaugeOrbit(rep, tuple(members), leaf_of[rep.vertex_map[c.base]]))
    orbits.sort(key=lambda o: o.representative)
    return orbits


# -- holonomy --------------------------------------------------------------------


def holonomy(c: CWSurface, g: FiniteGroupoid, m: LatticeMorphism, tree: SpanningTree | None = None) -> tuple[int, tuple[int, ...]]:
    """Base object and the values of the spanning-tree loop generators."""
    tree = tree or spanning_tree(c)
    x = m.vertex_map[tree.base]
    return x, tuple(word_value(c, g, m, w, at=tree.base) for _, w in tree.loops)


def standard_holonomy(c: CWSurface, g: FiniteGroupoid, m: LatticeMorphism) -> tuple[int, tuple[int, ...]]:
    """Base object and the values of ``a1, b1, ..., ag, bg``."""
    if c.standard_loops is None:
        raise StructuralError("surface has no standard loop words")
    x = m.vertex_map[c.base]
    return x, tuple(word_value(c, g, m, w, at=c.base) for w in c.standard_loops)
