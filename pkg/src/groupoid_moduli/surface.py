"""Combinatorial surfaces: fundamental-group presentations and CW models.

Words (face boundaries, loops) are tuples of letters ``(edge, sign)`` read as
groupoid products in the package-wide convention: the rightmost letter is
traversed first. A letter ``(e, +1)`` runs along edge ``e`` from its source to
its target, ``(e, -1)`` runs backwards. With this reading the torus face
``a b a⁻¹ b⁻¹`` evaluates literally to the commutator ``[a, b]`` of the
edge arrows.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import StructuralError

Letter = tuple[int, int]
Word = tuple[Letter, ...]


@dataclass(frozen=True)
class SurfacePresentation:
    genus: int
    boundary_components: int
    generators: tuple[str, ...]
    relator: tuple[tuple[str, int], ...] | None
    boundary_word: tuple[tuple[str, int], ...] | None

    @property
    def is_closed(self) -> bool:
        return self.boundary_components == 0


def _generator_names(genus: int) -> tuple[str, ...]:
    return tuple(name for i in range(1, genus + 1) for name in (f"a{i}", f"b{i}"))


def commutator_product(genus: int) -> tuple[tuple[str, int], ...]:
    """``[a1, b1] ... [ag, bg]`` with ``[a, b] = a b a⁻¹ b⁻¹``."""
    word = []
    for i in range(1, genus + 1):
        word += [(f"a{i}", 1), (f"b{i}", 1), (f"a{i}", -1), (f"b{i}", -1)]
    return tuple(word)


def closed_presentation(genus: int) -> SurfacePresentation:
    if genus < 0:
        raise StructuralError("genus must be non-negative")
    return SurfacePresentation(genus, 0, _generator_names(genus), commutator_product(genus), None)


def bordered_presentation(genus: int) -> SurfacePresentation:
    """Free group on ``2g`` generators; the boundary loop is the commutator product."""
    if genus < 0:
        raise StructuralError("genus must be non-negative")
    return SurfacePresentation(genus, 1, _generator_names(genus), None, commutator_product(genus))


@dataclass(frozen=True)
class CWSurface:
    """A connected 2-complex with oriented edges and face words.

    ``standard_loops`` (optional) are words at ``base`` representing
    ``a1, b1, ..., ag, bg`` so that the commutator product of their values is
    trivial for every flat field (closed case) or equals ``boundary_loop``
    (bordered case). ``boundary`` lists the edges of the single boundary
    cycle, empty for closed surfaces.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    faces: tuple[Word, ...]
    base: int = 0
    boundary: tuple[int, ...] = ()
    standard_loops: tuple[Word, ...] | None = None
    boundary_loop: Word | None = None
    name: str = field(default="cw", compare=False)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise StructuralError("a CW surface needs at least one vertex")
        for e, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise StructuralError(f"edge {e} has an endpoint out of range")
        if not 0 <= self.base < self.n_vertices:
            raise StructuralError("base vertex out of range")
        for e in self.boundary:
            if not 0 <= e < len(self.edges):
                raise StructuralError(f"boundary edge {e} out of range")
        for i, face in enumerate(self.faces):
            if not face:
                raise StructuralError(f"face {i} has an empty boundary word")
            self._check_word(face, f"face {i}")
        for i, loop in enumerate(self.standard_loops or ()):
            if loop:
                self._check_word(loop, f"standard loop {i}", at=self.base)
        if self.boundary_loop:
            self._check_word(self.boundary_loop, "boundary loop", at=self.base)

    def letter_ends(self, letter: Letter) -> tuple[int, int]:
        """``(source, target)`` of a signed edge."""
        e, sign = letter
        if not 0 <= e < len(self.edges) or sign not in (1, -1):
            raise StructuralError(f"bad letter {letter!r}")
        u, v = self.edges[e]
        return (u, v) if sign == 1 else (v, u)

    def _check_word(self, word: Word, what: str, at: int | None = None):
        for left, right in zip(word, word[1:]):
            if self.letter_ends(left)[0] != self.letter_ends(right)[1]:
                raise StructuralError(f"{what} is not an edge path at {left}, {right}")
        start = self.letter_ends(word[-1])[0]
        end = self.letter_ends(word[0])[1]
        if start != end:
            raise StructuralError(f"{what} is not closed")
        if at is not None and start != at:
            raise StructuralError(f"{what} is not based at vertex {at}")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.faces)

    @property
    def boundary_components(self) -> int:
        return 1 if self.boundary else 0

    @property
    def genus(self) -> int:
        twice = 2 - self.boundary_components - self.euler_characteristic
        if twice < 0 or twice % 2:
            raise StructuralError(f"Euler characteristic {self.euler_characteristic} fits no orientable genus")
        return twice // 2

    @property
    def boundary_vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.boundary for v in self.edges[e])

    def word_start(self, word: Word) -> int:
        return self.letter_ends(word[-1])[0]

    def to_json(self) -> dict:
        out = {
            "vertices": self.n_vertices,
            "edges": [list(e) for e in self.edges],
            "faces": [[list(l) for l in f] for f in self.faces],
            "base": self.base,
        }
        if self.boundary:
            out["boundary"] = list(self.boundary)
        if self.standard_loops is not None:
            out["standard_loops"] = [[list(l) for l in w] for w in self.standard_loops]
        if self.boundary_loop is not None:
            out["boundary_loop"] = [list(l) for l in self.boundary_loop]
        return out


def invert_word(word: Sequence[Letter]) -> Word:
    return tuple((e, -s) for e, s in reversed(word))


def _commutator_letters(edge_pairs) -> list[Letter]:
    out: list[Letter] = []
    for a, b in edge_pairs:
        out += [(a, 1), (b, 1), (a, -1), (b, -1)]
    return out


def sphere_cw() -> CWSurface:
    """One vertex, one loop edge, two faces bounding it from either side."""
    return CWSurface(1, ((0, 0),), (((0, 1),), ((0, -1),)), standard_loops=(), name="sphere")


def torus_grid(n: int) -> CWSurface:
    """``n x n`` square grid on the torus.

    Vertex ``(i, j)`` has index ``i + n*j``; the horizontal edge leaving it
    has index ``2*(i + n*j)`` and the vertical one ``2*(i + n*j) + 1``.
    """
    if n < 1:
        raise StructuralError("torus_grid needs n >= 1")

    def vid(i, j):
        return (i % n) + n * (j % n)

    edges = []
    for j in range(n):
        for i in range(n):
            edges.append((vid(i, j), vid(i + 1, j)))
            edges.append((vid(i, j), vid(i, j + 1)))

    def h(i, j):
        return 2 * vid(i, j)

    def v(i, j):
        return 2 * vid(i, j) + 1

    faces = tuple(
        ((h(i, j + 1), 1), (v(i, j), 1), (h(i, j), -1), (v(i + 1, j), -1))
        for j in range(n)
        for i in range(n)
    )
    a = tuple((h(i, 0), 1) for i in reversed(range(n)))
    b = tuple((v(0, j), 1) for j in reversed(range(n)))
    return CWSurface(n * n, tuple(edges), faces, standard_loops=(a, b), name=f"torus_grid({n})")


def genus_g_cw(genus: int) -> CWSurface:
    """One vertex, ``2g`` loop edges ``a_i = 2(i-1)``, ``b_i = 2i - 1`` and one ``4g``-gon.

    Genus 0 falls back to :func:`sphere_cw`.
    """
    if genus < 0:
        raise StructuralError("genus must be non-negative")
    if genus == 0:
        return sphere_cw()
    pairs = [(2 * i, 2 * i + 1) for i in range(genus)]
    face = tuple(_commutator_letters(pairs))
    loops = tuple(((e, 1),) for e in range(2 * genus))
    return CWSurface(1, tuple((0, 0) for _ in range(2 * genus)), (face,), standard_loops=loops, name=f"genus_g_cw({genus})")


def bordered_cw(genus: int, boundary_vertices: int = 1) -> CWSurface:
    """Genus ``g`` surface with one boundary circle subdivided into ``k`` edges.

    Edges ``0 .. 2g-1`` are the loops ``a_i, b_i`` at vertex 0; edge
    ``2g + i`` is the boundary edge ``i -> i+1 (mod k)``. The single face
    reads ``[a1,b1]...[ag,bg] · ∂⁻¹`` where ``∂`` runs once around the
    boundary starting at vertex 0.
    """
    if genus < 0 or boundary_vertices < 1:
        raise StructuralError("need genus >= 0 and at least one boundary vertex")
    k = boundary_vertices
    edges = [(0, 0)] * (2 * genus) + [(i, (i + 1) % k) for i in range(k)]
    cs = [2 * genus + i for i in range(k)]
    pairs = [(2 * i, 2 * i + 1) for i in range(genus)]
    boundary_loop = tuple((c, 1) for c in reversed(cs))
    face = tuple(_commutator_letters(pairs)) + invert_word(boundary_loop)
    loops = tuple(((e, 1),) for e in range(2 * genus))
    return CWSurface(
        k,
        tuple(edges),
        (face,),
        boundary=tuple(cs),
        standard_loops=loops,
        boundary_loop=boundary_loop,
        name=f"bordered_cw({genus},{k})",
    )


@dataclass(frozen=True)
class SpanningTree:
    base: int
    tree_edges: tuple[int, ...]
    paths: tuple[Word, ...]
    """``paths[v]`` is a word from the base to ``v`` along the tree."""
    loops: tuple[tuple[int, Word], ...]
    """``(edge, word)`` for each non-tree edge: the loop at the base through it."""

    @property
    def loop_edges(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.loops)


def spanning_tree(c: CWSurface) -> SpanningTree:
    """BFS tree from the base vertex, scanning edges in index order.

    Each non-tree edge ``e: u -> v`` yields the loop
    ``path(v)⁻¹ · e · path(u)``.
    """
    incident: list[list[tuple[int, int]]] = [[] for _ in range(c.n_vertices)]
    for e, (u, v) in enumerate(c.edges):
        incident[u].append((e, 1))
        incident[v].append((e, -1))
    for lst in incident:
        lst.sort()
    paths: list[Word | None] = [None] * c.n_vertices
    paths[c.base] = ()
    tree: list[int] = []
    queue = deque([c.base])
    while queue:
        u = queue.popleft()
        for e, sign in incident[u]:
            w = c.letter_ends((e, sign))[1]
            if paths[w] is None:
                paths[w] = ((e, sign),) + paths[u]
                tree.append(e)
                queue.append(w)
    if any(p is None for p in paths):
        raise StructuralError("CW complex is disconnected")
    tree_set = set(tree)
    loops = tuple(
        (e, invert_word(paths[v]) + ((e, 1),) + paths[u])
        for e, (u, v) in enumerate(c.edges)
        if e not in tree_set
    )
    return SpanningTree(c.base, tuple(sorted(tree)), tuple(paths), loops)


def _rank(rows: list[list[int]]) -> int:
    m = [[Fraction(x) for x in row] for row in rows if any(row)]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                factor = m[r][col] / m[rank][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def h1_rank(c: CWSurface, tree: SpanningTree | None = None) -> int:
    """Rank of the abelianized loop group modulo face relations."""
    tree = tree or spanning_tree(c)
    cols = {e: i for i, e in enumerate(tree.loop_edges)}
    rows = []
    for face in c.faces:
        row = [0] * len(cols)
        for e, sign in face:
            if e in cols:
                row[cols[e]] += sign
        rows.append(row)
    return len(cols) - _rank(rows)
