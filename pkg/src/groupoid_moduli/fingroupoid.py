"""Finite groupoids stored as dense composition tables.

Composition convention: ``compose(g, h)`` is "g after h". It is defined
exactly when ``t(h) == s(g)``, and then ``s(gh) = s(h)``, ``t(gh) = t(g)``.
Every product helper in the package (``product``, face words, holonomies)
reads left to right in this order, so ``product(a, b, c)`` applies ``c``
first.

Arrow ids are the dense integers ``0 .. n_arrows - 1``; wherever a quotient is
reported, the representative is the least id (or lexicographically least
tuple).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .errors import AxiomError, NotASubgroupoid, SizeLimitError, StructuralError

UNDEFINED = -1
MAX_WITNESSES = 8


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def axioms(self) -> list[str]:
        seen: list[str] = []
        for v in self.violations:
            if v.axiom not in seen:
                seen.append(v.axiom)
        return seen

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"axiom": v.axiom, "witness": list(v.witness)} for v in self.violations],
        }


class FiniteGroupoid:
    """Arrows over ``range(n_objects)`` with a partial composition table.

    The constructor performs structural checks only (ranges, shapes, a
    single-valued table). Axioms are checked by :func:`validate`; the
    constructors in this module always return validated groupoids.
    """

    def __init__(
        self,
        n_objects: int,
        src: Sequence[int],
        tgt: Sequence[int],
        identity: Sequence[int],
        inverse: Sequence[int],
        compose: Iterable[tuple[int, int, int]],
        labels: Sequence[Hashable] | None = None,
    ):
        n_objects = int(n_objects)
        if n_objects < 0:
            raise StructuralError("n_objects must be non-negative")
        src = tuple(int(x) for x in src)
        tgt = tuple(int(x) for x in tgt)
        n = len(src)
        if len(tgt) != n:
            raise StructuralError("src and tgt must have one entry per arrow")
        for a, (x, y) in enumerate(zip(src, tgt)):
            if not (0 <= x < n_objects and 0 <= y < n_objects):
                raise StructuralError(f"arrow {a} has endpoint outside the object range")
        identity = tuple(int(a) for a in identity)
        if len(identity) != n_objects:
            raise StructuralError("identity must have one entry per object")
        inverse = tuple(int(a) for a in inverse)
        if len(inverse) != n:
            raise StructuralError("inverse must have one entry per arrow")
        for a in identity + inverse:
            if not 0 <= a < n:
                raise StructuralError(f"arrow id {a} out of range")
        table = [UNDEFINED] * (n * n)
        for triple in compose:
            if len(triple) != 3:
                raise StructuralError(f"compose entry {triple!r} is not a triple")
            g, h, gh = (int(v) for v in triple)
            if not (0 <= g < n and 0 <= h < n and 0 <= gh < n):
                raise StructuralError(f"compose entry {(g, h, gh)} has an arrow id out of range")
            k = g * n + h
            if table[k] != UNDEFINED and table[k] != gh:
                raise StructuralError(f"compose is not single valued at {(g, h)}")
            table[k] = gh
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise StructuralError("labels must have one entry per arrow")

        self.n_objects = n_objects
        self.src = src
        self.tgt = tgt
        self.identity = identity
        self.inverse = inverse
        self.labels = labels
        self._table = table
        self._report: ValidationReport | None = None
        self._out = tuple(tuple(a for a in range(n) if src[a] == x) for x in range(n_objects))
        self._in = tuple(tuple(a for a in range(n) if tgt[a] == x) for x in range(n_objects))

    @property
    def n_arrows(self) -> int:
        return len(self.src)

    @property
    def arrows(self) -> range:
        return range(len(self.src))

    @property
    def objects(self) -> range:
        return range(self.n_objects)

    def s(self, a: int) -> int:
        return self.src[a]

    def t(self, a: int) -> int:
        return self.tgt[a]

    def id(self, x: int) -> int:
        return self.identity[x]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def is_identity(self, a: int) -> bool:
        return self.identity[self.src[a]] == a

    def try_compose(self, g: int, h: int) -> int:
        """``g after h`` or ``UNDEFINED``."""
        return self._table[g * len(self.src) + h]

    def compose(self, g: int, h: int) -> int:
        gh = self._table[g * len(self.src) + h]
        if gh == UNDEFINED:
            raise ValueError(f"arrows {g} and {h} are not composable (t({h}) != s({g}))")
        return gh

    def product(self, *arrows: int) -> int:
        """Left-to-right product; the rightmost arrow is applied first."""
        if not arrows:
            raise ValueError("empty product has no base object")
        out = arrows[-1]
        for g in reversed(arrows[:-1]):
            out = self.compose(g, out)
        return out

    def conjugate(self, a: int, h: int) -> int:
        """``a h a^-1``; requires ``s(a) = s(h) = t(h)``."""
        return self.product(a, h, self.inverse[a])

    def out_arrows(self, x: int) -> tuple[int, ...]:
        """Arrows with source ``x``, in id order."""
        return self._out[x]

    def in_arrows(self, x: int) -> tuple[int, ...]:
        return self._in[x]

    def hom(self, x: int, y: int) -> tuple[int, ...]:
        return tuple(a for a in self._out[x] if self.tgt[a] == y)

    def isotropy_arrows(self, x: int) -> tuple[int, ...]:
        return self.hom(x, x)

    def composable_pairs(self):
        n = len(self.src)
        for g in range(n):
            for h in self._in[self.src[g]]:
                yield g, h

    def to_json(self) -> dict:
        n = len(self.src)
        triples = [
            [g, h, self._table[g * n + h]]
            for g in range(n)
            for h in range(n)
            if self._table[g * n + h] != UNDEFINED
        ]
        return {
            "objects": self.n_objects,
            "arrows": [{"id": a, "src": self.src[a], "tgt": self.tgt[a]} for a in range(n)],
            "identity": list(self.identity),
            "inverse": list(self.inverse),
            "compose": triples,
        }

    def __repr__(self) -> str:
        return f"FiniteGroupoid(n_objects={self.n_objects}, n_arrows={self.n_arrows})"


def validate(g: FiniteGroupoid) -> ValidationReport:
    """Check the groupoid axioms; the result is cached on ``g``."""
    if g._report is not None:
        return g._report
    report = ValidationReport()
    counts: dict[str, int] = {}

    def flag(axiom, *witness):
        counts[axiom] = counts.get(axiom, 0) + 1
        if counts[axiom] <= MAX_WITNESSES:
            report.violations.append(Violation(axiom, tuple(witness)))

    n = g.n_arrows
    src, tgt, table = g.src, g.tgt, g._table
    for a in range(n):
        for b in range(n):
            ab = table[a * n + b]
            composable = tgt[b] == src[a]
            if composable and ab == UNDEFINED:
                flag("compose defined iff t(h)=s(g)", a, b)
            elif not composable and ab != UNDEFINED:
                flag("compose defined iff t(h)=s(g)", a, b)
            elif ab != UNDEFINED and (src[ab] != src[b] or tgt[ab] != tgt[a]):
                flag("s(gh)=s(h), t(gh)=t(g)", a, b, ab)
    for a in range(n):
        for b in g.in_arrows(src[a]):
            ab = table[a * n + b]
            if ab == UNDEFINED:
                continue
            for c in g.in_arrows(src[b]):
                bc = table[b * n + c]
                if bc == UNDEFINED:
                    continue
                left = table[ab * n + c]
                right = table[a * n + bc]
                if left != right:
                    flag("associativity", a, b, c)
    for x in range(g.n_objects):
        e = g.identity[x]
        if src[e] != x or tgt[e] != x:
            flag("s(id(x))=t(id(x))=x", x, e)
            continue
        for a in g.in_arrows(x):
            if table[e * n + a] != a:
                flag("id(x) is neutral", x, a)
        for a in g.out_arrows(x):
            if table[a * n + e] != a:
                flag("id(x) is neutral", x, a)
    for a in range(n):
        ai = g.inverse[a]
        if src[ai] != tgt[a] or tgt[ai] != src[a]:
            flag("s(g⁻¹)=t(g), t(g⁻¹)=s(g)", a, ai)
            continue
        if table[a * n + ai] != g.identity[tgt[a]]:
            flag("g·g⁻¹=id", a, ai)
        if table[ai * n + a] != g.identity[src[a]]:
            flag("g⁻¹·g=id", a, ai)
    g._report = report
    return report


def checked(g: FiniteGroupoid) -> FiniteGroupoid:
    """Validate ``g`` eagerly and raise :class:`AxiomError` on failure."""
    report = validate(g)
    if not report.ok:
        raise AxiomError("groupoid axioms violated: " + ", ".join(report.axioms), report.violations)
    return g


# -- constructors ----------------------------------------------------------


def _check_group_table(table: Sequence[Sequence[int]]) -> tuple[int, list[int]]:
    n = len(table)
    if n == 0:
        raise StructuralError("a group needs at least one element")
    for row in table:
        if len(row) != n:
            raise StructuralError("multiplication table must be square")
        for v in row:
            if not 0 <= v < n:
                raise StructuralError("multiplication table entry out of range")
    units = [e for e in range(n) if all(table[e][a] == a == table[a][e] for a in range(n))]
    if not units:
        raise AxiomError("non-group table: no identity element")
    e = units[0]
    inverse = []
    for a in range(n):
        inv = [b for b in range(n) if table[a][b] == e == table[b][a]]
        if not inv:
            raise AxiomError(f"non-group table: element {a} has no inverse")
        inverse.append(inv[0])
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise AxiomError(f"non-group table: associativity fails at {(a, b, c)}")
    return e, inverse


def group_as_groupoid(table: Sequence[Sequence[int]], labels=None) -> FiniteGroupoid:
    """A group as a one-object groupoid; arrow ``i`` is element ``i``.

    ``table[a][b]`` is the product ``ab`` (``b`` applied first).
    """
    table = [list(map(int, row)) for row in table]
    e, inverse = _check_group_table(table)
    n = len(table)
    compose = [(a, b, table[a][b]) for a in range(n) for b in range(n)]
    return checked(FiniteGroupoid(1, [0] * n, [0] * n, [e], inverse, compose, labels))


def pair_groupoid(n: int) -> FiniteGroupoid:
    """``M x M`` over ``n`` objects; arrow ``x*n + y`` goes from ``x`` to ``y``."""
    if n < 0:
        raise StructuralError("pair groupoid needs n >= 0")
    src = [a // n for a in range(n * n)] if n else []
    tgt = [a % n for a in range(n * n)] if n else []
    compose = [
        (y * n + z, x * n + y, x * n + z) for x in range(n) for y in range(n) for z in range(n)
    ]
    identity = [x * n + x for x in range(n)]
    inverse = [(a % n) * n + a // n for a in range(n * n)]
    labels = [(a // n, a % n) for a in range(n * n)]
    return checked(FiniteGroupoid(n, src, tgt, identity, inverse, compose, labels))


def action_groupoid(table: Sequence[Sequence[int]], act: Sequence[Sequence[int]]) -> FiniteGroupoid:
    """Action groupoid of a left action; ``act[g][m]`` is ``g·m``.

    Arrow ``(m, g)`` has id ``m*|G| + g``, source ``m`` and target ``g·m``;
    ``(g·m, h)·(m, g) = (m, hg)``.
    """
    table = [list(map(int, row)) for row in table]
    e, ginv = _check_group_table(table)
    order = len(table)
    if len(act) != order:
        raise StructuralError("action table needs one row per group element")
    points = len(act[0]) if order else 0
    act = [list(map(int, row)) for row in act]
    for row in act:
        if len(row) != points or any(not 0 <= m < points for m in row):
            raise StructuralError("action table rows must map points into range(points)")
    for m in range(points):
        if act[e][m] != m:
            raise AxiomError(f"non-action table: identity moves point {m}")
    for g, h, m in itertools.product(range(order), range(order), range(points)):
        if act[g][act[h][m]] != act[table[g][h]][m]:
            raise AxiomError(f"non-action table: g(hm) != (gh)m at {(g, h, m)}")

    def aid(m, g):
        return m * order + g

    src, tgt, labels = [], [], []
    for m in range(points):
        for g in range(order):
            src.append(m)
            tgt.append(act[g][m])
            labels.append((m, g))
    compose = [
        (aid(act[g][m], h), aid(m, g), aid(m, table[h][g]))
        for m in range(points)
        for g in range(order)
        for h in range(order)
    ]
    identity = [aid(m, e) for m in range(points)]
    inverse = [aid(act[g][m], ginv[g]) for m in range(points) for g in range(order)]
    return checked(FiniteGroupoid(points, src, tgt, identity, inverse, compose, labels))


def disjoint_union(*parts: FiniteGroupoid) -> FiniteGroupoid:
    """Objects and arrows of later parts are shifted past earlier ones."""
    src, tgt, identity, inverse, compose, labels = [], [], [], [], [], []
    obj_off = arr_off = 0
    for i, p in enumerate(parts):
        src += [x + obj_off for x in p.src]
        tgt += [x + obj_off for x in p.tgt]
        identity += [a + arr_off for a in p.identity]
        inverse += [a + arr_off for a in p.inverse]
        compose += [(g + arr_off, h + arr_off, p.compose(g, h) + arr_off) for g, h in p.composable_pairs()]
        labels += [(i, p.labels[a] if p.labels else a) for a in p.arrows]
        obj_off += p.n_objects
        arr_off += p.n_arrows
    return checked(FiniteGroupoid(obj_off, src, tgt, identity, inverse, compose, labels))


# -- structure -------------------------------------------------------------


def leaves(g: FiniteGroupoid) -> list[tuple[int, ...]]:
    """Connected components of the object set, ordered by least object."""
    seen = [False] * g.n_objects
    out = []
    for x in g.objects:
        if seen[x]:
            continue
        comp, stack = [], [x]
        seen[x] = True
        while stack:
            y = stack.pop()
            comp.append(y)
            for a in g.out_arrows(y):
                z = g.tgt[a]
                if not seen[z]:
                    seen[z] = True
                    stack.append(z)
        out.append(tuple(sorted(comp)))
    return out


def leaf_index(g: FiniteGroupoid) -> list[int]:
    """Object -> index of its leaf in :func:`leaves`."""
    idx = [0] * g.n_objects
    for i, leaf in enumerate(leaves(g)):
        for x in leaf:
            idx[x] = i
    return idx


def isotropy_group(g: FiniteGroupoid, x: int) -> FiniteGroupoid:
    """The group of arrows ``x -> x`` as a one-object groupoid.

    Element ``i`` of the result is parent arrow ``labels[i]``.
    """
    if not 0 <= x < g.n_objects:
        raise StructuralError(f"object {x} out of range")
    elems = g.isotropy_arrows(x)
    pos = {a: i for i, a in enumerate(elems)}
    table = [[pos[g.compose(a, b)] for b in elems] for a in elems]
    return group_as_groupoid(table, labels=elems)


def conjugate_isotropy(g: FiniteGroupoid, x: int, y: int, a: int) -> dict[int, int]:
    """The isomorphism ``h -> a h a^-1`` from the isotropy at ``x`` to that at ``y``."""
    if g.src[a] != x or g.tgt[a] != y:
        raise ValueError(f"arrow {a} does not go from {x} to {y}")
    mapping = {h: g.conjugate(a, h) for h in g.isotropy_arrows(x)}
    image = set(mapping.values())
    if image != set(g.isotropy_arrows(y)) or len(image) != len(mapping):
        raise AxiomError("conjugation is not a bijection of isotropy groups")
    for h1 in mapping:
        for h2 in mapping:
            if mapping[g.compose(h1, h2)] != g.compose(mapping[h1], mapping[h2]):
                raise AxiomError("conjugation is not multiplicative")
    return mapping


# -- bisections --------------------------------------------------------------

BISECTION_LIMIT = 10**6
_PAIRWISE_CHECK_LIMIT = 250_000


@dataclass(frozen=True, order=True)
class Bisection:
    sigma: tuple[int, ...]


class BisectionGroup:
    """All bisections of a finite groupoid with the law
    ``(s1 s2)(x) = s1(t(s2(x))) · s2(x)``."""

    def __init__(self, g: FiniteGroupoid, elements: list[tuple[int, ...]]):
        self.groupoid = g
        self.elements = [Bisection(s) for s in elements]
        self._index = {s: i for i, s in enumerate(elements)}

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Bisection:
        return Bisection(tuple(self.groupoid.identity))

    def index(self, b: Bisection) -> int:
        return self._index[b.sigma]

    def multiply(self, b1: Bisection, b2: Bisection) -> Bisection:
        g = self.groupoid
        s1, s2 = b1.sigma, b2.sigma
        return Bisection(tuple(g.compose(s1[g.tgt[s2[x]]], s2[x]) for x in g.objects))

    def inverse(self, b: Bisection) -> Bisection:
        g = self.groupoid
        out = [0] * g.n_objects
        for x in g.objects:
            a = b.sigma[x]
            out[g.tgt[a]] = g.inv(a)
        return Bisection(tuple(out))

    def psi(self, b: Bisection) -> tuple[int, ...]:
        """The induced permutation ``x -> t(sigma(x))`` of objects."""
        return tuple(self.groupoid.tgt[a] for a in b.sigma)


def bisections(g: FiniteGroupoid, limit: int = BISECTION_LIMIT) -> BisectionGroup:
    """Enumerate ``Bis(g)`` by backtracking over objects.

    Raises :class:`SizeLimitError` when the number of candidate sections
    ``prod_x |s^-1(x)|`` exceeds ``limit``. The result is checked: ``psi`` is
    a homomorphism into object permutations (pairwise up to a size cap) and
    every ``psi`` preserves leaves.
    """
    candidates = 1
    for x in g.objects:
        candidates *= len(g.out_arrows(x))
    if candidates > limit:
        raise SizeLimitError(f"{candidates} candidate bisections exceed the limit {limit}")
    n = g.n_objects
    found: list[tuple[int, ...]] = []
    chosen = [0] * n
    used = [False] * n

    def extend(x):
        if x == n:
            found.append(tuple(chosen))
            return
        for a in g.out_arrows(x):
            y = g.tgt[a]
            if not used[y]:
                used[y] = True
                chosen[x] = a
                extend(x + 1)
                used[y] = False

    extend(0)
    group = BisectionGroup(g, found)

    leaf_of = leaf_index(g)
    for b in group.elements:
        p = group.psi(b)
        if any(leaf_of[p[x]] != leaf_of[x] for x in g.objects):
            raise AxiomError("a bisection moves an object off its leaf")
    if len(group) ** 2 <= _PAIRWISE_CHECK_LIMIT:
        for b1 in group.elements:
            p1 = group.psi(b1)
            for b2 in group.elements:
                p2 = group.psi(b2)
                prod = group.multiply(b1, b2)
                if prod.sigma not in group._index:
                    raise AxiomError("bisections are not closed under the group law")
                if group.psi(prod) != tuple(p1[p2[x]] for x in g.objects):
                    raise AxiomError("psi is not a homomorphism")
    return group


# -- subgroupoids ------------------------------------------------------------


@dataclass(frozen=True)
class Subgroupoid:
    parent: FiniteGroupoid
    arrows: frozenset[int]
    objects: frozenset[int]

    def out_arrows(self, x: int) -> tuple[int, ...]:
        return tuple(a for a in self.parent.out_arrows(x) if a in self.arrows)

    def isotropy_arrows(self, x: int) -> tuple[int, ...]:
        return tuple(a for a in self.parent.isotropy_arrows(x) if a in self.arrows)

    def leaves(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out = []
        for x in sorted(self.objects):
            if x in seen:
                continue
            comp, stack = [], [x]
            seen.add(x)
            while stack:
                y = stack.pop()
                comp.append(y)
                for a in self.out_arrows(y):
                    z = self.parent.tgt[a]
                    if z not in seen:
                        seen.add(z)
                        stack.append(z)
            out.append(tuple(sorted(comp)))
        return out

    def to_json(self) -> dict:
        return {"objects": sorted(self.objects), "arrows": sorted(self.arrows)}


def subgroupoid(parent: FiniteGroupoid, arrows: Iterable[int], objects: Iterable[int] | None = None) -> Subgroupoid:
    """Wrap an arrow/object subset, raising :class:`NotASubgroupoid` unless it is closed.

    ``objects`` defaults to the endpoints of ``arrows``.
    """
    arrows = frozenset(int(a) for a in arrows)
    for a in arrows:
        if not 0 <= a < parent.n_arrows:
            raise StructuralError(f"arrow id {a} out of range")
    if objects is None:
        objects = {parent.src[a] for a in arrows} | {parent.tgt[a] for a in arrows}
    objects = frozenset(int(x) for x in objects)
    for x in objects:
        if not 0 <= x < parent.n_objects:
            raise StructuralError(f"object {x} out of range")
        if parent.identity[x] not in arrows:
            raise NotASubgroupoid(f"identity of object {x} is missing")
    for a in arrows:
        if parent.src[a] not in objects or parent.tgt[a] not in objects:
            raise NotASubgroupoid(f"arrow {a} leaves the object subset")
        if parent.inverse[a] not in arrows:
            raise NotASubgroupoid(f"inverse of arrow {a} is missing")
        for b in arrows:
            ab = parent.try_compose(a, b)
            if ab != UNDEFINED and ab not in arrows:
                raise NotASubgroupoid(f"product of {a} and {b} is missing")
    return Subgroupoid(parent, arrows, objects)


def generated_subgroupoid(parent: FiniteGroupoid, arrows: Iterable[int], objects: Iterable[int] = ()) -> Subgroupoid:
    """Smallest subgroupoid containing the given arrows and objects."""
    objs = set(objects)
    gens = set(arrows)
    for a in gens:
        objs.update((parent.src[a], parent.tgt[a]))
    closed = {parent.identity[x] for x in objs} | gens | {parent.inverse[a] for a in gens}
    frontier = list(closed)
    while frontier:
        new = []
        for a in frontier:
            for b in list(closed):
                for ab in (parent.try_compose(a, b), parent.try_compose(b, a)):
                    if ab != UNDEFINED and ab not in closed:
                        closed.add(ab)
                        new.append(ab)
        frontier = new
    return subgroupoid(parent, closed, objs)


def base_subgroupoid(parent: FiniteGroupoid, objects: Iterable[int] | None = None) -> Subgroupoid:
    """Identities only (over all objects unless ``objects`` is given)."""
    objs = parent.objects if objects is None else objects
    return subgroupoid(parent, [parent.identity[x] for x in objs], objs)


def full_subgroupoid(parent: FiniteGroupoid) -> Subgroupoid:
    return Subgroupoid(parent, frozenset(parent.arrows), frozenset(parent.objects))


# -- double cosets -------------------------------------------------------------


@dataclass(frozen=True)
class DoubleCosetClass:
    representative: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def double_coset(g: FiniteGroupoid, h0: Subgroupoid, h1: Subgroupoid) -> list[DoubleCosetClass]:
    """Classes of ``h1 \\ t^-1(obj h1) ∩ s^-1(obj h0) / h0``.

    ``gamma ~ b1 · gamma · b0^-1`` for composable ``b1`` in ``h1`` and ``b0``
    in ``h0``. Classes are sorted by their least arrow id.
    """
    for h in (h0, h1):
        if h.parent is not g:
            raise NotASubgroupoid("subgroupoid belongs to a different groupoid")
    domain = [a for a in g.arrows if g.src[a] in h0.objects and g.tgt[a] in h1.objects]
    inside = set(domain)
    parent = {a: a for a in domain}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra

    for gamma in domain:
        for b1 in h1.out_arrows(g.tgt[gamma]):
            union(gamma, g.compose(b1, gamma))
        for b0 in h0.out_arrows(g.src[gamma]):
            moved = g.compose(gamma, g.inverse[b0])
            assert moved in inside
            union(gamma, moved)
    classes: dict[int, list[int]] = {}
    for a in domain:
        classes.setdefault(find(a), []).append(a)
    return [DoubleCosetClass(min(m), tuple(sorted(m))) for m in sorted(classes.values(), key=min)]
