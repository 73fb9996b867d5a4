"""Multiplication tables for the small groups used throughout tests and the CLI."""
from __future__ import annotations

from typing import Sequence


def cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def permutation_group(generators: Sequence[Sequence[int]]) -> tuple[list[tuple[int, ...]], list[list[int]]]:
    """Close permutations under composition.

    Returns ``(elements, table)`` with elements sorted lexicographically (so
    the identity is element 0) and ``table[i][j]`` the index of
    ``elements[i] ∘ elements[j]`` (``j`` applied first).
    """
    gens = [tuple(p) for p in generators]
    if not gens:
        raise ValueError("need at least one generator (the degree is read from it)")
    degree = len(gens[0])
    ident = tuple(range(degree))
    elems = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for p in frontier:
            for q in gens:
                r = tuple(q[p[i]] for i in range(degree))
                if r not in elems:
                    elems.add(r)
                    new.append(r)
        frontier = new
    order = sorted(elems)
    pos = {p: i for i, p in enumerate(order)}
    table = [[pos[tuple(p[q[i]] for i in range(degree))] for q in order] for p in order]
    return order, table


def symmetric_group(n: int) -> tuple[list[tuple[int, ...]], list[list[int]]]:
    if n <= 1:
        return [tuple(range(n))], [[0]]
    swap = tuple([1, 0] + list(range(2, n)))
    cycle = tuple(list(range(1, n)) + [0])
    return permutation_group([swap, cycle])


def s3_table() -> list[list[int]]:
    return symmetric_group(3)[1]


def coset_action(table: Sequence[Sequence[int]], subgroup: Sequence[int]) -> list[list[int]]:
    """Left action of a group on the left cosets of ``subgroup``.

    Cosets are numbered by first appearance when scanning elements in order;
    returns ``act[g][m]``.
    """
    n = len(table)
    sub = set(subgroup)
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for a in range(n):
        if a in coset_of:
            continue
        k = len(reps)
        reps.append(a)
        for h in sub:
            coset_of[table[a][h]] = k
    return [[coset_of[table[g][r]] for r in reps] for g in range(n)]
