"""Every group of order <= 8 and every action of it on at most 8 points, up to isomorphism.

A finite action is a disjoint union of transitive ones, and a transitive
action is a coset action ``G/H``; so taking one subgroup per conjugacy class
and all multisets of coset actions with total size <= 8 covers all actions.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from tarskikit.actions import FiniteAction


def _perm_group(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    n = len(gens[0])
    ident = tuple(range(n))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(n))
                if q not in elems:
                    elems.add(q)
                    nxt.append(q)
        frontier = nxt
    return sorted(elems)


def _quaternion(a, b):
    a1, b1, c1, d1 = a
    a2, b2, c2, d2 = b
    return (
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def _table(elems, op) -> list[list[int]]:
    """Relabel as 0..n-1 with the identity at 0."""
    pos = {e: i for i, e in enumerate(elems)}
    return [[pos[op(x, y)] for y in elems] for x in elems]


def _cyclic(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def _product(t1, t2):
    n1, n2 = len(t1), len(t2)
    return [[t1[i // n2][j // n2] * n2 + t2[i % n2][j % n2] for j in range(n1 * n2)] for i in range(n1 * n2)]


@lru_cache(maxsize=None)
def groups() -> dict[str, tuple[tuple[int, ...], ...]]:
    """Multiplication tables over 0..n-1; element 0 is the identity."""
    out: dict[str, list[list[int]]] = {f"Z{n}": _cyclic(n) for n in range(1, 9)}
    out["Z2xZ2"] = _product(_cyclic(2), _cyclic(2))
    out["Z4xZ2"] = _product(_cyclic(4), _cyclic(2))
    out["Z2^3"] = _product(_product(_cyclic(2), _cyclic(2)), _cyclic(2))
    compose = lambda p, q: tuple(p[q[i]] for i in range(len(p)))
    out["S3"] = _table(_perm_group([(1, 0, 2), (1, 2, 0)]), compose)
    out["D4"] = _table(_perm_group([(1, 2, 3, 0), (3, 2, 1, 0)]), compose)
    units = [(1, 0, 0, 0)]
    for i in range(4):
        for sgn in (1, -1):
            e = [0, 0, 0, 0]
            e[i] = sgn
            if tuple(e) != (1, 0, 0, 0):
                units.append(tuple(e))
    out["Q8"] = _table(units, _quaternion)
    return {k: tuple(tuple(r) for r in v) for k, v in out.items()}


def _subgroups(mul) -> list[frozenset[int]]:
    n = len(mul)
    subs = []
    for size in range(1, n + 1):
        if n % size:
            continue
        for rest in itertools.combinations(range(1, n), size - 1):
            H = frozenset((0, *rest))
            if all(mul[a][b] in H for a in H for b in H):
                subs.append(H)
    return subs


def _inverse(mul, g):
    return next(h for h in range(len(mul)) if mul[g][h] == 0)


def subgroup_classes(mul) -> list[frozenset[int]]:
    seen: set[frozenset[int]] = set()
    reps = []
    for H in _subgroups(mul):
        if H in seen:
            continue
        reps.append(H)
        for g in range(len(mul)):
            gi = _inverse(mul, g)
            seen.add(frozenset(mul[mul[g][h]][gi] for h in H))
    return reps


def coset_points(mul, H) -> list[tuple[int, ...]]:
    cosets = {tuple(sorted(mul[g][h] for h in H)) for g in range(len(mul))}
    return sorted(cosets)


def action_from_cosets(name: str, mul, parts: list[frozenset[int]]) -> FiniteAction:
    """Disjoint union of the coset actions ``G/H`` for ``H`` in ``parts``."""
    n = len(mul)
    points = []
    act_rows = [[] for _ in range(n)]
    for j, H in enumerate(parts):
        cos = coset_points(mul, H)
        index = {x: c for c in cos for x in c}
        for c in cos:
            points.append((j, c))
            for g in range(n):
                act_rows[g].append((j, index[mul[g][c[0]]]))
    return FiniteAction.from_tables(list(range(n)), 0, [list(r) for r in mul], points, act_rows)


@lru_cache(maxsize=None)
def action_corpus(max_points: int = 8) -> tuple[tuple[str, FiniteAction], ...]:
    out = []
    for gname, mul in groups().items():
        n = len(mul)
        classes = subgroup_classes(mul)
        sizes = {H: n // len(H) for H in classes}
        for count in range(1, max_points + 1):
            for combo in itertools.combinations_with_replacement(range(len(classes)), count):
                parts = [classes[i] for i in combo]
                if sum(sizes[H] for H in parts) > max_points:
                    continue
                label = f"{gname}:" + "+".join(str(sorted(H)) for H in parts)
                out.append((label, action_from_cosets(label, mul, parts)))
    return tuple(out)
