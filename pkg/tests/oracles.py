"""Slow, independent reference implementations used to cross-check the library."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def brute_structure_constants(cells):
    """Triangle counting with plain loops; ``None`` if some count is not constant."""
    cells = [list(map(int, row)) for row in np.asarray(cells)]
    n = len(cells)
    r = max(max(row) for row in cells) + 1
    p = {}
    for x in range(n):
        for y in range(n):
            k = cells[x][y]
            counts = [[0] * r for _ in range(r)]
            for z in range(n):
                counts[cells[x][z]][cells[z][y]] += 1
            for i in range(r):
                for j in range(r):
                    key = (i, j, k)
                    if key in p and p[key] != counts[i][j]:
                        return None
                    p[key] = counts[i][j]
    out = np.zeros((r, r, r), dtype=np.int64)
    for (i, j, k), v in p.items():
        out[i, j, k] = v
    return out


def naive_wl(cells):
    """Fixed point of full pair signatures, relabeled by sorted signature each round."""
    cells = [list(map(int, row)) for row in np.asarray(cells)]
    n = len(cells)
    cur = [[(cells[x][y], x == y) for y in range(n)] for x in range(n)]
    while True:
        sig = {}
        for x in range(n):
            for y in range(n):
                walks = sorted((cur[x][z], cur[z][y]) for z in range(n))
                sig[x, y] = (cur[x][y], cur[y][x], tuple(walks))
        labels = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = [[labels[sig[x, y]] for y in range(n)] for x in range(n)]
        old_count = len({v for row in cur for v in row})
        cur = new
        if len(labels) == old_count:
            return np.array(new)


def partition_classes(cells):
    """The color partition as a set of frozensets of cells."""
    cells = np.asarray(cells)
    out = {}
    for (x, y), v in np.ndenumerate(cells):
        out.setdefault(int(v), set()).add((x, y))
    return {frozenset(s) for s in out.values()}


def group_elements(degree, generators):
    """Closure of the generators by breadth-first multiplication."""
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    gens = [tuple(g) for g in generators]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(degree))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def jordan_product(x, y):
    """Exact ``(XY + YX) / 2`` over the rationals."""
    n = len(x)
    xy = [[sum(Fraction(x[i][k]) * y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    yx = [[sum(Fraction(y[i][k]) * x[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[(xy[i][j] + yx[i][j]) / 2 for j in range(n)] for i in range(n)]


def brute_automorphism_count(cells):
    """Count color-preserving vertex permutations by trying all of them (n <= 7)."""
    cells = np.asarray(cells)
    n = cells.shape[0]
    total = 0
    for p in itertools.permutations(range(n)):
        p = np.array(p)
        if np.array_equal(cells[np.ix_(p, p)], cells):
            total += 1
    return total
