"""Weisfeiler-Leman and Jordan closures, properness, regularity tests."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cc import (
    ColorGraph,
    _left_products,
    _onehot,
    _right_products,
    as_color_graph,
    canonical_color_order,
    classify,
    dense_labels,
    fibers,
    graph_coloring,
    same_partition,
    symmetrize,
)
from .errors import InvalidColorGraph, NotAJordanScheme, NotCoherent, PreconditionError


@dataclass(frozen=True)
class ClosureResult:
    closure: ColorGraph
    rounds: int
    refinement_map: dict

    @property
    def rank(self) -> int:
        return self.closure.r


def _split_diagonal(cells: np.ndarray) -> np.ndarray:
    n = cells.shape[0]
    return dense_labels(cells * 2 + (1 - np.eye(n, dtype=np.int64)))


def _refinement_map(before: np.ndarray, after: np.ndarray) -> dict:
    pairs = np.unique(np.stack([before.ravel(), after.ravel()]), axis=1)
    out = {}
    for a, b in pairs.T:
        out.setdefault(int(a), set()).add(int(b))
    return {k: frozenset(v) for k, v in sorted(out.items())}


def _wl_round(cells: np.ndarray) -> np.ndarray:
    """One pair-signature refinement step."""
    n = cells.shape[0]
    r = int(cells.max()) + 1
    walks = cells[:, None, :] * r + cells.T[None, :, :]
    walks.sort(axis=2)
    sig = np.concatenate([cells[:, :, None], cells.T[:, :, None], walks], axis=2)
    _, inv = np.unique(sig.reshape(n * n, n + 2), axis=0, return_inverse=True)
    return inv.reshape(n, n)


def wl_closure(cg: ColorGraph) -> ClosureResult:
    """Coarsest coherent configuration refining ``cg``.

    Each round recolors ``(x, y)`` by its old color, the color of ``(y, x)``
    and the sorted multiset of ``(c(x, z), c(z, y))`` over all ``z``.
    """
    cg = as_color_graph(cg)
    cells = _split_diagonal(cg.cells)
    rounds = 0
    while True:
        rounds += 1
        new = _wl_round(cells)
        stable = new.max() == cells.max()
        cells = new
        if stable:
            break
    out = canonical_color_order(cells)
    return ClosureResult(ColorGraph(out), rounds, _refinement_map(cg.cells, out))


def _jordan_round(cells: np.ndarray) -> np.ndarray:
    n = cells.shape[0]
    r = int(cells.max()) + 1
    onehot = _onehot(cells, r)
    parts = [cells[:, :, None].astype(np.float64)]
    for i in range(r):
        vals = _left_products(cells, r, onehot, i) + _right_products(cells, r, onehot, i)
        parts.append(vals[:, :, i:])
    sig = np.concatenate(parts, axis=2)
    _, inv = np.unique(sig.reshape(n * n, -1), axis=0, return_inverse=True)
    return inv.reshape(n, n)


def jordan_closure(cg: ColorGraph) -> ClosureResult:
    """Coarsest Jordan configuration refining ``cg``.

    Pairs are first recolored by the unordered pair ``{c(x,y), c(y,x)}``;
    then classes are split by every doubled Jordan product ``A_iA_j + A_jA_i``
    until nothing changes.
    """
    cg = as_color_graph(cg)
    cells = _split_diagonal(cg.cells)
    lo = np.minimum(cells, cells.T)
    hi = np.maximum(cells, cells.T)
    cells = dense_labels(lo * (int(cells.max()) + 1) + hi)
    rounds = 0
    while True:
        rounds += 1
        new = _jordan_round(cells)
        stable = new.max() == cells.max()
        cells = new
        if stable:
            break
    out = canonical_color_order(cells)
    return ClosureResult(ColorGraph(out), rounds, _refinement_map(cg.cells, out))


@dataclass(frozen=True)
class PropernessReport:
    proper: bool
    genuine: bool
    wl_rank: int
    wl_fibers: tuple
    swl_rank: int

    def as_dict(self) -> dict:
        return {
            "proper": self.proper,
            "genuine": self.genuine,
            "wl_rank": self.wl_rank,
            "wl_fibers": list(self.wl_fibers),
            "swl_rank": self.swl_rank,
        }


def is_proper(cg: ColorGraph, report=None) -> PropernessReport:
    """Decide whether a Jordan scheme is a symmetrization of a CC.

    ``J`` is non-proper exactly when the symmetrized WL closure of ``J``
    coincides with ``J``.
    """
    cg = as_color_graph(cg)
    report = report or classify(cg)
    if not report.is_jordan_scheme:
        raise NotAJordanScheme("is_proper requires a Jordan scheme")
    wl = wl_closure(cg).closure
    swl = symmetrize(wl)
    return PropernessReport(
        proper=not same_partition(swl.cells, cg.cells),
        genuine=not same_partition(wl.cells, cg.cells),
        wl_rank=wl.r,
        wl_fibers=tuple(sorted(len(f) for f in fibers(wl))),
        swl_rank=swl.r,
    )


def _as_simple_graph(g) -> np.ndarray:
    a = np.asarray(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidColorGraph("adjacency matrix must be square")
    a = a.astype(bool)
    if not np.array_equal(a, a.T):
        raise PreconditionError("graph must be symmetric")
    if a.diagonal().any():
        raise PreconditionError("graph must be irreflexive")
    return a


def is_walk_regular(g, max_power: Optional[int] = None) -> bool:
    """True when every power ``A^l`` (``1 <= l <= max_power``) has constant diagonal."""
    a = _as_simple_graph(g)
    n = a.shape[0]
    max_power = n if max_power is None else max_power
    k = int(a.sum(axis=1).max()) if n else 0
    exact = a.astype(object) if k > 1 and k ** max_power >= 2**62 else a.astype(np.int64)
    power = exact.copy()
    for _ in range(max_power):
        d = np.diag(power)
        if any(v != d[0] for v in d):
            return False
        power = power @ exact
    return True


@dataclass(frozen=True)
class IntersectionArray:
    b: tuple
    c: tuple

    @property
    def diameter(self) -> int:
        return len(self.b)

    def as_tuple(self) -> tuple:
        return (self.b, self.c)

    def __str__(self):
        return "(" + ",".join(map(str, self.b)) + ";" + ",".join(map(str, self.c)) + ")"


def distance_matrix(a: np.ndarray) -> np.ndarray:
    """All-pairs BFS distances; ``-1`` marks unreachable pairs."""
    n = a.shape[0]
    nbrs = [np.flatnonzero(a[v]) for v in range(n)]
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if dist[s, w] < 0:
                    dist[s, w] = dist[s, v] + 1
                    queue.append(w)
    return dist


def intersection_array(g) -> Optional[IntersectionArray]:
    """Intersection array of a distance-regular graph, ``None`` otherwise."""
    a = _as_simple_graph(g)
    dist = distance_matrix(a)
    if (dist < 0).any():
        raise PreconditionError("graph is disconnected")
    d = int(dist.max())
    ai = a.astype(np.int64)
    b, c = [], []
    for i in range(d + 1):
        mask = dist == i
        if i < d:
            up = (dist == i + 1).astype(np.int64) @ ai
            vals = np.unique(up[mask])
            if len(vals) != 1 or vals[0] == 0:
                return None
            b.append(int(vals[0]))
        if i > 0:
            down = (dist == i - 1).astype(np.int64) @ ai
            vals = np.unique(down[mask])
            if len(vals) != 1 or vals[0] == 0:
                return None
            c.append(int(vals[0]))
    return IntersectionArray(tuple(b), tuple(c))


@dataclass(frozen=True)
class SpreadReport:
    is_spread: bool
    hoffman: bool
    alpha: bool

    def as_dict(self) -> dict:
        return {"is_spread": self.is_spread, "hoffman": self.hoffman, "alpha": self.alpha}


def _is_k33_union(sub: np.ndarray, left: Sequence[int], right: Sequence[int]) -> bool:
    """Every component of the bipartite graph ``sub`` is a ``K_{3,3}``."""
    n = sub.shape[0]
    side = np.zeros(n, dtype=bool)
    side[list(right)] = True
    seen = np.zeros(n, dtype=bool)
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in np.flatnonzero(sub[v]):
                if not seen[w]:
                    seen[w] = True
                    comp.append(int(w))
                    queue.append(w)
        comp = np.array(comp)
        lside = comp[~side[comp]]
        rside = comp[side[comp]]
        if len(lside) != 3 or len(rside) != 3:
            return False
        if not sub[np.ix_(lside, rside)].all():
            return False
    return True


def check_spread(g, spread: Sequence[Sequence[int]]) -> SpreadReport:
    """Spread, Hoffman-spread and property (alpha) checks for a graph.

    ``spread`` is a partition of the vertices into equal blocks.
    """
    a = np.asarray(g, dtype=bool)
    n = a.shape[0]
    blocks = [sorted(int(v) for v in b) for b in spread]
    if sorted(v for b in blocks for v in b) != list(range(n)):
        raise InvalidColorGraph("spread blocks do not partition the vertices")
    if len({len(b) for b in blocks}) != 1:
        raise PreconditionError("spread blocks must have equal size")
    block_of = np.empty(n, dtype=np.int64)
    for idx, b in enumerate(blocks):
        block_of[b] = idx
    same = (block_of[:, None] == block_of[None, :]) & ~np.eye(n, dtype=bool)
    is_spread = not (a & same).any()

    hoffman = False
    if is_spread:
        cells = np.full((n, n), 3, dtype=np.int64)
        cells[same] = 1
        cells[a] = 2
        np.fill_diagonal(cells, 0)
        present = np.unique(cells)
        if len(present) == 4:
            rep = classify(ColorGraph(cells))
            hoffman = rep.is_cc and rep.is_homogeneous

    alpha = False
    if is_spread and len(blocks[0]) % 3 == 0:
        alpha = True
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                verts = blocks[i] + blocks[j]
                sub = a[np.ix_(verts, verts)]
                if not _is_k33_union(sub, range(len(blocks[i])), range(len(blocks[i]), len(verts))):
                    alpha = False
                    break
            if not alpha:
                break
    return SpreadReport(is_spread, hoffman, alpha)


def is_schurian(cg: ColorGraph) -> bool:
    """True when ``cg`` equals the 2-orbit configuration of its automorphism group."""
    from .permgrp import automorphism_group, two_orbits

    cg = as_color_graph(cg)
    if not classify(cg).is_cc:
        raise NotCoherent("is_schurian requires a coherent configuration")
    return two_orbits(automorphism_group(cg)).r == cg.r


def relation_closure(g, mode: str = "wl") -> ClosureResult:
    """Closure of the color graph ``{Id, g, rest}`` of a single graph."""
    cg = graph_coloring(g)
    return wl_closure(cg) if mode == "wl" else jordan_closure(cg)


__all__ = [
    "ClosureResult",
    "IntersectionArray",
    "PropernessReport",
    "SpreadReport",
    "check_spread",
    "distance_matrix",
    "intersection_array",
    "is_proper",
    "is_schurian",
    "is_walk_regular",
    "jordan_closure",
    "relation_closure",
    "wl_closure",
]
