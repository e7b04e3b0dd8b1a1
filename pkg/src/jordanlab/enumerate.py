"""Small Jordan scheme enumeration and merging (fusion) search."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cc import (
    ColorGraph,
    SchemeReport,
    as_color_graph,
    classify,
    fibers,
    merge_colors,
    structure_constants,
    transpose_map,
)
from .errors import NotCoherent, PreconditionError, SearchGuard
from .stabilize import PropernessReport, is_proper

OPEN_ORDERS = (12, 14)
COMPLETE_MAX_ORDER = 12


# -- valency multisets ------------------------------------------------------------------


def _partitions(total: int, parts: int, smallest: int, step: int):
    """Non-decreasing tuples of ``parts`` integers >= ``smallest`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    v = smallest
    while v * parts <= total:
        for rest in _partitions(total - v, parts - 1, v, step):
            yield (v,) + rest
        v += step


def valency_multisets(n: int, rank: int) -> List[Tuple[int, ...]]:
    """Valency multisets ``(1, n_1, ..., n_{rank-1})`` with ``sum = n``.

    For odd ``n`` every non-reflexive valency of a symmetric regular relation
    is even, so only even parts are produced.
    """
    if rank < 2:
        raise PreconditionError("rank must be at least 2")
    if n < 1:
        raise PreconditionError("order must be positive")
    step = 2 if n % 2 else 1
    return [(1,) + p for p in _partitions(n - 1, rank - 1, step, step)]


# -- orderly generation -----------------------------------------------------------------


class _Budget(Exception):
    pass


class _Search:
    """Row-by-row filling of a symmetric regular coloring with Jordan pruning.

    Colors ``1..r-1`` carry the non-decreasing valencies ``val[1:]``.  Row 0
    is fixed, and for every completed row ``x`` the columns ``y > x`` must be
    lexicographically sorted by their entries in rows ``0..x``; every color
    graph has a labeling with this property.

    ``M[a][b][t]`` counts the middle points ``z`` whose known colors
    ``{c(a,z), c(z,b)}`` form the unordered pair ``t``; up to a factor 2 on
    equal pairs this is ``A_iA_j + A_jA_i`` at ``(a, b)``.  Once a cell of
    color ``k`` has all its middle points known, its vector becomes the
    required value ``lam[k]``; partial vectors may never exceed it, and at
    each completed row the cells next to finished rows are also checked
    against upper bounds.
    """

    def __init__(self, val: Sequence[int], node_limit: Optional[int], deadline: Optional[float]):
        self.val = list(val)
        self.r = r = len(val)
        self.n = n = sum(val)
        self.node_limit = node_limit
        self.deadline = deadline
        self.nodes = 0
        self.pairs = [(i, j) for i in range(1, r) for j in range(i, r)]
        self.pidx = [[-1] * r for _ in range(r)]
        for t, (i, j) in enumerate(self.pairs):
            self.pidx[i][j] = self.pidx[j][i] = t
        npairs = len(self.pairs)
        self.c = [[-1] * n for _ in range(n)]
        self.cnt = [[0] * r for _ in range(n)]
        self.M = [[[0] * npairs for _ in range(n)] for _ in range(n)]
        self.lam: List[Optional[list]] = [None] * r
        self.found: List[np.ndarray] = []
        for v in range(n):
            self.c[v][v] = 0
        row0 = [0]
        for color in range(1, r):
            row0.extend([color] * val[color])
        for y in range(1, n):
            self._set(0, y, row0[y])
        # same[y]: column y has the same prefix as column y - 1 over the completed rows
        self.same = [False] * n
        for y in range(2, n):
            self.same[y] = row0[y] == row0[y - 1]

    def _cell(self, a, b):
        return self.M[a][b] if a < b else self.M[b][a]

    def _set(self, x, y, color) -> bool:
        """Assign a cell, update middle-point counts, report lower-bound violations."""
        c = self.c
        c[x][y] = color
        c[y][x] = color
        self.cnt[x][color] += 1
        self.cnt[y][color] += 1
        ok = True
        lam = self.lam
        prow = self.pidx[color]
        for u, v in ((x, y), (y, x)):
            # z = v is a new middle point for the cells {u, b}
            cv = c[v]
            cu = c[u]
            for b in range(self.n):
                j = cv[b]
                if j <= 0 or b == u:
                    continue
                t = prow[j]
                vec = self.M[u][b] if u < b else self.M[b][u]
                vec[t] += 1
                k = cu[b]
                if k > 0 and lam[k] is not None and vec[t] > lam[k][t]:
                    ok = False
        if ok and lam[color] is not None:
            vec = self._cell(x, y)
            lk = lam[color]
            if any(vec[t] > lk[t] for t in range(len(vec))):
                ok = False
        return ok

    def _unset(self, x, y):
        c = self.c
        color = c[x][y]
        prow = self.pidx[color]
        for u, v in ((x, y), (y, x)):
            cv = c[v]
            for b in range(self.n):
                j = cv[b]
                if j <= 0 or b == u:
                    continue
                vec = self.M[u][b] if u < b else self.M[b][u]
                vec[prow[j]] -= 1
        c[x][y] = -1
        c[y][x] = -1
        self.cnt[x][color] -= 1
        self.cnt[y][color] -= 1

    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _Budget()
        if self.deadline is not None and self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
            raise _Budget()

    def _row_complete(self, x) -> Optional[List[int]]:
        """Check exact and bounded products after row ``x``; return colors whose value got fixed."""
        fixed = []
        c = self.c
        r = self.r

        def undo():
            for col in fixed:
                self.lam[col] = None

        for a in range(x):
            color = c[a][x]
            vec = self.M[a][x]
            if self.lam[color] is None:
                self.lam[color] = list(vec)
                fixed.append(color)
            elif self.lam[color] != vec:
                undo()
                return None
        # interval bounds on cells (a, y) with a <= x < y
        n = self.n
        val = self.val
        pairs = self.pairs
        for y in range(x + 1, n):
            need = [val[t] - self.cnt[y][t] for t in range(r)]
            cy = c[y]
            for a in range(x + 1):
                lam = self.lam[c[a][y]]
                if lam is None:
                    continue
                ca = c[a]
                u = [0] * r
                for z in range(x + 1, n):
                    if cy[z] < 0:
                        u[ca[z]] += 1
                vec = self.M[a][y]
                for t, (i, j) in enumerate(pairs):
                    lo = vec[t]
                    if i == j:
                        hi = lo + min(u[i], need[i])
                    else:
                        hi = lo + min(u[i], need[j]) + min(u[j], need[i])
                    if not lo <= lam[t] <= hi:
                        undo()
                        return None
        return fixed

    def run(self, prefix: Optional[Sequence[int]] = None, collect: bool = False):
        """Search everything, or only below a fixed row 1 (``prefix``).

        With ``collect`` the search stops after row 1 and records the
        feasible row-1 fillings in ``self.prefixes``.
        """
        self.prefix = None if prefix is None else list(prefix)
        self.collect = collect
        self.prefixes: List[tuple] = []
        if self.n <= 2:
            self.found.append(np.array(self.c, dtype=np.int64))
            return
        self._fill(1, 2)

    def _fill(self, x, y):
        n = self.n
        if y == n:
            if self.collect and x == 1:
                self.prefixes.append(tuple(self.c[1][2:]))
                return
            fixed = self._row_complete(x)
            if fixed is None:
                return
            saved = self.same[:]
            for yy in range(x + 2, n):
                self.same[yy] = self.same[yy] and self.c[x][yy] == self.c[x][yy - 1]
            # row x + 1 has nothing right of the diagonal left to fill when x + 1 == n - 1
            if x + 1 == n - 1:
                last = self._row_complete(x + 1)
                if last is not None:
                    self.found.append(np.array(self.c, dtype=np.int64))
                    for col in last:
                        self.lam[col] = None
            else:
                self._fill(x + 1, x + 2)
            self.same = saved
            for col in fixed:
                self.lam[col] = None
            return
        self._tick()
        lo = 1
        if y > x + 1 and self.same[y]:
            lo = self.c[x][y - 1]
        cx = self.cnt[x]
        cy = self.cnt[y]
        val = self.val
        choices = range(lo, self.r)
        if x == 1 and self.prefix is not None:
            choices = [self.prefix[y - 2]] if self.prefix[y - 2] >= lo else []
        for color in choices:
            if cx[color] >= val[color] or cy[color] >= val[color]:
                continue
            if self._set(x, y, color):
                self._fill(x, y + 1)
            self._unset(x, y)


def _search_job(job):
    val, prefix, node_limit, deadline = job
    s = _Search(val, node_limit, deadline)
    try:
        s.run(prefix=prefix)
        complete = True
    except _Budget:
        complete = False
    return [m.tolist() for m in s.found], complete, s.nodes


# -- enumeration tasks ------------------------------------------------------------------


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def default_threads() -> int:
    env = os.environ.get("JORDANLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise PreconditionError(f"JORDANLAB_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


@dataclass(frozen=True)
class EnumerationTask:
    """What to enumerate: order, rank range, optional valency multisets, budget.

    ``valencies`` holds multisets written with their leading reflexive 1.
    Orders up to 12 are searched to completion unless a budget stops them;
    orders 12 and 14 carry the ``open`` flag of the result.
    """

    n: int
    min_rank: int = 5
    max_rank: Optional[int] = None
    valencies: Optional[Tuple[Tuple[int, ...], ...]] = None
    proper_only: bool = False
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    threads: int = 1
    prime_shortcut: bool = True

    def multisets(self) -> List[Tuple[int, ...]]:
        lo = max(2, self.min_rank)
        if self.proper_only:
            lo = max(lo, 5)
        hi = self.n if self.max_rank is None else min(self.max_rank, self.n)
        allowed = None
        if self.valencies is not None:
            allowed = {tuple(sorted(v)) for v in self.valencies}
        out = []
        for rank in range(lo, hi + 1):
            for m in valency_multisets(self.n, rank):
                if allowed is None or m in allowed:
                    out.append(m)
        return out


@dataclass(frozen=True)
class EnumeratedScheme:
    graph: ColorGraph
    valencies: Tuple[int, ...]
    report: SchemeReport
    properness: PropernessReport

    def as_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "rank": self.graph.r,
            "valencies": list(self.valencies),
            "report": self.report.as_dict(),
            "properness": self.properness.as_dict(),
            "cells": self.graph.cells.tolist(),
        }


@dataclass
class EnumerationResult:
    n: int
    schemes: List[EnumeratedScheme]
    counts: Dict[Tuple[int, ...], int]
    status: str
    open_problem: bool
    nodes: int
    shortcuts: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.schemes)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "status": self.status,
            "open_problem": self.open_problem,
            "nodes": self.nodes,
            "counts": [{"valencies": list(k), "count": v} for k, v in self.counts.items()],
            "prime_order_shortcut": [list(m) for m in self.shortcuts],
            "schemes": [s.as_dict() for s in self.schemes],
        }


def _invariant(cg: ColorGraph) -> tuple:
    """Sorted per-color triangle statistics; equal for isomorphic color graphs."""
    from .permgrp import _color_keys, _triangle_tensor

    return tuple(sorted(_color_keys(cg, _triangle_tensor(cg))))


def _prime_shortcut_applies(n: int, multiset: Tuple[int, ...]) -> bool:
    # a valency-2 relation on a prime number of points is an n-cycle, and the
    # Jordan closure of an n-cycle is already a symmetric AS of maximal rank
    return _is_prime(n) and n > 3 and 2 in multiset[1:]


def enumerate_jordan_schemes(task: EnumerationTask) -> EnumerationResult:
    """All Jordan schemes of order ``task.n`` matching the task, up to isomorphism.

    Each scheme is returned in color-permuting canonical form together with
    its classification and properness report, sorted by canonical key.
    """
    from .permgrp import canonical_form, isomorphic

    n = task.n
    if n < 1:
        raise PreconditionError("order must be positive")
    if n > max(OPEN_ORDERS):
        raise SearchGuard(f"order {n} is beyond the supported range (at most {max(OPEN_ORDERS)})")
    node_limit = task.node_limit
    time_limit = task.time_limit
    if n in OPEN_ORDERS and node_limit is None and time_limit is None:
        time_limit = 600.0
    deadline = None if time_limit is None else time.monotonic() + time_limit

    shortcuts = []
    jobs = []
    for m in task.multisets():
        if task.proper_only and task.prime_shortcut and _prime_shortcut_applies(n, m):
            shortcuts.append(m)
            continue
        if task.threads > 1 and n > 4:
            pre = _Search(m, None, None)
            pre.run(collect=True)
            jobs.extend((m, p, node_limit, deadline) for p in pre.prefixes)
        else:
            jobs.append((m, None, node_limit, deadline))

    if task.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=task.threads) as pool:
            outputs = list(pool.map(_search_job, jobs))
    else:
        outputs = [_search_job(j) for j in jobs]

    complete = all(ok for _, ok, _ in outputs)
    nodes = sum(k for _, _, k in outputs)
    # bucket by a cheap invariant, test isomorphism against bucket members,
    # then take canonical forms of the representatives only
    buckets: Dict[tuple, List[Tuple[Tuple[int, ...], ColorGraph]]] = {}
    for job, (found, _, _) in zip(jobs, outputs):
        for cells in found:
            cg = ColorGraph(np.array(cells, dtype=np.int64))
            inv = (job[0], _invariant(cg))
            reps = buckets.setdefault(inv, [])
            if not any(isomorphic(cg, rep, "color-permuting") for _, rep in reps):
                reps.append((job[0], cg))
    by_key: Dict[bytes, Tuple[Tuple[int, ...], ColorGraph]] = {}
    for reps in buckets.values():
        for m, cg in reps:
            cf = canonical_form(cg, "color-permuting")
            by_key[cf.key()] = (m, cf.graph)

    counts: Dict[Tuple[int, ...], int] = {m: 0 for m in task.multisets()}
    schemes = []
    for key in sorted(by_key):
        m, cg = by_key[key]
        report = classify(cg)
        if not report.is_jordan_scheme:
            raise AssertionError("enumeration produced a non-Jordan coloring")
        prop = is_proper(cg, report)
        if task.proper_only and not prop.proper:
            continue
        counts[m] += 1
        schemes.append(EnumeratedScheme(cg, m, report, prop))
    schemes.sort(key=lambda s: (s.graph.r, s.valencies, s.graph.cells.tobytes()))
    return EnumerationResult(
        n=n,
        schemes=schemes,
        counts=counts,
        status="complete" if complete else "partial",
        open_problem=n in OPEN_ORDERS,
        nodes=nodes,
        shortcuts=shortcuts,
    )


# -- merging search ---------------------------------------------------------------------


@dataclass(frozen=True)
class MergingConstraints:
    """Target kind (``"as"`` or ``"js"``), optional exact rank and valency multiset.

    With ``homogeneous`` all reflexive colors form one block.
    """

    target: str = "as"
    rank: Optional[int] = None
    valencies: Optional[Tuple[int, ...]] = None
    homogeneous: bool = True


def _row_valencies(cg: ColorGraph) -> np.ndarray:
    """``v[i, f]``: entries of color ``i`` in a row of fiber ``f`` (first row of the fiber)."""
    fibs = fibers(cg)
    v = np.zeros((cg.r, len(fibs)), dtype=np.int64)
    for f, fib in enumerate(fibs):
        v[:, f] = np.bincount(cg.cells[fib[0]], minlength=cg.r)
    return v


def _merge_tensor(cg: ColorGraph, report: SchemeReport, target: str) -> Optional[np.ndarray]:
    from .permgrp import jordan_tensor

    if target == "as":
        return np.asarray(structure_constants(cg).p)
    if report.is_cc:
        p = np.asarray(structure_constants(cg).p)
        return p + p.transpose(1, 0, 2)
    if report.is_symmetric and report.reflexive_split_ok:
        from .cc import _jordan_closed

        if _jordan_closed(cg.cells, cg.r):
            return jordan_tensor(cg)
    return None


def find_mergings(cg: ColorGraph, c: MergingConstraints) -> List[Tuple[Tuple[int, ...], ...]]:
    """Color partitions whose merged color graph is an AS or a Jordan scheme.

    Only proper mergings are returned: the rank of the merged graph lies in
    ``3..r-1`` unless ``c.rank`` fixes it.  Blocks are built one at a time;
    for finished blocks ``B, C`` the function ``k -> sum_{i in B, j in C} t[i, j, k]``
    of the structure tensor must be constant on every block, which splits the
    remaining colors into level sets that later blocks may not cross.
    """
    cg = as_color_graph(cg)
    if c.target not in ("as", "js"):
        raise PreconditionError(f"unknown merging target {c.target!r}")
    r = cg.r
    limit = 21 if c.rank is not None else 13
    if r > limit:
        raise SearchGuard(f"rank {r} exceeds the merging search guard ({limit})")
    report = classify(cg)
    if not report.valid_partition:
        raise PreconditionError("input is not a valid color graph")
    if c.target == "as" and not report.is_cc:
        raise NotCoherent("merging into association schemes requires a coherent configuration")
    t = _merge_tensor(cg, report, c.target)
    tmap = transpose_map(cg)
    diag = set(int(v) for v in np.unique(np.diag(cg.cells)))
    rowval = _row_valencies(cg)
    lo_rank, hi_rank = (c.rank, c.rank) if c.rank is not None else (3, r - 1)
    want = None if c.valencies is None else sorted(c.valencies)
    results: List[Tuple[Tuple[int, ...], ...]] = []

    def block_valency(block):
        v = rowval[list(block)].sum(axis=0)
        return int(v[0]) if (v == v[0]).all() else None

    def f_vector(a, b):
        return t[np.ix_(a, b)].sum(axis=(0, 1))

    def constant_on(vec, block):
        vals = vec[list(block)]
        return (vals == vals[0]).all()

    def rec(blocks, cls, free, remaining_vals):
        if not free:
            k = len(blocks)
            if lo_rank <= k <= hi_rank and (remaining_vals is None or not remaining_vals):
                results.append(tuple(tuple(sorted(b)) for b in blocks))
            return
        if len(blocks) + 1 > hi_rank:
            return
        if len(blocks) + len(free) < lo_rank:
            return
        u = free[0]
        pool = [x for x in free[1:] if cls[x] == cls[u] and ((x in diag) == (u in diag))]
        for size in range(len(pool) + 1):
            for extra in _combinations(pool, size):
                block = (u,) + extra
                new_blocks = _with_transpose(block, tmap, c.target)
                if new_blocks is None:
                    continue
                used = set(x for b in new_blocks for x in b)
                if not used.issubset(free):
                    continue
                if any(cls[x] != cls[b[0]] for b in new_blocks for x in b):
                    continue
                vals = remaining_vals
                ok = True
                for b in new_blocks:
                    if c.homogeneous and b[0] in diag:
                        continue
                    bv = block_valency(b) if c.homogeneous else None
                    if c.homogeneous and bv is None:
                        ok = False
                        break
                    if vals is not None:
                        if bv not in vals:
                            ok = False
                            break
                        vals = list(vals)
                        vals.remove(bv)
                if not ok:
                    continue
                all_blocks = blocks + list(new_blocks)
                rest = [x for x in free if x not in used]
                new_cls = dict(cls)
                if t is not None:
                    if not _level_sets(t, all_blocks, len(new_blocks), rest, new_cls, f_vector, constant_on):
                        continue
                rec(all_blocks, new_cls, rest, vals)

    colors = list(range(r))
    start_vals = None if want is None else list(want)
    if c.homogeneous:
        refl = tuple(sorted(diag))
        if start_vals is not None:
            if 1 not in start_vals:
                return []
            start_vals.remove(1)
        blocks = [refl]
        rest = [x for x in colors if x not in diag]
        cls = {x: 0 for x in colors}
        if t is not None and not _level_sets(t, blocks, 1, rest, cls, f_vector, constant_on):
            return []
        rec(blocks, cls, rest, start_vals)
    else:
        rec([], {x: 0 for x in colors}, colors, start_vals)

    out = []
    for part in results:
        merged = merge_colors(cg, part)
        rep = classify(merged)
        good = rep.is_as if c.target == "as" else rep.is_jordan_scheme
        if not c.homogeneous:
            good = rep.is_cc if c.target == "as" else (rep.is_symmetric and rep.reflexive_split_ok)
        if good:
            out.append(part)
    return sorted(out)


def _combinations(pool, size):
    from itertools import combinations

    return combinations(pool, size)


def _with_transpose(block, tmap, target):
    """The block plus its transpose block when needed; ``None`` if they overlap badly."""
    image = tuple(sorted(tmap[x] for x in block))
    if image == tuple(sorted(block)):
        return (tuple(sorted(block)),)
    if target == "js":
        return None
    if set(image) & set(block):
        return None
    return (tuple(sorted(block)), image)


def _level_sets(t, blocks, new_count, rest, cls, f_vector, constant_on) -> bool:
    """Check new block pairs and refine the classes of the remaining colors in place."""
    k = len(blocks)
    for a in range(k):
        for b in range(max(a, k - new_count), k):
            vec = f_vector(list(blocks[a]), list(blocks[b]))
            for blk in blocks:
                if not constant_on(vec, blk):
                    return False
            if rest:
                for x in rest:
                    cls[x] = (cls[x], int(vec[x]))
    if rest:
        labels = {}
        for x in rest:
            cls[x] = labels.setdefault(cls[x], len(labels))
    return True


def merging_report(cg: ColorGraph, partition: Sequence[Sequence[int]]) -> dict:
    """Merged graph summary: rank, valencies, properness and automorphism order."""
    from .permgrp import automorphism_group

    merged = merge_colors(cg, partition)
    rep = classify(merged)
    doc = {"partition": [list(b) for b in partition], "rank": merged.r, "valencies": rep.valencies}
    if rep.is_jordan_scheme:
        doc["proper"] = is_proper(merged, rep).proper
    doc["aut_order"] = automorphism_group(merged).order()
    return doc


__all__ = [
    "EnumeratedScheme",
    "EnumerationResult",
    "EnumerationTask",
    "MergingConstraints",
    "default_threads",
    "enumerate_jordan_schemes",
    "find_mergings",
    "merging_report",
    "valency_multisets",
]
