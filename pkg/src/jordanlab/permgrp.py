"""Permutation groups, 2-orbits, automorphisms and isomorphisms of color graphs.

Permutations are tuples of images: ``p[x]`` is the image of ``x``.  The
product ``compose(p, q)`` applies ``p`` first and then ``q``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .cc import (
    ColorGraph,
    _left_products,
    _onehot,
    as_color_graph,
    canonical_color_order,
    classify,
    fibers,
    structure_constants,
    StructureTensor,
)
from .errors import NotCoherent, ParseError, PreconditionError, SearchGuard

Perm = tuple


# -- permutation helpers --------------------------------------------------------


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[x] for x in p)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def check_perm(p: Sequence[int], n: int) -> Perm:
    p = tuple(int(v) for v in p)
    if len(p) != n or sorted(p) != list(range(n)):
        raise PreconditionError(f"not a permutation of degree {n}: {p}")
    return p


def from_cycles(cycles: Iterable[Sequence[int]], n: int) -> Perm:
    img = list(range(n))
    seen = set()
    for cyc in cycles:
        cyc = [int(v) for v in cyc]
        for v in cyc:
            if not 0 <= v < n or v in seen:
                raise PreconditionError(f"bad cycle {cyc} for degree {n}")
            seen.add(v)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return tuple(img)


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, n: int) -> Perm:
    """Parse cycle notation ``(0,1,2)(3,4)`` or an image list ``[1,2,0]``."""
    s = "".join(str(text).split())
    if s in ("", "()"):
        return identity(n)
    if s.startswith("("):
        if _CYCLE.sub("", s):
            raise PreconditionError(f"malformed cycle notation: {text!r}")
        cycles = []
        for body in _CYCLE.findall(s):
            if body:
                cycles.append([int(v) for v in body.split(",")])
        return from_cycles(cycles, n)
    body = s.strip("[]")
    try:
        images = [int(v) for v in body.split(",") if v != ""]
    except ValueError:
        raise ParseError(f"malformed permutation: {text!r}") from None
    return check_perm(images, n)


def parse_generators(text: str, n: int) -> List[Perm]:
    """Parse a generator list.

    Generators are separated by ``;`` or by a comma between cycle groups,
    e.g. ``"(0,1,2)(3,4); (1,2)"`` or ``"(0,1,2)(3,4),(1,2)"``.
    """
    s = "".join(str(text).split())
    parts = []
    for chunk in s.split(";"):
        if chunk:
            parts.extend(re.sub(r"\),\(", ");(", chunk).split(";"))
    return [parse_perm(p, n) for p in parts if p]


def cycles_of(p: Perm) -> List[tuple]:
    seen = [False] * len(p)
    out = []
    for x in range(len(p)):
        if seen[x] or p[x] == x:
            seen[x] = True
            continue
        cyc = []
        y = x
        while not seen[y]:
            seen[y] = True
            cyc.append(y)
            y = p[y]
        out.append(tuple(cyc))
    return out


def format_cycles(p: Perm) -> str:
    cyc = cycles_of(p)
    if not cyc:
        return "()"
    return "".join("(" + ",".join(map(str, c)) + ")" for c in cyc)


# -- stabilizer chains ---------------------------------------------------------------


def _orbit_transversal(b: int, gens: Sequence[Perm], n: int) -> dict:
    trans = {b: identity(n)}
    queue = [b]
    for pt in queue:
        u = trans[pt]
        for g in gens:
            im = g[pt]
            if im not in trans:
                trans[im] = compose(u, g)
                queue.append(im)
    return trans


class StabilizerChain:
    """Deterministic Schreier-Sims stabilizer chain.

    Base points are chosen as the smallest point moved by a new strong
    generator, so repeated runs give identical chains.
    """

    def __init__(self, n: int, generators: Sequence[Perm]):
        self.n = n
        self.base: List[int] = []
        self.strong: List[Perm] = []
        self.transversals: List[dict] = []
        ident = identity(n)
        for g in generators:
            if g == ident or g in self.strong:
                continue
            if all(g[b] == b for b in self.base):
                self.base.append(next(x for x in range(n) if g[x] != x))
            self.strong.append(g)
        self._rebuild(len(self.base) - 1)
        self._complete()

    def _level_gens(self, level: int) -> List[Perm]:
        fixed = self.base[:level]
        return [g for g in self.strong if all(g[b] == b for b in fixed)]

    def _rebuild(self, upto: int) -> None:
        while len(self.transversals) < len(self.base):
            self.transversals.append({})
        for lvl in range(upto + 1):
            self.transversals[lvl] = _orbit_transversal(self.base[lvl], self._level_gens(lvl), self.n)

    def sift(self, h: Perm, start: int = 0):
        """Strip ``h`` through levels ``start..``; return residue and level reached."""
        for lvl in range(start, len(self.base)):
            beta = h[self.base[lvl]]
            trans = self.transversals[lvl]
            if beta not in trans:
                return h, lvl
            h = compose(h, inverse(trans[beta]))
        return h, len(self.base)

    def _complete(self) -> None:
        ident = identity(self.n)
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            gens = self._level_gens(i)
            trans = self.transversals[i]
            for pt in list(trans):
                u = trans[pt]
                for s in gens:
                    us = compose(u, s)
                    sch = compose(us, inverse(trans[us[self.base[i]]]))
                    if sch == ident:
                        continue
                    h, j = self.sift(sch, i + 1)
                    if j < len(self.base) or h != ident:
                        if j == len(self.base):
                            self.base.append(next(x for x in range(self.n) if h[x] != x))
                        self.strong.append(h)
                        self._rebuild(j)
                        i = j
                        restart = True
                        break
                if restart:
                    break
            if not restart:
                i -= 1

    def order(self) -> int:
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out

    def contains(self, p: Perm) -> bool:
        h, lvl = self.sift(tuple(p))
        return lvl == len(self.base) and h == identity(self.n)


class PermutationGroup:
    """Group generated by permutations of ``range(degree)``."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        self.degree = int(degree)
        gens = []
        ident = identity(self.degree)
        for g in generators:
            g = check_perm(g, self.degree)
            if g != ident and g not in gens:
                gens.append(g)
        self.generators: List[Perm] = gens
        self._chain: Optional[StabilizerChain] = None

    @classmethod
    def from_cycles(cls, degree: int, cycle_strings: Iterable[str]) -> "PermutationGroup":
        return cls(degree, [parse_perm(s, degree) for s in cycle_strings])

    @property
    def chain(self) -> StabilizerChain:
        if self._chain is None:
            self._chain = StabilizerChain(self.degree, self.generators)
        return self._chain

    def order(self) -> int:
        return self.chain.order()

    def __contains__(self, p) -> bool:
        return self.chain.contains(tuple(p))

    def orbits(self) -> List[tuple]:
        return orbits(self)

    def elements(self, limit: int = 10**6) -> List[Perm]:
        """All group elements in sorted order (guarded by ``limit``)."""
        if self.order() > limit:
            raise SearchGuard("group too large to list")
        ident = identity(self.degree)
        seen = {ident}
        queue = [ident]
        for x in queue:
            for g in self.generators:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def is_abelian(self) -> bool:
        return all(compose(a, b) == compose(b, a) for a in self.generators for b in self.generators)

    def __repr__(self):
        return f"PermutationGroup(degree={self.degree}, gens={len(self.generators)})"


def group_order(g: PermutationGroup) -> int:
    return g.order()


def orbits(g: PermutationGroup) -> List[tuple]:
    """Orbit partition, each orbit sorted, orbits ordered by smallest point."""
    n = g.degree
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in g.generators:
        for x in range(n):
            a, b = find(x), find(p[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted((tuple(v) for v in groups.values()), key=lambda o: o[0])


def two_orbits(g: PermutationGroup) -> ColorGraph:
    """Color graph of the orbits of ``g`` on ordered pairs."""
    n = g.degree
    size = n * n
    parent = np.arange(size)
    maps = []
    for p in g.generators:
        arr = np.asarray(p)
        maps.append((arr[:, None] * n + arr[None, :]).ravel())
    parent_list = parent.tolist()

    def find(a):
        while parent_list[a] != a:
            parent_list[a] = parent_list[parent_list[a]]
            a = parent_list[a]
        return a

    for m in maps:
        for x, y in enumerate(m.tolist()):
            a, b = find(x), find(y)
            if a != b:
                parent_list[max(a, b)] = min(a, b)
    labels = np.array([find(x) for x in range(size)]).reshape(n, n)
    return ColorGraph(canonical_color_order(labels))


# -- induced actions -----------------------------------------------------------------


def _act(p: Perm, obj: frozenset) -> frozenset:
    return frozenset(tuple(p[v] for v in t) for t in obj)


def _obj_key(obj: frozenset) -> tuple:
    return tuple(sorted(obj))


@dataclass(frozen=True)
class InducedAction:
    source: PermutationGroup
    seeds: tuple
    image: PermutationGroup
    labeling: tuple


def as_object(seed) -> frozenset:
    """Normalize a seed: a tuple of points, or an iterable of such tuples."""
    if isinstance(seed, frozenset):
        return seed
    seed = list(seed)
    if seed and all(isinstance(v, (int, np.integer)) for v in seed):
        return frozenset([tuple(int(v) for v in seed)])
    return frozenset(tuple(int(v) for v in t) for t in seed)


def induce(g: PermutationGroup, seeds: Sequence) -> InducedAction:
    """Action of ``g`` on the disjoint union of the orbits of the seed objects.

    A seed is a set of tuples of points; an ordered pair ``(0, 1)`` is the
    seed ``{(0, 1)}`` and the pair partition ``{{0,1},{2,3}}`` can be given
    as ``{(0, 1), (1, 0), (2, 3), (3, 2)}``.  Each orbit is listed in sorted
    order of the object representations.
    """
    objs = [as_object(s) for s in seeds]
    for o in objs:
        if not o or any(not 0 <= v < g.degree for t in o for v in t):
            raise PreconditionError("seed objects must be nonempty tuples of source points")
    labeling = []
    tables = []
    for o in objs:
        orbit = {o}
        queue = [o]
        for x in queue:
            for p in g.generators:
                y = _act(p, x)
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        start = len(labeling)
        block = sorted(orbit, key=_obj_key)
        labeling.extend(block)
        tables.append({x: start + i for i, x in enumerate(block)})
    gens = []
    for p in g.generators:
        img = []
        for table in tables:
            for x in table:
                y = _act(p, x)
                if y not in table:
                    raise PreconditionError("generator leaves the orbit of a seed")
                img.append(table[y])
        gens.append(tuple(img))
    return InducedAction(g, tuple(objs), PermutationGroup(len(labeling), gens), tuple(labeling))


# -- individualization-refinement -------------------------------------------------------


class _Refiner:
    """Equitable vertex-partition refinement driven by arc colors."""

    def __init__(self, cells: np.ndarray):
        c = np.asarray(cells, dtype=np.int64)
        r = int(c.max()) + 1
        self.n = c.shape[0]
        self.cells = c
        self.arc = c * r + c.T
        self.diag = np.diag(c).copy()

    def refine(self, vc: np.ndarray):
        """Refine vertex colors to stability; return dense colors and a trace."""
        trace = []
        k = len(np.unique(vc))
        while True:
            m = int(vc.max()) + 1
            keys = self.arc * m + vc[None, :]
            keys.sort(axis=1)
            sig = np.concatenate([vc[:, None], keys], axis=1)
            uniq, inv = np.unique(sig, axis=0, return_inverse=True)
            trace.append(hash(uniq.tobytes()))
            inv = inv.ravel()
            if len(uniq) == k:
                return inv, tuple(trace)
            vc, k = inv, len(uniq)

    def root(self):
        return self.refine(self.diag.copy())


def _individualize(vc: np.ndarray, v: int) -> np.ndarray:
    out = vc * 2 + 1
    out[v] -= 1
    return out


def _target_value(vc: np.ndarray) -> Optional[int]:
    counts = np.bincount(vc)
    big = np.flatnonzero(counts > 1)
    return int(big[0]) if len(big) else None


class _Tree:
    """Leftmost path of the search tree of a color graph."""

    def __init__(self, cells: np.ndarray):
        self.refiner = _Refiner(cells)
        self.cells = self.refiner.cells
        vc, tr = self.refiner.root()
        self.path_vc = [vc]
        self.path_tr = [tr]
        self.base: List[int] = []
        while True:
            val = _target_value(vc)
            if val is None:
                break
            b = int(np.flatnonzero(vc == val)[0])
            vc, tr = self.refiner.refine(_individualize(vc, b))
            self.base.append(b)
            self.path_vc.append(vc)
            self.path_tr.append(tr)

    def descend(self, refiner: _Refiner, vc: np.ndarray, depth: int, target_cells: np.ndarray):
        """Find ``p`` with ``target[p[x], p[y]] == ref[x, y]`` along matching paths."""
        if depth == len(self.base):
            inv = np.argsort(vc)
            p = inv[self.path_vc[-1]]
            if np.array_equal(target_cells[np.ix_(p, p)], self.cells):
                return p
            return None
        val = self.path_vc[depth][self.base[depth]]
        for w in np.flatnonzero(vc == val):
            child, tr = refiner.refine(_individualize(vc, int(w)))
            if tr != self.path_tr[depth + 1]:
                continue
            res = self.descend(refiner, child, depth + 1, target_cells)
            if res is not None:
                return res
        return None

    def automorphisms(self) -> List[Perm]:
        """Strong generating set of the automorphism group relative to the base."""
        gens: List[Perm] = []
        for i in reversed(range(len(self.base))):
            vc = self.path_vc[i]
            b = self.base[i]
            orbit = set(_orbit_transversal(b, gens, self.refiner.n))
            for v in np.flatnonzero(vc == vc[b]):
                v = int(v)
                if v in orbit:
                    continue
                child, tr = self.refiner.refine(_individualize(vc, v))
                if tr != self.path_tr[i + 1]:
                    continue
                p = self.descend(self.refiner, child, i + 1, self.cells)
                if p is not None:
                    gens.append(tuple(int(x) for x in p))
                    orbit = set(_orbit_transversal(b, gens, self.refiner.n))
        return gens


def automorphism_group(cg: ColorGraph) -> PermutationGroup:
    """Color-preserving automorphism group by individualization-refinement."""
    cg = as_color_graph(cg)
    tree = _Tree(cg.cells)
    return PermutationGroup(cg.n, tree.automorphisms())


def _simple_invariants_match(a: ColorGraph, b: ColorGraph) -> bool:
    return (
        a.n == b.n
        and a.r == b.r
        and np.array_equal(a.color_sizes(), b.color_sizes())
        and np.array_equal(np.sort(np.diag(a.cells)), np.sort(np.diag(b.cells)))
    )


def _color_preserving_map(a: ColorGraph, b: ColorGraph, tree_b: Optional[_Tree] = None):
    """Vertex map ``q`` with ``b[q[x], q[y]] == a[x, y]``, or ``None``."""
    if not _simple_invariants_match(a, b):
        return None
    tree_b = tree_b or _Tree(b.cells)
    ra = _Refiner(a.cells)
    vc, tr = ra.root()
    if tr != tree_b.path_tr[0]:
        return None
    p = tree_b.descend(ra, vc, 0, a.cells)
    if p is None:
        return None
    return inverse(tuple(int(x) for x in p))


def _triangle_tensor(cg: ColorGraph) -> np.ndarray:
    """``T[i, j, k]`` counts triples with colors ``(x,y)=i, (y,z)=j, (z,x)=k``."""
    r = cg.r
    onehot = _onehot(cg.cells, r)
    out = np.zeros((r, r, r), dtype=np.int64)
    back = onehot.transpose(1, 0, 2)
    for i in range(r):
        vals = _left_products(cg.cells, r, onehot, i)
        out[i] = np.rint(np.einsum("xyj,xyk->jk", vals, back)).astype(np.int64)
    return out


def _color_keys(cg: ColorGraph, tri: np.ndarray) -> list:
    cells = cg.cells
    keys = []
    for i in range(cg.r):
        a = cells == i
        keys.append(
            (
                not a.diagonal().any(),
                bool(np.array_equal(a, a.T)),
                int(a.sum()),
                tuple(sorted(a.sum(axis=1).tolist())),
                tuple(sorted(a.sum(axis=0).tolist())),
                int(tri[i, i, i]),
                tuple(sorted(tri[i, i].tolist())),
                tuple(sorted(tri[i].ravel().tolist())),
            )
        )
    return keys


def _color_bijections(a: ColorGraph, b: ColorGraph):
    """Yield color maps ``f`` (a-color -> b-color) compatible with triangle counts."""
    ta, tb = _triangle_tensor(a), _triangle_tensor(b)
    ka, kb = _color_keys(a, ta), _color_keys(b, tb)
    if sorted(ka) != sorted(kb):
        return
    r = a.r
    cands = [[j for j in range(r) if kb[j] == ka[i]] for i in range(r)]
    order = sorted(range(r), key=lambda i: (len(cands[i]), i))
    f = [-1] * r
    used = [False] * r

    def rec(pos):
        if pos == r:
            yield tuple(f)
            return
        i = order[pos]
        done = order[: pos + 1]
        for j in cands[i]:
            if used[j]:
                continue
            f[i] = j
            img = [f[x] for x in done]
            if np.array_equal(ta[np.ix_(done, done, done)], tb[np.ix_(img, img, img)]):
                used[j] = True
                yield from rec(pos + 1)
                used[j] = False
            f[i] = -1

    yield from rec(0)


@dataclass(frozen=True)
class Isomorphism:
    vertex_map: tuple
    color_map: tuple


def isomorphic(a: ColorGraph, b: ColorGraph, mode: str = "color-preserving") -> Optional[Isomorphism]:
    """Find a vertex bijection (and color bijection) carrying ``a`` onto ``b``.

    In ``color-preserving`` mode colors must match exactly; in
    ``color-permuting`` mode the colors may be renamed.  The returned maps
    satisfy ``b[v[x], v[y]] == c[a[x, y]]``.
    """
    a, b = as_color_graph(a), as_color_graph(b)
    if mode not in ("color-preserving", "color-permuting"):
        raise PreconditionError(f"unknown isomorphism mode {mode!r}")
    if a.n != b.n or a.r != b.r:
        return None
    tree_b = _Tree(b.cells)
    if mode == "color-preserving":
        q = _color_preserving_map(a, b, tree_b)
        return None if q is None else Isomorphism(q, identity(a.r))
    for f in _color_bijections(a, b):
        q = _color_preserving_map(ColorGraph(np.asarray(f)[a.cells]), b, tree_b)
        if q is not None:
            return Isomorphism(q, f)
    return None


@dataclass(frozen=True)
class CanonicalForm:
    graph: ColorGraph
    labeling: tuple

    def key(self) -> bytes:
        return self.graph.cells.tobytes()


def _better(m: np.ndarray, best: Optional[np.ndarray]) -> bool:
    if best is None:
        return True
    diff = np.flatnonzero(m.ravel() != best.ravel())
    return bool(diff.size) and m.flat[diff[0]] < best.flat[diff[0]]


def _canonical_preserving(cells: np.ndarray):
    tree = _Tree(cells)
    gens = tree.automorphisms()
    n = tree.refiner.n
    best = [None, None]

    def stab_orbits(depth):
        fixed = tree.base[:depth]
        sub = [g for g in gens if all(g[x] == x for x in fixed)]
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in sub:
            for x in range(n):
                u, v = find(x), find(g[x])
                if u != v:
                    parent[max(u, v)] = min(u, v)
        return [find(x) for x in range(n)]

    def explore(vc, depth, on_path):
        val = _target_value(vc)
        if val is None:
            inv = np.argsort(vc)
            m = cells[np.ix_(inv, inv)]
            if _better(m, best[0]):
                best[0] = m
                best[1] = tuple(int(x) for x in vc)
            return
        cands = [int(w) for w in np.flatnonzero(vc == val)]
        if on_path:
            root = stab_orbits(depth)
            seen = set()
            reps = []
            for w in cands:
                if root[w] not in seen:
                    seen.add(root[w])
                    reps.append(w)
            cands = reps
        for w in cands:
            child, _ = tree.refiner.refine(_individualize(vc, w))
            explore(child, depth + 1, on_path and w == tree.base[depth])

    explore(tree.path_vc[0], 0, True)
    return best[0], best[1]


def _minimal_tensor_maps(tri: np.ndarray, keys: list, limit: Optional[int] = None) -> List[Perm]:
    """Color relabelings (old -> new) giving the least relabeled triangle tensor.

    New colors are grouped by sorted color key; the tensor is compared shell
    by shell, shell ``t`` holding the entries whose largest index is ``t``.
    Every isomorphic color graph yields the same least tensor, so the set of
    minimizing relabelings is an isomorphism invariant.
    """
    r = tri.shape[0]
    slots = sorted(range(r), key=lambda i: keys[i])
    slot_keys = [keys[i] for i in slots]
    states = [()]
    for t in range(r):
        best = None
        nxt = []
        for st in states:
            for src in range(r):
                if src in st or keys[src] != slot_keys[t]:
                    continue
                seq = st + (src,)
                idx = list(seq)
                shell = np.concatenate(
                    [
                        tri[np.ix_([src], idx, idx)].ravel(),
                        tri[np.ix_(idx[:-1], [src], idx)].ravel(),
                        tri[np.ix_(idx[:-1], idx[:-1], [src])].ravel(),
                    ]
                ).tolist()
                if best is None or shell < best:
                    best = shell
                    nxt = [seq]
                elif shell == best:
                    nxt.append(seq)
        states = nxt
        if limit is not None and len(states) > limit:
            raise SearchGuard("too many color relabelings for a color-permuting canonical form")
    maps = []
    for seq in states:
        f = [0] * r
        for new, old in enumerate(seq):
            f[old] = new
        maps.append(tuple(f))
    return sorted(maps)


def canonical_form(cg: ColorGraph, mode: str = "color-preserving", max_bijections: int = 5040) -> CanonicalForm:
    """Lexicographically least relabeled cell matrix over the search tree.

    Two color graphs are isomorphic (in the given mode) exactly when their
    canonical forms are equal.
    """
    cg = as_color_graph(cg)
    if mode == "color-preserving":
        m, lab = _canonical_preserving(cg.cells)
        return CanonicalForm(ColorGraph(m), lab)
    tri = _triangle_tensor(cg)
    keys = _color_keys(cg, tri)
    maps = _minimal_tensor_maps(tri, keys, limit=8 * max_bijections)
    if len(maps) > max_bijections:
        raise SearchGuard("too many color relabelings for a color-permuting canonical form")
    best_m, best_lab = None, None
    for f in maps:
        m, lab = _canonical_preserving(np.asarray(f, dtype=np.int64)[cg.cells])
        if _better(m, best_m):
            best_m, best_lab = m, lab
    return CanonicalForm(ColorGraph(best_m), best_lab)


# -- algebraic and color automorphisms ----------------------------------------------------


def jordan_tensor(cg: ColorGraph) -> np.ndarray:
    """``q[i, j, k]``: value of ``A_iA_j + A_jA_i`` on color ``k`` (Jordan configurations)."""
    from .cc import _representatives, _right_products

    r = cg.r
    onehot = _onehot(cg.cells, r)
    rx, ry = _representatives(cg.cells, r)
    q = np.zeros((r, r, r), dtype=np.int64)
    for i in range(r):
        vals = _left_products(cg.cells, r, onehot, i) + _right_products(cg.cells, r, onehot, i)
        q[i] = np.rint(vals[rx, ry]).astype(np.int64).T
    return q


def _tensor_automorphisms(p: np.ndarray, keys: list, limit: int = 24) -> List[Perm]:
    r = p.shape[0]
    if r > limit:
        raise SearchGuard(f"rank {r} exceeds the algebraic automorphism guard ({limit})")
    cands = [[j for j in range(r) if keys[j] == keys[i]] for i in range(r)]
    f = [-1] * r
    used = [False] * r
    out = []

    def rec(i):
        if i == r:
            out.append(tuple(f))
            return
        done = list(range(i + 1))
        for j in cands[i]:
            if used[j]:
                continue
            f[i] = j
            img = f[: i + 1]
            if np.array_equal(p[np.ix_(done, done, done)], p[np.ix_(img, img, img)]):
                used[j] = True
                rec(i + 1)
                used[j] = False
        f[i] = -1

    rec(0)
    return sorted(out)


def algebraic_automorphisms(t: StructureTensor, valencies=None, fiber_sizes=None) -> PermutationGroup:
    """Color permutations preserving valencies and all intersection numbers.

    Reflexive colors only map to reflexive colors, and when ``fiber_sizes``
    (indexed by color, ``None`` for non-reflexive) is supplied, only to
    reflexive colors of equal fiber size.
    """
    p = np.asarray(t.p)
    val = list(valencies if valencies is not None else t.valencies)
    r = p.shape[0]
    keys = []
    for i in range(r):
        refl = val[i] == 1 and p[i, i, i] == 1
        size = fiber_sizes[i] if (fiber_sizes is not None and refl) else None
        keys.append((refl, size, val[i], int(p[i, i, i]), tuple(sorted(p[i, i].tolist()))))
    elems = _tensor_automorphisms(p, keys)
    group = PermutationGroup(r, elems)
    group.listed = elems
    return group


def _reflexive_fiber_sizes(cg: ColorGraph) -> list:
    sizes = [None] * cg.r
    for f in fibers(cg):
        sizes[int(cg.cells[f[0], f[0]])] = len(f)
    return sizes


def color_automorphism_group(cg: ColorGraph) -> PermutationGroup:
    """Vertex permutations that permute the colors of ``cg``.

    Candidate color permutations come from the structure constants (CC),
    the Jordan tensor (Jordan scheme) or else the triangle-count tensor;
    each candidate is kept only if some vertex permutation realizes it.
    """
    cg = as_color_graph(cg)
    rep = classify(cg)
    if not rep.valid_partition:
        raise NotCoherent("color automorphisms need a valid color graph")
    if rep.is_cc:
        sizes = _reflexive_fiber_sizes(cg)
        aaut = algebraic_automorphisms(structure_constants(cg), fiber_sizes=sizes)
        elems = aaut.listed
    elif rep.is_jordan_scheme:
        sizes = _reflexive_fiber_sizes(cg)
        q = jordan_tensor(cg)
        val = list(rep.valencies)
        keys = [(sizes[i], val[i], int(q[i, i, i]), tuple(sorted(q[i, i].tolist()))) for i in range(cg.r)]
        elems = _tensor_automorphisms(q, keys)
    else:
        tri = _triangle_tensor(cg)
        elems = _tensor_automorphisms(tri, _color_keys(cg, tri))
    aut = automorphism_group(cg)
    gens = list(aut.generators)
    tree = _Tree(cg.cells)
    realized = {identity(cg.r)}
    realized_gens: List[Perm] = []
    for f in elems:
        if f in realized:
            continue
        q = _color_preserving_map(ColorGraph(np.asarray(f)[cg.cells]), cg, tree)
        if q is None:
            continue
        gens.append(q)
        realized_gens.append(f)
        realized = set(PermutationGroup(cg.r, realized_gens).elements()) | {identity(cg.r)}
    return PermutationGroup(cg.n, gens)


__all__ = [
    "CanonicalForm",
    "InducedAction",
    "Isomorphism",
    "PermutationGroup",
    "StabilizerChain",
    "algebraic_automorphisms",
    "automorphism_group",
    "canonical_form",
    "color_automorphism_group",
    "compose",
    "format_cycles",
    "from_cycles",
    "group_order",
    "identity",
    "induce",
    "inverse",
    "isomorphic",
    "jordan_tensor",
    "orbits",
    "parse_generators",
    "parse_perm",
    "two_orbits",
]
