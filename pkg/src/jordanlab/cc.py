"""Color graphs, products of basis relations, structure constants, classification.

A color graph on ``n`` points is stored as an ``n x n`` matrix of color
indices.  Each color ``i`` defines a 0/1 relation matrix ``A_i``; coherent
configurations, association schemes and Jordan schemes are all color graphs
with extra properties which :func:`classify` decides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, InvalidColorGraph, OverflowRisk

_INT64_LIMIT = 2**62


@dataclass(frozen=True, eq=False)
class ColorGraph:
    """An ``n x n`` matrix of dense color indices ``0..r-1``.

    Every color must occur at least once.  Instances are immutable: the
    cell matrix is copied and flagged read-only on construction.
    """

    cells: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.cells)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise InvalidColorGraph("cell matrix must be square")
        if raw.shape[0] < 1:
            raise InvalidColorGraph("color graph needs at least one vertex")
        if raw.dtype.kind not in "iub":
            if raw.dtype.kind == "f" and np.all(np.mod(raw, 1) == 0):
                raw = raw.astype(np.int64)
            else:
                raise InvalidColorGraph("color indices must be integers")
        cells = np.array(raw, dtype=np.int64)
        if cells.min() < 0:
            raise InvalidColorGraph("negative color index")
        used = np.zeros(int(cells.max()) + 1, dtype=bool)
        used[cells.ravel()] = True
        if not used.all():
            missing = int(np.flatnonzero(~used)[0])
            raise InvalidColorGraph(f"color {missing} is unused")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n(self) -> int:
        return int(self.cells.shape[0])

    @property
    def r(self) -> int:
        return int(self.cells.max()) + 1

    def relation(self, i: int) -> np.ndarray:
        """Boolean relation matrix ``A_i`` of color ``i``."""
        if not 0 <= i < self.r:
            raise IndexError(f"color {i} out of range")
        return self.cells == i

    def relations(self) -> np.ndarray:
        """Stack of all relation matrices, shape ``(r, n, n)``."""
        return self.cells[None, :, :] == np.arange(self.r)[:, None, None]

    def color_sizes(self) -> np.ndarray:
        return np.bincount(self.cells.ravel(), minlength=self.r)

    def relabel_vertices(self, perm: Sequence[int]) -> "ColorGraph":
        """Image of the graph under the vertex map ``x -> perm[x]``."""
        p = np.asarray(perm, dtype=np.int64)
        out = np.empty_like(self.cells)
        out[np.ix_(p, p)] = self.cells
        return ColorGraph(out)

    def relabel_colors(self, mapping: Sequence[int]) -> "ColorGraph":
        """Rename color ``i`` to ``mapping[i]`` (must be a bijection)."""
        m = np.asarray(mapping, dtype=np.int64)
        if sorted(m.tolist()) != list(range(self.r)):
            raise InvalidColorGraph("color mapping is not a permutation")
        return ColorGraph(m[self.cells])

    def __eq__(self, other):
        if not isinstance(other, ColorGraph):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool(
            np.array_equal(self.cells, other.cells)
        )

    def __hash__(self):
        return hash((self.n, self.cells.tobytes()))

    def __repr__(self):
        return f"ColorGraph(n={self.n}, r={self.r})"

    @classmethod
    def from_relations(cls, relations: Iterable[np.ndarray]) -> "ColorGraph":
        """Build a color graph from boolean matrices partitioning ``n x n``."""
        mats = [np.asarray(a, dtype=bool) for a in relations]
        if not mats:
            raise InvalidColorGraph("no relations given")
        cover = np.sum(mats, axis=0)
        if not np.all(cover == 1):
            raise InvalidColorGraph("relations do not partition the pairs")
        cells = np.zeros(mats[0].shape, dtype=np.int64)
        for i, a in enumerate(mats):
            cells[a] = i
        return cls(cells)


def as_color_graph(obj) -> ColorGraph:
    return obj if isinstance(obj, ColorGraph) else ColorGraph(np.asarray(obj))


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """True when two cell matrices induce the same partition of the pairs."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        return False
    pairs = np.unique(np.stack([a, b]), axis=1)
    return len(np.unique(pairs[0])) == pairs.shape[1] == len(np.unique(pairs[1]))


def refines(fine: np.ndarray, coarse: np.ndarray) -> bool:
    """True when every class of ``fine`` lies inside one class of ``coarse``."""
    pairs = np.unique(np.stack([np.ravel(fine), np.ravel(coarse)]), axis=1)
    return len(np.unique(pairs[0])) == pairs.shape[1]


def dense_labels(values: np.ndarray) -> np.ndarray:
    """Renumber arbitrary labels to ``0..k-1`` in order of sorted value."""
    _, inv = np.unique(values, return_inverse=True)
    return inv.reshape(np.shape(values))


def canonical_color_order(cells: np.ndarray) -> np.ndarray:
    """Relabel colors: reflexive colors first, then the rest by valency.

    Reflexive colors are ordered by their smallest vertex.  The other colors
    are sorted by (row sum at first occurrence, first occurrence in
    row-major order), which is deterministic for a fixed cell matrix.
    """
    cells = dense_labels(np.asarray(cells))
    r = int(cells.max()) + 1
    n = cells.shape[0]
    flat = cells.ravel()
    first = np.full(r, n * n, dtype=np.int64)
    np.minimum.at(first, flat, np.arange(n * n))
    diag = np.zeros(r, dtype=bool)
    diag[np.diag(cells)] = True
    keys = []
    for c in range(r):
        x, y = divmod(int(first[c]), n)
        if diag[c] and x == y:
            keys.append((0, x, 0))
        else:
            keys.append((1, int(np.count_nonzero(cells[x] == c)), int(first[c])))
    order = sorted(range(r), key=lambda c: keys[c])
    mapping = np.empty(r, dtype=np.int64)
    mapping[order] = np.arange(r)
    return mapping[cells]


def canonical(cg: ColorGraph) -> ColorGraph:
    return ColorGraph(canonical_color_order(cg.cells))


# -- integer matrix algebra ---------------------------------------------------


def _check_overflow(n: int, a: np.ndarray, b: np.ndarray) -> None:
    ma = int(np.abs(a).max()) if a.size else 0
    mb = int(np.abs(b).max()) if b.size else 0
    if 2 * n * ma * mb >= _INT64_LIMIT:
        raise OverflowRisk("product entries may exceed the 64-bit range")


def int_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer matrix product with an overflow guard."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    _check_overflow(a.shape[1], a, b)
    return a @ b


def symmetrized_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``AB + BA``, twice the Jordan product of ``A`` and ``B``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    a = a.astype(np.int64)
    b = b.astype(np.int64)
    _check_overflow(a.shape[0], a, b)
    return a @ b + b @ a


# -- product tables -----------------------------------------------------------


def _onehot(cells: np.ndarray, r: int) -> np.ndarray:
    """``H[x, y, j] = 1.0`` when ``cells[x, y] == j``."""
    return (cells[:, :, None] == np.arange(r)[None, None, :]).astype(np.float64)


def _left_products(cells, r, onehot, i):
    """``P[x, y, j] = (A_i A_j)(x, y)``."""
    n = cells.shape[0]
    a = (cells == i).astype(np.float64)
    return (a @ onehot.reshape(n, n * r)).reshape(n, n, r)


def _right_products(cells, r, onehot, i):
    """``Q[x, y, j] = (A_j A_i)(x, y)``."""
    n = cells.shape[0]
    a = (cells == i).astype(np.float64)
    g = onehot.transpose(0, 2, 1).reshape(n * r, n)
    return (g @ a).reshape(n, r, n).transpose(0, 2, 1)


def _representatives(cells: np.ndarray, r: int):
    n = cells.shape[0]
    first = np.full(r, n * n, dtype=np.int64)
    np.minimum.at(first, cells.ravel(), np.arange(n * n))
    return first // n, first % n


def _first_mismatch(values, cells, reps):
    """Locate a cell whose value vector differs from its class representative."""
    rx, ry = reps
    expected = values[rx[cells], ry[cells]]
    bad = np.any(expected != values, axis=2)
    if not bad.any():
        return None
    x, y = (int(v) for v in np.argwhere(bad)[0])
    k = int(cells[x, y])
    j = int(np.flatnonzero(expected[x, y] != values[x, y])[0])
    return j, k, (int(rx[k]), int(ry[k])), (x, y), int(values[rx[k], ry[k], j]), int(values[x, y, j])


# -- structure constants ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StructureTensor:
    """Intersection numbers ``p[i, j, k]`` of a coherent configuration."""

    r: int
    p: np.ndarray
    valencies: tuple
    starts: tuple = None
    ends: tuple = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.int64)
        if p.shape != (self.r, self.r, self.r):
            raise ValueError("tensor shape does not match rank")
        nv = np.asarray(self.valencies, dtype=np.int64)
        checked = range(self.r) if self.starts is not None else ()
        for i in checked:
            for j in range(self.r):
                total = int(np.sum(p[i, j] * nv * (np.asarray(self.starts) == self.starts[i])))
                want = int(nv[i] * nv[j]) if self.ends[i] == self.starts[j] else 0
                if total != want:
                    raise ValueError(f"path count check failed for colors {i}, {j}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class StructureFailure:
    """Witness that intersection numbers are not constant on a color class."""

    i: int
    j: int
    k: int
    pair_a: tuple
    pair_b: tuple
    count_a: int
    count_b: int


def _fiber_data(cg: ColorGraph):
    """Start and end fiber index of every color, or ``None`` if undefined."""
    cells = cg.cells
    diag = np.diag(cells)
    fiber_of_vertex = dense_labels(diag)
    r = cg.r
    starts = [-1] * r
    ends = [-1] * r
    pairs = np.unique(
        np.stack([cells.ravel(), np.repeat(fiber_of_vertex, cg.n), np.tile(fiber_of_vertex, cg.n)]),
        axis=1,
    )
    for c, s, e in pairs.T:
        if starts[c] not in (-1, s) or ends[c] not in (-1, e):
            return None
        starts[c] = int(s)
        ends[c] = int(e)
    return tuple(starts), tuple(ends)


def structure_constants(cg: ColorGraph) -> Union[StructureTensor, StructureFailure]:
    """Intersection numbers of ``cg`` or the first witness of failure.

    ``p[i, j, k]`` counts ``z`` with ``c(x, z) = i`` and ``c(z, y) = j`` for
    any ``(x, y)`` of color ``k``.
    """
    cells = cg.cells
    r = cg.r
    onehot = _onehot(cells, r)
    reps = _representatives(cells, r)
    p = np.zeros((r, r, r), dtype=np.int64)
    for i in range(r):
        vals = _left_products(cells, r, onehot, i)
        bad = _first_mismatch(vals, cells, reps)
        if bad is not None:
            j, k, pa, pb, ca, cb = bad
            return StructureFailure(i, j, k, pa, pb, ca, cb)
        p[i] = np.rint(vals[reps[0], reps[1]]).astype(np.int64).T
    fib = _fiber_data(cg) or (None, None)
    return StructureTensor(r, p, tuple(_valency_on_support(cells, r)), fib[0], fib[1])


def _row_counts(cells: np.ndarray, r: int) -> np.ndarray:
    """``S[x, i]`` is the number of ``y`` with ``c(x, y) = i``."""
    n = cells.shape[0]
    s = np.zeros((n, r), dtype=np.int64)
    np.add.at(s, (np.repeat(np.arange(n), n), cells.ravel()), 1)
    return s


def _valency_on_support(cells, r):
    s = _row_counts(cells, r)
    out = []
    for i in range(r):
        col = s[:, i]
        nz = col[col > 0]
        out.append(int(nz[0]) if len(nz) and np.all(nz == nz[0]) else -1)
    return out


# -- classification ------------------------------------------------------------


@dataclass(frozen=True)
class SchemeReport:
    valid_partition: bool
    reflexive_split_ok: bool
    transpose_closed: bool
    is_cc: bool
    is_homogeneous: bool
    is_symmetric: bool
    is_commutative: bool
    is_jordan_scheme: bool
    valencies: Union[tuple, str]
    fibers: tuple = field(default=())

    @property
    def is_as(self) -> bool:
        return self.is_cc and self.is_homogeneous

    def as_dict(self) -> dict:
        return {
            "valid_partition": self.valid_partition,
            "reflexive_split_ok": self.reflexive_split_ok,
            "transpose_closed": self.transpose_closed,
            "is_cc": self.is_cc,
            "is_as": self.is_as,
            "is_homogeneous": self.is_homogeneous,
            "is_symmetric": self.is_symmetric,
            "is_commutative": self.is_commutative,
            "is_jordan_scheme": self.is_jordan_scheme,
            "valencies": list(self.valencies) if isinstance(self.valencies, tuple) else self.valencies,
            "fibers": [list(f) for f in self.fibers],
        }


_INVALID = SchemeReport(False, False, False, False, False, False, False, False, "irregular", ())


def reflexive_split(cg: ColorGraph) -> bool:
    cells = cg.cells
    diag_colors = np.unique(np.diag(cells))
    off = cells[~np.eye(cg.n, dtype=bool)]
    return not np.isin(off, diag_colors).any()


def transpose_map(cg: ColorGraph):
    """Color ``i -> i'`` with ``A_{i'} = A_i^T``, or ``None`` if not closed."""
    pairs = np.unique(np.stack([cg.cells.ravel(), cg.cells.T.ravel()]), axis=1)
    if pairs.shape[1] != cg.r:
        return None
    return [int(v) for v in pairs[1]]


def fibers(cg: ColorGraph) -> tuple:
    """Vertex sets of the reflexive colors, ordered by smallest vertex."""
    diag = np.diag(cg.cells)
    groups = {}
    for v, c in enumerate(diag.tolist()):
        groups.setdefault(c, []).append(v)
    return tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: g[0]))


def is_regular(cg: ColorGraph) -> bool:
    """All colors have constant row sums and constant column sums."""
    rows = _row_counts(cg.cells, cg.r)
    cols = _row_counts(cg.cells.T, cg.r)
    return bool(np.all(rows == rows[0]) and np.all(cols == cols[0]))


def valencies(cg: ColorGraph):
    """Row sum of each color on the rows where it occurs, or ``"irregular"``."""
    vals = _valency_on_support(cg.cells, cg.r)
    if any(v < 0 for v in vals):
        return "irregular"
    return tuple(vals)


def _jordan_closed(cells: np.ndarray, r: int) -> bool:
    onehot = _onehot(cells, r)
    reps = _representatives(cells, r)
    for i in range(r):
        vals = _left_products(cells, r, onehot, i) + _right_products(cells, r, onehot, i)
        if _first_mismatch(vals[:, :, i:], cells, reps) is not None:
            return False
    return True


def _commutative(cells: np.ndarray, r: int) -> bool:
    onehot = _onehot(cells, r)
    for i in range(r):
        if not np.array_equal(
            _left_products(cells, r, onehot, i), _right_products(cells, r, onehot, i)
        ):
            return False
    return True


def is_jordan_configuration(cg: ColorGraph) -> bool:
    """Symmetric, reflexive split, and closed under ``AB + BA``."""
    return (
        bool(np.array_equal(cg.cells, cg.cells.T))
        and reflexive_split(cg)
        and _jordan_closed(cg.cells, cg.r)
    )


def classify(cg) -> SchemeReport:
    """Decide the coherence and Jordan properties of a color graph."""
    try:
        cg = as_color_graph(cg)
    except InvalidColorGraph:
        return _INVALID
    split = reflexive_split(cg)
    tmap = transpose_map(cg)
    closed = tmap is not None
    symmetric = bool(np.array_equal(cg.cells, cg.cells.T))
    is_cc = split and closed and isinstance(structure_constants(cg), StructureTensor)
    fib = fibers(cg) if split else ()
    homogeneous = split and len(fib) == 1
    regular = is_regular(cg)
    jordan = symmetric and regular and split and _jordan_closed(cg.cells, cg.r)
    return SchemeReport(
        valid_partition=True,
        reflexive_split_ok=split,
        transpose_closed=closed,
        is_cc=is_cc,
        is_homogeneous=homogeneous,
        is_symmetric=symmetric,
        is_commutative=_commutative(cg.cells, cg.r),
        is_jordan_scheme=jordan,
        valencies=valencies(cg),
        fibers=fib,
    )


# -- color manipulations -------------------------------------------------------


def symmetrize(cg: ColorGraph) -> ColorGraph:
    """Merge every color with the colors met by its transpose."""
    cg = as_color_graph(cg)
    r = cg.r
    parent = list(range(r))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    pairs = np.unique(np.stack([cg.cells.ravel(), cg.cells.T.ravel()]), axis=1)
    for a, b in pairs.T:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = [find(c) for c in range(r)]
    return ColorGraph(dense_labels(np.asarray(roots))[cg.cells])


def merge_colors(cg: ColorGraph, grouping: Sequence[Iterable[int]]) -> ColorGraph:
    """New color per block of ``grouping``, numbered in the given block order."""
    blocks = [list(b) for b in grouping]
    flat = sorted(c for b in blocks for c in b)
    if flat != list(range(cg.r)) or any(not b for b in blocks):
        raise InvalidColorGraph("grouping is not a partition of the color set")
    mapping = np.empty(cg.r, dtype=np.int64)
    for idx, b in enumerate(blocks):
        mapping[b] = idx
    return ColorGraph(mapping[cg.cells])


@dataclass(frozen=True)
class Restriction:
    graph: ColorGraph
    vertices: tuple
    color_map: dict


def restrict(cg: ColorGraph, subset: Iterable[int]) -> Restriction:
    """Induced color graph on ``subset``; unused colors are dropped."""
    verts = sorted(set(int(v) for v in subset))
    if not verts:
        raise InvalidColorGraph("subset must be nonempty")
    if verts[0] < 0 or verts[-1] >= cg.n:
        raise InvalidColorGraph("subset out of range")
    sub = cg.cells[np.ix_(verts, verts)]
    kept = np.unique(sub)
    color_map = {int(c): i for i, c in enumerate(kept.tolist())}
    lookup = np.full(cg.r, -1, dtype=np.int64)
    lookup[kept] = np.arange(len(kept))
    return Restriction(ColorGraph(lookup[sub]), tuple(verts), color_map)


def graph_coloring(adjacency: np.ndarray) -> ColorGraph:
    """Color graph ``{Id, edges, non-edges}`` of a simple graph.

    Empty classes are dropped, so ``K_n`` gives rank 2.
    """
    a = np.asarray(adjacency, dtype=bool)
    cells = np.where(a, 1, 2)
    np.fill_diagonal(cells, 0)
    return ColorGraph(dense_labels(cells))
