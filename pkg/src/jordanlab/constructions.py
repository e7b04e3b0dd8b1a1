"""Built-in color graphs and the constructions of rank-5 Jordan schemes.

Covers quasi-projective point schemes over GF(q), Gunnells graphs, the
two smallest WFDF schemes, pregraphs with their bridge switchings, and the
check of the cyclic multiplication table of rank-2l schemes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .cc import ColorGraph, StructureTensor, as_color_graph, dense_labels, structure_constants
from .errors import PreconditionError, TableError
from .fields import field as gf
from .io import parse_colorgraph

BUILTIN_NAMES = ("j15", "s12", "shah6", "petersen", "heawood")


def builtin(name: str) -> ColorGraph:
    """Load one of the shipped color graphs by name."""
    if name not in BUILTIN_NAMES:
        raise PreconditionError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    text = resources.files("jordanlab.data").joinpath(f"{name}.cg").read_text()
    return parse_colorgraph(text)


def builtin_path(name: str):
    return resources.files("jordanlab.data").joinpath(f"{name}.cg")


def petersen_adjacency() -> np.ndarray:
    """Kneser graph K(5,2): 2-subsets of {0..4}, adjacent when disjoint."""
    verts = list(itertools.combinations(range(5), 2))
    return np.array([[not set(a) & set(b) for b in verts] for a in verts], dtype=bool)


def heawood_adjacency() -> np.ndarray:
    """Incidence graph of the Fano plane; line ``7+i`` is ``{i, i+1, i+3}`` mod 7."""
    a = np.zeros((14, 14), dtype=bool)
    for i in range(7):
        for pt in (i, (i + 1) % 7, (i + 3) % 7):
            a[pt, 7 + i] = a[7 + i, pt] = True
    return a


def line_graph(g) -> Tuple[np.ndarray, Tuple[Tuple[int, int], ...]]:
    """Line graph of a simple graph and the sorted edge list labeling its vertices."""
    a = np.asarray(g, dtype=bool)
    if not np.array_equal(a, a.T) or a.diagonal().any():
        raise PreconditionError("line_graph needs a simple undirected graph")
    edges = tuple((int(x), int(y)) for x, y in zip(*np.nonzero(np.triu(a))))
    if not edges:
        raise PreconditionError("graph has no edges")
    inc = np.zeros((len(edges), a.shape[0]), dtype=np.int64)
    for e, (x, y) in enumerate(edges):
        inc[e, x] = inc[e, y] = 1
    lg = (inc @ inc.T) > 0
    np.fill_diagonal(lg, False)
    return lg, edges


# -- quasi-projective point schemes ----------------------------------------------------------


def _projective_classes(q: int, subgroup: Sequence[int]):
    """Classes of nonzero vectors of GF(q)^2 under scalar multiplication by ``subgroup``.

    Returns the sorted list of representatives (lexicographically least
    member of each class).
    """
    F = gf(q)
    sub = np.asarray(sorted(subgroup), dtype=np.int64)
    reps = set()
    for a in range(q):
        for b in range(q):
            if a == 0 and b == 0:
                continue
            xs = F.mul(sub, a)
            ys = F.mul(sub, b)
            reps.add(min(zip(xs.tolist(), ys.tolist())))
    return sorted(reps)


def _det(F, u, v):
    return int(F.sub(F.mul(u[0], v[1]), F.mul(u[1], v[0])))


def _ratio(F, u, v) -> int:
    """``lambda`` with ``v = lambda * u`` for parallel nonzero vectors."""
    if u[0] != 0:
        return int(F.div(v[0], u[0]))
    return int(F.div(v[1], u[1]))


def psl2_ot_scheme(q: int) -> ColorGraph:
    """Rank-6 scheme on the one-third quasi-projective points of GF(q)^2.

    Colors ``0, 1, 2`` are ``R_k`` (``v = lambda u`` with ``lambda`` in coset
    ``k`` of the index-3 subgroup) and ``3, 4, 5`` are ``Delta_k``
    (``det(u, v)`` in coset ``k``).
    """
    F = gf(q)
    if (q - 1) % 3:
        raise PreconditionError(f"q = {q} is not congruent to 1 mod 3")
    l = (q - 1) // 3
    sub = [F.power_of_generator(3 * t) for t in range(l)]
    verts = _projective_classes(q, sub)
    n = len(verts)
    coset = F.log % 3
    cells = np.zeros((n, n), dtype=np.int64)
    for x, u in enumerate(verts):
        for y, v in enumerate(verts):
            d = _det(F, u, v)
            if d == 0:
                cells[x, y] = coset[_ratio(F, u, v)]
            else:
                cells[x, y] = 3 + coset[d]
    return ColorGraph(cells)


def _pm_classes(q: int):
    F = gf(q)
    if F.p == 2:
        raise PreconditionError("Gunnells graphs need odd q")
    return F, _projective_classes(q, [1, int(F.neg(1))])


def gunnells_graph(q: int, alpha: int) -> np.ndarray:
    """Vectors of GF(q)^2 modulo sign, adjacent when ``det(u, v) = +-alpha``."""
    F, verts = _pm_classes(q)
    alpha = int(alpha) % q
    if alpha == 0:
        raise PreconditionError("alpha must be nonzero")
    targets = {alpha, int(F.neg(alpha))}
    n = len(verts)
    a = np.zeros((n, n), dtype=bool)
    for x, u in enumerate(verts):
        for y, v in enumerate(verts):
            a[x, y] = _det(F, u, v) in targets
    return a


def gunnells_scheme(q: int) -> ColorGraph:
    """Id, the associate spread, then one color per sign class of ``det``."""
    F, verts = _pm_classes(q)
    classes = sorted({min(a, int(F.neg(a))) for a in range(1, q)})
    index = {}
    for c, rep in enumerate(classes):
        index[rep] = index[int(F.neg(rep))] = 2 + c
    n = len(verts)
    cells = np.zeros((n, n), dtype=np.int64)
    for x, u in enumerate(verts):
        for y, v in enumerate(verts):
            if x == y:
                continue
            d = _det(F, u, v)
            cells[x, y] = 1 if d == 0 else index[d]
    return ColorGraph(dense_labels(cells))


# -- WFDF schemes -----------------------------------------------------------------------------


@dataclass(frozen=True)
class WfdfParams:
    """Dimension ``d`` and optional shift signs per unordered fiber pair ``(i, j)``, ``i < j``."""

    d: int = 2
    signs: Dict[Tuple[int, int], int] = field(default_factory=dict)


def _hyperplane_maps(d: int):
    if d == 1:
        return [lambda u: u[0]]
    return [
        lambda u: u[0],
        lambda u: u[1],
        lambda u: (u[0] + u[1]) % 3,
        lambda u: (u[0] - u[1]) % 3,
    ]


def wfdf_scheme(params: WfdfParams = WfdfParams()) -> ColorGraph:
    """Rank-5 color graph ``Id, S, R_0, R_1, R_2`` on ``(r+1) * 3^d`` points.

    Point ``(u, i)`` with ``u`` in ``Z_3^d`` and fiber ``i`` in ``Z_{r+1}``
    has index ``i * 3^d + u_0 + 3 u_1``.
    """
    if isinstance(params, int):
        params = WfdfParams(d=params)
    d = params.d
    if d not in (1, 2):
        raise PreconditionError("wfdf_scheme supports d = 1 or d = 2 only")
    r = (3**d - 1) // 2
    size = 3**d
    pts = list(itertools.product(range(3), repeat=d))
    pts = [tuple(reversed(p)) for p in pts]
    pts.sort(key=lambda u: sum(c * 3**t for t, c in enumerate(u)))
    pi = _hyperplane_maps(d)
    n = (r + 1) * size
    cells = np.zeros((n, n), dtype=np.int64)
    for i in range(r + 1):
        for j in range(r + 1):
            if i == j:
                block = np.ones((size, size), dtype=np.int64)
                np.fill_diagonal(block, 0)
                cells[i * size:(i + 1) * size, j * size:(j + 1) * size] = block
                continue
            eps = 1 if i < j else -1
            s = params.signs.get((min(i, j), max(i, j)), 1)
            if s not in (1, -1):
                raise PreconditionError("shift signs must be +1 or -1")
            shift = (s * eps) % 3
            f = pi[(i - j) % (r + 1) - 1]
            g = pi[(j - i) % (r + 1) - 1]
            for x, u in enumerate(pts):
                for y, v in enumerate(pts):
                    diff = (f(u) - g(v)) % 3
                    color = 2 if diff == 0 else (3 if diff == shift else 4)
                    cells[i * size + x, j * size + y] = color
    return ColorGraph(cells)


def wfdf_spread(params: WfdfParams = WfdfParams()):
    """The fibers of a WFDF scheme as vertex blocks."""
    d = params if isinstance(params, int) else params.d
    size = 3**d
    r = (size - 1) // 2
    return [list(range(i * size, (i + 1) * size)) for i in range(r + 1)]


# -- cyclic multiplication tables ---------------------------------------------------------------


@dataclass(frozen=True)
class TableLabeling:
    """Thin colors ``R_0..R_{l-1}`` (``R_0`` reflexive) and thick ``Delta_0..Delta_{l-1}``."""

    l: int
    thin: tuple
    thick: tuple
    m: int

    def as_dict(self) -> dict:
        return {"l": self.l, "m": self.m, "thin": list(self.thin), "thick": list(self.thick)}


Rank6Labeling = TableLabeling


def _unit(r: int, k: int) -> np.ndarray:
    e = np.zeros(r, dtype=np.int64)
    e[k] = 1
    return e


def _check_table(p: np.ndarray, lab: TableLabeling) -> Optional[str]:
    l, R, D, m = lab.l, lab.thin, lab.thick, lab.m
    r = p.shape[0]
    coef = (m - 1) // l
    spread = np.zeros(r, dtype=np.int64)
    spread[list(D)] = coef
    for i in range(l):
        for j in range(l):
            if not np.array_equal(p[R[i], R[j]], _unit(r, R[(i + j) % l])):
                return f"R_{i} R_{j} != R_{(i + j) % l}"
            if not np.array_equal(p[R[i], D[j]], _unit(r, D[(i + j) % l])):
                return f"R_{i} D_{j} != D_{(i + j) % l}"
            if not np.array_equal(p[D[j], R[i]], _unit(r, D[(j - i) % l])):
                return f"D_{j} R_{i} != D_{(j - i) % l}"
            want = m * _unit(r, R[(i - j) % l]) + spread
            if not np.array_equal(p[D[i], D[j]], want):
                return f"D_{i} D_{j} != {m} R_{(i - j) % l} + {coef} (D_0 + ... + D_{l - 1})"
    return None


def verify_cyclic_table(cg: ColorGraph) -> TableLabeling:
    """Find a labeling satisfying the cyclic table of a rank-2l scheme.

    The thin colors (valency 1) must form a cyclic group of order ``l``
    under composition and the ``l`` thick colors must be symmetric of equal
    valency ``m`` with ``l | m - 1``.
    """
    cg = as_color_graph(cg)
    t = structure_constants(cg)
    if not isinstance(t, StructureTensor):
        raise TableError("not a coherent configuration")
    p = t.p
    val = t.valencies
    if len(set(np.diag(cg.cells).tolist())) != 1:
        raise TableError("scheme is not homogeneous")
    r0 = int(cg.cells[0, 0])
    thin = [c for c in range(cg.r) if val[c] == 1]
    thick = [c for c in range(cg.r) if val[c] != 1]
    l = len(thin)
    if not thick:
        raise TableError("no thick colors")
    if len(thick) != l:
        raise TableError(f"{len(thick)} thick colors but {l} thin colors")
    m = val[thick[0]]
    if any(val[c] != m for c in thick):
        raise TableError("thick colors have different valencies")
    if any(not np.array_equal(cg.cells == c, (cg.cells == c).T) for c in thick):
        raise TableError("thick colors must be symmetric")
    if cg.n != l * (m + 1) or (m - 1) % l:
        raise TableError(f"order {cg.n} does not fit l = {l}, m = {m}")
    first_error = None
    for gen in thin:
        powers = [r0]
        for _ in range(1, l):
            nxt = np.flatnonzero(p[powers[-1], gen])
            powers.append(int(nxt[0]))
        if len(set(powers)) != l:
            continue
        for d0 in thick:
            ds = []
            for i in range(l):
                ds.append(int(np.flatnonzero(p[powers[i], d0])[0]))
            if len(set(ds)) != l:
                continue
            lab = TableLabeling(l, tuple(powers), tuple(ds), m)
            err = _check_table(p, lab)
            if err is None:
                return lab
            first_error = first_error or err
    raise TableError(f"no labeling satisfies the table: {first_error or 'thin colors are not cyclic'}")


def verify_rank6_table(cg: ColorGraph) -> TableLabeling:
    """The rank-6 case (``l = 3``) of :func:`verify_cyclic_table`."""
    lab = verify_cyclic_table(cg)
    if lab.l != 3:
        raise TableError(f"expected rank 6, found a rank-{2 * lab.l} table")
    return lab


# -- pregraphs and bridge switching -------------------------------------------------------------


@dataclass(frozen=True)
class PregraphLabeling:
    """Color indices of a pregraph; ``spr_*`` hold one color per sign class of thin relations."""

    island: tuple
    continent: tuple
    l: int
    m: int
    id_isl: int
    id_con: int
    spr_isl: tuple
    spr_con: tuple
    T: tuple
    Br: tuple

    def as_dict(self) -> dict:
        return {
            "island": list(self.island),
            "l": self.l,
            "m": self.m,
            "Id_isl": self.id_isl,
            "Id_con": self.id_con,
            "Spr_isl": list(self.spr_isl),
            "Spr_con": list(self.spr_con),
            "T": list(self.T),
            "Br": list(self.Br),
        }


@dataclass(frozen=True)
class Pregraph:
    graph: ColorGraph
    labeling: PregraphLabeling


def thin_fibers(cg: ColorGraph, lab: TableLabeling) -> list:
    """Classes of the union of thin relations, ordered by smallest vertex."""
    thin = np.isin(cg.cells, lab.thin)
    seen = set()
    out = []
    for v in range(cg.n):
        if v in seen:
            continue
        block = tuple(int(x) for x in np.flatnonzero(thin[v]))
        seen.update(block)
        out.append(block)
    return out


def pregraph(scheme: ColorGraph, fiber_index: int, labeling: Optional[TableLabeling] = None) -> Pregraph:
    """Split a rank-2l scheme along one thin fiber (the island)."""
    cg = as_color_graph(scheme)
    lab = labeling or verify_cyclic_table(cg)
    fibs = thin_fibers(cg, lab)
    if not 0 <= fiber_index < len(fibs):
        raise PreconditionError(f"fiber index {fiber_index} out of range [0, {len(fibs)})")
    l, h = lab.l, lab.l // 2
    island = fibs[fiber_index]
    on_island = np.zeros(cg.n, dtype=bool)
    on_island[list(island)] = True
    continent = tuple(int(v) for v in np.flatnonzero(~on_island))
    thin_index = {c: i for i, c in enumerate(lab.thin)}
    thick_index = {c: i for i, c in enumerate(lab.thick)}
    spr_isl = tuple(range(2, 2 + h))
    spr_con = tuple(range(2 + h, 2 + 2 * h))
    T = tuple(range(2 + 2 * h, 2 + 2 * h + l))
    Br = tuple(range(2 + 2 * h + l, 2 + 2 * h + 2 * l))
    cells = np.zeros_like(cg.cells)
    for x in range(cg.n):
        for y in range(cg.n):
            c = int(cg.cells[x, y])
            both_isl = on_island[x] and on_island[y]
            if c in thin_index:
                k = thin_index[c]
                if k == 0:
                    cells[x, y] = 0 if on_island[x] else 1
                else:
                    s = min(k, l - k) - 1
                    cells[x, y] = spr_isl[s] if both_isl else spr_con[s]
            else:
                k = thick_index[c]
                cells[x, y] = Br[k] if on_island[x] != on_island[y] else T[k]
    lab_out = PregraphLabeling(tuple(island), continent, l, lab.m, 0, 1, spr_isl, spr_con, T, Br)
    return Pregraph(ColorGraph(cells), lab_out)


def switch(pre: Pregraph, keep: int) -> ColorGraph:
    """Bridge switching: keep ``Delta_keep`` and rebuild the other thick colors.

    Output colors: ``0`` identity, ``1..h`` merged thin sign classes, then
    ``T_i u Br_{2 keep - i mod l}`` for ``i = 0..l-1``.
    """
    lab = pre.labeling
    l, h = lab.l, lab.l // 2
    if not 0 <= keep < l:
        raise PreconditionError(f"keep index {keep} out of range [0, {l})")
    mapping = np.zeros(pre.graph.r, dtype=np.int64)
    mapping[lab.id_isl] = mapping[lab.id_con] = 0
    for s in range(h):
        mapping[lab.spr_isl[s]] = mapping[lab.spr_con[s]] = 1 + s
    for i in range(l):
        mapping[lab.T[i]] = 1 + h + i
        mapping[lab.Br[(2 * keep - i) % l]] = 1 + h + i
    return ColorGraph(mapping[pre.graph.cells])


__all__ = [
    "BUILTIN_NAMES",
    "Pregraph",
    "PregraphLabeling",
    "Rank6Labeling",
    "TableLabeling",
    "WfdfParams",
    "builtin",
    "gunnells_graph",
    "gunnells_scheme",
    "heawood_adjacency",
    "line_graph",
    "petersen_adjacency",
    "pregraph",
    "psl2_ot_scheme",
    "switch",
    "thin_fibers",
    "verify_cyclic_table",
    "verify_rank6_table",
    "wfdf_scheme",
    "wfdf_spread",
]
