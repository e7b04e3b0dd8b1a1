import numpy as np
import pytest

from jordanlab.cc import (
    ColorGraph,
    StructureFailure,
    StructureTensor,
    canonical_color_order,
    classify,
    fibers,
    graph_coloring,
    merge_colors,
    restrict,
    same_partition,
    structure_constants,
    symmetrize,
    symmetrized_product,
    transpose_map,
)
from jordanlab.constructions import builtin, petersen_adjacency, pregraph, psl2_ot_scheme
from jordanlab.errors import DimensionMismatch, InvalidColorGraph, OverflowRisk
from jordanlab.permgrp import PermutationGroup, induce, isomorphic, two_orbits

from oracles import brute_structure_constants


def cycle_graph(n):
    a = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        a[i, (i + 1) % n] = a[(i + 1) % n, i] = 1
    return a


def distance_scheme_c5():
    return ColorGraph(np.array([[min((x - y) % 5, (y - x) % 5) for y in range(5)] for x in range(5)]))


# -- ColorGraph ---------------------------------------------------------------------------


def test_color_graph_basic_properties():
    cg = builtin("j15")
    assert cg.n == 15 and cg.r == 5
    assert cg.cells.flags.writeable is False
    assert cg.color_sizes().sum() == 225


@pytest.mark.parametrize(
    "cells",
    [
        [[0, 1]],
        [[0, 2], [2, 0]],
        [[0, -1], [-1, 0]],
        [[0.5, 1], [1, 0]],
    ],
)
def test_color_graph_rejects_invalid_cells(cells):
    with pytest.raises(InvalidColorGraph):
        ColorGraph(np.array(cells))


def test_relations_sum_to_all_ones_and_reflexive_to_identity():
    for name in ("j15", "s12", "shah6", "petersen"):
        cg = builtin(name)
        total = sum(cg.relation(i).astype(np.int64) for i in range(cg.r))
        assert (total == 1).all()
        refl = {int(v) for v in np.diag(cg.cells)}
        assert (sum(cg.relation(i).astype(np.int64) for i in refl) == np.eye(cg.n)).all()


def test_relabel_vertices_and_colors_round_trip():
    cg = builtin("shah6")
    perm = [3, 1, 5, 0, 2, 4]
    moved = cg.relabel_vertices(perm)
    inv = np.argsort(perm)
    assert moved.relabel_vertices(inv) == cg
    mapping = [0, 2, 1, 4, 3]
    assert cg.relabel_colors(mapping).relabel_colors(np.argsort(mapping)) == cg


def test_from_relations_matches_cells():
    cg = builtin("shah6")
    assert ColorGraph.from_relations(cg.relations()) == cg


# -- symmetrized product ------------------------------------------------------------------


def test_symmetrized_product_identity_case():
    b = petersen_adjacency().astype(np.int64)
    assert (symmetrized_product(np.eye(10, dtype=np.int64), b) == 2 * b).all()


def test_symmetrized_product_petersen_diagonal():
    a = petersen_adjacency().astype(np.int64)
    assert (np.diag(symmetrized_product(a, a)) == 6).all()


def test_symmetrized_product_path_and_edge():
    p3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    e = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    m = symmetrized_product(p3, e)
    assert m[0, 0] == 2 and m[1, 1] == 2
    assert m[0, 2] == 1 and m[2, 0] == 1
    assert m[1, 2] == 0


def test_symmetrized_product_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        symmetrized_product(np.eye(2, dtype=np.int64), np.eye(3, dtype=np.int64))


def test_symmetrized_product_overflow_guard():
    big = np.full((4, 4), 2**61, dtype=np.int64)
    with pytest.raises(OverflowRisk):
        symmetrized_product(big, big)


# -- structure constants ------------------------------------------------------------------


def test_structure_constants_petersen_lambda():
    t = structure_constants(builtin("petersen"))
    assert isinstance(t, StructureTensor)
    assert t.p[1, 1, 1] == 0
    assert t.p[1, 1, 2] == 1


def test_structure_constants_identity_row():
    t = structure_constants(builtin("petersen"))
    for j in range(3):
        for k in range(3):
            assert t.p[0, j, k] == (1 if j == k else 0)


def test_structure_constants_pentagon():
    t = structure_constants(distance_scheme_c5())
    assert t.p[1, 1, 2] == 1


def test_structure_constants_failure_witness_on_j15():
    cg = builtin("j15")
    res = structure_constants(cg)
    assert isinstance(res, StructureFailure)
    a, b = res.pair_a, res.pair_b
    assert cg.cells[a] == cg.cells[b] == res.k
    assert res.count_a != res.count_b


def test_structure_constants_match_brute_force_on_psl2_4():
    cg = psl2_ot_scheme(4)
    t = structure_constants(cg)
    assert np.array_equal(t.p, brute_structure_constants(cg.cells))


# -- classify -----------------------------------------------------------------------------


def test_classify_j15():
    rep = classify(builtin("j15"))
    assert rep.is_jordan_scheme and not rep.is_cc
    assert sorted(rep.valencies) == [1, 2, 4, 4, 4]


def test_classify_s12_not_jordan():
    assert not classify(builtin("s12")).is_jordan_scheme


def test_classify_discrete_configuration():
    n = 4
    rep = classify(ColorGraph(np.arange(n * n).reshape(n, n)))
    assert rep.is_cc
    assert not rep.is_homogeneous


def test_classify_single_point():
    rep = classify(ColorGraph(np.zeros((1, 1), dtype=np.int64)))
    assert rep.is_cc and rep.is_jordan_scheme


def test_classify_invalid_input_reports_all_false():
    rep = classify(np.array([[0, 2], [2, 0]]))
    assert not rep.valid_partition
    assert not (rep.is_cc or rep.is_jordan_scheme or rep.is_homogeneous)


def test_classify_psl2_4_non_commutative_as():
    rep = classify(psl2_ot_scheme(4))
    assert rep.is_as and not rep.is_commutative and not rep.is_symmetric
    assert sorted(rep.valencies) == [1, 1, 1, 4, 4, 4]


def test_irregular_color_is_not_jordan():
    # star K_{1,3}: the edge color is irregular
    a = np.zeros((4, 4), dtype=np.int64)
    a[0, 1:] = a[1:, 0] = 1
    rep = classify(graph_coloring(a))
    assert not rep.is_jordan_scheme


def test_report_as_dict_is_plain():
    doc = classify(builtin("j15")).as_dict()
    assert doc["is_jordan_scheme"] is True
    assert doc["valencies"] == [1, 2, 4, 4, 4]


# -- symmetrize, merge, restrict ----------------------------------------------------------


def test_symmetrize_symmetric_input_identical():
    cg = builtin("j15")
    assert symmetrize(cg) == cg


def test_symmetrize_psl2_4_rank_5():
    assert symmetrize(psl2_ot_scheme(4)).r == 5


def test_symmetrize_y15_rank_13():
    a4 = PermutationGroup.from_cycles(4, ["(0,1,2)", "(1,2,3)"])
    y = two_orbits(induce(a4, [(0, 1), {(0, 1), (1, 0), (2, 3), (3, 2)}]).image)
    assert y.r == 21
    s = symmetrize(y)
    assert s.r == 13
    t = transpose_map(s)
    assert list(t) == list(range(13))


def test_merge_singletons_identity():
    cg = builtin("s12")
    assert merge_colors(cg, [[i] for i in range(cg.r)]) == cg


def test_merge_reflexive_and_rest_rank_2():
    cg = builtin("j15")
    m = merge_colors(cg, [[0], [1, 2, 3, 4]])
    assert m.r == 2 and classify(m).is_as


def test_merge_rejects_bad_grouping():
    with pytest.raises(InvalidColorGraph):
        merge_colors(builtin("j15"), [[0, 1], [1, 2, 3, 4]])


def test_merge_pregraph_gives_nj15():
    m15 = psl2_ot_scheme(4)
    pre = pregraph(m15, 0)
    lab = pre.labeling
    grouping = [[lab.id_isl, lab.id_con], list(lab.spr_isl + lab.spr_con)]
    grouping += [[lab.T[i], lab.Br[i]] for i in range(3)]
    merged = merge_colors(pre.graph, grouping)
    assert same_partition(merged.cells, symmetrize(m15).cells)


def test_restrict_all_vertices_identical():
    cg = builtin("j15")
    res = restrict(cg, range(15))
    assert res.graph == cg


def test_restrict_drops_unused_colors():
    cg = builtin("j15")
    res = restrict(cg, [0, 1, 2])
    assert res.graph.r == 2
    assert res.color_map == {0: 0, 1: 1}


def test_restrict_out_of_range():
    with pytest.raises(InvalidColorGraph):
        restrict(builtin("j15"), [0, 99])


def test_restrict_pregraph_continent_of_psl2_7_valency_6():
    pre = pregraph(psl2_ot_scheme(7), 0)
    res = restrict(pre.graph, pre.labeling.continent)
    for t in pre.labeling.T:
        sub = res.graph.cells == res.color_map[t]
        assert set(sub.sum(axis=1).tolist()) == {6}


# -- canonical color order, fibers --------------------------------------------------------


def test_canonical_color_order_reflexive_first():
    cg = builtin("j15")
    shuffled = cg.relabel_colors([3, 0, 4, 1, 2])
    out = canonical_color_order(shuffled.cells)
    assert out[0, 0] == 0
    assert same_partition(out, cg.cells)
    assert np.array_equal(canonical_color_order(out), out)


def test_fibers_sorted_by_smallest_vertex():
    pre = pregraph(psl2_ot_scheme(4), 1)
    fibs = fibers(pre.graph)
    assert [f[0] for f in fibs] == sorted(f[0] for f in fibs)
    assert sorted(len(f) for f in fibs) == [3, 12]


def test_graph_coloring_drops_empty_classes():
    complete = np.ones((4, 4), dtype=np.int64) - np.eye(4, dtype=np.int64)
    assert graph_coloring(complete).r == 2


def test_c5_isomorphic_to_its_distance_scheme():
    assert isomorphic(graph_coloring(cycle_graph(5)), distance_scheme_c5()) is not None
