import hashlib

import numpy as np
import pytest

from jordanlab.cc import classify, graph_coloring, symmetrize
from jordanlab.constructions import (
    BUILTIN_NAMES,
    WfdfParams,
    builtin,
    builtin_path,
    gunnells_graph,
    gunnells_scheme,
    heawood_adjacency,
    line_graph,
    petersen_adjacency,
    pregraph,
    psl2_ot_scheme,
    switch,
    thin_fibers,
    verify_cyclic_table,
    verify_rank6_table,
    wfdf_scheme,
)
from jordanlab.errors import PreconditionError, TableError
from jordanlab.permgrp import PermutationGroup, automorphism_group, isomorphic, two_orbits
from jordanlab.stabilize import intersection_array, is_proper

CHECKSUMS = {
    "heawood": "2f4314490ac2b3caacfd98e9496cb90f804903733201e0c8abcaf23f6202f722",
    "j15": "0418ae96fe87b944397fda6d366f4ea594703e36cc331c19510f6b4411366272",
    "petersen": "e47f4316e9038183854508bdf1d0d688e5ae9d1686d297856d1a79600bff4364",
    "s12": "235f4550d954937ab03275ac1c3b204cbd41da755803b4aaf0a23f485ebdd4e6",
    "shah6": "08d61847ef93b6d3d9c35fb14fdf4a81bceac8d21624fb1193ee72a4818ca7bd",
}


# -- builtins -----------------------------------------------------------------------------


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_checksum(name):
    data = builtin_path(name).read_bytes()
    assert hashlib.sha256(data).hexdigest() == CHECKSUMS[name]


def test_unknown_builtin():
    with pytest.raises(PreconditionError):
        builtin("k17")


def test_builtin_petersen_matches_adjacency():
    cg = builtin("petersen")
    assert isomorphic(cg, graph_coloring(petersen_adjacency())) is not None


def test_builtin_heawood_matches_adjacency():
    assert isomorphic(builtin("heawood"), graph_coloring(heawood_adjacency())) is not None


def test_shah6_is_non_proper_rank_5():
    cg = builtin("shah6")
    rep = classify(cg)
    assert rep.is_jordan_scheme and cg.r == 5
    assert not is_proper(cg).proper


def test_line_graph_petersen():
    lg, edges = line_graph(petersen_adjacency())
    assert lg.shape == (15, 15) and len(edges) == 15
    assert set(lg.sum(axis=1).tolist()) == {4}


# -- psl2 one-third schemes ---------------------------------------------------------------


def test_psl2_4_rank_6_order_15():
    cg = psl2_ot_scheme(4)
    assert cg.n == 15 and cg.r == 6
    assert classify(cg).is_as


def test_psl2_7_order_24():
    cg = psl2_ot_scheme(7)
    assert cg.n == 24
    lab = verify_rank6_table(cg)
    assert lab.m == 7 and lab.l == 3


def test_psl2_rejects_bad_q():
    with pytest.raises(PreconditionError):
        psl2_ot_scheme(5)


def test_psl2_7_thick_arrays():
    cg = psl2_ot_scheme(7)
    lab = verify_rank6_table(cg)
    for c in lab.thick:
        assert intersection_array(cg.relation(c)).as_tuple() == ((7, 4, 1), (1, 2, 7))


def test_cyclic_table_rejects_non_rank_6():
    with pytest.raises(TableError):
        verify_cyclic_table(builtin("petersen"))


def test_thin_fibers_partition():
    cg = psl2_ot_scheme(7)
    fibs = thin_fibers(cg, verify_rank6_table(cg))
    assert len(fibs) == 8 and all(len(f) == 3 for f in fibs)
    assert sorted(v for f in fibs for v in f) == list(range(24))


# -- pregraph and switching ---------------------------------------------------------------


def test_pregraph_rank_10():
    pre = pregraph(psl2_ot_scheme(4), 0)
    assert pre.graph.r == 10
    assert len(pre.labeling.island) == 3


def test_pregraph_fiber_out_of_range():
    with pytest.raises(PreconditionError):
        pregraph(psl2_ot_scheme(4), 5)


def test_switch_keep_out_of_range():
    with pytest.raises(PreconditionError):
        switch(pregraph(psl2_ot_scheme(4), 0), 3)


def test_switch_psl2_4_gives_j15():
    pre = pregraph(psl2_ot_scheme(4), 0)
    out = [switch(pre, k) for k in range(3)]
    for g in out:
        assert isomorphic(g, builtin("j15"), mode="color-permuting") is not None


def test_switch_psl2_7_proper_aut_42():
    sw = switch(pregraph(psl2_ot_scheme(7), 0), 0)
    assert classify(sw).is_jordan_scheme
    assert is_proper(sw).proper
    assert automorphism_group(sw).order() == 42


# -- Gunnells graphs ----------------------------------------------------------------------


def test_gunnells_q3_is_k4():
    a = gunnells_graph(3, 1)
    assert a.shape == (4, 4)
    assert (a == ~np.eye(4, dtype=bool)).all()


def test_gunnells_q5():
    a = gunnells_graph(5, 1)
    assert a.shape == (12, 12)
    assert set(a.sum(axis=1).tolist()) == {5}
    assert intersection_array(a).as_tuple() == ((5, 2, 1), (1, 2, 5))


def test_gunnells_q7_classes_isomorphic():
    graphs = [graph_coloring(gunnells_graph(7, alpha)) for alpha in (1, 2, 4)]
    assert isomorphic(graphs[0], graphs[1]) is not None
    assert isomorphic(graphs[0], graphs[2]) is not None


def test_gunnells_scheme_matches_symmetrized_psl2_7():
    assert isomorphic(gunnells_scheme(7), symmetrize(psl2_ot_scheme(7)), mode="color-permuting") is not None


def test_gunnells_rejects_even_q():
    with pytest.raises(PreconditionError):
        gunnells_graph(4, 1)


# -- WFDF ---------------------------------------------------------------------------------


def test_wfdf_1_matches_shah6():
    cg = wfdf_scheme(1)
    s3 = PermutationGroup.from_cycles(6, ["(0,1,2)(3,4,5)", "(0,3)(1,5)(2,4)"])
    assert isomorphic(cg, symmetrize(two_orbits(s3)), mode="color-permuting") is not None
    assert isomorphic(cg, builtin("shah6"), mode="color-permuting") is not None


def test_wfdf_2_rank_5_proper():
    cg = wfdf_scheme(WfdfParams(d=2))
    rep = classify(cg)
    assert cg.n == 45 and rep.is_jordan_scheme
    assert sorted(rep.valencies) == [1, 8, 12, 12, 12]
    assert is_proper(cg).proper


def test_wfdf_srg_colors():
    cg = wfdf_scheme(2)
    for c in (2, 3, 4):
        assert intersection_array(cg.relation(c)).as_tuple() == ((12, 8), (1, 3))


def test_wfdf_bad_sign():
    with pytest.raises(PreconditionError):
        wfdf_scheme(WfdfParams(d=2, signs={(0, 1): 2}))


def test_wfdf_bad_dimension():
    with pytest.raises(PreconditionError):
        wfdf_scheme(3)
