"""End-to-end acceptance checks, one test per criterion, each under its time limit.

Every test prints one ``CRITERION k PASS|FAIL`` line straight to the terminal
and fails if its checks or its time limit fail.
"""

import time
import traceback

import numpy as np

from jordanlab.cc import ColorGraph, classify, graph_coloring, merge_colors, structure_constants, symmetrize
from jordanlab.constructions import (
    builtin,
    gunnells_graph,
    gunnells_scheme,
    pregraph,
    psl2_ot_scheme,
    switch,
    verify_rank6_table,
    wfdf_scheme,
    wfdf_spread,
)
from jordanlab.enumerate import EnumerationTask, MergingConstraints, enumerate_jordan_schemes, find_mergings
from jordanlab.permgrp import (
    PermutationGroup,
    algebraic_automorphisms,
    automorphism_group,
    color_automorphism_group,
    induce,
    isomorphic,
    orbits,
    two_orbits,
)
from jordanlab.stabilize import (
    check_spread,
    intersection_array,
    is_proper,
    is_schurian,
    is_walk_regular,
    relation_closure,
)


def run_criterion(number, limit, body, capsys):
    start = time.monotonic()
    error = None
    try:
        body()
    except Exception as exc:  # reported below, then re-raised
        error = exc
    elapsed = time.monotonic() - start
    over = elapsed > limit
    ok = error is None and not over
    reason = ""
    if error is not None:
        reason = f" ({type(error).__name__}: {str(error).splitlines()[0] if str(error) else ''})"
    elif over:
        reason = f" (time limit {limit:.0f}s exceeded)"
    with capsys.disabled():
        print(f"\nCRITERION {number} {'PASS' if ok else 'FAIL'} {elapsed:.1f}s / {limit:.0f}s{reason}")
    if error is not None:
        traceback.print_exception(error)
        raise error
    assert not over, f"criterion {number} took {elapsed:.1f}s, limit {limit}s"


def iso(a, b):
    return isomorphic(a, b, mode="color-permuting") is not None


# 1 ---------------------------------------------------------------------------------------


def test_criterion_01_j15_golden(capsys):
    def body():
        cg = builtin("j15")
        rep = classify(cg)
        assert cg.r == 5 and rep.is_jordan_scheme and not rep.is_cc
        assert sorted(rep.valencies) == [1, 2, 4, 4, 4]
        prop = is_proper(cg)
        assert prop.proper
        assert sorted(prop.wl_fibers) == [3, 12]
        aut = automorphism_group(cg)
        assert aut.order() == 12
        assert sorted(map(len, orbits(aut))) == [3, 12]

    run_criterion(1, 5, body, capsys)


# 2 ---------------------------------------------------------------------------------------


def test_criterion_02_construction_consistency(capsys):
    def body():
        pre = pregraph(psl2_ot_scheme(4), 0)
        outs = [switch(pre, k) for k in range(3)]
        assert iso(outs[0], builtin("j15"))
        for i in range(3):
            for j in range(i + 1, 3):
                assert iso(outs[i], outs[j])

    run_criterion(2, 30, body, capsys)


# 3 ---------------------------------------------------------------------------------------


def test_criterion_03_j24(capsys):
    def body():
        cg = psl2_ot_scheme(7)
        lab = verify_rank6_table(cg)
        assert lab.m == 7
        for c in lab.thick:
            assert intersection_array(cg.relation(c)).as_tuple() == ((7, 4, 1), (1, 2, 7))
        assert not is_proper(symmetrize(cg)).proper
        sw = switch(pregraph(cg, 0), 0)
        assert is_proper(sw).proper
        assert automorphism_group(sw).order() == 42
        closure = relation_closure(cg.relation(lab.thick[0])).closure
        rep = classify(closure)
        assert rep.is_as and closure.r == 4
        assert not is_schurian(closure)
        assert automorphism_group(closure).order() == 336

    run_criterion(3, 60, body, capsys)


# 4 ---------------------------------------------------------------------------------------


def test_criterion_04_gunnells(capsys):
    def body():
        graphs = [graph_coloring(gunnells_graph(7, a)) for a in (1, 2, 4)]
        for i in range(3):
            for j in range(i + 1, 3):
                assert isomorphic(graphs[i], graphs[j]) is not None
        assert iso(gunnells_scheme(7), symmetrize(psl2_ot_scheme(7)))
        k4 = gunnells_graph(3, 1)
        assert k4.shape == (4, 4) and (k4 == ~np.eye(4, dtype=bool)).all()
        g5 = gunnells_graph(5, 1)
        assert g5.shape == (12, 12) and set(g5.sum(axis=1).tolist()) == {5}

    run_criterion(4, 30, body, capsys)


# 5 ---------------------------------------------------------------------------------------


def test_criterion_05_shah_wfdf(capsys):
    def body():
        s3 = PermutationGroup.from_cycles(6, ["(0,1,2)(3,4,5)", "(0,3)(1,5)(2,4)"])
        assert s3.order() == 6 and not s3.is_abelian()
        w1 = wfdf_scheme(1)
        assert iso(w1, symmetrize(two_orbits(s3)))
        assert not is_proper(w1).proper
        w2 = wfdf_scheme(2)
        assert w2.n == 45
        spread = wfdf_spread(2)
        rep = classify(w2)
        assert rep.is_jordan_scheme and w2.r == 5
        srg = [c for c in range(w2.r) if rep.valencies[c] == 12]
        assert len(srg) == 3
        for c in srg:
            arr = intersection_array(w2.relation(c))
            k, b1 = arr.b
            _, mu = arr.c
            assert (k, k - b1 - 1, mu) == (12, 3, 3)
            sp = check_spread(w2.relation(c), spread)
            assert sp.is_spread and sp.hoffman and sp.alpha
        assert is_proper(w2).proper

    run_criterion(5, 120, body, capsys)


# 6 ---------------------------------------------------------------------------------------


def test_criterion_06_enumeration(capsys):
    def body():
        emitted = []

        r6 = enumerate_jordan_schemes(EnumerationTask(6))
        assert r6.counts[(1, 1, 1, 1, 2)] == 1
        emitted += r6.schemes

        r8 = enumerate_jordan_schemes(EnumerationTask(8))
        assert r8.counts[(1, 1, 2, 2, 2)] == 2
        assert r8.counts[(1, 1, 1, 1, 4)] == 1
        assert r8.counts[(1, 1, 1, 2, 3)] == 0
        emitted += r8.schemes

        r9 = enumerate_jordan_schemes(EnumerationTask(9))
        assert r9.count == 2
        emitted += r9.schemes

        r10 = enumerate_jordan_schemes(EnumerationTask(10))
        assert r10.counts[(1, 1, 2, 2, 2, 2)] == 1
        assert r10.counts[(1, 1, 2, 2, 4)] == 1
        assert r10.counts[(1, 2, 2, 2, 3)] == 0
        assert r10.counts[(1, 1, 2, 3, 3)] == 0
        emitted += r10.schemes

        r11 = enumerate_jordan_schemes(EnumerationTask(11))
        emitted += r11.schemes
        assert sum(s.properness.proper for s in r11.schemes) == 0
        assert enumerate_jordan_schemes(EnumerationTask(11, proper_only=True)).count == 0

        for res in (r6, r8, r9, r10, r11):
            assert res.status == "complete"
        for s in emitted:
            assert s.report.is_jordan_scheme
            assert not s.properness.proper

    run_criterion(6, 30 * 60, body, capsys)


# 7 ---------------------------------------------------------------------------------------


def test_criterion_07_merging_search(capsys):
    def body():
        a4 = PermutationGroup.from_cycles(4, ["(0,1,2)", "(1,2,3)"])
        y15 = two_orbits(induce(a4, [(0, 1), {(0, 1), (1, 0), (2, 3), (3, 2)}]).image)
        assert y15.n == 15
        assert symmetrize(y15).r == 13
        found = find_mergings(y15, MergingConstraints(target="js", rank=5))
        assert len(found) == 24
        merged = [merge_colors(y15, p) for p in found]
        proper = [m for m in merged if is_proper(m).proper]
        assert len(proper) == 12
        classes = []
        for m in merged:
            if not any(iso(m, c) for c in classes):
                classes.append(m)
        assert len(classes) == 2

    run_criterion(7, 15 * 60, body, capsys)


# 8 ---------------------------------------------------------------------------------------


def test_criterion_08_coco_example(capsys):
    def body():
        d5 = PermutationGroup.from_cycles(10, ["(0,1,2,3,4)(5,6,7,8,9)", "(1,4)(2,3)(6,9)(7,8)"])
        w = two_orbits(d5)
        assert w.r == 12
        found = find_mergings(w, MergingConstraints(target="as"))
        assert len(found) == 10
        assert algebraic_automorphisms(structure_constants(w)).order() == 4
        assert color_automorphism_group(w).order() == 40
        orders = [automorphism_group(merge_colors(w, p)).order() for p in found]
        assert {20, 240, 120, 28800} <= set(orders)

    run_criterion(8, 5 * 60, body, capsys)


# 9 ---------------------------------------------------------------------------------------


def test_criterion_09_property_suites(capsys):
    import test_properties as props

    def body():
        props.test_jordan_identity()
        props.test_wl_closure_idempotent_and_refining()
        props.test_jordan_closure_idempotent()
        props.test_two_orbit_configurations()
        props.test_symmetrized_cc_is_jordan()
        props.test_rank4_jordan_closures_are_schemes()
        props.test_rank4_enumerated_jordan_schemes_are_as()

    run_criterion(9, 5 * 60, body, capsys)


# 10 --------------------------------------------------------------------------------------


def test_criterion_10_walk_regular_corner(capsys):
    def body():
        s12 = builtin("s12")
        assert is_walk_regular(s12.relation(3))
        assert is_walk_regular(s12.relation(4))
        closure = relation_closure(s12.relation(3)).closure
        assert len(classify(closure).fibers) >= 2
        alone = ColorGraph(s12.relation(3).astype(np.int64))
        assert automorphism_group(alone).order() == 32

    run_criterion(10, 5, body, capsys)
