import random
from fractions import Fraction as Q

import pytest
from conftest import random_bipyramid_fan, random_circle_fan

from qtoric.atlas import (atlas_report, build_irrelevant, chart_calibration,
                          chart_matrix, cocycle_check, gluing_exponents,
                          shared_rows_are_identity)
from qtoric.calibration import CalibratedFan, Calibration, trivial_calibration
from qtoric.errors import EmptyIntersection
from qtoric.gale_lvmb import gale_linear, lemmah_defect
from qtoric.lattice_fan import QLattice, fan_from_max_cones
from qtoric.linalg import Matrix, mat_inverse
from qtoric.scalars import Parameter, Scalar, Witness

A = Parameter("a")
B = Parameter("b")
SA, SB = Scalar.of_param(A), Scalar.of_param(B)
ONE, ZERO = Scalar.one(), Scalar.zero()
W = Witness({A: Q(-7, 3), B: Q(-5, 4)})


def p2_deformation():
    gamma = QLattice(2, [[1, 0], [0, 1], [SA, SB]])
    return fan_from_max_cones(gamma, [[1, 0], [0, 1], [SA, SB]],
                              [[1, 2], [2, 3], [3, 1]])


def test_chart_matrices_p2():
    fan = p2_deformation()
    A12, _ = chart_matrix(fan, (1, 2))
    A23, _ = chart_matrix(fan, (2, 3))
    A31, _ = chart_matrix(fan, (3, 1))
    assert A12 == Matrix.identity(2)
    assert A23 == Matrix([[-SB / SA, ONE], [ONE / SA, ZERO]])
    assert A31 == Matrix([[ZERO, ONE / SB], [ONE, -SA / SB]])
    # A_I v_{i_k} = e_k
    for cone, M in (((1, 2), A12), ((2, 3), A23), ((3, 1), A31)):
        for k, i in enumerate(cone):
            col = M.apply(fan.ray(i))
            expected = Matrix.identity(2).column(k)
            assert all((x - y).is_zero() for x, y in zip(col, expected))


def test_chart_matrix_completion_for_low_dimensional_cone():
    fan = fan_from_max_cones(QLattice(2, [[1, 0], [0, 1]]),
                             [[0, 1]], [[1]])
    A1, completion = chart_matrix(fan, (1,))
    assert completion == (1,)
    col = A1.apply(fan.ray(1))
    assert [str(x) for x in col] == ["1", "0"]


def test_gluing_exponents_p2():
    fan = p2_deformation()
    # [z, w] -> [z^{-b/a} w, z^{1/a}]
    M = gluing_exponents(fan, (1, 2), (2, 3))
    assert M == Matrix([[-SB / SA, ONE / SA], [ONE, ZERO]])
    # [z, w] -> [w^{1/b}, z w^{-a/b}]
    M2 = gluing_exponents(fan, (1, 2), (3, 1))
    assert M2 == Matrix([[ZERO, ONE], [ONE / SB, -SA / SB]])
    # [z, w] -> [z^{1/b} w, z^{-a/b}]
    M3 = gluing_exponents(fan, (2, 3), (3, 1))
    assert M3 == Matrix([[ONE / SB, -SA / SB], [ONE, ZERO]])


def test_gluing_identity_and_shared_rows():
    fan = p2_deformation()
    assert gluing_exponents(fan, (1, 2), (1, 2)) == Matrix.identity(2)
    for src, dst in (((1, 2), (2, 3)), ((1, 2), (3, 1)), ((2, 3), (3, 1)),
                     ((2, 3), (1, 2)), ((3, 1), (1, 2)), ((3, 1), (2, 3))):
        assert shared_rows_are_identity(fan, src, dst)


def test_gluing_requires_intersection():
    fan = random_circle_fan(random.Random(0), 5)
    maxc = sorted(fan.maximal_cones(), key=sorted)
    disjoint = [(a, b) for a in maxc for b in maxc if not (a & b)]
    if disjoint:
        with pytest.raises(EmptyIntersection):
            gluing_exponents(fan, disjoint[0][0], disjoint[0][1])


def test_chart_calibrations_p2():
    cf = trivial_calibration(p2_deformation())
    _, hb12 = chart_calibration(cf, (1, 2))
    _, hb23 = chart_calibration(cf, (2, 3))
    _, hb31 = chart_calibration(cf, (3, 1))
    assert hb12 == Matrix([[SA], [SB]])
    assert hb23 == Matrix([[-SB / SA], [ONE / SA]])
    assert hb31 == Matrix([[ONE / SB], [-SA / SB]])


def test_cocycle_p2_and_two_cone_fans():
    assert cocycle_check(p2_deformation())
    fan0 = fan_from_max_cones(QLattice(1, [[1]]), [[1], [-1]], [[1], [2]])
    assert cocycle_check(fan0)


def test_cocycle_randomized_100():
    rng = random.Random(100)
    for i in range(100):
        if i % 3 == 2:
            fan = random_bipyramid_fan(rng, rng.randint(3, 4))
        else:
            fan = random_circle_fan(rng, rng.randint(3, 7))
        assert cocycle_check(fan)


def test_chart_normalization_on_random_fans():
    rng = random.Random(41)
    for _ in range(8):
        fan = random_circle_fan(rng, rng.randint(3, 6))
        eye = Matrix.identity(fan.dim)
        for cone in fan.maximal_cones():
            ordered = tuple(sorted(cone))
            M, _ = chart_matrix(fan, ordered)
            for k, i in enumerate(ordered):
                col = M.apply(fan.ray(i))
                assert all((x - y).is_zero()
                           for x, y in zip(col, eye.column(k)))


def test_cocycle_negative_control():
    # a corrupted chart matrix breaks the cocycle equation
    fan = p2_deformation()
    A12, _ = chart_matrix(fan, (1, 2))
    A23, _ = chart_matrix(fan, (2, 3))
    A31, _ = chart_matrix(fan, (3, 1))
    wrong = Matrix([[ONE, ONE], [ZERO, ONE]]) * A31
    good = (A31 * mat_inverse(A12)) == \
        (A31 * mat_inverse(A23)) * (A23 * mat_inverse(A12))
    bad = (wrong * mat_inverse(A12)) == \
        (A31 * mat_inverse(A23)) * (A23 * mat_inverse(A12))
    assert good and not bad


def test_irrelevant_blowup():
    bu = fan_from_max_cones(QLattice(2, [[1, 0], [0, 1]]),
                            [[1, 0], [0, 1], [-1, -1], [-1, 0], [0, -1]],
                            [[1, 2], [2, 4], [3, 4], [3, 5], [1, 5]])
    descr = build_irrelevant(bu)
    assert descr.forbidden == [(1, 3), (1, 4), (2, 3), (2, 5), (4, 5)]
    # membership characterization: allowed zero sets are exactly the cones
    for c in bu.cones:
        assert descr.allows(c)
    assert not descr.allows({1, 3})
    assert not descr.allows({1, 3, 5})


def test_irrelevant_p1_and_half_line():
    fan0 = fan_from_max_cones(QLattice(1, [[1]]), [[1], [-1]], [[1], [2]])
    assert build_irrelevant(fan0).forbidden == [(1, 2)]
    half = fan_from_max_cones(QLattice(1, [[1]]), [[1]], [[1]])
    assert build_irrelevant(half).forbidden == []


def test_irrelevant_with_virtual_generators():
    gamma = QLattice(1, [[1], [SA]])
    fan = fan_from_max_cones(gamma, [[1], [-1]], [[1], [2]])
    cal = Calibration(gamma, [[1], [-1], [SA]], J=[3], I=[1, 2])
    descr = build_irrelevant(CalibratedFan(fan, cal))
    assert (3,) in descr.forbidden
    assert (1, 2) in descr.forbidden


def test_delta_H_poset_matches_fan_poset():
    rng = random.Random(55)
    for _ in range(5):
        fan = random_circle_fan(rng, rng.randint(3, 6))
        descr = build_irrelevant(fan)
        assert {frozenset(c) for c in descr.delta_H} == set(fan.cones)


def test_lemmah_identity_connects_charts_to_gale():
    cf = trivial_calibration(p2_deformation())
    gale = gale_linear(cf.cal)
    defect = lemmah_defect(cf.cal, gale)
    assert all(x.is_zero() for r in defect.rows for x in r)


def test_atlas_report_shape():
    cf = trivial_calibration(p2_deformation())
    rep = atlas_report(cf, cone_orders=[(1, 2), (2, 3), (3, 1)])
    assert rep["cocycle"] is True
    assert len(rep["charts"]) == 3
    by_cone = {tuple(c["I"]): c for c in rep["charts"]}
    assert by_cone[(2, 3)]["A"] == [["(-b)/(a)", "1"], ["(1)/(a)", "0"]]
    assert by_cone[(3, 1)]["A"] == [["0", "(1)/(b)"], ["1", "(-a)/(b)"]]
    assert by_cone[(1, 2)]["hbar"] == [["a"], ["b"]]
