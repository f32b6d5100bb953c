import random
from fractions import Fraction as Q
from math import gcd

import pytest

from qtoric.errors import (NotRational, NotUnimodular, OutOfDomain,
                           OutOfZone, SingularBlock, UnsupportedField)
from qtoric.linalg import Matrix
from qtoric.moduli import (act_2d, cal_torus_orbit_maximal, hopf_equiv,
                           p2_orbit, p2_sigma, p2_tau, torus_act,
                           torus_equiv_2d, wps_weights,
                           wps_weights_chart_oracle)
from qtoric.scalars import Parameter, Scalar, Witness

A = Parameter("a")
B = Parameter("b")
T = Parameter("t", "quadratic", 2)
U3 = Parameter("u", "quadratic", 3)
SA, SB = Scalar.of_param(A), Scalar.of_param(B)
ST, SU = Scalar.of_param(T), Scalar.of_param(U3)
W = Witness({A: Q(-7, 3), B: Q(-5, 4), T: Q(3, 2), U3: Q(7, 4)})


def rand_unimodular(rng, n=2, steps=4):
    if n == 1:
        return Matrix([[rng.choice([1, -1])]])
    M = Matrix.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        E = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        E[i][j] = rng.randint(-3, 3)
        M = M * Matrix(E)
    if rng.random() < 0.3:
        S = [[0] * n for _ in range(n)]
        perm = list(range(n))
        rng.shuffle(perm)
        for r, c in enumerate(perm):
            S[r][c] = 1
        M = M * Matrix(S)
    return M


def test_torus_act_identity():
    hb = Matrix([[SA, SB]])
    assert torus_act(hb, Matrix.identity(3)) == hb


def test_torus_act_2d_formula():
    hb = Matrix([[SA]])
    H = Matrix([[2, 1], [1, 1]])
    out = torus_act(hb, H)
    assert out == Matrix([[(1 + SA) / (2 + SA)]])
    assert act_2d(SA, H) == (1 + SA) / (2 + SA)


def test_torus_act_bezout_to_zero():
    a = Q(3, 7)
    H = torus_equiv_2d(Scalar.from_fraction(a), Scalar.zero())
    assert H is not None
    assert act_2d(Scalar.from_fraction(a), H).is_zero()


def test_torus_act_errors():
    with pytest.raises(NotUnimodular):
        torus_act(Matrix([[SA]]), Matrix([[2, 0], [0, 1]]))
    with pytest.raises(SingularBlock):
        # H1 + hbar H3 = 1 + a*... choose H making it vanish at hbar = -1
        torus_act(Matrix([[Scalar.from_fraction(-1)]]),
                  Matrix([[1, 0], [1, 1]]))


def test_torus_act_group_law_randomized():
    rng = random.Random(99)
    checked = 0
    while checked < 120:
        a = Scalar.from_fraction(Q(rng.randint(-9, 9), rng.randint(1, 9)))
        H1, H2 = rand_unimodular(rng), rand_unimodular(rng)
        try:
            lhs = act_2d(a, H1 * H2)
            rhs = act_2d(act_2d(a, H1), H2)
        except SingularBlock:
            continue
        assert lhs == rhs
        checked += 1


def test_torus_act_matrix_group_law():
    rng = random.Random(98)
    checked = 0
    while checked < 30:
        hb = Matrix([[Scalar.from_fraction(Q(rng.randint(-5, 5),
                                             rng.randint(1, 4)))
                      for _ in range(2)]])
        H1 = rand_unimodular(rng, 3)
        H2 = rand_unimodular(rng, 3)
        try:
            lhs = torus_act(hb, H1 * H2)
            rhs = torus_act(torus_act(hb, H1), H2)
        except SingularBlock:
            continue
        assert lhs == rhs
        checked += 1


def test_equiv_2d_rationals():
    H = torus_equiv_2d(Scalar.from_fraction(Q(3, 7)),
                       Scalar.from_fraction(Q(5, 2)))
    assert H is not None
    assert act_2d(Scalar.from_fraction(Q(3, 7)), H) == Q(5, 2)


def test_equiv_2d_quadratic_translation():
    H = torus_equiv_2d(ST, 1 + ST)
    assert H is not None
    assert act_2d(ST, H) == 1 + ST
    # the obvious integer translation is also a valid witness
    assert act_2d(ST, Matrix([[1, 1], [0, 1]])) == 1 + ST


def test_equiv_2d_sqrt2_vs_sqrt3_absent():
    assert torus_equiv_2d(ST, SU) is None


def test_equiv_2d_mixed_absent():
    assert torus_equiv_2d(Scalar.from_fraction(2), ST) is None


def test_equiv_2d_bounded_orbit_oracle():
    # no small GL_2(Z) element carries sqrt2 to sqrt3
    bound = 8
    for p in range(-bound, bound + 1):
        for q in range(-bound, bound + 1):
            for r in range(-bound, bound + 1):
                # solve s from det = +-1
                for dt in (1, -1):
                    num = dt + q * r
                    if p == 0:
                        continue
                    if num % p:
                        continue
                    s = num // p
                    if abs(s) > 50:
                        continue
                    H = Matrix([[p, r], [q, s]])
                    val = act_2d(ST, H)
                    assert val != SU
    # same-tail detection is symmetric
    H = torus_equiv_2d(1 + ST, ST)
    assert H is not None and act_2d(1 + ST, H) == ST


def test_equiv_2d_transitive_with_witnesses():
    a = Scalar.from_fraction(Q(2, 5))
    b = Scalar.from_fraction(Q(-7, 3))
    c = Scalar.from_fraction(4)
    Hab = torus_equiv_2d(a, b)
    Hbc = torus_equiv_2d(b, c)
    assert act_2d(a, Hab * Hbc) == 4


def test_equiv_2d_rejects_transcendental():
    with pytest.raises(UnsupportedField):
        torus_equiv_2d(SA, SB)


def test_p2_orbit_full_isotropy():
    rep = p2_orbit(Scalar.from_fraction(-1), Scalar.from_fraction(-1), W)
    assert rep.isotropy == "S3"
    assert len(rep.orbit) == 1


def test_p2_orbit_diagonal_z2():
    rng = random.Random(3)
    for _ in range(20):
        a = Q(-rng.randint(2, 30), rng.randint(1, 7))
        if a == -1:
            continue
        rep = p2_orbit(Scalar.from_fraction(a), Scalar.from_fraction(a), W)
        assert rep.isotropy == "Z2(sigma)"
        assert len(rep.orbit) == 3


def test_p2_orbit_reflection_loci():
    rep = p2_orbit(Scalar.from_fraction(-2), Scalar.from_fraction(-1), W)
    assert rep.isotropy == "Z2(sigma.tau)"
    rep2 = p2_orbit(Scalar.from_fraction(-1), Scalar.from_fraction(-2), W)
    assert rep2.isotropy == "Z2(tau.sigma)"


def test_p2_orbit_generic_size_six():
    rep = p2_orbit(Scalar.from_fraction(-2), Scalar.from_fraction(-3), W)
    assert rep.isotropy == "trivial"
    assert len(rep.orbit) == 6
    strs = {tuple(str(x) for x in q) for q in rep.orbit}
    assert ("-2", "-3") in strs and ("-3", "-2") in strs
    assert rep.canonical == min(rep.orbit,
                                key=lambda q: (str(q[0]), str(q[1])))


def test_p2_orbit_domain_check():
    with pytest.raises(OutOfDomain):
        p2_orbit(Scalar.from_fraction(1), Scalar.from_fraction(-1), W)


def test_s3_presentation_symbolic():
    pt = (SA, SB)
    t3 = p2_tau(p2_tau(p2_tau(pt)))
    assert (t3[0] - SA).is_zero() and (t3[1] - SB).is_zero()
    s2 = p2_sigma(p2_sigma(pt))
    assert (s2[0] - SA).is_zero() and (s2[1] - SB).is_zero()
    st2 = p2_sigma(p2_tau(p2_sigma(p2_tau(pt))))
    assert (st2[0] - SA).is_zero() and (st2[1] - SB).is_zero()


def test_wps_weights_examples():
    assert wps_weights(-1, -1) == (1, 1, 1)
    assert wps_weights(-2, -3) == (1, 2, 3)
    assert wps_weights(Q(-1, 2), -1) == (2, 1, 2)


def test_wps_weights_rejects_irrational():
    with pytest.raises(NotRational):
        wps_weights(SA, Scalar.from_fraction(-1))


def test_wps_weights_oracle_and_coprimality_200():
    rng = random.Random(12)
    for _ in range(200):
        a = Q(-rng.randint(1, 15), rng.randint(1, 15))
        b = Q(-rng.randint(1, 15), rng.randint(1, 15))
        wts = wps_weights(a, b)
        assert wts == wps_weights_chart_oracle(a, b)
        assert gcd(gcd(wts[0], wts[1]), wts[2]) == 1


def _pair(re3, im3, re4, im4):
    return ((Scalar.from_fraction(re3), Scalar.from_fraction(im3)),
            (Scalar.from_fraction(re4), Scalar.from_fraction(im4)))


def test_hopf_equiv_examples():
    p1 = _pair(Q(1, 3), 2, Q(1, 7), 3)
    shifted = _pair(Q(4, 3), 2, Q(1, 7), 3)
    res = hopf_equiv(p1, shifted, W)
    assert res["equivalent"] and res["witness"]["kind"] == "direct"
    switched = _pair(Q(1, 7), 3, Q(1, 3), 2)
    assert hopf_equiv(p1, switched, W)["equivalent"]
    diag = _pair(Q(1, 3), 2, Q(1, 3), 2)
    assert hopf_equiv(diag, diag, W)["isotropy"] == "Z2"
    # integer real difference with lambda4 - lambda3 integral
    int_diff = _pair(Q(1, 3), 2, Q(7, 3), 2)
    assert hopf_equiv(int_diff, int_diff, W)["isotropy"] == "Z2"


def test_hopf_not_equivalent_cases():
    p1 = _pair(Q(1, 3), 2, Q(1, 7), 3)
    other = _pair(Q(1, 2), 2, Q(1, 7), 3)
    assert not hopf_equiv(p1, other, W)["equivalent"]
    # an imaginary shift changes the surface
    imshift = _pair(Q(1, 3), 3, Q(1, 7), 3)
    assert not hopf_equiv(p1, imshift, W)["equivalent"]


def test_hopf_zone_enforced():
    inzone = _pair(Q(1, 3), 2, Q(1, 7), 3)
    offzone = _pair(Q(1, 3), 2, Q(1, 7), 0)
    with pytest.raises(OutOfZone):
        hopf_equiv(inzone, offzone, W)
    with pytest.raises(OutOfZone):
        hopf_equiv(offzone, inzone, W)


def test_hopf_equivalence_relation_on_samples():
    base = _pair(Q(1, 3), 2, Q(1, 7), 3)
    q1 = _pair(Q(4, 3), 2, Q(8, 7), 3)    # base + (1, 1)
    q2 = _pair(Q(8, 7), 3, Q(4, 3), 2)    # switched
    assert hopf_equiv(base, base, W)["equivalent"]
    assert hopf_equiv(base, q1, W)["equivalent"]
    assert hopf_equiv(q1, base, W)["equivalent"]
    assert hopf_equiv(q1, q2, W)["equivalent"]
    assert hopf_equiv(base, q2, W)["equivalent"]


def test_cal_torus_orbit_marked_and_full():
    hb = Matrix([[Q(1, 2), Q(3, 2)], [0, 1]])
    marked = cal_torus_orbit_maximal(hb, "marked")
    # canonical form is a left-GL_2(Z) invariant
    H1 = Matrix([[1, 1], [0, 1]])
    from qtoric.linalg import mat_inverse
    moved = mat_inverse(H1) * hb
    marked2 = cal_torus_orbit_maximal(moved, "marked")
    assert marked.canonical == marked2.canonical
    full = cal_torus_orbit_maximal(hb, "full")
    swapped = Matrix([[hb.rows[0][1], hb.rows[0][0]],
                      [hb.rows[1][1], hb.rows[1][0]]])
    full2 = cal_torus_orbit_maximal(swapped, "full")
    assert full.canonical == full2.canonical


def test_cal_torus_orbit_identity_isotropy():
    rep = cal_torus_orbit_maximal(Matrix.identity(2), "full")
    assert rep.isotropy.startswith("permutations")


def test_cal_torus_orbit_invariance_randomized():
    rng = random.Random(21)
    for _ in range(50):
        d, k = rng.choice([(1, 2), (2, 2), (2, 3)])
        hb = Matrix([[Q(rng.randint(-4, 4), rng.randint(1, 3))
                      for _ in range(k)] for _ in range(d)])
        H1 = rand_unimodular(rng, d)
        perm = list(range(k))
        rng.shuffle(perm)
        from qtoric.linalg import mat_inverse
        moved = mat_inverse(H1) * Matrix([[hb.rows[i][j] for j in perm]
                                          for i in range(d)])
        r1 = cal_torus_orbit_maximal(hb, "full")
        r2 = cal_torus_orbit_maximal(moved, "full")
        assert r1.canonical == r2.canonical


def test_cal_torus_orbit_parametric_is_heuristic():
    rep = cal_torus_orbit_maximal(Matrix([[SA]]), "full")
    assert rep.heuristic
