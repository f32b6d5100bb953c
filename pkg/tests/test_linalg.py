import random
from fractions import Fraction as Q

import pytest

from qtoric.errors import Singular
from qtoric.linalg import (Matrix, det, hnf, int_kernel, int_rank, int_solve,
                           kernel_basis, mat_inverse, rank)
from qtoric.scalars import Parameter, Scalar

A = Parameter("a")
B = Parameter("b")
SA, SB = Scalar.of_param(A), Scalar.of_param(B)
ONE, ZERO = Scalar.one(), Scalar.zero()


def test_inverse_identity():
    eye = Matrix.identity(3)
    assert mat_inverse(eye) == eye


def test_inverse_paper_example():
    M = Matrix([[-1, 1], [-1, 0]])
    assert mat_inverse(M) == Matrix([[0, -1], [1, -1]])


def test_inverse_symbolic_chart_matrix():
    A23 = Matrix([[-SB / SA, ONE], [ONE / SA, ZERO]])
    assert A23 * mat_inverse(A23) == Matrix.identity(2)
    assert mat_inverse(A23) == Matrix([[ZERO, SA], [ONE, SB]])


def test_singular_raises():
    with pytest.raises(Singular):
        mat_inverse(Matrix([[1, 2], [2, 4]]))


def rand_matrix(rng, n):
    pool = [SA, SB, ONE, ZERO,
            Scalar.from_fraction(Q(rng.randint(-3, 3), rng.randint(1, 3)))]
    return Matrix([[rng.choice(pool) for _ in range(n)] for _ in range(n)])


def test_inverse_randomized_100():
    rng = random.Random(11)
    done = 0
    while done < 100:
        n = rng.choice([2, 2, 3])
        M = rand_matrix(rng, n)
        if det(M).is_zero():
            continue
        assert M * mat_inverse(M) == Matrix.identity(n)
        done += 1


def test_kernel_examples():
    M = Matrix([[ONE, ZERO, SA], [ZERO, ONE, SB]])
    ker = kernel_basis(M)
    assert len(ker) == 1
    assert [str(x) for x in ker[0]] == ["-a", "-b", "1"]
    assert kernel_basis(Matrix.identity(3)) == []


def test_kernel_blowup_reproduces_gale_rows():
    h = Matrix([[1, 0, -1, -1, 0], [0, 1, -1, 0, -1]])
    ker = kernel_basis(h)
    G = Matrix.from_columns(ker)
    assert G == Matrix([[1, 1, 0], [1, 0, 1],
                        [1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_kernel_properties_randomized():
    rng = random.Random(5)
    for _ in range(30):
        m, n = rng.randint(1, 3), rng.randint(2, 5)
        pool = [SA, ONE, ZERO,
                Scalar.from_fraction(rng.randint(-3, 3))]
        M = Matrix([[rng.choice(pool) for _ in range(n)] for _ in range(m)])
        ker = kernel_basis(M)
        for v in ker:
            assert all(x.is_zero() for x in M.apply(v))
        if ker:
            K = Matrix.from_columns(ker)
            assert rank(K) == len(ker)
        assert len(ker) == n - rank(M)


def test_hnf_examples():
    H, U = hnf([[2, 0], [0, 3]])
    assert H == [[2, 0], [0, 3]] and U == [[1, 0], [0, 1]]
    H, U = hnf([[1, 2], [2, 4]])
    assert H[0] == [1, 2] and H[1] == [0, 0]
    H, U = hnf([[0, 1], [1, 0]])
    assert H == [[1, 0], [0, 1]] and U == [[0, 1], [1, 0]]


def _is_hnf(H):
    pivots = []
    for row in H:
        nz = [j for j, v in enumerate(row) if v != 0]
        if not nz:
            continue
        p = nz[0]
        if pivots and p <= pivots[-1]:
            return False
        if row[p] <= 0:
            return False
        pivots.append(p)
    # entries above each pivot reduced into [0, pivot)
    rows = [r for r in H if any(v != 0 for v in r)]
    for i, row in enumerate(rows):
        p = next(j for j, v in enumerate(row) if v != 0)
        for k in range(i):
            if not (0 <= rows[k][p] < row[p]):
                return False
    return True


def test_hnf_properties_randomized():
    rng = random.Random(9)
    for _ in range(50):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        H, U = hnf(M)
        assert _is_hnf(H)
        UM = [[sum(U[i][k] * M[k][j] for k in range(m)) for j in range(n)]
              for i in range(m)]
        assert UM == H
        Um = Matrix([[Scalar.from_fraction(x) for x in r] for r in U])
        assert abs(det(Um).as_fraction()) == 1


def test_int_solve_and_kernel():
    assert int_solve([[2]], [3]) is None
    assert int_solve([[2]], [4]) == (2,)
    assert int_solve([[1, 0], [0, 1]], [2, -5]) == (2, -5)
    ker = int_kernel([[1, 0, -1], [0, 1, -1]])
    assert ker == [(1, 1, 1)]
    assert int_rank([[1, 2], [2, 4], [3, 6]]) == 1


def test_int_kernel_saturated():
    # kernel of [2, -2] over Z is spanned by (1,1), not (2,2)
    ker = int_kernel([[2, -2]])
    assert sorted(map(tuple, ker)) == [(1, 1)]
