import itertools
import random
from fractions import Fraction as F

import pytest

from ultrapencil.padic import PAdicContext, UltraNorm, padic_abs
from ultrapencil.linalg import (
    Matrix,
    apply_functional,
    basis_vector,
    op_norm,
    outer,
    vec,
    vec_add,
    vec_norm,
)

CTX = PAdicContext(5)


def det_by_permutations(M):
    """Leibniz expansion; independent oracle for small determinants."""
    n = M.n
    total = F(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = F(1)
        for i in range(n):
            term *= M.rows[i][perm[i]]
        total += sign * term
    return total


def random_rational(rng):
    num = rng.randrange(-200, 201)
    den = rng.choice([1, 2, 3, 5, 25, 7])
    return F(num, den)


def random_matrix(rng, n):
    return Matrix.from_rows(
        [[random_rational(rng) for _ in range(n)] for _ in range(n)]
    )


def test_vec_norm_examples():
    assert vec_norm(vec([1, 5]), CTX) == UltraNorm.ppow(0)
    assert vec_norm(vec([0, 0]), CTX).is_zero
    assert vec_norm(vec([F(1, 5), 25]), CTX) == UltraNorm.ppow(-1)


def test_op_norm_examples():
    assert op_norm(Matrix.from_rows([[5, 1], [25, 125]]), CTX) == UltraNorm.ppow(0)
    assert op_norm(Matrix.diagonal([1, 2]), CTX) == UltraNorm.ppow(0)
    assert op_norm(Matrix.zeros(3), CTX).is_zero


def test_matrix_plumbing():
    M = Matrix.from_rows([[1, 2], [3, 4]])
    I = Matrix.identity(2)
    assert I.mul(M).rows == M.rows
    assert Matrix.diagonal([1, 2]).matvec(basis_vector(2, 1)) == vec([0, 2])
    assert (M + M.scale(-1)).is_zero()
    with pytest.raises(ValueError):
        M.mul(Matrix.identity(3))


def test_det_examples():
    assert Matrix.identity(4).det() == 1
    assert Matrix.diagonal([0, 1]).det() == 0
    assert Matrix.from_rows([[1, 2], [3, 4]]).det() == -2


def test_det_against_permutation_oracle():
    rng = random.Random(7)
    for n in (2, 3, 4):
        for _ in range(25):
            M = random_matrix(rng, n)
            assert M.det() == det_by_permutations(M)


def test_inverse_examples():
    assert Matrix.diagonal([1, 5]).inverse(CTX).rows == Matrix.diagonal(
        [1, F(1, 5)]
    ).rows
    assert Matrix.diagonal([0, 1]).inverse(CTX) is None
    swap = Matrix.from_rows([[0, 1], [1, 0]])
    assert swap.inverse(CTX).rows == swap.rows


def test_inverse_exact_on_random_matrices():
    rng = random.Random(11)
    I3 = Matrix.identity(3)
    count = 0
    while count < 30:
        M = random_matrix(rng, 3)
        if M.det() == 0:
            continue
        count += 1
        N = M.inverse(CTX)
        assert M.mul(N).rows == I3.rows
        assert N.mul(M).rows == I3.rows


def test_submultiplicativity():
    rng = random.Random(13)
    for _ in range(50):
        M = random_matrix(rng, 3)
        N = random_matrix(rng, 3)
        assert op_norm(M.mul(N), CTX) <= op_norm(M, CTX) * op_norm(N, CTX)


def test_op_norm_attained_on_coordinate_vector():
    rng = random.Random(17)
    for _ in range(50):
        M = random_matrix(rng, 3)
        if M.is_zero():
            continue
        col_norms = [vec_norm(M.column(j), CTX) for j in range(3)]
        assert max(col_norms) == op_norm(M, CTX)
        # No vector can beat it: spot-check random vectors.
        for _ in range(5):
            x = vec([random_rational(rng) for _ in range(3)])
            if all(e == 0 for e in x):
                continue
            assert vec_norm(M.matvec(x), CTX) <= op_norm(M, CTX) * vec_norm(x, CTX)


def test_vector_ultrametric_triangle():
    rng = random.Random(19)
    for _ in range(50):
        x = vec([random_rational(rng) for _ in range(4)])
        y = vec([random_rational(rng) for _ in range(4)])
        assert vec_norm(vec_add(x, y), CTX) <= max(vec_norm(x, CTX), vec_norm(y, CTX))


def test_identity_norm():
    assert op_norm(Matrix.identity(5), CTX) == UltraNorm.one()


def test_functional_and_outer():
    f = vec([1, F(1, 2)])
    y = vec([2, 4])
    assert apply_functional(f, y) == 4
    C = outer(vec([1, 0]), f)
    assert C.matvec(y) == vec([4, 0])


def test_matrix_json_roundtrip():
    M = Matrix.from_rows([[1, F(-3, 25)], [0, 2]])
    obj = M.to_json(CTX)
    assert obj["p"] == 5
    assert obj["rows"][0][1] == "-3/25"
    assert Matrix.from_json(obj).rows == M.rows
