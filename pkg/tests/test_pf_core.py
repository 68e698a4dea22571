import math

import numpy as np
import pytest

from subtile.pf_core import (
    IntMatrix,
    NotPrimitiveError,
    Regime,
    classify,
    corollary_deviation,
    integer_rank,
    is_primitive,
    perron_data,
    poly_of_matrix,
    power_column,
    real_root_bisect,
    semisimple_at_modulus,
    semisimple_exact,
)

PINWHEEL = [[2, 3], [3, 2]]
TABLE = [[2, 2], [2, 2]]
SQUARE = [[2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 2, 1], [1, 0, 1, 2]]
RAUZY = [[0, 0, 1], [1, 0, 0], [0, 1, 1]]


def brute_primitive(M, kmax=20):
    A = np.array(M, dtype=object)
    P = A.copy()
    for _ in range(kmax):
        if (P > 0).all():
            return True
        P = P.dot(A)
    return False


@pytest.mark.parametrize("M,expected", [(PINWHEEL, True), ([[1, 0], [0, 1]], False), (RAUZY, True),
                                        ([[0, 1], [1, 0]], False), (SQUARE, True), (TABLE, True)])
def test_is_primitive(M, expected):
    assert is_primitive(IntMatrix(M)) is expected
    assert brute_primitive(M) is expected


def test_rauzy_power_positive_by_hand():
    A = np.array(RAUZY, dtype=np.int64)
    powers = [np.linalg.matrix_power(A, k) for k in range(1, 6)]
    assert any((P > 0).all() for P in powers)


def test_intmatrix_validation():
    with pytest.raises(ValueError):
        IntMatrix([[1, -1], [0, 1]])
    with pytest.raises(ValueError):
        IntMatrix([[1, 2, 3], [0, 1]])
    assert IntMatrix(SQUARE).norm1() == 4
    M = IntMatrix.from_text("2\n2 3\n3 2\n")
    assert M == IntMatrix(PINWHEEL)
    assert IntMatrix.from_text(M.to_text()) == M


def test_perron_pinwheel():
    pd = perron_data(IntMatrix(PINWHEEL))
    assert pd.mu == pytest.approx(5, abs=1e-12)
    assert pd.r == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(pd.nu, [0.5, 0.5], atol=1e-12)
    vals = sorted(v.real for v, _ in pd.spectrum)
    np.testing.assert_allclose(vals, [-1, 5], atol=1e-12)


def test_perron_table():
    pd = perron_data(IntMatrix(TABLE))
    assert pd.mu == pytest.approx(4)
    assert pd.r == pytest.approx(0, abs=1e-12)
    np.testing.assert_allclose(pd.nu, [0.5, 0.5])


def test_perron_normalization():
    pd = perron_data(IntMatrix(SQUARE))
    assert float(np.dot(pd.v, pd.w)) == pytest.approx(1.0)
    assert pd.v.sum() == pytest.approx(1.0)
    M = np.array(SQUARE, dtype=float)
    np.testing.assert_allclose(M @ pd.v, pd.mu * pd.v, atol=1e-12)
    np.testing.assert_allclose(pd.w @ M, pd.mu * pd.w, atol=1e-12)


def test_rauzy_eigenvector_relations():
    pd = perron_data(IntMatrix(RAUZY))
    v = pd.v
    assert v[2] == pytest.approx(pd.mu * v[0])
    assert v[0] == pytest.approx(pd.mu * v[1])
    assert pd.r < 1


def test_not_primitive_raises():
    with pytest.raises(NotPrimitiveError):
        perron_data(IntMatrix([[1, 0], [0, 1]]))


def test_semisimple_square_and_jordan():
    assert semisimple_at_modulus(IntMatrix(SQUARE), 2.0)
    assert not semisimple_at_modulus(IntMatrix([[2, 1], [0, 2]]), 2.0)
    with pytest.raises(ValueError):
        semisimple_at_modulus(IntMatrix(SQUARE), 3.0)


def test_semisimple_exact():
    # square: eigenvalues +-2 with min poly x^2-4 on that block
    assert semisimple_exact(IntMatrix(SQUARE), [1, 0, -4])
    assert not semisimple_exact(IntMatrix([[2, 1], [0, 2]]), [1, -2])


def test_integer_rank_and_poly():
    assert integer_rank([[1, 2], [2, 4]]) == 1
    assert integer_rank([[1, 0], [0, 1]]) == 2
    assert integer_rank([[0, 0], [0, 0]]) == 0
    P = poly_of_matrix(IntMatrix([[2, 1], [0, 2]]), [1, -2])
    assert P == [[0, 1], [0, 0]]


def test_classify():
    assert classify(IntMatrix(PINWHEEL), math.sqrt(5)).regime is Regime.LINEAR
    assert classify(IntMatrix(SQUARE), 2.0).regime is Regime.LINEAR_LOG
    assert classify(IntMatrix([[2, 1], [0, 2]]), 2.0).regime is Regime.UNSUPPORTED
    assert classify(IntMatrix(TABLE), 2.0).regime is Regime.LINEAR


def test_power_column():
    assert power_column(IntMatrix(TABLE), 2, 0) == (8, 8)
    assert power_column(IntMatrix(PINWHEEL), 1, 0) == (2, 3)
    for j in range(4):
        e = [0] * 4
        e[j] = 1
        assert power_column(IntMatrix(SQUARE), 0, j) == tuple(e)
    big = power_column(IntMatrix(PINWHEEL), 40, 0)
    assert sum(big) == 5**40


def test_corollary_deviation():
    assert corollary_deviation(IntMatrix(TABLE), 1) == pytest.approx(0)
    assert corollary_deviation(IntMatrix(PINWHEEL), 1) == pytest.approx(0.5)
    assert corollary_deviation(IntMatrix(SQUARE), 1) == pytest.approx(1)


def test_real_root_bisect():
    x = real_root_bisect([1, -1, -1, -1], 1, 2)
    assert x**3 - x**2 - x - 1 == pytest.approx(0, abs=1e-12)
    assert x == pytest.approx(1.839286755214161)
