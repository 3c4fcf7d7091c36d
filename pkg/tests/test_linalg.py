import numpy as np
import pytest

from oracles import gauss_inverse
from resilientsim import inf_norm, right_pseudoinverse
from resilientsim.errors import DimensionError, RankError
from resilientsim.system import ADMIRE_A, ADMIRE_BC


def test_inf_norm_vector_is_max_abs_entry():
    assert inf_norm(np.array([5.13, 2.76, -3.07])) == 5.13
    assert inf_norm(np.array([-4.0])) == 4.0


def test_inf_norm_matrix_is_max_abs_row_sum():
    assert inf_norm(np.eye(3)) == 1.0
    assert abs(inf_norm(ADMIRE_A) - 1.6143) < 1e-4
    # row sums of |A|: the first row dominates
    assert inf_norm(ADMIRE_A) == pytest.approx(0.9967 + 0.6176)


def test_inf_norm_rejects_empty_and_higher_rank():
    with pytest.raises(DimensionError):
        inf_norm(np.array([]))
    with pytest.raises(DimensionError):
        inf_norm(np.zeros((2, 2, 2)))


def test_inf_norm_homogeneity_and_triangle_inequality():
    rng = np.random.default_rng(42)
    for _ in range(200):
        n = rng.integers(1, 8)
        x = rng.normal(size=n)
        y = rng.normal(size=n)
        s = rng.normal()
        assert inf_norm(s * x) == pytest.approx(abs(s) * inf_norm(x), rel=1e-12)
        assert inf_norm(x + y) <= inf_norm(x) + inf_norm(y) + 1e-12
        m1 = rng.normal(size=(n, n + 1))
        m2 = rng.normal(size=(n, n + 1))
        assert inf_norm(m1 + m2) <= inf_norm(m1) + inf_norm(m2) + 1e-12


def test_pseudoinverse_identity_and_wide_row():
    np.testing.assert_allclose(right_pseudoinverse(np.eye(3)), np.eye(3), atol=1e-12)
    got = right_pseudoinverse(np.array([[1.0, 0.0, 0.0]]))
    np.testing.assert_allclose(got, np.array([[1.0], [0.0], [0.0]]), atol=1e-12)


def test_pseudoinverse_of_admire_controlled_map_matches_elimination():
    pinv = right_pseudoinverse(ADMIRE_BC)
    np.testing.assert_allclose(pinv, gauss_inverse(ADMIRE_BC), atol=1e-10)
    assert inf_norm(ADMIRE_BC @ pinv - np.eye(3)) <= 1e-8


def test_pseudoinverse_square_matches_elimination_oracle():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = rng.integers(1, 7)
        m = rng.normal(size=(n, n)) + np.eye(n)  # keep comfortably invertible
        if abs(np.linalg.det(m)) < 1e-3:
            continue
        np.testing.assert_allclose(
            right_pseudoinverse(m), gauss_inverse(m), atol=1e-8
        )


def test_pseudoinverse_wide_matrices_are_right_inverses():
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = rng.integers(1, 6)
        k = d + rng.integers(0, 4)
        m = rng.normal(size=(d, k))
        if np.linalg.matrix_rank(m) < d:
            continue
        pinv = right_pseudoinverse(m)
        assert pinv.shape == (k, d)
        assert inf_norm(m @ pinv - np.eye(d)) <= 1e-8


def test_pseudoinverse_rejects_rank_deficiency():
    with pytest.raises(RankError, match="full row rank 2"):
        right_pseudoinverse(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(RankError):
        right_pseudoinverse(np.zeros((2, 3)))


def test_pseudoinverse_rejects_tall_matrices():
    with pytest.raises(DimensionError):
        right_pseudoinverse(np.ones((3, 2)))
