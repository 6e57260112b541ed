"""Linear-algebra primitives against independent brute-force oracles."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from displab.geom import (
    Ball,
    DegenerateMatrixError,
    HPolytope,
    Parallelopiped,
    UnboundedBodyError,
    determinant,
    determinant_many,
    gram_schmidt_residuals,
    min_singular_value,
    normalized_determinant,
    parallelopiped_volume,
    row_projection_residual,
)
from displab.rng import RngStream


def cofactor_det(m: np.ndarray) -> float:
    """Textbook cofactor expansion; the independent oracle for n <= 5."""
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * m[0, j] * cofactor_det(minor)
    return total


def jacobi_min_eigenvalue(sym: np.ndarray, tol: float = 1e-13, sweeps: int = 100) -> float:
    """Cyclic Jacobi iteration on a symmetric matrix; oracle for eigenvalues."""
    a = sym.copy()
    n = a.shape[0]
    for _ in range(sweeps):
        off = math.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < tol * np.linalg.norm(a):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = 0.5 * math.atan2(2 * a[p, q], a[q, q] - a[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return float(np.min(np.diag(a)))


def random_matrices(n, count, seed):
    gen = RngStream(seed).generator()
    return gen.uniform(-1.0, 1.0, size=(count, n, n))


class TestDeterminant:
    def test_identity(self):
        assert determinant(np.eye(3)) == 1.0

    def test_diagonal(self):
        assert determinant([[2.0, 0.0], [0.0, 3.0]]) == pytest.approx(6.0)

    def test_sign_preserved(self):
        assert determinant([[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(-1.0)

    def test_matches_cofactor_expansion(self):
        for i, m in enumerate(random_matrices(4, 25, seed=101)):
            expected = cofactor_det(m)
            assert determinant(m) == pytest.approx(expected, rel=1e-10)

    def test_batch_matches_scalar(self):
        mats = random_matrices(5, 40, seed=102)
        batch = determinant_many(mats)
        for k in range(mats.shape[0]):
            assert batch[k] == pytest.approx(determinant(mats[k]), rel=1e-10)

    def test_singular(self):
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        assert determinant(m) == pytest.approx(0.0, abs=1e-14)


class TestGramSchmidt:
    def test_identity(self):
        assert np.allclose(gram_schmidt_residuals(np.eye(4)), 1.0)

    def test_lower_triangular_example(self):
        out = gram_schmidt_residuals([[1.0, 0.0], [1.0, 1.0]])
        assert out == pytest.approx([1.0, 1.0])

    def test_product_equals_abs_det(self):
        for m in random_matrices(3, 30, seed=103):
            res = gram_schmidt_residuals(m)
            assert np.prod(res) == pytest.approx(abs(determinant(m)), rel=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**31 - 1))
    def test_product_property(self, n, seed):
        m = RngStream(seed).generator().uniform(-1, 1, size=(n, n))
        res = gram_schmidt_residuals(m)
        assert np.all(res >= 0)
        assert np.prod(res) == pytest.approx(abs(determinant(m)), rel=1e-9, abs=1e-12)

    def test_zero_residual_for_dependent_rows(self):
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        res = gram_schmidt_residuals(m)
        assert res[1] == 0.0


class TestRowProjectionResidual:
    def test_identity(self):
        assert row_projection_residual(np.eye(3), 1) == pytest.approx(1.0)

    def test_hand_example(self):
        # projection of (1,0) orthogonal to (1,1) has length 1/sqrt(2)
        val = row_projection_residual([[1.0, 0.0], [1.0, 1.0]], 1)
        assert val == pytest.approx(1.0 / math.sqrt(2))

    def test_gram_matrix_oracle(self):
        for m in random_matrices(4, 20, seed=104):
            d = abs(determinant(m))
            for i in range(1, 5):
                others = np.delete(m, i - 1, axis=0)
                gram_vol = math.sqrt(abs(cofactor_det(others @ others.T)))
                assert row_projection_residual(m, i) == pytest.approx(d / gram_vol, rel=1e-8)

    def test_invariances(self):
        gen = RngStream(105).generator()
        m = gen.uniform(-1, 1, size=(4, 4))
        base = row_projection_residual(m, 2)
        perm = m[[3, 1, 0, 2]]  # row 2 moves to index 1 (1-based 2)
        assert row_projection_residual(perm, 2) == pytest.approx(base, rel=1e-10)
        sheared = m.copy()
        sheared[0] += 2.5 * m[3]  # modify another row within the same span
        assert row_projection_residual(sheared, 2) == pytest.approx(base, rel=1e-9)

    def test_dependent_row_gives_zero(self):
        m = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0, -3.0, 0.0]])
        assert row_projection_residual(m, 3) == 0.0

    def test_index_range(self):
        with pytest.raises(ValueError):
            row_projection_residual(np.eye(2), 3)


class TestNormalizedDeterminant:
    def test_identity(self):
        assert normalized_determinant(np.eye(5)) == 1.0

    def test_hand_example(self):
        assert normalized_determinant([[1.0, 0.0], [1.0, 1.0]]) == pytest.approx(1 / math.sqrt(2))

    def test_identical_rows(self):
        assert normalized_determinant([[1.0, 2.0], [1.0, 2.0]]) == 0.0

    def test_range_and_orthogonality(self):
        for m in random_matrices(3, 30, seed=106):
            val = normalized_determinant(m)
            assert 0.0 <= val <= 1.0
        q = np.array([[3.0, 0.0], [0.0, -0.25]])  # orthogonal rows, unequal norms
        assert normalized_determinant(q) == pytest.approx(1.0)

    def test_zero_row_raises(self):
        with pytest.raises(DegenerateMatrixError):
            normalized_determinant([[0.0, 0.0], [1.0, 2.0]])


class TestMinSingularValue:
    def test_identity(self):
        assert min_singular_value(np.eye(4)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert min_singular_value([[3.0, 0.0], [0.0, 0.5]]) == pytest.approx(0.5)

    def test_jacobi_oracle(self):
        gen = RngStream(107).generator()
        for _ in range(10):
            m = gen.standard_normal((6, 6))
            expected = math.sqrt(max(jacobi_min_eigenvalue(m.T @ m), 0.0))
            assert min_singular_value(m) == pytest.approx(expected, abs=1e-8)

    def test_row_norm_bound_and_scaling(self):
        for m in random_matrices(4, 20, seed=108):
            sigma = min_singular_value(m)
            assert sigma <= np.min(np.linalg.norm(m, axis=1)) + 1e-12
            assert min_singular_value(2.5 * m) == pytest.approx(2.5 * sigma, rel=1e-9, abs=1e-12)


class TestParallelopipedVolume:
    def test_identity_square(self):
        assert parallelopiped_volume(np.eye(2)) == pytest.approx(4.0)

    def test_shrinking_matrix_grows_body(self):
        assert parallelopiped_volume(np.diag([0.5, 0.5])) == pytest.approx(16.0)

    def test_volume_times_det(self):
        for m in random_matrices(3, 20, seed=109):
            if abs(determinant(m)) < 1e-3:
                continue
            assert parallelopiped_volume(m) * abs(determinant(m)) == pytest.approx(8.0, rel=1e-12)

    def test_singular_raises(self):
        with pytest.raises(UnboundedBodyError):
            parallelopiped_volume([[1.0, 1.0], [1.0, 1.0]])

    def test_rejection_monte_carlo_oracle(self):
        # well-conditioned matrix: volume vs rejection sampling in the vertex box
        gen = RngStream(110).generator()
        a = np.eye(3) + 0.2 * gen.uniform(-1, 1, size=(3, 3))
        body = Parallelopiped(a)
        vertices = np.array(
            [np.linalg.solve(a, s) for s in np.array(np.meshgrid(*[[-1, 1]] * 3)).T.reshape(-1, 3)]
        )
        lo, hi = vertices.min(axis=0), vertices.max(axis=0)
        pts = gen.uniform(lo, hi, size=(1_000_000, 3))
        frac = np.mean(body.contains_many(pts))
        est = frac * np.prod(hi - lo)
        assert parallelopiped_volume(a) == pytest.approx(est, rel=0.05)


class TestBodies:
    def test_parallelopiped_membership(self):
        body = Parallelopiped(np.eye(2))
        assert body.contains([0.5, -0.5])
        assert not body.contains([1.5, 0.0])

    def test_ball(self):
        ball = Ball(3, 2.0)
        assert ball.contains([0.0, 0.0, 2.0])
        assert not ball.contains([0.0, 0.0, 2.0001])
        with pytest.raises(ValueError):
            Ball(2, -1.0)

    def test_cube_polytope(self):
        cube = HPolytope.cube(3)
        assert cube.num_facets == 6
        assert cube.contains([1.0, -1.0, 0.0])
        assert not cube.contains([1.0001, 0.0, 0.0])

    def test_certify_bounding_radius(self):
        cube = HPolytope.cube(2)
        pts = RngStream(111).generator().uniform(-1, 1, size=(100, 2))
        assert cube.certify_bounding_radius(pts)
        with pytest.raises(ValueError):
            cube.certify_bounding_radius(np.array([[2.0, 0.0]]))

    def test_added_halfspaces(self):
        poly = HPolytope.cube(2).with_halfspaces([[1.0, 1.0]], [0.5])
        assert poly.num_facets == 5
        assert poly.contains([0.2, 0.2])
        assert not poly.contains([0.5, 0.5])
