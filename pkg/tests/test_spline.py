"""Smoothing-spline engine tests.

The banded solver is checked against hand-derived closed forms (linear data,
symmetric least-squares line) and against the dense explicit-basis oracle,
which shares no machinery with it.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from nercc.errors import (
    NegativeLambda,
    NonFiniteInput,
    NonFiniteQuery,
    NonIncreasingKnots,
    ShapeMismatch,
    TooFewKnots,
)
from nercc.spline import (
    SplineFit,
    _basis_matrix,
    _natural_basis,
    evaluate,
    fit,
    fit_dense_oracle,
    roughness,
)

LAMBDA_GRID = [0.0, 1e-4, 1.0, 1e4]


def random_instance(rng, n_max=50, min_gap=1e-3):
    """A random well-posed fitting instance on [-1, 1]."""
    n = int(rng.integers(3, n_max + 1))
    q = int(rng.integers(1, 5))
    knots = np.sort(rng.uniform(-1.0, 1.0, n))
    while np.min(np.diff(knots)) < min_gap:
        knots = np.sort(rng.uniform(-1.0, 1.0, n))
    return knots, rng.normal(size=(n, q))


class TestFit:
    def test_collinear_data_is_reproduced_for_any_lambda(self):
        """Linear data has zero SSE and zero penalty, so it is the minimizer."""
        knots = [-1.0, 0.0, 1.0]
        values = np.array([[-1.0], [1.0], [3.0]])  # y = 2t + 1
        for lam in (0.0, 1.0, 1e6):
            result = fit(knots, values, lam)
            np.testing.assert_array_equal(result.fitted, values)
            np.testing.assert_allclose(result.second_derivs, 0.0, atol=1e-12)

    def test_huge_lambda_gives_least_squares_line(self):
        """On [-1, 0, 1] with data [1, 0, 1] the LS line is y = 2/3."""
        result = fit([-1.0, 0.0, 1.0], [[1.0], [0.0], [1.0]], 1e12)
        out = evaluate(result, [-0.8, -0.3, 0.0, 0.41, 1.0])
        np.testing.assert_allclose(out, 2.0 / 3.0, atol=1e-5)

    def test_zero_lambda_interpolates(self):
        values = np.array([[1.0], [0.0], [1.0]])
        result = fit([-1.0, 0.0, 1.0], values, 0.0)
        np.testing.assert_array_equal(result.fitted, values)

    def test_natural_boundary_rows_are_zero(self):
        rng = np.random.default_rng(7)
        knots, values = random_instance(rng)
        for lam in LAMBDA_GRID:
            result = fit(knots, values, lam)
            np.testing.assert_array_equal(result.second_derivs[0], 0.0)
            np.testing.assert_array_equal(result.second_derivs[-1], 0.0)

    def test_vector_valued_fit_is_per_dimension(self):
        rng = np.random.default_rng(3)
        knots = np.linspace(-1, 1, 9)
        values = rng.normal(size=(9, 3))
        joint = fit(knots, values, 0.5)
        for j in range(3):
            single = fit(knots, values[:, j], 0.5)
            np.testing.assert_array_equal(joint.fitted[:, j : j + 1], single.fitted)

    @pytest.mark.parametrize(
        "knots, values, lam, exc",
        [
            ([-1.0, 1.0], [[0.0], [1.0]], 0.0, TooFewKnots),
            ([0.0, 0.0, 1.0], [[0.0], [1.0], [2.0]], 0.0, NonIncreasingKnots),
            ([1.0, 0.0, -1.0], [[0.0], [1.0], [2.0]], 0.0, NonIncreasingKnots),
            ([-1.0, 0.0, 1.0], [[np.nan], [1.0], [2.0]], 0.0, NonFiniteInput),
            ([-1.0, np.inf, 1.0], [[0.0], [1.0], [2.0]], 0.0, NonFiniteInput),
            ([-1.0, 0.0, 1.0], [[0.0], [1.0], [2.0]], -1.0, NegativeLambda),
            ([-1.0, 0.0, 1.0], [[0.0], [1.0], [2.0]], np.nan, NegativeLambda),
            ([-1.0, 0.0, 1.0], [[0.0], [1.0]], 0.0, ShapeMismatch),
        ],
    )
    def test_input_validation(self, knots, values, lam, exc):
        with pytest.raises(exc):
            fit(knots, values, lam)


class TestEvaluate:
    def test_knot_values_are_exact(self):
        rng = np.random.default_rng(11)
        knots, values = random_instance(rng)
        for lam in LAMBDA_GRID:
            result = fit(knots, values, lam)
            np.testing.assert_array_equal(evaluate(result, knots), result.fitted)

    def test_linear_fit_evaluates_linearly(self):
        result = fit([-1.0, 0.0, 1.0], [[-1.0], [1.0], [3.0]], 1.0)  # y = 2t + 1
        np.testing.assert_allclose(evaluate(result, [0.5]), [[2.0]], atol=1e-12)

    def test_agrees_with_dense_basis_formulation(self):
        """Evaluate the oracle's basis expansion directly at off-knot points."""
        knots = np.array([-1.0, 0.0, 1.0])
        values = np.array([[1.0], [0.0], [1.0]])
        banded = fit(knots, values, 0.0)
        ext, comb = _natural_basis(knots)
        design = _basis_matrix(ext, comb, knots)
        theta = np.linalg.solve(design, values)
        queries = np.array([-0.5, 0.5])
        via_basis = _basis_matrix(ext, comb, queries) @ theta
        np.testing.assert_allclose(evaluate(banded, queries), via_basis, atol=1e-8)

    def test_extrapolation_is_linear(self):
        rng = np.random.default_rng(5)
        knots, values = random_instance(rng)
        result = fit(knots, values, 1e-2)
        far = evaluate(result, [knots[-1] + 1.0])
        near = evaluate(result, [knots[-1] + 0.5])
        end = evaluate(result, [knots[-1]])
        # equal secants on both extrapolated steps
        np.testing.assert_allclose(far - near, near - end, atol=1e-9)

    def test_rejects_non_finite_queries(self):
        result = fit([-1.0, 0.0, 1.0], [[1.0], [0.0], [1.0]], 0.0)
        with pytest.raises(NonFiniteQuery):
            evaluate(result, [0.0, np.nan])


class TestRoughness:
    def test_collinear_fit_has_zero_roughness(self):
        result = fit([-1.0, 0.0, 1.0], [[-1.0], [1.0], [3.0]], 1.0)
        assert roughness(result) == 0.0

    def test_roughness_is_nonnegative(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            knots, values = random_instance(rng, n_max=20)
            assert roughness(fit(knots, values, rng.choice(LAMBDA_GRID))) >= 0.0

    def test_matches_numerical_quadrature(self):
        """Independent oracle: integrate the piecewise-linear u'' directly."""
        knots = np.array([-1.0, 0.0, 1.0])
        result = fit(knots, [[1.0], [0.0], [1.0]], 0.0)
        curvature = result.second_derivs[:, 0]

        total = 0.0
        for left, right in zip(knots[:-1], knots[1:]):
            val, _ = quad(lambda t: np.interp(t, knots, curvature) ** 2, left, right)
            total += val
        np.testing.assert_allclose(roughness(result), total, atol=1e-8)

    def test_matches_quadrature_on_random_vector_instances(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            knots, values = random_instance(rng, n_max=12)
            result = fit(knots, values, 1e-3)
            total = 0.0
            for j in range(values.shape[1]):
                curvature = result.second_derivs[:, j]
                for left, right in zip(knots[:-1], knots[1:]):
                    val, _ = quad(
                        lambda t: np.interp(t, knots, curvature) ** 2, left, right
                    )
                    total += val
            np.testing.assert_allclose(roughness(result), total, rtol=1e-8, atol=1e-10)


class TestDenseOracle:
    def test_agrees_with_banded_fit(self):
        rng = np.random.default_rng(19)
        for trial in range(40):
            knots, values = random_instance(rng)
            lam = LAMBDA_GRID[trial % 4]
            banded = fit(knots, values, lam)
            dense = fit_dense_oracle(knots, values, lam)
            scale = max(1.0, float(np.max(np.abs(banded.fitted))))
            assert np.max(np.abs(banded.fitted - dense.fitted)) / scale <= 1e-8

    def test_interpolates_at_zero_lambda(self):
        values = np.array([[2.0], [-1.0], [0.5]])
        dense = fit_dense_oracle([-1.0, 0.0, 1.0], values, 0.0)
        np.testing.assert_allclose(dense.fitted, values, atol=1e-12)

    def test_reproduces_collinear_data(self):
        knots = np.linspace(-1, 1, 7)
        values = (3.0 * knots - 0.25)[:, None]
        for lam in (0.0, 1.0, 1e6):
            dense = fit_dense_oracle(knots, values, lam)
            np.testing.assert_allclose(dense.fitted, values, atol=1e-9)


class TestInvariants:
    def test_interpolation_limit(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            knots, values = random_instance(rng)
            result = fit(knots, values, 0.0)
            assert np.max(np.abs(result.fitted - values)) <= 1e-9

    def test_null_space_reproduction_and_zero_roughness(self):
        rng = np.random.default_rng(29)
        knots = np.sort(rng.uniform(-1, 1, 12))
        direction = rng.normal(size=3)
        values = knots[:, None] * direction + 0.7
        for lam in (0.0, 1.0, 1e8):
            result = fit(knots, values, lam)
            assert np.max(np.abs(result.fitted - values)) <= 1e-9
            assert roughness(result) <= 1e-18
            np.testing.assert_allclose(
                evaluate(result, [0.123]), 0.123 * direction[None, :] + 0.7, atol=1e-9
            )

    def test_sse_and_roughness_are_monotone_in_lambda(self):
        rng = np.random.default_rng(31)
        grid = [0.0] + [10.0**e for e in range(-6, 3)]
        for _ in range(10):
            knots, values = random_instance(rng, n_max=25)
            sse_prev, rough_prev = -np.inf, np.inf
            for lam in grid:
                result = fit(knots, values, lam)
                sse = float(np.sum((result.fitted - values) ** 2))
                rough = roughness(result)
                assert sse >= sse_prev - 1e-12
                assert rough <= rough_prev + 1e-12
                sse_prev, rough_prev = sse, rough

    def test_fit_is_linear_in_values(self):
        rng = np.random.default_rng(37)
        knots = np.sort(rng.uniform(-1, 1, 15))
        a = rng.normal(size=(15, 2))
        b = rng.normal(size=(15, 2))
        for lam in LAMBDA_GRID:
            fit_sum = fit(knots, a + b, lam)
            parts = fit(knots, a, lam).fitted + fit(knots, b, lam).fitted
            assert np.max(np.abs(fit_sum.fitted - parts)) <= 1e-9
            fit_scaled = fit(knots, 3.0 * a, lam)
            assert np.max(np.abs(fit_scaled.fitted - 3.0 * fit(knots, a, lam).fitted)) <= 1e-9

    def test_fit_is_deterministic(self):
        rng = np.random.default_rng(41)
        knots, values = random_instance(rng)
        first = fit(knots, values, 1e-2)
        second = fit(knots, values, 1e-2)
        np.testing.assert_array_equal(first.fitted, second.fitted)
        np.testing.assert_array_equal(first.second_derivs, second.second_derivs)
        points = np.linspace(-1, 1, 33)
        np.testing.assert_array_equal(evaluate(first, points), evaluate(second, points))

    def test_splinefit_shape_contract(self):
        result = fit([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0], 0.0)
        assert isinstance(result, SplineFit)
        assert result.fitted.shape == result.second_derivs.shape == (3, 1)
