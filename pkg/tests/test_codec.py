"""Encoder / decoder tests across the three schemes."""

import numpy as np
import pytest

from nercc.codec import (
    SCHEMES,
    SchemeConfig,
    SurvivorResults,
    decode,
    encode,
    min_survivors,
)
from nercc.errors import (
    ConfigInvalid,
    DecodingInfeasible,
    IndexOutOfRange,
    NegativeLambda,
    NonFiniteData,
    ShapeMismatch,
    TooFewPoints,
)
from nercc.points import alpha_points, beta_points
from nercc.spline import evaluate, fit_dense_oracle


class TestSchemeConfig:
    def test_agnostic_scheme_forces_zero_smoothing(self):
        cfg = SchemeConfig(scheme="nercc-ag", lambda_enc=3.0, lambda_dec=0.5)
        assert cfg.lambda_enc == 0.0 and cfg.lambda_dec == 0.0

    def test_rejects_unknown_scheme(self):
        with pytest.raises(ConfigInvalid):
            SchemeConfig(scheme="lagrange")

    def test_rejects_negative_lambda(self):
        with pytest.raises(NegativeLambda):
            SchemeConfig(scheme="nercc", lambda_enc=-1.0)

    def test_min_survivors(self):
        assert min_survivors(SchemeConfig(scheme="nercc")) == 3
        assert min_survivors(SchemeConfig(scheme="nercc-ag")) == 3
        assert min_survivors(SchemeConfig(scheme="bacc")) == 1


class TestEncode:
    def test_constant_rows_stay_constant(self):
        constant = np.array([2.0, -1.0, 0.5])
        X = np.tile(constant, (6, 1))
        alphas = alpha_points(6)
        betas = beta_points(9)
        for scheme in SCHEMES:
            cfg = SchemeConfig(scheme=scheme, lambda_enc=0.3)
            batch = encode(X, alphas, betas, cfg)
            np.testing.assert_allclose(batch.coded, np.tile(constant, (9, 1)), atol=1e-12)

    def test_node_linear_data_encodes_linearly(self):
        """x_k = alpha_k * v is in the penalty null space, so coded row n is
        beta_n * v for every encoder smoothing level."""
        direction = np.array([1.0, -2.0, 0.5])
        alphas = alpha_points(8)
        betas = beta_points(12)
        X = alphas[:, None] * direction
        for lam in (0.0, 1.0, 1e8):
            cfg = SchemeConfig(scheme="nercc", lambda_enc=lam)
            batch = encode(X, alphas, betas, cfg)
            assert np.max(np.abs(batch.coded - betas[:, None] * direction)) <= 1e-9

    def test_matches_dense_oracle_spline(self):
        alphas = alpha_points(3)
        betas = beta_points(5)
        X = np.array([[1.0], [0.0], [1.0]])
        batch = encode(X, alphas, betas, SchemeConfig(scheme="nercc", lambda_enc=0.0))
        oracle = evaluate(fit_dense_oracle(alphas, X, 0.0), betas)
        np.testing.assert_allclose(batch.coded, oracle, atol=1e-8)

    def test_encode_is_linear_in_the_data(self):
        rng = np.random.default_rng(4)
        alphas = alpha_points(7)
        betas = beta_points(11)
        A = rng.normal(size=(7, 3))
        B = rng.normal(size=(7, 3))
        for scheme in SCHEMES:
            cfg = SchemeConfig(scheme=scheme, lambda_enc=1e-2)
            joint = encode(A + B, alphas, betas, cfg).coded
            parts = encode(A, alphas, betas, cfg).coded + encode(B, alphas, betas, cfg).coded
            assert np.max(np.abs(joint - parts)) <= 1e-9
            scaled = encode(2.5 * A, alphas, betas, cfg).coded
            assert np.max(np.abs(scaled - 2.5 * encode(A, alphas, betas, cfg).coded)) <= 1e-9

    def test_input_validation(self):
        cfg = SchemeConfig(scheme="nercc")
        X = np.zeros((5, 2))
        with pytest.raises(ShapeMismatch):
            encode(X, alpha_points(4), beta_points(8), cfg)
        with pytest.raises(TooFewPoints):
            encode(X[:2], alpha_points(2), beta_points(8), cfg)
        with pytest.raises(NonFiniteData):
            encode(np.full((5, 2), np.nan), alpha_points(5), beta_points(8), cfg)
        with pytest.raises(TooFewPoints):
            encode(X, alpha_points(5), [0.0], cfg)


class TestDecode:
    def _run_identity_round(self, scheme, num_data=10, num_workers=30, survivors=None):
        alphas = alpha_points(num_data)
        betas = beta_points(num_workers)
        # smooth rows: the 1e-6 round-trip bound assumes the data vary
        # gently along the node index
        X = np.stack([np.sin(2.0 * alphas), np.cos(alphas) - 0.3 * alphas], axis=1)
        cfg = SchemeConfig(scheme=scheme)
        coded = encode(X, alphas, betas, cfg).coded
        idx = np.arange(num_workers) if survivors is None else np.asarray(survivors)
        results = SurvivorResults(indices=idx, outputs=coded[idx])
        return X, decode(results, betas, alphas, cfg)

    def test_identity_round_trip_on_linear_data(self):
        alphas = alpha_points(6)
        betas = beta_points(20)
        direction = np.array([2.0, -1.0])
        X = alphas[:, None] * direction
        cfg = SchemeConfig(scheme="nercc")
        coded = encode(X, alphas, betas, cfg).coded
        results = SurvivorResults(indices=np.arange(20), outputs=coded)
        decoded = decode(results, betas, alphas, cfg)
        assert np.max(np.abs(decoded - X)) <= 1e-9

    @pytest.mark.parametrize("scheme", ["nercc", "nercc-ag"])
    def test_identity_round_trip_is_accurate(self, scheme):
        X, decoded = self._run_identity_round(scheme)
        assert float(np.mean(np.sum((X - decoded) ** 2, axis=1))) <= 1e-6

    def test_constant_outputs_decode_to_constants(self):
        constant = np.array([3.0, 1.0, -2.0])
        betas = beta_points(10)
        alphas = alpha_points(4)
        outputs = np.tile(constant, (6, 1))
        results = SurvivorResults(indices=np.array([0, 2, 3, 7, 8, 9]), outputs=outputs)
        for scheme in SCHEMES:
            decoded = decode(results, betas, alphas, SchemeConfig(scheme=scheme, lambda_dec=0.1))
            np.testing.assert_allclose(decoded, np.tile(constant, (4, 1)), atol=1e-12)

    def test_two_survivors_is_infeasible_for_splines(self):
        results = SurvivorResults(indices=np.array([1, 5]), outputs=np.zeros((2, 3)))
        with pytest.raises(DecodingInfeasible):
            decode(results, beta_points(8), alpha_points(4), SchemeConfig(scheme="nercc"))

    def test_one_survivor_decodes_under_bacc(self):
        results = SurvivorResults(indices=np.array([4]), outputs=np.array([[5.0, 6.0]]))
        decoded = decode(results, beta_points(8), alpha_points(3), SchemeConfig(scheme="bacc"))
        np.testing.assert_array_equal(decoded, np.tile([5.0, 6.0], (3, 1)))

    def test_decode_is_linear_in_the_outputs(self):
        rng = np.random.default_rng(21)
        betas = beta_points(14)
        alphas = alpha_points(5)
        idx = np.sort(rng.choice(14, size=9, replace=False))
        A = rng.normal(size=(9, 2))
        B = rng.normal(size=(9, 2))
        for scheme in SCHEMES:
            cfg = SchemeConfig(scheme=scheme, lambda_dec=1e-3)
            joint = decode(SurvivorResults(idx, A + B), betas, alphas, cfg)
            parts = decode(SurvivorResults(idx, A), betas, alphas, cfg) + decode(
                SurvivorResults(idx, B), betas, alphas, cfg
            )
            assert np.max(np.abs(joint - parts)) <= 1e-9

    def test_survivor_index_validation(self):
        betas = beta_points(6)
        alphas = alpha_points(3)
        cfg = SchemeConfig(scheme="bacc")
        with pytest.raises(IndexOutOfRange):
            decode(SurvivorResults(np.array([0, 6]), np.zeros((2, 1))), betas, alphas, cfg)
        with pytest.raises(IndexOutOfRange):
            decode(SurvivorResults(np.array([-1]), np.zeros((1, 1))), betas, alphas, cfg)
        with pytest.raises(IndexOutOfRange):
            decode(SurvivorResults(np.array([2, 2]), np.zeros((2, 1))), betas, alphas, cfg)
        with pytest.raises(ShapeMismatch):
            decode(SurvivorResults(np.array([1, 2]), np.zeros((3, 1))), betas, alphas, cfg)
