"""공정 가우시안 프로세스 서비스 테스트"""

import numpy as np
import pytest

from core.domain.entities import FgpModel, FitConfig, KernelFamily, KernelSpec
from core.domain.exceptions import DimensionMismatchError, FgpFitError, ModelNotFittedError
from core.services import fgp
from core.services.kernel import center_columns, gram
from core.services.model_subspace import orthonormalize
from tests.helpers import rbf_gram

_LOG_2PI = np.log(2.0 * np.pi)


def make_problem(rng, n=20, d=3, p=2):
    X = rng.standard_normal((n, p))
    spec, K = rbf_gram(X)
    E = orthonormalize(K, rng.standard_normal((n, d))).coeffs
    y = np.sin(X[:, 0]) + 0.3 * rng.standard_normal(n)
    return spec, K, X, E, y


def dense_lml(pi, lam, noise, r):
    C = pi @ np.diag(lam) @ pi.T + noise * np.eye(len(r))
    _, logdet = np.linalg.slogdet(C)
    return -0.5 * r @ np.linalg.solve(C, r) - 0.5 * logdet - 0.5 * len(r) * _LOG_2PI


class TestFeatures:
    def test_training_features_are_centered_gram_times_basis(self, rng):
        spec, K, X, E, y = make_problem(rng)
        model = fgp.condition(spec, X, y, E, 0.0, -1.0, K=K)
        np.testing.assert_allclose(fgp.features(model, X), center_columns(K) @ E, atol=1e-12)

    def test_zero_basis_gives_zero_features(self, rng):
        spec, K, X, _, y = make_problem(rng)
        model = fgp.condition(spec, X, y, np.zeros((X.shape[0], 2)), 0.0, -1.0, K=K)
        np.testing.assert_array_equal(fgp.features(model, rng.standard_normal((4, 2))), 0.0)

    def test_hand_computed_linear_features(self):
        spec = KernelSpec(family=KernelFamily.LINEAR)
        X = np.array([[1.0], [2.0]])
        model = fgp.condition(spec, X, np.array([0.0, 1.0]), np.array([[1.0], [0.0]]), 0.0, 0.0)
        np.testing.assert_allclose(fgp.features(model, np.array([[3.0]])), [[1.5]])

    def test_rejects_dimension_mismatch(self, rng):
        spec, K, X, E, y = make_problem(rng)
        model = fgp.condition(spec, X, y, E, 0.0, -1.0, K=K)
        with pytest.raises(DimensionMismatchError):
            fgp.features(model, np.zeros((2, 3)))


class TestMarginalLikelihood:
    def test_single_point_standard_normal(self):
        spec = KernelSpec()
        model = fgp.condition(spec, np.array([[0.0]]), np.array([0.0]), np.array([[0.0]]), 0.0, 0.0, center_targets=False)
        assert fgp.log_marginal_likelihood(model, np.array([0.0])) == pytest.approx(-0.918939, abs=1e-6)

    def test_matches_dense_computation(self, rng):
        spec, K, X, E, y = make_problem(rng)
        log_lambda = np.array([0.3, -0.5, 1.0])
        model = fgp.condition(spec, X, y, E, log_lambda, -1.5, center_targets=False, K=K)
        expected = dense_lml(center_columns(K) @ E, np.exp(log_lambda), np.exp(-1.5), y)
        assert fgp.log_marginal_likelihood(model, y) == pytest.approx(expected, rel=1e-8)

    def test_vanishing_prior_scale_gives_iid_likelihood(self, rng):
        spec, K, X, E, y = make_problem(rng)
        noise = np.exp(-1.0)
        model = fgp.condition(spec, X, y, E, -30.0, -1.0, center_targets=False, K=K)
        iid = -0.5 * y @ y / noise - 0.5 * len(y) * np.log(noise) - 0.5 * len(y) * _LOG_2PI
        assert fgp.log_marginal_likelihood(model, y) == pytest.approx(iid, abs=1e-6)

    def test_gradient_matches_central_differences(self, rng):
        spec, K, X, E, y = make_problem(rng, n=15, d=3)
        log_lambda = np.array([0.2, -0.7, 0.9])
        log_noise = -1.2
        h = 1e-5

        def lml(ll, ln):
            model = fgp.condition(spec, X, y, E, ll, ln, center_targets=False, K=K)
            return fgp.log_marginal_likelihood(model, y)

        model = fgp.condition(spec, X, y, E, log_lambda, log_noise, center_targets=False, K=K)
        g_lambda, g_noise = fgp.lml_gradient(model, y)
        for j in range(3):
            step = np.zeros(3)
            step[j] = h
            numeric = (lml(log_lambda + step, log_noise) - lml(log_lambda - step, log_noise)) / (2 * h)
            assert abs(g_lambda[j] - numeric) <= 1e-5 * max(abs(numeric), 1e-2)
        numeric = (lml(log_lambda, log_noise + h) - lml(log_lambda, log_noise - h)) / (2 * h)
        assert abs(g_noise - numeric) <= 1e-5 * max(abs(numeric), 1e-2)

    def test_zero_features_have_zero_scale_gradient(self, rng):
        spec, K, X, _, y = make_problem(rng)
        model = fgp.condition(spec, X, y, np.zeros((X.shape[0], 2)), 0.0, -1.0, K=K)
        g_lambda, _ = fgp.lml_gradient(model, y)
        np.testing.assert_array_equal(g_lambda, 0.0)


class TestFit:
    def test_likelihood_trace_is_monotone(self, rng):
        spec, K, X, E, y = make_problem(rng, n=40)
        model = fgp.fit(spec, X, y, E)
        trace = np.asarray(model.lml_trace)
        assert len(trace) >= 2
        assert np.all(np.diff(trace) >= 0)
        assert fgp.log_marginal_likelihood(model, y) == pytest.approx(trace[-1], rel=1e-10, abs=1e-10)

    def test_converges_to_stationary_point(self, rng):
        spec, K, X, E, y = make_problem(rng, n=60, d=2)
        config = FitConfig(convergence_tol=1e-15, grad_tol=1e-8, max_iters=500)
        model = fgp.fit(spec, X, y, E, config)
        g_lambda, g_noise = fgp.lml_gradient(model, y)
        lml = fgp.log_marginal_likelihood(model, y)
        interior = np.abs(model.log_lambda) < config.log_bound - 1e-6
        scale = max(1.0, abs(lml))
        assert np.all(np.abs(g_lambda[interior]) <= 1e-4 * scale)
        assert abs(g_noise) <= 1e-4 * scale

    def test_recovers_generating_likelihood(self, rng):
        n = 300
        X = rng.standard_normal((n, 2))
        spec, K = rbf_gram(X)
        E = orthonormalize(K, rng.standard_normal((n, 2))).coeffs
        true_lambda = np.array([2.0, 0.5])
        true_noise = 0.1
        pi = center_columns(K) @ E
        y = pi @ (np.sqrt(true_lambda) * rng.standard_normal(2)) + np.sqrt(true_noise) * rng.standard_normal(n)

        config = FitConfig(center_targets=False)
        model = fgp.fit(spec, X, y, E, config)
        truth = fgp.condition(spec, X, y, E, np.log(true_lambda), np.log(true_noise), center_targets=False, K=K)
        assert fgp.log_marginal_likelihood(model, y) >= fgp.log_marginal_likelihood(truth, y) - 1e-3

    def test_zero_targets_drive_noise_to_floor(self, rng):
        spec, K, X, E, _ = make_problem(rng, n=25)
        y = np.zeros(25)
        config = FitConfig()
        model = fgp.fit(spec, X, y, E, config)
        assert model.log_noise == pytest.approx(np.log(config.noise_floor_ratio), abs=1e-6)
        iid = -0.5 * 25 * (np.log(config.noise_floor_ratio) + _LOG_2PI)
        assert model.lml_trace[-1] == pytest.approx(iid, rel=1e-3)

    def test_rejects_non_finite_targets(self, rng):
        spec, K, X, E, y = make_problem(rng)
        y[3] = np.nan
        with pytest.raises(FgpFitError):
            fgp.fit(spec, X, y, E)

    def test_linear_mean_is_part_of_posterior_mean(self, rng):
        spec, K, X, E, y = make_problem(rng, n=30)
        model = fgp.fit(spec, X, y + 2.0 * X[:, 1], E, FitConfig(linear_mean=True))
        assert model.beta is not None
        Z = rng.standard_normal((5, 2))
        mean, _ = fgp.predict(model, Z)
        weights, _ = fgp.posterior_weights(model)
        np.testing.assert_allclose(mean, model.y_offset + fgp.features(model, Z) @ weights, atol=1e-10)


class TestPredict:
    def test_matches_dense_posterior(self, rng):
        spec, K, X, E, y = make_problem(rng, n=25)
        log_lambda = np.array([0.5, 0.0, -0.5])
        model = fgp.condition(spec, X, y, E, log_lambda, -2.0, K=K)
        Z = rng.standard_normal((6, 2))
        mean, var = fgp.predict(model, Z)

        lam = np.diag(np.exp(log_lambda))
        noise = np.exp(-2.0)
        pi = center_columns(K) @ E
        pz = fgp.features(model, Z)
        C = pi @ lam @ pi.T + noise * np.eye(25)
        cross = pz @ lam @ pi.T
        expected_mean = y.mean() + cross @ np.linalg.solve(C, y - y.mean())
        expected_var = np.diag(pz @ lam @ pz.T - cross @ np.linalg.solve(C, cross.T)) + noise
        np.testing.assert_allclose(mean, expected_mean, rtol=1e-8, atol=1e-10)
        np.testing.assert_allclose(var, expected_var, rtol=1e-8, atol=1e-10)

    def test_mean_lies_in_model_feature_span(self, rng):
        spec, K, X, E, y = make_problem(rng, n=30)
        model = fgp.fit(spec, X, y, E, FitConfig(max_iters=50))
        Z = rng.standard_normal((12, 2))
        mean, _ = fgp.predict(model, Z)
        pz = fgp.features(model, Z)
        rank = np.linalg.matrix_rank(pz)
        assert rank == E.shape[1]
        assert np.linalg.matrix_rank(np.column_stack([mean - model.y_offset, pz])) == rank

    def test_variance_is_at_least_noise(self, rng):
        spec, K, X, E, y = make_problem(rng)
        model = fgp.condition(spec, X, y, E, np.array([2.0, 0.0, -2.0]), -3.0, K=K)
        _, var = fgp.predict(model, np.vstack([X, 3.0 * rng.standard_normal((10, 2))]))
        assert np.all(var >= model.noise)

    def test_interpolates_training_targets_without_noise(self, rng):
        n = 5
        X = rng.standard_normal((n, 2)) * 2.0
        spec = KernelSpec(lengthscale=1.0)
        y = rng.standard_normal(n)
        model = fgp.condition(spec, X, y, np.eye(n), 0.0, -16.0)
        mean, _ = fgp.predict(model, X)
        np.testing.assert_allclose(mean, y, atol=1e-3)

    def test_vanishing_prior_scale_returns_offset_and_noise(self, rng):
        spec, K, X, E, y = make_problem(rng)
        model = fgp.condition(spec, X, y, E, -30.0, -1.0, K=K)
        mean, var = fgp.predict(model, rng.standard_normal((4, 2)))
        np.testing.assert_allclose(mean, y.mean(), atol=1e-6)
        np.testing.assert_allclose(var, np.exp(-1.0), rtol=1e-6)

    def test_unfitted_model_raises(self, rng):
        spec, K, X, E, _ = make_problem(rng)
        model = FgpModel(
            spec=spec,
            X_train=X,
            train_col_means=K.K.mean(axis=0),
            E=E,
            log_lambda=np.zeros(E.shape[1]),
            log_noise=0.0,
        )
        with pytest.raises(ModelNotFittedError):
            fgp.predict(model, X)

    def test_classify_thresholds_mean(self, rng):
        spec, K, X, E, _ = make_problem(rng, n=30)
        labels = (X[:, 0] > 0).astype(float)
        model = fgp.condition(spec, X, labels, E, 0.0, -2.0, K=K)
        mean, _ = fgp.predict(model, X)
        np.testing.assert_array_equal(fgp.classify(model, X), (mean >= 0.5).astype(int))


class TestSamplePrior:
    def test_is_deterministic_for_seed(self, rng):
        spec, K, X, E, y = make_problem(rng)
        model = fgp.condition(spec, X, y, E, 0.0, -1.0, K=K)
        Z = rng.standard_normal((4, 2))
        np.testing.assert_array_equal(fgp.sample_prior(model, Z, 3), fgp.sample_prior(model, Z, 3))

    def test_training_draws_lie_in_feature_span(self, rng):
        spec, K, X, E, y = make_problem(rng)
        model = fgp.condition(spec, X, y, E, 0.0, -1.0, K=K)
        draw = fgp.sample_prior(model, X, 11)
        pi = center_columns(K) @ E
        coef, *_ = np.linalg.lstsq(pi, draw, rcond=None)
        assert np.linalg.norm(pi @ coef - draw) <= 1e-10 * max(1.0, np.linalg.norm(draw))

    def test_empirical_covariance_matches_prior(self, rng):
        spec, K, X, E, y = make_problem(rng)
        log_lambda = np.array([0.4, -0.3, 0.1])
        model = fgp.condition(spec, X, y, E, log_lambda, -1.0, K=K)
        Z = rng.standard_normal((3, 2))
        draws = fgp.sample_prior(model, Z, 5, n_samples=10_000)
        pz = fgp.features(model, Z)
        expected = pz @ np.diag(np.exp(log_lambda)) @ pz.T
        empirical = draws @ draws.T / draws.shape[1]
        assert np.linalg.norm(empirical - expected) <= 0.05 * np.linalg.norm(expected)


def test_gram_of_training_inputs_is_reused(rng):
    spec, K, X, E, y = make_problem(rng)
    with_k = fgp.condition(spec, X, y, E, 0.0, -1.0, K=K)
    without_k = fgp.condition(spec, X, y, E, 0.0, -1.0)
    np.testing.assert_allclose(with_k.alpha, without_k.alpha, atol=1e-12)
    np.testing.assert_allclose(gram(spec, X).K, K.K)
