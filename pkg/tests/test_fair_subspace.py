"""공정 부분공간 서비스 테스트"""

import numpy as np
import pytest
from scipy.linalg import orth

from core.domain.entities import AttributeKind, FairnessCriterion, KernelMatrix
from core.domain.exceptions import DimensionMismatchError, EmptyClassError
from core.services.fair_subspace import (
    fair_nullspace,
    orthogonality_residual,
    prop1_rate,
    protected_sdr_union,
    verify_prop1_synthetic,
)
from core.services.kernel import center_columns
from core.services.sdr import sdr_subspace
from tests.helpers import rbf_gram


@pytest.fixture
def sample(rng):
    X = rng.standard_normal((30, 3))
    _, K = rbf_gram(X)
    S = np.column_stack([rng.integers(0, 3, 30), rng.standard_normal(30)]).astype(float)
    y = np.r_[np.ones(15), np.zeros(15)]
    return K, S, y


class TestProtectedSdrUnion:
    def test_single_attribute_equals_sdr(self, sample):
        K, S, _ = sample
        W = protected_sdr_union(K, None, S[:, 0], FairnessCriterion.STATISTICAL_PARITY, 3)
        expected = sdr_subspace(K, S[:, 0], 3, 3).W
        np.testing.assert_allclose(W, expected, atol=1e-12)

    def test_blocks_follow_attribute_order(self, sample):
        K, S, _ = sample
        kinds = [AttributeKind.CATEGORICAL, AttributeKind.CONTINUOUS]
        W = protected_sdr_union(K, None, S, FairnessCriterion.STATISTICAL_PARITY, 2, H=3, kinds=kinds)
        assert W.shape == (30, 4)
        s2 = (S[:, 1] - S[:, 1].mean()) / S[:, 1].std()
        np.testing.assert_allclose(W[:, :2], sdr_subspace(K, S[:, 0], 2, 3).W, atol=1e-12)
        np.testing.assert_allclose(W[:, 2:], sdr_subspace(K, s2, 2, 3).W, atol=1e-12)

    def test_equalized_odds_zero_pads_class_blocks(self):
        X = np.array([[0.0, 0.0], [1.0, 0.5], [-0.5, 1.0], [0.3, -1.2]])
        _, K = rbf_gram(X)
        y = np.array([1, 1, 0, 0])
        S = np.array([0.0, 1.0, 0.0, 1.0])
        W = protected_sdr_union(K, y, S, FairnessCriterion.EQUALIZED_ODDS, 1)
        assert W.shape == (4, 2)
        np.testing.assert_array_equal(W[2:, 0], 0.0)
        np.testing.assert_array_equal(W[:2, 1], 0.0)
        assert np.any(W[:2, 0]) and np.any(W[2:, 1])

    def test_equalized_odds_has_twice_the_columns_of_opportunity(self, sample):
        K, S, y = sample
        eop = protected_sdr_union(K, y, S, FairnessCriterion.EQUALITY_OF_OPPORTUNITY, 2)
        eo = protected_sdr_union(K, y, S, FairnessCriterion.EQUALIZED_ODDS, 2)
        assert eo.shape[1] == 2 * eop.shape[1]
        np.testing.assert_array_equal(eop[y == 0], 0.0)

    def test_opportunity_requires_labels(self, sample):
        K, S, _ = sample
        with pytest.raises(ValueError):
            protected_sdr_union(K, None, S, FairnessCriterion.EQUALITY_OF_OPPORTUNITY, 2)

    def test_equalized_odds_rejects_missing_class(self, sample):
        K, S, _ = sample
        with pytest.raises(EmptyClassError):
            protected_sdr_union(K, np.ones(30), S, FairnessCriterion.EQUALIZED_ODDS, 2)

    def test_parallel_workers_give_identical_result(self, sample):
        K, S, y = sample
        serial = protected_sdr_union(K, y, S, FairnessCriterion.EQUALIZED_ODDS, 2)
        parallel = protected_sdr_union(K, y, S, FairnessCriterion.EQUALIZED_ODDS, 2, max_workers=4)
        np.testing.assert_allclose(serial, parallel, atol=1e-12)


class TestFairNullspace:
    def test_empty_constraint_keeps_whole_space(self, sample):
        K, _, _ = sample
        fair = fair_nullspace(K, np.zeros((30, 0)))
        assert fair.r == 30
        np.testing.assert_array_equal(fair.Q, np.eye(30))

    def test_identity_kernel_single_direction(self):
        K = KernelMatrix(K=np.eye(3))
        fair = fair_nullspace(K, np.array([[1.0], [0.0], [0.0]]))
        assert fair.r == 2
        constraint = np.array([2.0, -1.0, -1.0]) / 3.0
        np.testing.assert_allclose(fair.Q.T @ constraint, 0.0, atol=1e-14)
        assert fair.residual <= 1e-12

    def test_complement_is_orthogonal_and_complete(self, sample, rng):
        K, _, _ = sample
        W = rng.standard_normal((30, 6))
        fair = fair_nullspace(K, W)
        Kc = center_columns(K)
        KtW = Kc.T @ (Kc @ W)
        assert np.max(np.abs(fair.Q.T @ KtW)) <= 1e-10 * np.linalg.norm(KtW, 2)

        complement = orth(KtW)
        assert fair.r + complement.shape[1] == 30
        full = np.hstack([fair.Q, complement])
        np.testing.assert_allclose(full.T @ full, np.eye(30), atol=1e-10)

    def test_residual_is_scale_free(self, sample, rng):
        K, _, _ = sample
        fair = fair_nullspace(K, rng.standard_normal((30, 4)))
        assert fair.residual <= 1e-8
        assert orthogonality_residual(K, fair.W, 1e3 * fair.Q) == pytest.approx(fair.residual, rel=1e-6, abs=1e-15)

    def test_rejects_row_mismatch(self, sample):
        K, _, _ = sample
        with pytest.raises(DimensionMismatchError):
            fair_nullspace(K, np.ones((29, 1)))

    def test_union_of_protected_directions(self, sample):
        K, S, _ = sample
        W = protected_sdr_union(K, None, S, FairnessCriterion.STATISTICAL_PARITY, 2)
        fair = fair_nullspace(K, W)
        assert 30 - W.shape[1] <= fair.r < 30
        assert fair.residual <= 1e-8


class TestCovarianceOnEllipticalData:
    def test_sample_covariance_within_bound(self):
        report = verify_prop1_synthetic(10_000, 5, seed=0)
        assert report.within_bound

    def test_no_protected_direction_keeps_all_coordinates(self):
        report = verify_prop1_synthetic(1_000, 4, seed=1, B=np.zeros(4))
        assert report.within_bound
        assert report.bound > 0.0

    def test_rate_is_close_to_inverse_square_root(self):
        rate = prop1_rate([1000, 4000, 16000], 5, seed=0)
        assert -0.7 <= rate.slope <= -0.3
        assert rate.cov_norms[0] > rate.cov_norms[-1]

    @pytest.mark.parametrize("n,p", [(50, 5), (1000, 2)])
    def test_rejects_small_inputs(self, n, p):
        with pytest.raises(ValueError):
            verify_prop1_synthetic(n, p, seed=0)
