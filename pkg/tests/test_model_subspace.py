"""모델 부분공간 서비스 테스트"""

import numpy as np
import pytest

from core.domain.entities import FairnessCriterion, KernelMatrix
from core.domain.exceptions import DegenerateBasisError
from core.services.fair_subspace import fair_nullspace, orthogonality_residual, protected_sdr_union
from core.services.model_subspace import (
    empirical_projection_gap,
    model_basis,
    orthonormality_error,
    orthonormalize,
    principal_cosines,
    projection_distance,
    projection_gaps,
)
from core.services.preprocessing import fit_standardization
from core.services.sdr import sdr_subspace
from core.services.synthetic import planted_dataset, random_subspace_instance
from tests.helpers import rbf_gram, rkhs_gram

EPS_GRID = [0.0, 0.25, 0.5, 0.75, 1.0]


@pytest.fixture
def instance(rng):
    return random_subspace_instance(rng, n_range=(40, 40))


class TestOrthonormalize:
    def test_two_by_two_example(self):
        K = KernelMatrix(K=np.eye(2))
        basis = orthonormalize(K, np.array([[2.0, 0.0], [0.0, 0.0]]))
        assert basis.dim == 1
        np.testing.assert_allclose(basis.eigvals, [4.0])
        np.testing.assert_allclose(np.abs(basis.coeffs), [[1.0], [0.0]])

    def test_random_basis_is_rkhs_orthonormal(self, rng):
        _, K = rbf_gram(rng.standard_normal((30, 3)))
        basis = orthonormalize(K, rng.standard_normal((30, 4)))
        assert basis.dim == 4
        np.testing.assert_allclose(rkhs_gram(K, basis.coeffs), np.eye(4), atol=1e-10)

    def test_preserves_span_of_orthonormal_input(self, instance):
        K, Ffair, _ = instance
        again = orthonormalize(K, Ffair.coeffs)
        assert again.dim == Ffair.dim
        assert np.all(principal_cosines(K, again.coeffs, Ffair.coeffs) >= 1 - 1e-8)

    def test_zero_basis_is_degenerate(self):
        with pytest.raises(DegenerateBasisError):
            orthonormalize(KernelMatrix(K=np.eye(3)), np.zeros((3, 2)))


class TestProjectionGaps:
    @pytest.mark.parametrize(
        "sigma_min,eps,fair_gap,pred_gap",
        [(0.6, 1.0, 0.0, 0.8), (0.6, 0.0, 0.8, 0.0), (0.0, 0.5, np.sqrt(0.75), 0.5)],
    )
    def test_closed_form_examples(self, sigma_min, eps, fair_gap, pred_gap):
        gaps = projection_gaps(sigma_min, eps)
        assert gaps.fair_gap == pytest.approx(fair_gap, abs=1e-12)
        assert gaps.pred_gap == pytest.approx(pred_gap, abs=1e-12)

    def test_fair_gap_shrinks_and_pred_gap_grows_with_eps(self):
        grid = np.linspace(0.0, 1.0, 21)
        gaps = [projection_gaps(0.3, e) for e in grid]
        assert all(a.fair_gap >= b.fair_gap for a, b in zip(gaps, gaps[1:]))
        assert all(a.pred_gap <= b.pred_gap for a, b in zip(gaps, gaps[1:]))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            projection_gaps(0.5, 1.5)


class TestModelBasis:
    @pytest.mark.parametrize("eps", EPS_GRID)
    def test_basis_is_orthonormal_with_prescribed_cosines(self, instance, eps):
        K, Ffair, Gpred = instance
        basis = model_basis(K, Ffair, Gpred, eps)
        assert orthonormality_error(K, basis.E) <= 1e-8
        cosines = principal_cosines(K, Ffair.coeffs, basis.E)
        np.testing.assert_allclose(cosines, np.sort(basis.gamma)[::-1], atol=1e-8)

    def test_gamma_is_eps_clipped_sigma(self, instance):
        K, Ffair, Gpred = instance
        basis = model_basis(K, Ffair, Gpred, 0.5)
        np.testing.assert_allclose(basis.gamma, np.maximum(basis.sigma, 0.5))
        np.testing.assert_allclose(basis.sigma, principal_cosines(K, Ffair.coeffs, Gpred.coeffs), atol=1e-12)

    def test_zero_eps_recovers_predictive_subspace(self, instance):
        K, Ffair, Gpred = instance
        basis = model_basis(K, Ffair, Gpred, 0.0)
        assert empirical_projection_gap(K, basis.E, Gpred.coeffs, symmetric=True) <= 1e-7

    def test_unit_eps_lies_in_fair_subspace(self, instance):
        K, Ffair, Gpred = instance
        basis = model_basis(K, Ffair, Gpred, 1.0)
        for i in range(basis.E.shape[1]):
            assert projection_distance(K, Ffair.coeffs, basis.E[:, i]) <= 1e-7

    @pytest.mark.parametrize("eps", EPS_GRID)
    def test_empirical_gaps_match_closed_form(self, instance, eps):
        K, Ffair, Gpred = instance
        basis = model_basis(K, Ffair, Gpred, eps)
        gaps = projection_gaps(basis.sigma_min, eps)
        assert empirical_projection_gap(K, basis.E, Ffair.coeffs) == pytest.approx(gaps.fair_gap, abs=1e-6)
        assert empirical_projection_gap(K, basis.E, Gpred.coeffs) == pytest.approx(gaps.pred_gap, abs=1e-6)

    def test_identity_on_many_random_instances(self, rng):
        for _ in range(20):
            K, Ffair, Gpred = random_subspace_instance(rng)
            for eps in EPS_GRID:
                basis = model_basis(K, Ffair, Gpred, eps)
                assert orthonormality_error(K, basis.E) <= 1e-8

    def test_fair_directions_stay_within_gap_of_model(self, instance):
        K, Ffair, Gpred = instance
        eps = 0.7
        basis = model_basis(K, Ffair, Gpred, eps)
        bound = projection_gaps(basis.sigma_min, eps).fair_gap
        for i in range(basis.E.shape[1]):
            assert projection_distance(K, Ffair.coeffs, basis.E[:, i]) <= bound + 1e-8

    def test_rejects_eps_outside_unit_interval(self, instance):
        K, Ffair, Gpred = instance
        with pytest.raises(ValueError):
            model_basis(K, Ffair, Gpred, -0.1)

    def test_rejects_predictive_dimension_above_fair_dimension(self, instance):
        K, Ffair, Gpred = instance
        with pytest.raises(ValueError):
            model_basis(K, Gpred, Ffair, 0.5)


class TestEmpiricalProjectionGap:
    def test_identical_bases(self, instance):
        K, Ffair, _ = instance
        assert empirical_projection_gap(K, Ffair.coeffs, Ffair.coeffs) <= 1e-7

    def test_orthogonal_lines(self):
        K = KernelMatrix(K=np.eye(2))
        gap = empirical_projection_gap(K, np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]]))
        assert gap == pytest.approx(1.0)

    def test_symmetric_gap_between_different_dimensions_is_one(self, instance):
        K, Ffair, Gpred = instance
        assert empirical_projection_gap(K, Ffair.coeffs, Gpred.coeffs, symmetric=True) == 1.0

    def test_rejects_non_orthonormal_input(self):
        K = KernelMatrix(K=np.eye(2))
        with pytest.raises(ValueError):
            empirical_projection_gap(K, np.array([[2.0], [0.0]]), np.array([[1.0], [0.0]]))


def test_unit_eps_model_is_uncorrelated_with_protected_directions():
    ds = planted_dataset(150, seed=3)
    X = fit_standardization(ds.X).apply(ds.X)
    _, K = rbf_gram(X)
    W = protected_sdr_union(K, None, ds.S, FairnessCriterion.STATISTICAL_PARITY, 4, kinds=ds.protected_kinds)
    Ffair = orthonormalize(K, fair_nullspace(K, W).Q)
    Gpred = orthonormalize(K, sdr_subspace(K, ds.y, 2, 10).W)
    basis = model_basis(K, Ffair, Gpred, 1.0)
    assert orthogonality_residual(K, W, basis.E) <= 1e-8
