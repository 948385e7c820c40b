"""
수치 검증 유즈케이스

공정 부분공간 구성과 모델 부분공간 구성, 주변우도 기울기를 고정 시드에서 점검하고
항목별 잔차와 허용치를 ValidationReport 로 돌려줍니다. 같은 시드는 같은 보고서를 만듭니다.
"""

from typing import Callable, List, Optional

import numpy as np

from ..domain.entities import (
    FairnessCriterion,
    KernelFamily,
    KernelSpec,
    ValidationCheck,
    ValidationReport,
)
from ..domain.ports import LoggerPort, resolve_logger
from ..services import fgp
from ..services.fair_subspace import fair_nullspace, prop1_rate, protected_sdr_union, verify_prop1_synthetic
from ..services.kernel import gram, median_lengthscale
from ..services.model_subspace import (
    empirical_projection_gap,
    model_basis,
    orthonormality_error,
    orthonormalize,
    principal_cosines,
    projection_gaps,
)
from ..services.preprocessing import fit_standardization
from ..services.sdr import sdr_subspace
from ..services.synthetic import planted_dataset, random_subspace_instance

ORTHONORMALITY_TOL = 1e-8
CONSTRUCTION_TOL = 1e-8
GAP_TOL = 1e-6
ORTHOGONALITY_TOL = 1e-8
GRADIENT_TOL = 1e-4
RATE_RANGE = (-0.7, -0.3)

RATE_N_VALUES = (1000, 4000, 16000)
EPS_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)
N_INSTANCES = 20
N_GRADIENT_CONFIGS = 20
FD_STEP = 1e-5


def finite_difference_error(rng: np.random.Generator) -> float:
    """무작위 소규모 설정에서 해석적 기울기와 중앙 차분의 최대 상대 오차"""
    n = int(rng.integers(12, 25))
    X = rng.standard_normal((n, 2))
    spec = KernelSpec(family=KernelFamily.RBF, lengthscale=float(rng.uniform(0.5, 2.0)))
    K = gram(spec, X)
    d = int(rng.integers(1, 4))
    E = orthonormalize(K, rng.standard_normal((n, d))).coeffs
    d = E.shape[1]
    y = rng.standard_normal(n)
    log_lambda = rng.normal(0.0, 1.0, size=d)
    log_noise = float(rng.uniform(-2.0, 0.0))

    def lml(ll: np.ndarray, ln: float) -> float:
        model = fgp.condition(spec, X, y, E, ll, ln, center_targets=False, K=K)
        return fgp.log_marginal_likelihood(model, y)

    model = fgp.condition(spec, X, y, E, log_lambda, log_noise, center_targets=False, K=K)
    g_lambda, g_noise = fgp.lml_gradient(model, y)
    analytic = np.append(g_lambda, g_noise)

    numeric = np.empty(d + 1)
    for j in range(d):
        step = np.zeros(d)
        step[j] = FD_STEP
        numeric[j] = (lml(log_lambda + step, log_noise) - lml(log_lambda - step, log_noise)) / (2 * FD_STEP)
    numeric[d] = (lml(log_lambda, log_noise + FD_STEP) - lml(log_lambda, log_noise - FD_STEP)) / (2 * FD_STEP)

    return float(np.max(np.abs(analytic - numeric) / np.maximum(np.abs(analytic), 1e-2)))


class ValidationUseCase:
    """수치 검증 스위트"""

    def __init__(self, logger: Optional[LoggerPort] = None):
        self.logger = resolve_logger(logger)

    def _check(self, name: str, measured: float, tolerance: float, detail: str = "", passed: Optional[bool] = None) -> ValidationCheck:
        ok = bool(measured <= tolerance) if passed is None else passed
        log = self.logger.info if ok else self.logger.error
        log(f"검증 {'통과' if ok else '실패'}: {name}", measured=measured, tolerance=tolerance)
        return ValidationCheck(name=name, passed=ok, measured=float(measured), tolerance=float(tolerance), detail=detail)

    def covariance_checks(self, seed: int) -> List[ValidationCheck]:
        """타원 분포 데이터에서 공정 방향과 S 의 공분산 크기와 수렴률"""
        report = verify_prop1_synthetic(10_000, 5, seed)
        rate = prop1_rate(list(RATE_N_VALUES), 5, seed)
        low, high = RATE_RANGE
        return [
            self._check("fair_direction_covariance", report.sample_cov_norm, report.bound, detail="n=10000, p=5"),
            self._check(
                "fair_direction_covariance_rate",
                rate.slope,
                high,
                detail=f"기울기 허용 범위 [{low}, {high}]",
                passed=low <= rate.slope <= high,
            ),
        ]

    def construction_checks(self, seed: int) -> List[ValidationCheck]:
        """무작위 인스턴스에서 모델 부분공간 구성의 항등식"""
        rng = np.random.default_rng(seed)
        worst_orth = worst_gamma = worst_gap = 0.0
        for _ in range(N_INSTANCES):
            K, Ffair, Gpred = random_subspace_instance(rng)
            for eps in EPS_VALUES:
                basis = model_basis(K, Ffair, Gpred, eps)
                worst_orth = max(worst_orth, orthonormality_error(K, basis.E))
                cosines = principal_cosines(K, Ffair.coeffs, basis.E)
                worst_gamma = max(worst_gamma, float(np.max(np.abs(cosines - np.sort(basis.gamma)[::-1]))))
                gaps = projection_gaps(basis.sigma_min, eps)
                fair_gap = empirical_projection_gap(K, basis.E, Ffair.coeffs)
                pred_gap = empirical_projection_gap(K, basis.E, Gpred.coeffs)
                worst_gap = max(worst_gap, abs(fair_gap - gaps.fair_gap), abs(pred_gap - gaps.pred_gap))
        detail = f"{N_INSTANCES}개 인스턴스 × ε {list(EPS_VALUES)}"
        return [
            self._check("model_basis_orthonormality", worst_orth, ORTHONORMALITY_TOL, detail),
            self._check("model_basis_principal_cosines", worst_gamma, CONSTRUCTION_TOL, detail),
            self._check("model_basis_projection_gaps", worst_gap, GAP_TOL, detail),
        ]

    def pipeline_checks(self, seed: int, corrupt_basis: bool = False) -> List[ValidationCheck]:
        """심어진 합성 데이터 (n=300) 에서 공정 직교성과 모델 기저 정규직교성"""
        ds = planted_dataset(300, seed)
        X = fit_standardization(ds.X).apply(ds.X)
        spec = KernelSpec(family=KernelFamily.RBF, lengthscale=median_lengthscale(X, seed=seed))
        K = gram(spec, X)
        W = protected_sdr_union(K, None, ds.S, FairnessCriterion.STATISTICAL_PARITY, 5, kinds=ds.protected_kinds)
        fair = fair_nullspace(K, W)
        Ffair = orthonormalize(K, fair.Q)
        target = sdr_subspace(K, ds.y, 3, 10)
        Gpred = orthonormalize(K, target.W)
        E = model_basis(K, Ffair, Gpred, 0.5).E
        if corrupt_basis:
            E = E.copy()
            E[:, 0] *= 1.5
        return [
            self._check("fair_subspace_orthogonality", fair.residual, ORTHOGONALITY_TOL, f"r={fair.r}"),
            self._check("pipeline_basis_orthonormality", orthonormality_error(K, E), ORTHONORMALITY_TOL, "ε=0.5"),
        ]

    def gradient_checks(self, seed: int) -> List[ValidationCheck]:
        rng = np.random.default_rng(seed)
        worst = max(finite_difference_error(rng) for _ in range(N_GRADIENT_CONFIGS))
        return [self._check("lml_gradient", worst, GRADIENT_TOL, f"{N_GRADIENT_CONFIGS}개 설정, 중앙 차분")]

    def run(self, seed: int, corrupt_basis: bool = False) -> ValidationReport:
        """전체 검증을 실행합니다.

        Args:
            seed: 난수 시드
            corrupt_basis: 모델 기저 한 열을 일부러 망가뜨려 실패 경로를 확인합니다

        Returns:
            항목별 결과 보고서
        """
        self.logger.info("검증 시작", seed=seed)
        suites: List[Callable[[], List[ValidationCheck]]] = [
            lambda: self.covariance_checks(seed),
            lambda: self.construction_checks(seed),
            lambda: self.pipeline_checks(seed, corrupt_basis=corrupt_basis),
            lambda: self.gradient_checks(seed),
        ]
        checks = [check for suite in suites for check in suite()]
        report = ValidationReport(seed=seed, checks=checks)
        self.logger.info("검증 완료", passed=report.passed, failures=len(report.failures()))
        return report
