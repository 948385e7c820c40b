"""
공정 가우시안 프로세스 서비스

모델 부분공간 특징 Π(z) = (κ(z, X) − 1_nᵀK/n)E 위에서 공분산 Π(·)ΛΠ(·)ᵀ 를 갖는
GP 를 다룹니다. Λ 는 대각이며 로그로 매개변수화합니다. 모든 표본 경로는 span{φE} 에 있습니다.

C = Π_trainΛΠ_trainᵀ + σ²I 는 만들지 않고, Φ = Π_train Λ^{1/2} 에 대해
Bm = σ²I_d + ΦᵀΦ 의 촐레스키 인자와 우드버리 항등식으로 계산합니다.
"""

from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, lstsq, solve_triangular
from scipy.optimize import minimize

from ..domain.entities import FgpModel, FitConfig, KernelMatrix, KernelSpec
from ..domain.exceptions import DimensionMismatchError, FgpFitError, ModelNotFittedError
from ..domain.ports import LoggerPort, resolve_logger
from .kernel import center_columns, column_means, cross_gram, gram

_LOG_2PI = float(np.log(2.0 * np.pi))


class _Evidence:
    """고정 하이퍼파라미터에서의 주변우도와 캐시"""

    def __init__(
        self,
        pi: np.ndarray,
        r: np.ndarray,
        log_lambda: np.ndarray,
        log_noise: float,
        linear_mean: bool = False,
        beta: Optional[np.ndarray] = None,
    ):
        n, d = pi.shape
        self.pi = pi
        self.lam = np.exp(log_lambda)
        self.noise = float(np.exp(log_noise))
        self.sqrt_lam = np.sqrt(self.lam)
        self.phi = pi * self.sqrt_lam
        self.gram_phi = self.phi.T @ self.phi
        try:
            self.chol = cholesky(self.noise * np.eye(d) + self.gram_phi, lower=True)
        except LinAlgError as e:
            raise FgpFitError(f"공분산 행렬이 양정치가 아닙니다: {e}") from e

        if linear_mean and beta is None:
            beta = self._gls(r)
        self.beta = beta
        resid = r - pi @ beta if beta is not None else r
        self.alpha = self.apply_inverse(resid)

        logdet_b = 2.0 * float(np.sum(np.log(np.diag(self.chol))))
        self.logdet = (n - d) * log_noise + logdet_b
        self.lml = float(-0.5 * resid @ self.alpha - 0.5 * self.logdet - 0.5 * n * _LOG_2PI)

    def apply_inverse(self, v: np.ndarray) -> np.ndarray:
        """C⁻¹v = σ⁻²(v − Φ Bm⁻¹ Φᵀ v)"""
        inner = cho_solve((self.chol, True), self.phi.T @ v)
        return (v - self.phi @ inner) / self.noise

    def _gls(self, r: np.ndarray) -> np.ndarray:
        """Π 공간 선형 평균의 일반화 최소제곱 계수"""
        Cinv_pi = self.apply_inverse(self.pi)
        beta, *_ = lstsq(self.pi.T @ Cinv_pi, Cinv_pi.T @ r)
        return beta

    def gradient(self) -> Tuple[np.ndarray, float]:
        """(∂LML/∂log λ, ∂LML/∂log σ²)"""
        n, d = self.pi.shape
        proj_alpha = self.pi.T @ self.alpha
        P = self.pi.T @ self.pi
        T = P * self.sqrt_lam
        Binv_Tt = cho_solve((self.chol, True), T.T)
        diag_pcp = (np.diag(P) - np.sum(T * Binv_Tt.T, axis=1)) / self.noise
        grad_lambda = 0.5 * self.lam * (proj_alpha**2 - diag_pcp)

        trace_binv_g = float(np.trace(cho_solve((self.chol, True), self.gram_phi)))
        trace_cinv = (n - trace_binv_g) / self.noise
        grad_noise = 0.5 * self.noise * (float(self.alpha @ self.alpha) - trace_cinv)
        return grad_lambda, float(grad_noise)


def _as_2d(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[:, None] if X.ndim == 1 else X


def _train_features(model: FgpModel) -> np.ndarray:
    if model.pi_train is not None:
        return model.pi_train
    return features(model, model.X_train)


def features(model: FgpModel, Z: np.ndarray) -> np.ndarray:
    """Π(Z) = (κ(Z, X) − 1·1_nᵀK/n)E"""
    Z = _as_2d(Z)
    if Z.shape[1] != model.X_train.shape[1]:
        raise DimensionMismatchError(
            f"특징 차원이 일치하지 않습니다: {Z.shape[1]} != {model.X_train.shape[1]}",
            expected=model.X_train.shape[1],
            actual=Z.shape[1],
        )
    return (cross_gram(model.spec, Z, model.X_train) - model.train_col_means) @ model.E


def condition(
    spec: KernelSpec,
    X: np.ndarray,
    y: np.ndarray,
    E: np.ndarray,
    log_lambda: np.ndarray,
    log_noise: float,
    center_targets: bool = True,
    linear_mean: bool = False,
    K: Optional[KernelMatrix] = None,
    lml_trace: Optional[List[float]] = None,
) -> FgpModel:
    """주어진 하이퍼파라미터에서 사후 분포 캐시를 갖춘 모델을 만듭니다."""
    X = _as_2d(X)
    y = np.asarray(y, dtype=float).ravel()
    E = _as_2d(E)
    n = X.shape[0]
    if y.shape[0] != n or E.shape[0] != n:
        raise DimensionMismatchError(f"X, y, E 의 행 수가 일치하지 않습니다: {n}, {y.shape[0]}, {E.shape[0]}")
    log_lambda = np.broadcast_to(np.asarray(log_lambda, dtype=float), (E.shape[1],)).copy()

    K = K if K is not None else gram(spec, X)
    pi = center_columns(K) @ E
    offset = float(y.mean()) if center_targets else 0.0
    ev = _Evidence(pi, y - offset, log_lambda, float(log_noise), linear_mean=linear_mean)
    return FgpModel(
        spec=spec,
        X_train=X,
        train_col_means=column_means(K),
        E=E,
        log_lambda=log_lambda,
        log_noise=float(log_noise),
        y_offset=offset,
        beta=ev.beta,
        pi_train=pi,
        posterior_factor=ev.chol,
        alpha=ev.alpha,
        lml_trace=list(lml_trace or []),
    )


def _evidence_for(model: FgpModel, y: np.ndarray) -> _Evidence:
    y = np.asarray(y, dtype=float).ravel()
    pi = _train_features(model)
    if y.shape[0] != pi.shape[0]:
        raise DimensionMismatchError(f"목표 길이가 학습 샘플 수와 다릅니다: {y.shape[0]} != {pi.shape[0]}")
    return _Evidence(pi, y - model.y_offset, model.log_lambda, model.log_noise, beta=model.beta)


def log_marginal_likelihood(model: FgpModel, y: np.ndarray) -> float:
    """−½rᵀC⁻¹r − ½log det C − (n/2)log 2π (r 는 평균을 뺀 목표)"""
    return _evidence_for(model, y).lml


def lml_gradient(model: FgpModel, y: np.ndarray) -> Tuple[np.ndarray, float]:
    """log λ 와 log σ² 에 대한 주변우도의 해석적 기울기"""
    return _evidence_for(model, y).gradient()


def fit(
    spec: KernelSpec,
    X: np.ndarray,
    y: np.ndarray,
    E: np.ndarray,
    config: Optional[FitConfig] = None,
    logger: Optional[LoggerPort] = None,
) -> FgpModel:
    """상자 제약 L-BFGS-B 로 주변우도를 최대화해 (log λ, log σ²) 를 학습합니다.

    Args:
        spec: 커널 명세
        X: n×p 학습 입력
        y: 학습 목표
        E: 모델 부분공간 계수 행렬
        config: 학습 설정
        logger: 로거

    Returns:
        최적 반복점에서 조건화된 모델 (lml_trace 에 채택된 반복의 LML 기록)

    Raises:
        FgpFitError: 목표값이나 초기점의 주변우도가 유한하지 않은 경우
    """
    log = resolve_logger(logger)
    config = config or FitConfig()
    X = _as_2d(X)
    y = np.asarray(y, dtype=float).ravel()
    E = _as_2d(E)
    n, d = E.shape
    if n < 2:
        raise ValueError("학습에는 최소 2개의 샘플이 필요합니다")
    if not np.all(np.isfinite(y)):
        raise FgpFitError("목표값에 비유한 값이 있어 초기 주변우도를 계산할 수 없습니다")

    K = gram(spec, X)
    pi = center_columns(K) @ E
    offset = float(y.mean()) if config.center_targets else 0.0
    r = y - offset
    scale = float(np.var(y)) or 1.0

    bound = config.log_bound
    noise_floor = max(float(np.log(config.noise_floor_ratio * scale)), -bound)
    bounds = [(-bound, bound)] * d + [(noise_floor, bound)]
    init_noise = config.init_log_noise if config.init_log_noise is not None else float(np.log(0.1 * scale))
    theta0 = np.append(np.full(d, config.init_log_lambda), init_noise)
    theta0 = np.clip(theta0, [b[0] for b in bounds], [b[1] for b in bounds])

    cache: dict[bytes, float] = {}

    def objective(theta: np.ndarray) -> Tuple[float, np.ndarray]:
        try:
            ev = _Evidence(pi, r, theta[:d], float(theta[d]), linear_mean=config.linear_mean)
        except FgpFitError:
            return np.inf, np.zeros_like(theta)
        if not np.isfinite(ev.lml):
            return np.inf, np.zeros_like(theta)
        cache[theta.tobytes()] = ev.lml
        g_lambda, g_noise = ev.gradient()
        return -ev.lml, -np.append(g_lambda, g_noise)

    init_value, _ = objective(theta0)
    if not np.isfinite(init_value):
        raise FgpFitError("초기 하이퍼파라미터에서 주변우도가 유한하지 않습니다")
    trace = [-init_value]
    best_theta, best_lml = theta0.copy(), -init_value

    def record(xk: np.ndarray) -> None:
        nonlocal best_theta, best_lml
        value = cache.get(xk.tobytes())
        if value is None:
            value = -objective(xk)[0]
        if value < trace[-1]:
            log.warning("주변우도가 감소한 반복을 무시합니다", lml=value, previous=trace[-1])
            return
        trace.append(value)
        if value >= best_lml:
            best_theta, best_lml = xk.copy(), value
        log.debug("FGP 반복", iteration=len(trace) - 1, lml=value)

    log.info("FGP 학습 시작", n=n, d=d, init_lml=trace[0])
    result = minimize(
        objective,
        theta0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        callback=record,
        options={
            "maxiter": config.max_iters,
            "maxls": config.max_line_search,
            "ftol": config.convergence_tol,
            "gtol": config.grad_tol,
        },
    )
    final_value = cache.get(result.x.tobytes())
    if final_value is not None and final_value > best_lml:
        best_theta, best_lml = result.x.copy(), final_value
        if final_value >= trace[-1]:
            trace.append(final_value)

    log.info(
        "FGP 학습 완료",
        iterations=int(result.nit),
        lml=best_lml,
        noise=float(np.exp(best_theta[d])),
        status=str(result.message),
    )
    return condition(
        spec,
        X,
        y,
        E,
        best_theta[:d],
        float(best_theta[d]),
        center_targets=config.center_targets,
        linear_mean=config.linear_mean,
        K=K,
        lml_trace=trace,
    )


def _require_fitted(model: FgpModel) -> None:
    if not model.is_fitted():
        raise ModelNotFittedError("학습되지 않은 모델입니다. fit 또는 condition 으로 먼저 조건화하세요")


def posterior_weights(model: FgpModel) -> Tuple[np.ndarray, np.ndarray]:
    """사후 가중치 평균 (β 포함)과 공분산 σ²·S Bm⁻¹ S (S = Λ^{1/2})"""
    _require_fitted(model)
    pi = _train_features(model)
    lam = model.lam
    mean_w = lam * (pi.T @ model.alpha)
    if model.beta is not None:
        mean_w = mean_w + model.beta
    sqrt_lam = np.sqrt(lam)
    cov_w = model.noise * (sqrt_lam[:, None] * cho_solve((model.posterior_factor, True), np.diag(sqrt_lam)))
    return mean_w, cov_w


def predict(
    model: FgpModel, Z: np.ndarray, logger: Optional[LoggerPort] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """사후 예측 평균과 (관측 잡음 포함) 분산

    Raises:
        ModelNotFittedError: 모델이 조건화되지 않은 경우
    """
    _require_fitted(model)
    log = resolve_logger(logger)
    pz = features(model, Z)
    mean_w, _ = posterior_weights(model)
    mean = model.y_offset + pz @ mean_w

    V = solve_triangular(model.posterior_factor, (pz * np.sqrt(model.lam)).T, lower=True)
    # 제곱합이므로 잠재 분산은 음수가 될 수 없음
    var = model.noise * np.sum(V * V, axis=0) + model.noise
    log.debug("예측 완료", points=int(pz.shape[0]))
    return mean, var


def classify(model: FgpModel, Z: np.ndarray) -> np.ndarray:
    """사후 평균을 0.5 에서 잘라 {0,1} 레이블로 변환"""
    mean, _ = predict(model, Z)
    return (mean >= 0.5).astype(int)


def sample_prior(
    model: FgpModel, Z: np.ndarray, seed: int, n_samples: Optional[int] = None
) -> np.ndarray:
    """w ~ N(0, Λ) 를 뽑아 Π(Z)w 를 반환합니다.

    n_samples 가 없으면 길이 t 벡터, 있으면 t×n_samples 행렬을 반환합니다.
    """
    rng = np.random.default_rng(seed)
    count = 1 if n_samples is None else n_samples
    w = rng.standard_normal((model.d, count)) * np.sqrt(model.lam)[:, None]
    draws = features(model, Z) @ w
    return draws[:, 0] if n_samples is None else draws
