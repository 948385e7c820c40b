"""
모델 부분공간 서비스

공정 부분공간 F 와 예측 부분공간 G 를 RKHS 내적 ⟨φa, φb⟩ = aᵀKb 기준으로 정규직교화하고,
절충 계수 ε 로 F 와의 최대 주각을 제한하는 모델 부분공간 M 을 구성합니다.
"""

from typing import Optional

import numpy as np
from scipy.linalg import eigh, svd

from ..domain.entities import KernelMatrix, ModelBasis, OrthonormalBasis, ProjectionGaps
from ..domain.exceptions import DegenerateBasisError, DimensionMismatchError
from ..domain.ports import LoggerPort, resolve_logger

DEFAULT_RTOL = 1e-6

# 이 값 이상인 σ_i 는 σ_i = 1 로 보고 ρ_i = 0
_SIGMA_ONE = 1.0 - 1e-10


def orthonormalize(
    K: KernelMatrix,
    B: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    logger: Optional[LoggerPort] = None,
) -> OrthonormalBasis:
    """BᵀKB 고유분해로 span{φB} 의 RKHS 정규직교 기저를 만듭니다.

    가장 큰 고유값의 rtol 배 이하인 방향은 버립니다.

    Raises:
        DegenerateBasisError: 남는 방향이 없는 경우
    """
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.shape[0] != K.n:
        raise DimensionMismatchError(f"기저 행 수가 n 과 다릅니다: {B.shape[0]} != {K.n}", expected=K.n, actual=B.shape[0])
    if not np.any(B):
        raise DegenerateBasisError("영 행렬은 정규직교화할 수 없습니다")

    G = B.T @ K.K @ B
    vals, vecs = eigh(0.5 * (G + G.T))
    vals, vecs = vals[::-1], vecs[:, ::-1]
    top = float(vals[0])
    keep = vals > rtol * top if top > 0 else np.zeros_like(vals, dtype=bool)
    if not np.any(keep):
        raise DegenerateBasisError(f"모든 고유값이 차단값 이하입니다 (최대 고유값 {top:.3e})")

    kept = vals[keep]
    C = B @ (vecs[:, keep] / np.sqrt(kept))
    resolve_logger(logger).debug(
        "RKHS 정규직교화 완료", input_dim=B.shape[1], output_dim=int(kept.size), condition=top / float(kept[-1])
    )
    return OrthonormalBasis(coeffs=C, eigvals=kept)


def principal_cosines(K: KernelMatrix, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """RKHS 정규직교 기저 A, B 사이 주각의 코사인 (내림차순, [0,1] 로 제한)"""
    return np.clip(svd(A.T @ K.K @ B, compute_uv=False), 0.0, 1.0)


def model_basis(
    K: KernelMatrix,
    Ffair: OrthonormalBasis,
    Gpred: OrthonormalBasis,
    eps: float,
    logger: Optional[LoggerPort] = None,
) -> ModelBasis:
    """ε 로 조절되는 모델 부분공간 기저 E 를 구성합니다.

    FᵀKG = UΣVᵀ 에 대해 γ_i = max(σ_i, ε), ρ_i = √((1−γ_i²)/(1−σ_i²)) 로 두고
    E_i = (γ_i − ρ_iσ_i)·F U_i + ρ_i·G V_i 를 반환합니다. ε = 0 이면 M = G, ε = 1 이면 M ⊂ F 입니다.

    Args:
        K: 학습 그람 행렬
        Ffair: 공정 부분공간의 RKHS 정규직교 기저
        Gpred: 예측 부분공간의 RKHS 정규직교 기저
        eps: 절충 계수 (0 ≤ ε ≤ 1)

    Returns:
        EᵀKE = I_d 인 모델 기저

    Raises:
        ValueError: ε 가 [0,1] 밖이거나 예측 차원이 공정 차원보다 큰 경우
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"ε 은 [0, 1] 범위여야 합니다: {eps}")
    Fc, Gc = Ffair.coeffs, Gpred.coeffs
    r, d = Fc.shape[1], Gc.shape[1]
    if d > r:
        raise ValueError(
            f"예측 차원 d={d} 가 공정 차원 r={r} 보다 큽니다 (d + m ≤ n 가정 위반)"
        )

    U, sigma, Vt = svd(Fc.T @ K.K @ Gc, full_matrices=False)
    V = Vt.T
    pivots = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivots, np.arange(d)])
    signs[signs == 0] = 1.0
    U, V = U * signs, V * signs

    sigma = np.clip(sigma, 0.0, 1.0)
    gamma = np.maximum(sigma, eps)
    rho = np.zeros(d)
    open_branch = sigma < _SIGMA_ONE
    rho[open_branch] = np.sqrt(
        np.clip(1.0 - gamma[open_branch] ** 2, 0.0, None) / (1.0 - sigma[open_branch] ** 2)
    )

    E = (Fc @ U) * (gamma - rho * sigma) + (Gc @ V) * rho
    resolve_logger(logger).debug(
        "모델 부분공간 구성 완료", eps=eps, d=d, sigma_min=float(sigma.min()), sigma_max=float(sigma.max())
    )
    return ModelBasis(E=E, sigma=sigma, gamma=gamma, rho=rho, epsilon=float(eps))


def projection_gaps(sigma_min: float, eps: float) -> ProjectionGaps:
    """σ_min 과 ε 로부터 ‖P_F − P_M‖ 과 ‖P_G − P_M‖ 를 계산합니다."""
    for name, value in (("sigma_min", sigma_min), ("eps", eps)):
        if not -1e-12 <= value <= 1.0 + 1e-12:
            raise ValueError(f"{name} 은 [0, 1] 범위여야 합니다: {value}")
    s = min(max(sigma_min, 0.0), 1.0)
    e = min(max(eps, 0.0), 1.0)
    fair_gap = np.sqrt(1.0 - max(e * e, s * s))
    pred_gap = max(0.0, e * np.sqrt(1.0 - s * s) - s * np.sqrt(1.0 - e * e))
    return ProjectionGaps(fair_gap=float(fair_gap), pred_gap=float(pred_gap))


def _check_orthonormal(K: KernelMatrix, A: np.ndarray, tol: float, name: str) -> None:
    gram_err = np.max(np.abs(A.T @ K.K @ A - np.eye(A.shape[1])))
    if gram_err > tol:
        raise ValueError(f"{name} 가 RKHS 정규직교가 아닙니다 (최대 오차 {gram_err:.3e})")


def empirical_projection_gap(
    K: KernelMatrix,
    basisA: np.ndarray,
    basisB: np.ndarray,
    symmetric: bool = False,
    tol: float = 1e-6,
) -> float:
    """두 RKHS 정규직교 기저 사이의 사영 차이를 가장 큰 주각의 사인으로 계산합니다.

    차원이 다르면 작은 쪽 차원만큼의 주각을 사용합니다(작은 공간이 큰 공간에서
    얼마나 벗어나는지). symmetric=True 이고 차원이 다르면 ‖P_A − P_B‖ = 1 입니다.
    사인은 잔차 R = A − B(BᵀKA) 의 RKHS 노름으로 직접 구합니다.

    Raises:
        ValueError: 입력이 정규직교가 아닌 경우
    """
    _check_orthonormal(K, basisA, tol, "basisA")
    _check_orthonormal(K, basisB, tol, "basisB")
    if symmetric and basisA.shape[1] != basisB.shape[1]:
        return 1.0
    small, large = (basisA, basisB) if basisA.shape[1] <= basisB.shape[1] else (basisB, basisA)
    R = small - large @ (large.T @ K.K @ small)
    M = R.T @ K.K @ R
    top = float(eigh(0.5 * (M + M.T), eigvals_only=True)[-1])
    return float(min(1.0, np.sqrt(max(0.0, top))))


def projection_distance(K: KernelMatrix, basis: np.ndarray, a: np.ndarray) -> float:
    """‖P f − f‖ (f = φa, P 는 span{φ basis} 로의 사영, basis 는 정규직교)"""
    a = np.asarray(a, dtype=float)
    resid = a - basis @ (basis.T @ (K.K @ a))
    return float(np.sqrt(max(0.0, float(resid @ K.K @ resid))))


def orthonormality_error(K: KernelMatrix, E: np.ndarray) -> float:
    """max|EᵀKE − I|"""
    return float(np.max(np.abs(E.T @ K.K @ E - np.eye(E.shape[1]))))
