"""
커널 서비스

커널 평가, 그람 행렬 생성, 열 중심화, 테스트-학습 교차 커널 계산을 제공합니다.
"""

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from ..domain.entities import KernelFamily, KernelMatrix, KernelSpec
from ..domain.exceptions import DimensionMismatchError

# 중앙값 휴리스틱에 사용할 최대 표본 수
_MEDIAN_SAMPLE = 2000


def _as_2d(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X


def _check_same_dim(p1: int, p2: int) -> None:
    if p1 != p2:
        raise DimensionMismatchError(
            f"특징 차원이 일치하지 않습니다: {p1} != {p2}", expected=p1, actual=p2
        )


def _from_sq_dists(spec: KernelSpec, sq: np.ndarray) -> np.ndarray:
    return spec.variance * np.exp(-sq / (2.0 * spec.lengthscale**2))


def eval_kernel(spec: KernelSpec, x: np.ndarray, z: np.ndarray) -> float:
    """두 특징 벡터 사이의 커널 값 κ(x, z)"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _check_same_dim(x.shape[0], z.shape[0])
    if spec.family == KernelFamily.LINEAR:
        return float(spec.variance * np.dot(x, z))
    diff = x - z
    return float(_from_sq_dists(spec, np.dot(diff, diff)))


def gram(spec: KernelSpec, X: np.ndarray) -> KernelMatrix:
    """학습 데이터의 그람 행렬 K_ij = κ(x_i, x_j)"""
    X = _as_2d(X)
    if X.shape[0] < 1:
        raise ValueError("그람 행렬에는 최소 1개의 샘플이 필요합니다")
    if spec.family == KernelFamily.LINEAR:
        K = spec.variance * (X @ X.T)
        K = 0.5 * (K + K.T)
    else:
        K = _from_sq_dists(spec, squareform(pdist(X, "sqeuclidean")))
    return KernelMatrix(K=K)


def cross_gram(spec: KernelSpec, Z: np.ndarray, X: np.ndarray) -> np.ndarray:
    """테스트 입력 Z 와 학습 입력 X 사이의 t×n 교차 커널"""
    Z = _as_2d(Z)
    X = _as_2d(X)
    _check_same_dim(X.shape[1], Z.shape[1])
    if spec.family == KernelFamily.LINEAR:
        return spec.variance * (Z @ X.T)
    return _from_sq_dists(spec, cdist(Z, X, "sqeuclidean"))


def center_columns(K: KernelMatrix | np.ndarray) -> np.ndarray:
    """각 열의 평균을 빼서 Γ_n K 를 계산 (Γ_n 은 만들지 않음)"""
    M = K.K if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)
    return M - M.mean(axis=0, keepdims=True)


def column_means(K: KernelMatrix) -> np.ndarray:
    """1_nᵀK/n"""
    return K.K.mean(axis=0)


def median_lengthscale(X: np.ndarray, seed: int = 0) -> float:
    """쌍별 거리 중앙값 휴리스틱으로 RBF 길이 척도를 정합니다.

    행이 많으면 고정 시드로 부분 표본을 뽑아 계산합니다.
    모든 거리가 0 이면 1.0 을 반환합니다.
    """
    X = _as_2d(X)
    if X.shape[0] > _MEDIAN_SAMPLE:
        rng = np.random.default_rng(seed)
        X = X[rng.choice(X.shape[0], _MEDIAN_SAMPLE, replace=False)]
    dists = pdist(X)
    dists = dists[dists > 0]
    if dists.size == 0:
        return 1.0
    return float(np.median(dists))


def min_eigenvalue(K: KernelMatrix) -> float:
    """그람 행렬의 최소 고유값 (양반정치 확인용)"""
    return float(np.linalg.eigvalsh(K.K)[0])
