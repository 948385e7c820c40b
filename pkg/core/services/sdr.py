"""
RKHS 충분 차원 축소 서비스

목표 변수를 정렬해 슬라이스로 나누고, 정규화된 일반화 고유값 문제

    Γ_n K′ a = τ (Δ + nηI) a,   Δ = diag(Γ_{n_i}) K′,   K′ = K(idx, idx)

를 풀어 SDR 부분공간의 계수 행렬을 구합니다.

K′ = L Lᵀ 로 분해하면 위 문제의 τ > 0 고유쌍은 r×r 대칭 정치 묶음

    (LᵀΓL) c = τ (LᵀDL + nηI) c

의 고유쌍과 일대일로 대응하며 a = (ΓLc/τ − DLc)/(nη) 로 복원됩니다.
이 복원은 비대칭 원 문제의 잔차를 정확히 만족합니다.
"""

from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, eigh

from ..domain.entities import KernelMatrix, SdrResult, SlicePartition
from ..domain.exceptions import DimensionMismatchError, SdrSolverError
from ..domain.ports import LoggerPort, resolve_logger

DEFAULT_ETA = 1e-4
DEFAULT_THRESHOLD_RATIO = 0.01
MAX_CONTINUOUS_SLICES = 10

# 이 값 이하의 상대 고유값은 τ = 0 분기로 복원
_TAU_FLOOR = 1e-12


def slice_by_target(s: np.ndarray, H: int) -> SlicePartition:
    """목표값을 정렬해 H 개 이하의 연속 슬라이스로 나눕니다.

    같은 값은 항상 같은 슬라이스에 들어갑니다. 서로 다른 값의 수가 H 이하이면
    값마다 하나의 슬라이스를 만들고, 그렇지 않으면 k·n/H 에 가장 가까운
    동점 그룹 경계를 차례로 선택합니다.

    Args:
        s: 길이 n 목표 벡터
        H: 요청 슬라이스 수 (1 ≤ H ≤ n)

    Returns:
        정렬 순열, 역순열, 슬라이스 크기를 담은 분할

    Raises:
        ValueError: H 가 범위를 벗어난 경우
    """
    s = np.asarray(s, dtype=float).ravel()
    n = s.shape[0]
    if H < 1:
        raise ValueError(f"슬라이스 수는 1 이상이어야 합니다: H={H}")
    if H > n:
        raise ValueError(f"슬라이스 수가 샘플 수보다 많습니다: H={H}, n={n}")

    idx = np.argsort(s, kind="stable")
    inv = np.empty_like(idx)
    inv[idx] = np.arange(n)

    s_sorted = s[idx]
    candidates = np.flatnonzero(s_sorted[1:] != s_sorted[:-1]) + 1

    if H - 1 >= candidates.size:
        bounds = candidates
    else:
        chosen: list[int] = []
        lo = 0
        for k in range(1, H):
            hi = candidates.size - (H - 1 - k)
            window = candidates[lo:hi]
            j = int(np.argmin(np.abs(window - k * n / H)))
            chosen.append(int(window[j]))
            lo += j + 1
        bounds = np.asarray(chosen, dtype=int)

    sizes = np.diff(np.concatenate([[0], bounds, [n]])).astype(int)
    return SlicePartition(sorted_index=idx, inverse_index=inv, slice_sizes=sizes.tolist())


def default_slice_count(s: np.ndarray, categorical: bool) -> int:
    """범주형이면 범주 수, 연속형이면 min(10, 서로 다른 값의 수)"""
    distinct = int(np.unique(np.asarray(s)).size)
    if categorical:
        return max(1, distinct)
    return max(1, min(MAX_CONTINUOUS_SLICES, distinct))


def _block_center(L: np.ndarray, partition: SlicePartition) -> np.ndarray:
    """슬라이스 블록마다 행 평균을 뺀 diag(Γ_{n_i}) L"""
    starts = partition.boundaries()[:-1]
    sizes = np.asarray(partition.slice_sizes)
    means = np.add.reduceat(L, starts, axis=0) / sizes[:, None]
    return L - np.repeat(means, sizes, axis=0)


def sdr_subspace(
    K: KernelMatrix,
    s: np.ndarray,
    m: int,
    H: int,
    eta: float = DEFAULT_ETA,
    logger: Optional[LoggerPort] = None,
) -> SdrResult:
    """목표 s 에 대한 RKHS SDR 부분공간을 추정합니다.

    Args:
        K: 학습 그람 행렬
        s: 길이 n 목표 벡터
        m: 반환할 방향 수 (K 의 수치 계수보다 크면 계수로 제한)
        H: 슬라이스 수
        eta: 정규화 계수
        logger: 진단 로거

    Returns:
        원래 행 순서의 계수 행렬 W 와 내림차순 τ

    Raises:
        SdrSolverError: 고유값 풀이가 실패하거나 비유한 값이 나온 경우
    """
    log = resolve_logger(logger)
    s = np.asarray(s, dtype=float).ravel()
    n = K.n
    if s.shape[0] != n:
        raise DimensionMismatchError(
            f"목표 길이가 그람 행렬 크기와 다릅니다: {s.shape[0]} != {n}", expected=n, actual=s.shape[0]
        )
    if not 1 <= m <= n:
        raise ValueError(f"차원 m 은 1 이상 n 이하여야 합니다: m={m}, n={n}")
    if eta <= 0:
        raise ValueError(f"정규화 계수는 양수여야 합니다: eta={eta}")
    if not np.all(np.isfinite(s)):
        raise ValueError("목표 벡터에 비유한 값이 있습니다")

    partition = slice_by_target(s, H)
    idx = partition.sorted_index
    L = K.factor()[idx]
    r = L.shape[1]
    reg = n * eta

    GL = L - L.mean(axis=0, keepdims=True)
    DL = _block_center(L, partition)
    condition = (float(np.sum(DL * DL)) + reg) / reg

    if r == 0:
        raise SdrSolverError("그람 행렬의 수치 계수가 0입니다", eta=eta, condition=condition)
    if m > r:
        log.warning(f"요청 차원이 그람 행렬 계수보다 커서 제한합니다: m={m} → {r}", n=n)
        m = r

    A = GL.T @ GL
    B = DL.T @ DL + reg * np.eye(r)
    try:
        tau, C = eigh(A, B, subset_by_index=[r - m, r - 1])
    except (LinAlgError, ValueError) as e:
        raise SdrSolverError(f"일반화 고유값 풀이 실패: {e}", eta=eta, condition=condition) from e

    tau = tau[::-1]
    C = C[:, ::-1]
    if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(C))):
        raise SdrSolverError("비유한 고유값이 발생했습니다", eta=eta, condition=condition)

    lam = np.sum(L * L, axis=0)
    floor = _TAU_FLOOR * max(float(tau[0]), 1.0)
    W_sorted = np.empty((n, m))
    for i in range(m):
        c = C[:, i]
        if tau[i] > floor:
            a = (GL @ c / tau[i] - DL @ c) / reg
            a *= np.sqrt(tau[i]) / np.linalg.norm(c)
        else:
            a = L @ (c / lam)
            quad = float(a @ (DL @ (L.T @ a)) + reg * a @ a)
            a /= np.sqrt(quad) if quad > 0 else np.linalg.norm(a)
        pivot = int(np.argmax(np.abs(a)))
        if a[pivot] < 0:
            a = -a
        W_sorted[:, i] = a

    if not np.all(np.isfinite(W_sorted)):
        raise SdrSolverError("SDR 계수에 비유한 값이 있습니다", eta=eta, condition=condition)

    log.debug(
        "SDR 부분공간 추정 완료",
        n=n,
        m=m,
        slices=partition.n_slices,
        tau_max=float(tau[0]),
        condition=condition,
    )
    return SdrResult(W=W_sorted[partition.inverse_index], tau=tau, eta=eta)


def pencil_residuals(K: KernelMatrix, s: np.ndarray, result: SdrResult, H: int) -> np.ndarray:
    """정렬 순서에서 ‖Γ_n K′ a_i − τ_i(Δ + nηI)a_i‖ / ‖Γ_n K′‖ 를 계산합니다."""
    partition = slice_by_target(s, H)
    idx = partition.sorted_index
    Kp = K.K[np.ix_(idx, idx)]
    GK = Kp - Kp.mean(axis=0, keepdims=True)
    Delta = _block_center(Kp, partition)
    Wp = result.W[idx]
    n = K.n
    lhs = GK @ Wp
    rhs = (Delta @ Wp + n * result.eta * Wp) * result.tau
    scale = np.linalg.norm(GK, 2)
    return np.linalg.norm(lhs - rhs, axis=0) / max(scale, np.finfo(float).tiny)


def relative_threshold(tau: np.ndarray, ratio: float = DEFAULT_THRESHOLD_RATIO) -> float:
    """가장 큰 τ 에 대한 상대 임계값"""
    tau = np.asarray(tau, dtype=float)
    if tau.size == 0:
        raise ValueError("고유값 목록이 비어 있습니다")
    return ratio * float(tau[0])


def select_dimension(tau: np.ndarray, max_dim: int, threshold: float) -> int:
    """τ_d ≥ threshold 를 만족하는 가장 큰 d ≤ max_dim (최소 1)"""
    tau = np.asarray(tau, dtype=float)
    if tau.size == 0:
        raise ValueError("고유값 목록이 비어 있습니다")
    if not 1 <= max_dim <= tau.size:
        raise ValueError(f"max_dim 은 1 이상 {tau.size} 이하여야 합니다: {max_dim}")
    return max(1, int(np.count_nonzero(tau[:max_dim] >= threshold)))
