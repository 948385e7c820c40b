"""
공정 부분공간 서비스

보호 속성마다 SDR 부분공간을 추정해 합치고(공정성 기준에 따라 Y=1, Y=0 부분집합 사용),
그 합집합과 RKHS 공분산이 0 인 함수들의 공간 F 를 영공간 구성으로 계산합니다.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space, qr, svd

from ..domain.entities import (
    AttributeKind,
    CovarianceCheckReport,
    FairBasis,
    FairnessCriterion,
    KernelMatrix,
    RateReport,
)
from ..domain.exceptions import DimensionMismatchError, EmptyClassError, FairSubspaceEmptyError
from ..domain.ports import LoggerPort, resolve_logger
from .kernel import center_columns
from .sdr import DEFAULT_ETA, default_slice_count, sdr_subspace


def _binary_labels(y: np.ndarray, n: int) -> np.ndarray:
    y = np.asarray(y).ravel()
    if y.shape[0] != n:
        raise DimensionMismatchError(f"레이블 길이가 n 과 다릅니다: {y.shape[0]} != {n}", expected=n, actual=y.shape[0])
    if not np.isin(y, (0, 1)).all():
        raise ValueError("EOP/EO 기준에는 {0,1} 이진 레이블이 필요합니다")
    return y.astype(int)


def _prepare_attribute(s: np.ndarray, kind: AttributeKind) -> np.ndarray:
    """연속형 보호 속성은 표준화, 범주형은 그대로 정수 코드로 사용"""
    if kind == AttributeKind.CONTINUOUS:
        std = s.std()
        return (s - s.mean()) / std if std > 0 else s - s.mean()
    return s


def protected_sdr_union(
    K: KernelMatrix,
    y: Optional[np.ndarray],
    S: np.ndarray,
    criterion: FairnessCriterion,
    m: int,
    H: Optional[int] = None,
    eta: float = DEFAULT_ETA,
    kinds: Optional[Sequence[AttributeKind]] = None,
    max_workers: int = 1,
    logger: Optional[LoggerPort] = None,
) -> np.ndarray:
    """공정성 기준에 맞는 보호 속성 SDR 부분공간들의 합집합 W 를 계산합니다.

    열 순서는 속성 순서이며, EO 에서는 각 속성마다 Y=1 블록 다음에 Y=0 블록이 옵니다.
    각 블록은 정확히 m 열이고, 부분집합 블록은 해당하지 않는 행이 0 입니다.

    Args:
        K: 학습 그람 행렬
        y: 이진 레이블 (EOP/EO 에서 필요)
        S: n×k 보호 속성 행렬
        criterion: 공정성 기준
        m: 속성당 SDR 차원
        H: 슬라이스 수 (없으면 속성마다 기본값)
        eta: SDR 정규화 계수
        kinds: 속성 종류 (없으면 모두 범주형)
        max_workers: 블록 병렬 계산 작업자 수
        logger: 로거

    Returns:
        n×(k·m) 또는 n×(2·k·m) 계수 행렬

    Raises:
        EmptyClassError: 필요한 클래스가 비어 있는 경우
    """
    log = resolve_logger(logger)
    n = K.n
    S = np.asarray(S, dtype=float)
    if S.ndim == 1:
        S = S[:, None]
    if S.shape[0] != n:
        raise DimensionMismatchError(f"보호 속성 행 수가 n 과 다릅니다: {S.shape[0]} != {n}", expected=n, actual=S.shape[0])
    k = S.shape[1]
    if k < 1 or m < 1:
        raise ValueError("보호 속성 수와 차원 m 은 1 이상이어야 합니다")
    kinds = list(kinds) if kinds is not None else [AttributeKind.CATEGORICAL] * k

    # (행 인덱스 또는 None, 해당 부분 그람 행렬)
    subsets: List[Tuple[Optional[np.ndarray], KernelMatrix]] = []
    if criterion == FairnessCriterion.STATISTICAL_PARITY:
        subsets.append((None, K))
    else:
        labels = _binary_labels(y, n) if y is not None else None
        if labels is None:
            raise ValueError("EOP/EO 기준에는 레이블 y 가 필요합니다")
        classes = (1,) if criterion == FairnessCriterion.EQUALITY_OF_OPPORTUNITY else (1, 0)
        for label in classes:
            rows = np.flatnonzero(labels == label)
            if rows.size == 0:
                raise EmptyClassError(label, context=f"{criterion.value} 기준")
            subsets.append((rows, KernelMatrix(K=K.K[np.ix_(rows, rows)])))

    # 같은 부분 그람 행렬을 쓰는 블록이 분해를 공유하도록 미리 계산
    for _, Ksub in subsets:
        Ksub.factor()

    tasks = [(j, rows, Ksub) for j in range(k) for rows, Ksub in subsets]

    def run(task: Tuple[int, Optional[np.ndarray], KernelMatrix]) -> np.ndarray:
        j, rows, Ksub = task
        s = _prepare_attribute(S[:, j] if rows is None else S[rows, j], kinds[j])
        n_sub = Ksub.n
        H_j = min(H, n_sub) if H is not None else default_slice_count(s, kinds[j] == AttributeKind.CATEGORICAL)
        result = sdr_subspace(Ksub, s, min(m, n_sub), H_j, eta=eta, logger=log)
        block = np.zeros((n, m))
        target = slice(None) if rows is None else rows
        block[target, : result.m] = result.W
        return block

    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        blocks = list(pool.map(run, tasks))

    W = np.hstack(blocks)
    log.info(
        "보호 속성 SDR 합집합 계산 완료",
        criterion=criterion.value,
        attributes=k,
        columns=W.shape[1],
    )
    return W


def orthogonality_residual(K: KernelMatrix, W: np.ndarray, B: np.ndarray) -> float:
    """max|WᵀKΓ_nKB| / (‖K‖²‖W‖‖B‖) 척도 무관 직교성 잔차"""
    scale = K.norm() ** 2 * np.linalg.norm(W, 2) * np.linalg.norm(B, 2)
    if scale == 0:
        return 0.0
    Kc = center_columns(K)
    cross = (Kc @ W).T @ (Kc @ B)
    return float(np.max(np.abs(cross)) / scale)


def fair_nullspace(K: KernelMatrix, W: np.ndarray, logger: Optional[LoggerPort] = None) -> FairBasis:
    """K̃W 열공간의 직교 여공간으로 공정 부분공간 기저 Q 를 계산합니다.

    K̃ = K′ᵀK′ (K′ 는 열 중심화된 K) 이며 Q 는 유클리드 정규직교 열을 가집니다.

    Raises:
        FairSubspaceEmptyError: rank(K̃W) = n 인 경우
    """
    log = resolve_logger(logger)
    n = K.n
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[:, None]
    if W.shape[0] != n:
        raise DimensionMismatchError(f"W 행 수가 n 과 다릅니다: {W.shape[0]} != {n}", expected=n, actual=W.shape[0])

    Kc = center_columns(K)
    KtW = Kc.T @ (Kc @ W)

    if W.shape[1] == 0 or not np.any(KtW):
        rank = 0
        Q = np.eye(n)
    else:
        svals = svd(KtW, compute_uv=False)
        cutoff = max(n, W.shape[1]) * svals[0] * np.finfo(float).eps
        rank = int(np.count_nonzero(svals > cutoff))
        if rank >= n:
            raise FairSubspaceEmptyError(n=n, rank=rank)
        Q_full, _, _ = qr(KtW, mode="full", pivoting=True)
        Q = Q_full[:, rank:]

    residual = orthogonality_residual(K, W, Q)
    log.info("공정 부분공간 계산 완료", n=n, constraint_rank=rank, fair_dim=n - rank, residual=residual)
    return FairBasis(Q=Q, W=W, r=n - rank, residual=residual)


def verify_prop1_synthetic(
    n: int,
    p: int,
    seed: int,
    B: Optional[np.ndarray] = None,
    noise: float = 0.5,
) -> CovarianceCheckReport:
    """타원 분포 합성 데이터에서 공정 방향과 보호 속성의 표본 공분산을 확인합니다.

    X ~ N(0, I_p), S = sign(BᵀX 의 첫 좌표) + 잡음 으로 생성하고, 참 공분산과 B 로
    Var(X)B 의 영공간 C 를 구한 뒤 ‖표본 Cov(CᵀX, S)‖_max 와 3σ̂/√n 을 반환합니다.
    """
    if n < 100 or p < 3:
        raise ValueError(f"n ≥ 100, p ≥ 3 이어야 합니다: n={n}, p={p}")
    rng = np.random.default_rng(seed)
    if B is None:
        B = np.zeros((p, 1))
        B[0, 0] = 1.0
    B = np.asarray(B, dtype=float).reshape(p, -1)
    sigma = np.eye(p)

    X = rng.standard_normal((n, p))
    S = np.sign(X @ B[:, 0]) + noise * rng.standard_normal(n)

    C = null_space((sigma @ B).T) if np.any(B) else np.eye(p)
    Z = X @ C
    Zc = Z - Z.mean(axis=0)
    Sc = S - S.mean()
    products = Zc * Sc[:, None]
    cov = products.sum(axis=0) / (n - 1)
    sigma_hat = float(np.max(products.std(axis=0, ddof=1)))
    return CovarianceCheckReport(
        sample_cov_norm=float(np.max(np.abs(cov))),
        bound=3.0 * sigma_hat / np.sqrt(n),
    )


def prop1_rate(
    n_values: Sequence[int],
    p: int,
    seed: int,
    replicates: int = 20,
) -> RateReport:
    """표본 크기별 반복 평균 공분산 노름과 log–log 기울기"""
    children = np.random.SeedSequence(seed).spawn(len(n_values) * replicates)
    means: List[float] = []
    for i, n in enumerate(n_values):
        norms = [
            verify_prop1_synthetic(int(n), p, int(children[i * replicates + r].generate_state(1)[0])).sample_cov_norm
            for r in range(replicates)
        ]
        means.append(float(np.mean(norms)))
    slope = float(np.polyfit(np.log(np.asarray(n_values, dtype=float)), np.log(means), 1)[0])
    return RateReport(n_values=[int(v) for v in n_values], cov_norms=means, slope=slope)
