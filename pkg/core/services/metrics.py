"""
평가 지표 서비스

공정성 점수(SP, EOP, EO)는 예측과 보호 속성 사이 피어슨 상관계수의 절댓값으로,
정확도는 RMSE 또는 오분류율로 계산합니다.
"""

from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.stats import pearsonr

from ..domain.entities import EvalReport, TargetKind
from ..domain.exceptions import DimensionMismatchError, EmptyClassError


class CorrResult(NamedTuple):
    """상관 점수와 퇴화 여부"""

    value: float
    degenerate: bool


def _check_lengths(a: np.ndarray, b: np.ndarray, minimum: int) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(f"길이가 일치하지 않습니다: {a.shape[0]} != {b.shape[0]}", expected=a.shape[0], actual=b.shape[0])
    if a.shape[0] < minimum:
        raise ValueError(f"최소 {minimum}개의 값이 필요합니다")


def abs_corr(a: np.ndarray, b: np.ndarray) -> CorrResult:
    """|피어슨 상관계수|. 어느 한쪽이 상수이면 (0, 퇴화) 를 반환합니다."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    _check_lengths(a, b, 2)
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return CorrResult(0.0, True)
    value = abs(float(pearsonr(a, b)[0]))
    return CorrResult(min(value, 1.0), False)


def _as_matrix(S: np.ndarray) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    return S[:, None] if S.ndim == 1 else S


def _scores(yhat: np.ndarray, S: np.ndarray) -> List[CorrResult]:
    return [abs_corr(yhat, S[:, j]) for j in range(S.shape[1])]


def _class_rows(y: np.ndarray, label: int, n: int) -> np.ndarray:
    y = np.asarray(y).ravel()
    if y.shape[0] != n:
        raise DimensionMismatchError(f"레이블 길이가 일치하지 않습니다: {y.shape[0]} != {n}", expected=n, actual=y.shape[0])
    rows = np.flatnonzero(y == label)
    if rows.size == 0:
        raise EmptyClassError(label, context="공정성 점수")
    return rows


def sp_score(yhat: np.ndarray, S: np.ndarray) -> np.ndarray:
    """보호 속성별 |Corr(Ŷ, S_j)|"""
    S = _as_matrix(S)
    return np.array([c.value for c in _scores(np.asarray(yhat, dtype=float), S)])


def eop_score(yhat: np.ndarray, S: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Y=1 인 샘플에서의 보호 속성별 |Corr(Ŷ, S_j)|"""
    S = _as_matrix(S)
    yhat = np.asarray(yhat, dtype=float)
    rows = _class_rows(y, 1, S.shape[0])
    return sp_score(yhat[rows], S[rows])


def eo_score(yhat: np.ndarray, S: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Y=1, Y=0 각각의 점수 중 큰 값"""
    S = _as_matrix(S)
    yhat = np.asarray(yhat, dtype=float)
    neg = _class_rows(y, 0, S.shape[0])
    return np.maximum(eop_score(yhat, S, y), sp_score(yhat[neg], S[neg]))


def rmse(yhat: np.ndarray, y: np.ndarray) -> float:
    yhat = np.asarray(yhat, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    _check_lengths(yhat, y, 1)
    return float(np.sqrt(np.mean((yhat - y) ** 2)))


def misclassification(yhat_labels: np.ndarray, y: np.ndarray) -> float:
    yhat_labels = np.asarray(yhat_labels).ravel()
    y = np.asarray(y).ravel()
    _check_lengths(yhat_labels, y, 1)
    return float(np.mean(yhat_labels != y))


def evaluate(
    yhat: np.ndarray,
    y: np.ndarray,
    S: np.ndarray,
    target_kind: TargetKind,
    protected_names: Optional[Sequence[str]] = None,
    score_labels: bool = False,
    threshold: float = 0.5,
) -> EvalReport:
    """예측에 대한 오차와 공정성 점수 보고서를 만듭니다.

    분류에서는 기본적으로 임계값 적용 전 연속 예측으로 공정성을 계산하고,
    score_labels=True 이면 레이블로 계산합니다. EOP/EO 는 이진 목표에서만 계산합니다.
    """
    S = _as_matrix(S)
    yhat = np.asarray(yhat, dtype=float).ravel()
    names = list(protected_names) if protected_names is not None else [f"s{j + 1}" for j in range(S.shape[1])]
    degenerate: List[str] = []

    if target_kind == TargetKind.BINARY:
        labels = (yhat >= threshold).astype(int)
        error = misclassification(labels, y)
        error_kind = "misclassification"
        scored = labels.astype(float) if score_labels else yhat
    else:
        error = rmse(yhat, y)
        error_kind = "rmse"
        scored = yhat

    sp_results = _scores(scored, S)
    degenerate += [f"sp_{names[j]}" for j, c in enumerate(sp_results) if c.degenerate]
    report = {"sp": [c.value for c in sp_results]}

    if target_kind == TargetKind.BINARY:
        y_int = np.asarray(y).astype(int)
        pos = _class_rows(y_int, 1, S.shape[0])
        neg = _class_rows(y_int, 0, S.shape[0])
        pos_results = _scores(scored[pos], S[pos])
        neg_results = _scores(scored[neg], S[neg])
        degenerate += [f"eop_{names[j]}" for j, c in enumerate(pos_results) if c.degenerate]
        report["eop"] = [c.value for c in pos_results]
        report["eo"] = [max(p.value, q.value) for p, q in zip(pos_results, neg_results)]

    return EvalReport(
        sp=report["sp"],
        eop=report.get("eop"),
        eo=report.get("eo"),
        error=error,
        error_kind=error_kind,
        n_test=int(yhat.shape[0]),
        degenerate=degenerate,
    )
