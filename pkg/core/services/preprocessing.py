"""
데이터 분할 및 표준화 서비스

학습/테스트 분할(이진 목표는 층화)과 학습 분할 통계로의 특징 표준화를 제공합니다.
"""

from typing import Tuple

import numpy as np
from sklearn.model_selection import train_test_split
from sklearn.preprocessing import StandardScaler

from ..domain.entities import Dataset, Preprocessing, TargetKind
from ..domain.exceptions import SplitError


def fit_standardization(X: np.ndarray) -> Preprocessing:
    """학습 특징의 평균과 표준편차 (상수 열은 표준편차 1)"""
    scaler = StandardScaler().fit(X)
    return Preprocessing(feature_means=scaler.mean_.copy(), feature_stds=scaler.scale_.copy())


def standardize(ds: Dataset, preprocessing: Preprocessing) -> Dataset:
    """저장된 통계로 특징을 표준화합니다 (보호 속성과 목표는 원 단위 유지)."""
    return ds.model_copy(update={"X": preprocessing.apply(ds.X), "preprocessing": preprocessing})


def split(ds: Dataset, test_fraction: float, seed: int) -> Tuple[Dataset, Dataset]:
    """데이터셋을 학습/테스트로 나누고 학습 통계로 표준화합니다.

    Args:
        ds: 인코딩된 데이터셋
        test_fraction: 테스트 비율 (0 < f < 1)
        seed: 난수 시드

    Returns:
        (train, test) 데이터셋

    Raises:
        SplitError: 분할 후 한 클래스가 비는 경우
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"테스트 비율은 (0, 1) 범위여야 합니다: {test_fraction}")

    binary = ds.target_kind == TargetKind.BINARY
    try:
        train_idx, test_idx = train_test_split(
            np.arange(ds.n),
            test_size=test_fraction,
            random_state=seed,
            stratify=ds.y if binary else None,
        )
    except ValueError as e:
        raise SplitError(f"데이터셋을 분할할 수 없습니다: {e}") from e

    train_idx, test_idx = np.sort(train_idx), np.sort(test_idx)
    if binary:
        for name, rows in (("학습", train_idx), ("테스트", test_idx)):
            missing = {0, 1} - set(np.unique(ds.y[rows]).astype(int).tolist())
            if missing:
                raise SplitError(f"{name} 분할에 클래스 {sorted(missing)} 가 없습니다")

    train, test = ds.subset(train_idx), ds.subset(test_idx)
    stats = fit_standardization(train.X)
    return standardize(train, stats), standardize(test, stats)
