"""
합성 데이터 생성기

보호 속성 S 가 저차원 비선형 사상을 통해 특징 X 를 움직이고, 목표 Y 는 주로 S 와 무관한
방향에 의존하며 S 에 연결된 성분은 약하게만 섞인 데이터셋을 만듭니다.
"""

from typing import Tuple

import numpy as np

from ..domain.entities import (
    AttributeKind,
    Dataset,
    KernelFamily,
    KernelMatrix,
    KernelSpec,
    OrthonormalBasis,
    TargetKind,
)
from .kernel import gram, median_lengthscale
from .model_subspace import orthonormalize

FEATURE_NAMES = ["x1", "x2", "x3", "x4"]
PROTECTED_NAME = "s1"

# S 에 연결된 목표 성분의 계수
S_LINKED_WEIGHT = 0.45


def planted_signal(Z: np.ndarray, x3: np.ndarray) -> np.ndarray:
    """잡음 없는 목표 신호"""
    return np.sin(1.5 * Z[:, 0]) + 0.5 * Z[:, 1] + S_LINKED_WEIGHT * x3


def planted_dataset(
    n: int,
    seed: int,
    task: TargetKind = TargetKind.CONTINUOUS,
    noise: float = 0.8,
) -> Dataset:
    """S 의존성이 심어진 합성 데이터셋

    X = [Z1, Z2, S + 0.1ε, tanh(1.5S) + 0.1ε′], Y = sin(1.5Z1) + 0.5Z2 + 0.45·X3 + 잡음.
    이진 과제는 Y > 0 을 레이블로 사용합니다.
    """
    if n < 2:
        raise ValueError("샘플 수는 2 이상이어야 합니다")
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(n)
    Z = rng.standard_normal((n, 2))
    x3 = s + 0.1 * rng.standard_normal(n)
    x4 = np.tanh(1.5 * s) + 0.1 * rng.standard_normal(n)
    X = np.column_stack([Z, x3, x4])
    y = planted_signal(Z, x3) + noise * rng.standard_normal(n)
    if task == TargetKind.BINARY:
        y = (y > 0).astype(float)
    return Dataset(
        X=X,
        S=s[:, None],
        y=y,
        feature_names=list(FEATURE_NAMES),
        protected_names=[PROTECTED_NAME],
        protected_kinds=[AttributeKind.CONTINUOUS],
        target_kind=task,
    )


def random_subspace_instance(
    rng: np.random.Generator,
    n_range: Tuple[int, int] = (30, 60),
    fair_dim: int = 8,
    pred_dim: int = 3,
) -> Tuple[KernelMatrix, OrthonormalBasis, OrthonormalBasis]:
    """무작위 RBF 그람 행렬과 그 위의 공정/예측 정규직교 기저 한 쌍"""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    X = rng.standard_normal((n, 3))
    spec = KernelSpec(family=KernelFamily.RBF, lengthscale=median_lengthscale(X))
    K = gram(spec, X)
    Ffair = orthonormalize(K, rng.standard_normal((n, fair_dim)))
    Gpred = orthonormalize(K, rng.standard_normal((n, pred_dim)))
    return K, Ffair, Gpred
