"""테스트 보조 함수"""

from typing import Tuple

import numpy as np

from core.domain.entities import KernelFamily, KernelMatrix, KernelSpec
from core.services.kernel import gram, median_lengthscale


def rbf_gram(X: np.ndarray) -> Tuple[KernelSpec, KernelMatrix]:
    """중앙값 길이 척도를 쓰는 RBF 그람 행렬"""
    spec = KernelSpec(family=KernelFamily.RBF, lengthscale=median_lengthscale(X))
    return spec, gram(spec, X)


def rkhs_gram(K: KernelMatrix, A: np.ndarray) -> np.ndarray:
    return A.T @ K.K @ A
