"""
도메인 엔티티 정의

커널 공정 표현 학습의 핵심 개념을 나타내는 엔티티들을 정의합니다.
모든 엔티티는 Pydantic 모델을 기반으로 하며, 행렬 값은 numpy 배열로 보관합니다.
"""

from enum import Enum
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator
from scipy.linalg import eigh


class ArrayModel(BaseModel):
    """numpy 배열 필드를 허용하는 기본 모델"""

    model_config = ConfigDict(arbitrary_types_allowed=True)


class KernelFamily(str, Enum):
    """커널 종류"""
    RBF = "rbf"
    LINEAR = "linear"


class FairnessCriterion(str, Enum):
    """공정성 기준"""
    STATISTICAL_PARITY = "sp"
    EQUALITY_OF_OPPORTUNITY = "eop"
    EQUALIZED_ODDS = "eo"

    def requires_labels(self) -> bool:
        """이진 레이블이 필요한 기준인지 확인"""
        return self != FairnessCriterion.STATISTICAL_PARITY


class TargetKind(str, Enum):
    """목표 변수 종류"""
    BINARY = "binary"
    CONTINUOUS = "continuous"


class AttributeKind(str, Enum):
    """보호 속성 종류"""
    CATEGORICAL = "categorical"
    CONTINUOUS = "continuous"


class KernelSpec(BaseModel):
    """커널 함수 명세"""

    model_config = ConfigDict(frozen=True)

    family: KernelFamily = Field(default=KernelFamily.RBF, description="커널 종류")
    lengthscale: float = Field(default=1.0, description="RBF 길이 척도")
    variance: float = Field(default=1.0, description="커널 분산 배율")

    @field_validator("lengthscale", "variance")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """양수 검증"""
        if not np.isfinite(v) or v <= 0:
            raise ValueError("길이 척도와 분산은 양수여야 합니다")
        return float(v)


class KernelMatrix(ArrayModel):
    """학습 데이터의 n×n 그람 행렬"""

    K: np.ndarray = Field(..., description="대칭 양반정치 그람 행렬")

    _factor: Optional[np.ndarray] = PrivateAttr(default=None)

    @field_validator("K")
    @classmethod
    def validate_symmetric(cls, v: np.ndarray) -> np.ndarray:
        """정사각 대칭 행렬 검증"""
        v = np.asarray(v, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"그람 행렬은 정사각 행렬이어야 합니다: {v.shape}")
        scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
        if v.size and np.max(np.abs(v - v.T)) > 1e-12 * scale:
            raise ValueError("그람 행렬이 대칭이 아닙니다")
        return v

    @property
    def n(self) -> int:
        return int(self.K.shape[0])

    def norm(self) -> float:
        """스펙트럼 노름 ‖K‖"""
        if self.n == 0:
            return 0.0
        return float(np.linalg.norm(self.K, 2))

    def factor(self) -> np.ndarray:
        """K = L Lᵀ 를 만족하는 계수 인자 L (n×rank)

        고유값 분해 결과를 캐시하므로 같은 K에 대한 여러 SDR 호출이 분해를 공유합니다.
        """
        if self._factor is None:
            vals, vecs = eigh(self.K)
            cutoff = self.n * np.finfo(float).eps * max(float(vals[-1]), 0.0)
            keep = vals > cutoff
            self._factor = vecs[:, keep] * np.sqrt(vals[keep])
        return self._factor


class SlicePartition(ArrayModel):
    """목표 변수 정렬 기반 슬라이스 분할"""

    sorted_index: np.ndarray = Field(..., description="정렬 순열 idx")
    inverse_index: np.ndarray = Field(..., description="역순열 invIdx")
    slice_sizes: List[int] = Field(..., description="슬라이스별 크기 n_i")

    @model_validator(mode="after")
    def validate_sizes(self) -> "SlicePartition":
        if any(size < 1 for size in self.slice_sizes):
            raise ValueError("슬라이스 크기는 양수여야 합니다")
        if sum(self.slice_sizes) != len(self.sorted_index):
            raise ValueError("슬라이스 크기의 합이 n과 다릅니다")
        return self

    @property
    def n_slices(self) -> int:
        return len(self.slice_sizes)

    def boundaries(self) -> np.ndarray:
        """정렬 순서에서 각 슬라이스의 시작 위치 (마지막 원소는 n)"""
        return np.concatenate([[0], np.cumsum(self.slice_sizes)]).astype(int)


class SdrResult(ArrayModel):
    """RKHS SDR 부분공간 추정 결과"""

    W: np.ndarray = Field(..., description="n×m 계수 행렬")
    tau: np.ndarray = Field(..., description="내림차순 일반화 고유값")
    eta: float = Field(..., description="사용된 정규화 계수")

    @property
    def m(self) -> int:
        return int(self.W.shape[1])


class FairBasis(ArrayModel):
    """공정 부분공간 F 의 기저"""

    Q: np.ndarray = Field(..., description="n×r 유클리드 정규직교 계수 행렬")
    W: np.ndarray = Field(..., description="보호 속성 SDR 합집합")
    r: int = Field(..., description="공정 부분공간 차원")
    residual: float = Field(default=0.0, description="척도 보정된 직교성 잔차")


class OrthonormalBasis(ArrayModel):
    """RKHS 정규직교 기저 (CᵀKC = I)"""

    coeffs: np.ndarray = Field(..., description="n×d 계수 행렬")
    eigvals: np.ndarray = Field(..., description="스케일링에 사용된 고유값")

    @property
    def dim(self) -> int:
        return int(self.coeffs.shape[1])


class ModelBasis(ArrayModel):
    """ε 로 조절되는 모델 부분공간 M 의 기저"""

    E: np.ndarray = Field(..., description="n×d 계수 행렬 (ξ_i)")
    sigma: np.ndarray = Field(..., description="F 와 G 사이 주각의 코사인")
    gamma: np.ndarray = Field(..., description="γ_i = max(σ_i, ε)")
    rho: np.ndarray = Field(..., description="G 방향 혼합 계수 ρ_i")
    epsilon: float = Field(..., description="공정성-정확도 절충 계수")

    @property
    def sigma_min(self) -> float:
        return float(np.min(self.sigma)) if self.sigma.size else 0.0


class ProjectionGaps(BaseModel):
    """M 과 F, G 사이의 사영 연산자 노름 차이"""

    fair_gap: float = Field(..., description="‖P_F − P_M‖")
    pred_gap: float = Field(..., description="‖P_G − P_M‖")


class FitConfig(BaseModel):
    """공정 GP 하이퍼파라미터 학습 설정"""

    model_config = ConfigDict(extra="forbid")

    max_iters: int = Field(default=200, description="최대 반복 횟수")
    max_line_search: int = Field(default=30, description="반복당 최대 선탐색 횟수")
    init_log_lambda: float = Field(default=0.0, description="log Λ 초기값")
    init_log_noise: Optional[float] = Field(
        default=None, description="log 잡음 분산 초기값 (없으면 log(0.1·var(y)))"
    )
    convergence_tol: float = Field(default=1e-10, description="LML 상대 변화 수렴 기준")
    grad_tol: float = Field(default=1e-6, description="사영 기울기 수렴 기준")
    noise_floor_ratio: float = Field(default=1e-8, description="잡음 분산 하한 비율 (var(y) 기준)")
    log_bound: float = Field(default=30.0, description="로그 하이퍼파라미터 상자 제약")
    center_targets: bool = Field(default=True, description="목표값 평균을 상수 오프셋으로 분리")
    linear_mean: bool = Field(default=False, description="Π 특징 공간 선형 평균 사용 여부")

    @field_validator("max_iters", "max_line_search")
    @classmethod
    def validate_counts(cls, v: int) -> int:
        if v < 1:
            raise ValueError("반복 횟수는 1 이상이어야 합니다")
        return v

    @field_validator("convergence_tol", "grad_tol", "noise_floor_ratio", "log_bound")
    @classmethod
    def validate_tolerances(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("허용 오차는 양수여야 합니다")
        return v


class FgpModel(ArrayModel):
    """공정 가우시안 프로세스 모델

    공분산 Π(·)ΛΠ(·)ᵀ 의 하이퍼파라미터와 사후 분포 계산용 캐시를 담습니다.
    """

    spec: KernelSpec = Field(..., description="커널 명세")
    X_train: np.ndarray = Field(..., description="n×p 학습 입력")
    train_col_means: np.ndarray = Field(..., description="1_nᵀK/n")
    E: np.ndarray = Field(..., description="모델 부분공간 계수 행렬")
    log_lambda: np.ndarray = Field(..., description="대각 Λ 의 로그")
    log_noise: float = Field(..., description="관측 잡음 분산의 로그")
    y_offset: float = Field(default=0.0, description="상수 목표 오프셋")
    beta: Optional[np.ndarray] = Field(default=None, description="Π 공간 선형 평균 계수")
    pi_train: Optional[np.ndarray] = Field(default=None, description="학습 특징 Π_train")
    posterior_factor: Optional[np.ndarray] = Field(
        default=None, description="σ²I_d + ΦᵀΦ 의 하삼각 촐레스키 인자"
    )
    alpha: Optional[np.ndarray] = Field(default=None, description="C⁻¹(y − 평균)")
    lml_trace: List[float] = Field(default_factory=list, description="채택된 반복의 LML")

    @property
    def d(self) -> int:
        return int(self.E.shape[1])

    @property
    def noise(self) -> float:
        return float(np.exp(self.log_noise))

    @property
    def lam(self) -> np.ndarray:
        return np.exp(self.log_lambda)

    def is_fitted(self) -> bool:
        return self.alpha is not None and self.posterior_factor is not None


class EvalReport(BaseModel):
    """공정성 및 정확도 평가 결과"""

    sp: List[float] = Field(..., description="보호 속성별 SP 점수")
    eop: Optional[List[float]] = Field(default=None, description="보호 속성별 EOP 점수")
    eo: Optional[List[float]] = Field(default=None, description="보호 속성별 EO 점수")
    error: float = Field(..., description="오분류율 또는 RMSE")
    error_kind: str = Field(..., description="rmse 또는 misclassification")
    n_test: int = Field(..., description="평가 샘플 수")
    degenerate: List[str] = Field(default_factory=list, description="상수 예측으로 0 처리된 점수")

    @model_validator(mode="after")
    def validate_ranges(self) -> "EvalReport":
        for scores in (self.sp, self.eop or [], self.eo or []):
            if any(s < 0 or s > 1 + 1e-12 for s in scores):
                raise ValueError("공정성 점수는 [0,1] 범위여야 합니다")
        if self.error < 0:
            raise ValueError("오차는 음수일 수 없습니다")
        return self


class ProtectedColumn(BaseModel):
    """보호 속성 열"""

    name: str = Field(..., description="열 이름")
    kind: AttributeKind = Field(default=AttributeKind.CATEGORICAL, description="속성 종류")


class DatasetSchema(BaseModel):
    """CSV 데이터셋 스키마"""

    target_column: str = Field(..., description="목표 열")
    target_kind: TargetKind = Field(..., description="목표 종류")
    protected_columns: List[ProtectedColumn] = Field(..., min_length=1, description="보호 속성 열")
    feature_columns: List[str] = Field(..., min_length=1, description="특징 열")
    categorical_feature_columns: List[str] = Field(default_factory=list, description="원-핫 인코딩할 특징 열")

    @model_validator(mode="after")
    def validate_disjoint(self) -> "DatasetSchema":
        protected = {c.name for c in self.protected_columns}
        features = set(self.feature_columns)
        if self.target_column in protected | features:
            raise ValueError("목표 열은 특징 또는 보호 속성에 포함될 수 없습니다")
        if protected & features:
            raise ValueError(f"보호 속성이 특징 열에 포함되어 있습니다: {sorted(protected & features)}")
        if not set(self.categorical_feature_columns) <= features:
            raise ValueError("범주형 특징 열은 특징 열의 부분집합이어야 합니다")
        return self

    @property
    def protected_names(self) -> List[str]:
        return [c.name for c in self.protected_columns]

    def used_columns(self) -> List[str]:
        return [*self.feature_columns, *self.protected_names, self.target_column]


class Preprocessing(ArrayModel):
    """학습 분할에서 계산된 표준화 통계"""

    feature_means: np.ndarray = Field(..., description="특징 평균")
    feature_stds: np.ndarray = Field(..., description="특징 표준편차")

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.feature_means) / self.feature_stds


class Dataset(ArrayModel):
    """인코딩된 데이터셋 {(x_i, s_i, y_i)}"""

    X: np.ndarray = Field(..., description="n×p 특징 행렬")
    S: np.ndarray = Field(..., description="n×k 보호 속성 행렬 (원 단위)")
    y: np.ndarray = Field(..., description="목표 벡터")
    feature_names: List[str] = Field(..., description="인코딩된 특징 이름")
    protected_names: List[str] = Field(..., description="보호 속성 이름")
    protected_kinds: List[AttributeKind] = Field(..., description="보호 속성 종류")
    target_name: str = Field(default="y", description="목표 열 이름")
    target_kind: TargetKind = Field(..., description="목표 종류")
    dropped_rows: int = Field(default=0, description="결측으로 제거된 행 수")
    category_levels: dict[str, List[str]] = Field(
        default_factory=dict, description="범주형 보호 속성의 수준 (정수 코드 순서)"
    )
    preprocessing: Optional[Preprocessing] = Field(default=None, description="표준화 통계")

    @model_validator(mode="after")
    def validate_shapes(self) -> "Dataset":
        n = len(self.y)
        if self.X.shape[0] != n or self.S.shape[0] != n:
            raise ValueError("X, S, y 의 행 수가 일치하지 않습니다")
        if self.X.shape[1] != len(self.feature_names):
            raise ValueError("특징 이름 수가 X 의 열 수와 다릅니다")
        if self.S.shape[1] != len(self.protected_names):
            raise ValueError("보호 속성 이름 수가 S 의 열 수와 다릅니다")
        if np.isnan(self.X).any() or np.isnan(self.S).any() or np.isnan(self.y).any():
            raise ValueError("데이터셋에 NaN 이 남아 있습니다")
        return self

    @property
    def n(self) -> int:
        return int(len(self.y))

    def subset(self, index: np.ndarray) -> "Dataset":
        """행 부분집합"""
        return self.model_copy(
            update={"X": self.X[index], "S": self.S[index], "y": self.y[index]}
        )


class TradeoffRecord(BaseModel):
    """ε 스윕 결과 한 행"""

    eps: float = Field(..., description="절충 계수")
    error: float = Field(..., description="예측 오차")
    sp: List[float] = Field(..., description="속성별 SP")
    eop: Optional[List[float]] = Field(default=None, description="속성별 EOP (이진 목표)")
    eo: Optional[List[float]] = Field(default=None, description="속성별 EO (이진 목표)")
    sigma_min: float = Field(..., description="최소 특이값")
    fair_gap: float = Field(..., description="‖P_F − P_M‖")
    pred_gap: float = Field(..., description="‖P_G − P_M‖")
    wall_time_s: float = Field(default=0.0, description="소요 시간(초)")


class ValidationCheck(BaseModel):
    """검증 항목 결과"""

    name: str = Field(..., description="검증 이름")
    passed: bool = Field(..., description="통과 여부")
    measured: float = Field(..., description="측정된 잔차 또는 값")
    tolerance: float = Field(..., description="허용 한계")
    detail: str = Field(default="", description="부가 정보")


class ValidationReport(BaseModel):
    """검증 스위트 결과"""

    seed: int = Field(..., description="난수 시드")
    checks: List[ValidationCheck] = Field(default_factory=list, description="검증 항목")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[ValidationCheck]:
        return [c for c in self.checks if not c.passed]


class CovarianceCheckReport(BaseModel):
    """타원 분포 합성 데이터에서의 공분산 검증 결과"""

    sample_cov_norm: float = Field(..., description="‖표본 Cov(CᵀX, S)‖_max")
    bound: float = Field(..., description="3σ̂/√n")

    @property
    def within_bound(self) -> bool:
        return self.sample_cov_norm <= self.bound


class RateReport(BaseModel):
    """표본 크기에 따른 공분산 수렴률"""

    n_values: List[int] = Field(..., description="표본 크기")
    cov_norms: List[float] = Field(..., description="반복 평균 공분산 노름")
    slope: float = Field(..., description="log–log 기울기")



class DatasetKind(str, Enum):
    """데이터셋 출처"""
    CSV = "csv"
    SYNTHETIC = "synthetic"


class StrictSection(BaseModel):
    """알 수 없는 키를 거부하는 설정 섹션"""

    model_config = ConfigDict(extra="forbid")


class DatasetSection(StrictSection):
    """데이터셋 설정"""

    kind: DatasetKind = Field(default=DatasetKind.SYNTHETIC, description="데이터 출처")
    path: Optional[str] = Field(default=None, description="CSV 경로")
    data_schema: Optional[DatasetSchema] = Field(default=None, alias="schema", description="CSV 스키마")
    n: int = Field(default=2000, description="합성 데이터 샘플 수")
    task: TargetKind = Field(default=TargetKind.CONTINUOUS, description="합성 과제 종류")
    noise: float = Field(default=0.8, description="합성 목표 잡음 표준편차")
    test_fraction: float = Field(default=0.5, description="테스트 비율")

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @model_validator(mode="after")
    def validate_source(self) -> "DatasetSection":
        if self.kind == DatasetKind.CSV and (self.path is None or self.data_schema is None):
            raise ValueError("CSV 데이터셋에는 path 와 schema 가 필요합니다")
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction 은 (0, 1) 범위여야 합니다")
        if self.n < 10:
            raise ValueError("합성 데이터 샘플 수는 10 이상이어야 합니다")
        return self


class KernelSection(StrictSection):
    """커널 설정 (lengthscale 이 없으면 중앙값 휴리스틱)"""

    family: KernelFamily = Field(default=KernelFamily.RBF, description="커널 종류")
    lengthscale: Optional[float] = Field(default=None, description="RBF 길이 척도")
    variance: float = Field(default=1.0, description="커널 분산")


class SubspaceSection(StrictSection):
    """부분공간 추정 설정"""

    m: int = Field(default=5, ge=1, description="보호 속성당 SDR 차원")
    d: Union[int, Literal["auto"]] = Field(default="auto", description="예측 부분공간 차원")
    threshold: float = Field(default=0.01, gt=0, description="최대 τ 대비 차원 선택 임계 비율")
    max_dim: int = Field(default=10, ge=1, description="예측 부분공간 최대 차원")
    eta: float = Field(default=1e-4, gt=0, description="SDR 정규화 계수")
    n_slices: Optional[int] = Field(default=None, ge=1, description="보호 속성 슬라이스 수")
    target_slices: Optional[int] = Field(default=None, ge=1, description="목표 슬라이스 수")
    orth_rtol: float = Field(default=1e-6, gt=0, description="정규직교화 고유값 차단 비율")

    @field_validator("d")
    @classmethod
    def validate_d(cls, v: Union[int, str]) -> Union[int, str]:
        if isinstance(v, int) and v < 1:
            raise ValueError("d 는 1 이상이거나 'auto' 여야 합니다")
        return v


def _check_eps(v: float) -> float:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"ε 은 [0, 1] 범위여야 합니다: {v}")
    return float(v)


class TradeoffSection(StrictSection):
    """절충 계수 설정"""

    eps: Optional[float] = Field(default=None, description="단일 ε")
    eps_grid: Optional[List[float]] = Field(default=None, description="ε 격자")

    @field_validator("eps")
    @classmethod
    def validate_eps(cls, v: Optional[float]) -> Optional[float]:
        return None if v is None else _check_eps(v)

    @field_validator("eps_grid")
    @classmethod
    def validate_grid(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is None:
            return v
        if not v:
            raise ValueError("ε 격자가 비어 있습니다")
        return [_check_eps(e) for e in v]

    def grid(self) -> List[float]:
        """정렬된 중복 없는 ε 목록 (격자가 없으면 단일 ε, 둘 다 없으면 [1.0])"""
        if self.eps_grid:
            return sorted(set(self.eps_grid))
        return [self.single()]

    def single(self) -> float:
        if self.eps is not None:
            return self.eps
        if self.eps_grid:
            return max(self.eps_grid)
        return 1.0


class OutputSection(StrictSection):
    """출력 설정"""

    path: str = Field(default="results", description="출력 디렉터리")
    record_wall_time: bool = Field(default=True, description="절충 표에 소요 시간 기록 여부")
    score_labels: bool = Field(default=False, description="분류 공정성을 레이블로 계산")


class ExperimentConfig(StrictSection):
    """실험 설정 파일"""

    name: str = Field(default="experiment", description="실험 이름")
    dataset: DatasetSection = Field(default_factory=DatasetSection, description="데이터셋")
    kernel: KernelSection = Field(default_factory=KernelSection, description="커널")
    criterion: FairnessCriterion = Field(default=FairnessCriterion.STATISTICAL_PARITY, description="공정성 기준")
    subspace: SubspaceSection = Field(default_factory=SubspaceSection, description="부분공간")
    tradeoff: TradeoffSection = Field(default_factory=TradeoffSection, description="절충 계수")
    fit: FitConfig = Field(default_factory=FitConfig, description="GP 학습")
    seed: int = Field(default=0, ge=0, description="난수 시드")
    output: OutputSection = Field(default_factory=OutputSection, description="출력")
