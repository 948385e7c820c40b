"""
도메인 예외 정의

Core 레이어에서 발생하는 모든 오류의 계층 구조를 정의합니다.
인자 오류는 ValueError, 수치 계산 실패는 RuntimeError도 함께 상속하여
호출 측에서 표준 예외로도 잡을 수 있도록 합니다.
"""

from typing import Optional


class FairGpError(Exception):
    """라이브러리 최상위 예외"""


class DimensionMismatchError(FairGpError, ValueError):
    """입력 차원이 맞지 않는 경우"""

    def __init__(self, message: str, expected: Optional[int] = None, actual: Optional[int] = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class SdrSolverError(FairGpError, RuntimeError):
    """SDR 일반화 고유값 문제 풀이 실패

    정규화 계수와 조건수 진단 정보를 함께 전달합니다.
    """

    def __init__(self, message: str, eta: float, condition: float):
        super().__init__(f"{message} (eta={eta:g}, 조건수={condition:.3e})")
        self.eta = eta
        self.condition = condition


class EmptyClassError(FairGpError, ValueError):
    """조건부 계산에 필요한 클래스가 비어 있는 경우"""

    def __init__(self, label: int, context: str = ""):
        suffix = f" ({context})" if context else ""
        super().__init__(f"Y={label} 클래스에 해당하는 샘플이 없습니다{suffix}")
        self.label = label


class FairSubspaceEmptyError(FairGpError, RuntimeError):
    """공정성 제약이 가설 공간 전체를 소진한 경우"""

    def __init__(self, n: int, rank: int):
        super().__init__(
            f"공정 부분공간이 비어 있습니다: rank(K̃W)={rank} 가 n={n} 과 같습니다"
        )
        self.n = n
        self.rank = rank


class DegenerateBasisError(FairGpError, ValueError):
    """RKHS 정규직교화에서 남는 방향이 없는 경우"""


class FgpFitError(FairGpError, RuntimeError):
    """공정 GP 하이퍼파라미터 학습 실패"""


class ModelNotFittedError(FairGpError, RuntimeError):
    """학습되지 않은 모델로 예측을 시도한 경우"""


class DatasetError(FairGpError, ValueError):
    """데이터셋 처리 오류"""


class UnknownColumnError(DatasetError):
    """스키마에 있는 열이 CSV 헤더에 없는 경우"""

    def __init__(self, columns: list[str]):
        super().__init__(f"CSV에 존재하지 않는 열입니다: {', '.join(columns)}")
        self.columns = columns


class UnparseableCellError(DatasetError):
    """숫자로 해석할 수 없는 셀이 있는 경우"""

    def __init__(self, column: str, row: int, value: str):
        super().__init__(f"열 '{column}' 의 {row}행 값 '{value}' 을(를) 숫자로 해석할 수 없습니다")
        self.column = column
        self.row = row
        self.value = value


class EmptyDatasetError(DatasetError):
    """결측 행 제거 후 데이터가 남지 않은 경우"""


class SplitError(DatasetError):
    """학습/테스트 분할이 클래스를 비우는 경우"""


class ConfigError(FairGpError, ValueError):
    """실험 설정 파일 파싱 또는 검증 실패"""
