"""
포트 인터페이스 정의

클린 아키텍처의 핵심으로, Core 레이어와 외부 어댑터 간의 계약을 정의합니다.
모든 포트는 추상 기본 클래스(ABC)로 정의되어 구현을 강제합니다.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .entities import (
    Dataset,
    DatasetSchema,
    EvalReport,
    FgpModel,
    TradeoffRecord,
)


class DatasetRepositoryPort(ABC):
    """데이터셋 저장소 포트"""

    @abstractmethod
    def load(self, path: Path, schema: DatasetSchema) -> Dataset:
        """CSV 파일을 스키마에 맞춰 읽어 데이터셋으로 변환"""
        pass

    @abstractmethod
    def write(self, dataset: Dataset, path: Path) -> None:
        """데이터셋을 CSV 파일로 기록"""
        pass


class ModelRepositoryPort(ABC):
    """모델 저장소 포트"""

    @abstractmethod
    def save(self, model: FgpModel, path: Path, metadata: Dict[str, Any]) -> Path:
        """모델 덤프 저장"""
        pass

    @abstractmethod
    def load(self, path: Path) -> Tuple[FgpModel, Dict[str, Any]]:
        """모델 덤프와 메타데이터 복원"""
        pass


class ReportWriterPort(ABC):
    """실험 결과 기록 포트"""

    @abstractmethod
    def write_tradeoff(
        self, records: List[TradeoffRecord], protected_names: List[str], path: Path
    ) -> Path:
        """절충 표(CSV) 기록"""
        pass

    @abstractmethod
    def write_report(self, report: EvalReport, path: Path) -> Path:
        """평가 보고서 기록"""
        pass

    @abstractmethod
    def write_manifest(self, manifest: Dict[str, Any], path: Path) -> Path:
        """실행 매니페스트(JSON) 기록"""
        pass


class LoggerPort(ABC):
    """로거 포트"""

    @abstractmethod
    def info(self, message: str, **kwargs: Any) -> None:
        """정보 로그"""
        pass

    @abstractmethod
    def warning(self, message: str, **kwargs: Any) -> None:
        """경고 로그"""
        pass

    @abstractmethod
    def error(self, message: str, **kwargs: Any) -> None:
        """오류 로그"""
        pass

    @abstractmethod
    def debug(self, message: str, **kwargs: Any) -> None:
        """디버그 로그"""
        pass


class NullLogger(LoggerPort):
    """아무것도 기록하지 않는 로거 (서비스 기본값)"""

    def info(self, message: str, **kwargs: Any) -> None:
        pass

    def warning(self, message: str, **kwargs: Any) -> None:
        pass

    def error(self, message: str, **kwargs: Any) -> None:
        pass

    def debug(self, message: str, **kwargs: Any) -> None:
        pass


class ConfigPort(ABC):
    """설정 포트"""

    @abstractmethod
    def get_environment(self) -> str:
        """실행 환경"""
        pass

    @abstractmethod
    def is_debug(self) -> bool:
        """디버그 모드 여부"""
        pass

    @abstractmethod
    def get_log_level(self) -> str:
        """로그 레벨"""
        pass

    @abstractmethod
    def get_log_format(self) -> str:
        """로그 출력 형식 (console 또는 json)"""
        pass

    @abstractmethod
    def get_sweep_workers(self) -> int:
        """ε 스윕 작업자 수"""
        pass

    @abstractmethod
    def get_default_seed(self) -> int:
        """기본 난수 시드"""
        pass


def resolve_logger(logger: Optional[LoggerPort]) -> LoggerPort:
    """선택적 로거 인자를 해석합니다."""
    return logger if logger is not None else NullLogger()
