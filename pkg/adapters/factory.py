"""
어댑터 팩토리

모든 어댑터들을 생성하고 의존성을 주입하는 팩토리 클래스입니다.
클린 아키텍처의 의존성 역전 원칙을 구현합니다.
"""

from typing import Optional

from config.adapters import get_config
from core.domain.ports import (
    ConfigPort,
    DatasetRepositoryPort,
    LoggerPort,
    ModelRepositoryPort,
    ReportWriterPort,
)
from core.usecases.experiment import FairExperimentUseCase
from core.usecases.validation import ValidationUseCase

from .data.csv_dataset import CsvDatasetRepository
from .logger import LoggerAdapter
from .reporting.report_writer import FileReportWriter
from .storage.model_store import NpzModelRepository


class AdapterFactory:
    """어댑터 팩토리"""

    def __init__(self, config: Optional[ConfigPort] = None):
        self.config = config or get_config()
        self._logger: Optional[LoggerPort] = None
        self._dataset_repository: Optional[DatasetRepositoryPort] = None
        self._model_repository: Optional[ModelRepositoryPort] = None
        self._report_writer: Optional[ReportWriterPort] = None

    def create_logger(self) -> LoggerPort:
        """로거 어댑터를 생성합니다."""
        if self._logger is None:
            self._logger = LoggerAdapter(
                name="fairgp",
                level=self.config.get_log_level(),
                log_format=self.config.get_log_format(),
            )
        return self._logger

    def create_dataset_repository(self) -> DatasetRepositoryPort:
        """CSV 데이터셋 저장소를 생성합니다."""
        if self._dataset_repository is None:
            self._dataset_repository = CsvDatasetRepository(logger=self.create_logger())
        return self._dataset_repository

    def create_model_repository(self) -> ModelRepositoryPort:
        """모델 저장소를 생성합니다."""
        if self._model_repository is None:
            self._model_repository = NpzModelRepository(logger=self.create_logger())
        return self._model_repository

    def create_report_writer(self) -> ReportWriterPort:
        """결과 기록기를 생성합니다."""
        if self._report_writer is None:
            self._report_writer = FileReportWriter(logger=self.create_logger())
        return self._report_writer

    def create_experiment_usecase(self) -> FairExperimentUseCase:
        """공정 실험 유즈케이스를 생성합니다."""
        return FairExperimentUseCase(
            dataset_repository=self.create_dataset_repository(),
            model_repository=self.create_model_repository(),
            report_writer=self.create_report_writer(),
            logger=self.create_logger(),
            workers=self.config.get_sweep_workers(),
        )

    def create_validation_usecase(self) -> ValidationUseCase:
        """검증 유즈케이스를 생성합니다."""
        return ValidationUseCase(logger=self.create_logger())

    def get_config(self) -> ConfigPort:
        """설정 객체를 반환합니다."""
        return self.config


# 전역 팩토리 인스턴스
_factory: Optional[AdapterFactory] = None


def get_adapter_factory() -> AdapterFactory:
    """전역 어댑터 팩토리 인스턴스를 반환합니다."""
    global _factory
    if _factory is None:
        _factory = AdapterFactory()
    return _factory


def initialize_adapter_factory(config: Optional[ConfigPort] = None) -> AdapterFactory:
    """어댑터 팩토리를 초기화합니다."""
    global _factory
    _factory = AdapterFactory(config)
    return _factory
