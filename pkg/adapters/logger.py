"""
로거 어댑터

Core 레이어의 LoggerPort를 구현하는 structlog 기반 어댑터입니다.
표준 출력은 CLI 표와 CSV 를 위해 비워 두고 모든 로그는 표준 오류로 보냅니다.
"""

import logging
import sys
from typing import Any

import structlog

from core.domain.ports import LoggerPort

_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


def _renderer(log_format: str) -> Any:
    if log_format.lower() == "json":
        return structlog.processors.JSONRenderer(ensure_ascii=False)
    return structlog.dev.ConsoleRenderer(colors=False)


class LoggerAdapter(LoggerPort):
    """structlog 을 사용하는 로거 어댑터"""

    def __init__(self, name: str = "fairgp", level: str = "INFO", log_format: str = "console"):
        self.name = name
        self.level = level.upper()
        self.logger = structlog.wrap_logger(
            structlog.PrintLogger(file=sys.stderr),
            processors=[
                structlog.processors.add_log_level,
                structlog.processors.TimeStamper(fmt="iso"),
                _renderer(log_format),
            ],
            wrapper_class=structlog.make_filtering_bound_logger(_LEVELS.get(self.level, logging.INFO)),
            cache_logger_on_first_use=True,
        ).bind(logger=name)

    def info(self, message: str, **kwargs: Any) -> None:
        """정보 로그"""
        self.logger.info(message, **kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        """경고 로그"""
        self.logger.warning(message, **kwargs)

    def error(self, message: str, **kwargs: Any) -> None:
        """오류 로그"""
        self.logger.error(message, **kwargs)

    def debug(self, message: str, **kwargs: Any) -> None:
        """디버그 로그"""
        self.logger.debug(message, **kwargs)


def create_logger(name: str = "fairgp", level: str = "INFO", log_format: str = "console") -> LoggerPort:
    """로거 인스턴스를 생성합니다."""
    return LoggerAdapter(name, level, log_format)
