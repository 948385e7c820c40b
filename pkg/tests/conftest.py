"""
공용 pytest 픽스처
"""

import numpy as np
import pytest

from adapters.factory import initialize_adapter_factory
from config.adapters import initialize_config


@pytest.fixture(autouse=True)
def testing_environment(monkeypatch):
    """테스트마다 testing 설정과 새 어댑터 팩토리를 사용합니다."""
    monkeypatch.setenv("FAIRGP_ENVIRONMENT", "testing")
    initialize_config()
    initialize_adapter_factory()
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
