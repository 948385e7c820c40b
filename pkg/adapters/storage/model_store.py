"""
모델 저장소 어댑터

FgpModel 의 배열과 사후 캐시를 하나의 .npz 파일에 저장합니다.
커널 명세와 실행 메타데이터는 같은 파일에 JSON 문자열로 함께 들어갑니다.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.domain.entities import FgpModel, KernelSpec
from core.domain.exceptions import FairGpError, ModelNotFittedError
from core.domain.ports import LoggerPort, ModelRepositoryPort, resolve_logger

FORMAT_VERSION = 1

_ARRAYS = ("X_train", "train_col_means", "E", "log_lambda", "pi_train", "posterior_factor", "alpha")


class ModelStoreError(FairGpError, ValueError):
    """모델 덤프를 읽을 수 없는 경우"""


class NpzModelRepository(ModelRepositoryPort):
    """npz 모델 저장소 어댑터"""

    def __init__(self, logger: Optional[LoggerPort] = None):
        self.logger = resolve_logger(logger)

    def save(self, model: FgpModel, path: Path, metadata: Dict[str, Any]) -> Path:
        """모델 덤프 저장

        Raises:
            ModelNotFittedError: 사후 캐시가 없는 모델인 경우
        """
        if not model.is_fitted():
            raise ModelNotFittedError("학습되지 않은 모델은 저장할 수 없습니다")
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        header = {
            "format_version": FORMAT_VERSION,
            "spec": model.spec.model_dump(mode="json"),
            "log_noise": model.log_noise,
            "y_offset": model.y_offset,
            "lml_trace": model.lml_trace,
            "metadata": metadata,
        }
        arrays = {name: getattr(model, name) for name in _ARRAYS}
        if model.beta is not None:
            arrays["beta"] = model.beta
        with path.open("wb") as f:
            np.savez(f, header=np.array(json.dumps(header, ensure_ascii=False)), **arrays)
        self.logger.info("모델 저장 완료", path=str(path), d=model.d, n=int(model.X_train.shape[0]))
        return path

    def load(self, path: Path) -> Tuple[FgpModel, Dict[str, Any]]:
        """모델 덤프와 메타데이터 복원

        Raises:
            ModelStoreError: 파일이 없거나 형식이 맞지 않는 경우
        """
        path = Path(path)
        try:
            with np.load(path, allow_pickle=False) as data:
                header = json.loads(str(data["header"]))
                arrays = {name: data[name] for name in _ARRAYS}
                beta = data["beta"] if "beta" in data.files else None
        except FileNotFoundError as e:
            raise ModelStoreError(f"모델 파일을 찾을 수 없습니다: {path}") from e
        except (KeyError, ValueError, OSError) as e:
            raise ModelStoreError(f"모델 파일 형식이 올바르지 않습니다: {path} ({e})") from e

        if header.get("format_version") != FORMAT_VERSION:
            raise ModelStoreError(f"지원하지 않는 모델 형식 버전입니다: {header.get('format_version')}")

        model = FgpModel(
            spec=KernelSpec.model_validate(header["spec"]),
            log_noise=float(header["log_noise"]),
            y_offset=float(header["y_offset"]),
            lml_trace=list(header["lml_trace"]),
            beta=beta,
            **arrays,
        )
        self.logger.info("모델 로드 완료", path=str(path), d=model.d)
        return model, header["metadata"]
