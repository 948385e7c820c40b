"""
실험 설정 파일 로더

TOML 실험 파일을 ExperimentConfig 로 검증하고 CLI 플래그로 일부 값을 덮어씁니다.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from core.domain.entities import ExperimentConfig, FairnessCriterion
from core.domain.exceptions import ConfigError


def _format_validation_error(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        location = ".".join(str(p) for p in err["loc"]) or "(root)"
        parts.append(f"{location}: {err['msg']}")
    return "; ".join(parts)


def parse_experiment_config(data: Dict[str, Any], source: str = "<dict>") -> ExperimentConfig:
    """딕셔너리를 실험 설정으로 검증합니다.

    Raises:
        ConfigError: 검증에 실패한 경우
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"설정 검증 실패 ({source}): {_format_validation_error(e)}") from e


def load_experiment_config(path: Path) -> ExperimentConfig:
    """TOML 실험 파일을 읽습니다.

    상대 경로인 dataset.path 는 설정 파일 위치 기준으로 해석합니다.

    Raises:
        ConfigError: 파일이 없거나 TOML 문법 또는 검증 오류가 있는 경우
    """
    path = Path(path)
    try:
        with path.open("rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"설정 파일을 찾을 수 없습니다: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"설정 파일 파싱 실패 ({path}): {e}") from e

    dataset = data.get("dataset")
    if isinstance(dataset, dict) and isinstance(dataset.get("path"), str):
        csv_path = Path(dataset["path"])
        if not csv_path.is_absolute():
            dataset["path"] = str(path.parent / csv_path)
    return parse_experiment_config(data, source=str(path))


def parse_eps_grid(text: str) -> List[float]:
    """'0,0.5,1' 형식의 ε 목록

    Raises:
        ConfigError: 숫자가 아닌 항목이 있는 경우
    """
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise ConfigError(f"ε 격자를 해석할 수 없습니다: {text}") from e


def apply_overrides(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    out: Optional[Path] = None,
    eps: Optional[float] = None,
    eps_grid: Optional[str] = None,
    criterion: Optional[str] = None,
) -> ExperimentConfig:
    """CLI 플래그로 설정 값을 덮어쓴 새 설정을 반환합니다.

    Raises:
        ConfigError: 덮어쓴 값이 유효하지 않은 경우
    """
    data = config.model_dump(mode="json", by_alias=True)
    if seed is not None:
        data["seed"] = seed
    if out is not None:
        data["output"]["path"] = str(out)
    if eps is not None:
        data["tradeoff"]["eps"] = eps
    if eps_grid is not None:
        data["tradeoff"]["eps_grid"] = parse_eps_grid(eps_grid)
    if criterion is not None:
        try:
            data["criterion"] = FairnessCriterion(criterion.lower()).value
        except ValueError as e:
            raise ConfigError(f"알 수 없는 공정성 기준입니다: {criterion} (sp, eop, eo)") from e
    return parse_experiment_config(data, source="CLI 덮어쓰기")
