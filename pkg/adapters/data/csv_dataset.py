"""
CSV 데이터셋 어댑터

스키마에 따라 CSV 를 읽어 범주형 특징은 원-핫으로, 범주형 보호 속성은 정수 코드로 인코딩합니다.
사용하는 열에 결측이 있는 행은 제거하고 그 수를 보고합니다.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from core.domain.entities import (
    AttributeKind,
    Dataset,
    DatasetSchema,
    ProtectedColumn,
    TargetKind,
)
from core.domain.exceptions import (
    DatasetError,
    EmptyDatasetError,
    UnknownColumnError,
    UnparseableCellError,
)
from core.domain.ports import DatasetRepositoryPort, LoggerPort, resolve_logger

MISSING_TOKENS = frozenset({"", "na", "nan", "null", "none", "?"})


def _level_key(level: str) -> Tuple[int, float, str]:
    """숫자 수준은 수치 순서로, 나머지는 문자열 순서로"""
    try:
        return (0, float(level), "")
    except ValueError:
        return (1, 0.0, level)


def _sorted_levels(values: pd.Series) -> List[str]:
    return sorted(values.unique().tolist(), key=_level_key)


def _to_numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna()
    if bad.any():
        position = int(np.flatnonzero(bad.to_numpy())[0])
        raise UnparseableCellError(column, int(frame.index[position]) + 2, str(frame[column].iloc[position]))
    return values.to_numpy(dtype=float)


def _encode_target(frame: pd.DataFrame, column: str, kind: TargetKind) -> np.ndarray:
    if kind == TargetKind.CONTINUOUS:
        return _to_numeric(frame, column)
    levels = _sorted_levels(frame[column])
    if len(levels) > 2:
        raise DatasetError(f"이진 목표 열 '{column}' 에 수준이 {len(levels)}개 있습니다: {levels[:5]}")
    if len(levels) == 2 and all(_level_key(v)[0] == 0 for v in levels):
        numeric = sorted(float(v) for v in levels)
        if numeric == [0.0, 1.0]:
            return _to_numeric(frame, column)
    return pd.Categorical(frame[column], categories=levels).codes.astype(float)


def load_csv(
    path: Path, schema: DatasetSchema, logger: Optional[LoggerPort] = None
) -> Dataset:
    """스키마에 맞춰 CSV 를 읽어 인코딩된 데이터셋을 만듭니다 (표준화 전).

    Raises:
        UnknownColumnError: 스키마의 열이 헤더에 없는 경우
        UnparseableCellError: 숫자 열에 해석할 수 없는 값이 있는 경우
        EmptyDatasetError: 결측 행 제거 후 남는 행이 없는 경우
    """
    log = resolve_logger(logger)
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError as e:
        raise DatasetError(f"CSV 파일을 찾을 수 없습니다: {path}") from e
    raw.columns = [c.strip() for c in raw.columns]

    used = schema.used_columns()
    missing_columns = [c for c in used if c not in raw.columns]
    if missing_columns:
        raise UnknownColumnError(missing_columns)

    frame = raw[used].apply(lambda col: col.str.strip())
    is_missing = frame.apply(lambda col: col.str.lower().isin(MISSING_TOKENS))
    keep = ~is_missing.any(axis=1)
    dropped = int((~keep).sum())
    frame = frame[keep]
    if frame.empty:
        raise EmptyDatasetError(f"결측 행 {dropped}개 제거 후 남은 행이 없습니다: {path}")
    if dropped:
        log.warning("결측 값이 있는 행을 제거했습니다", path=str(path), dropped=dropped)

    categorical = set(schema.categorical_feature_columns)
    blocks: List[np.ndarray] = []
    feature_names: List[str] = []
    for column in schema.feature_columns:
        if column in categorical:
            levels = _sorted_levels(frame[column])
            dummies = pd.get_dummies(
                pd.Categorical(frame[column], categories=levels), prefix=column, prefix_sep="=", dtype=float
            )
            blocks.append(dummies.to_numpy())
            feature_names.extend(str(c) for c in dummies.columns)
        else:
            blocks.append(_to_numeric(frame, column)[:, None])
            feature_names.append(column)

    S_columns: List[np.ndarray] = []
    category_levels: Dict[str, List[str]] = {}
    for protected in schema.protected_columns:
        if protected.kind == AttributeKind.CATEGORICAL:
            levels = _sorted_levels(frame[protected.name])
            category_levels[protected.name] = levels
            S_columns.append(pd.Categorical(frame[protected.name], categories=levels).codes.astype(float))
        else:
            S_columns.append(_to_numeric(frame, protected.name))

    y = _encode_target(frame, schema.target_column, schema.target_kind)
    ds = Dataset(
        X=np.hstack(blocks),
        S=np.column_stack(S_columns),
        y=y,
        feature_names=feature_names,
        protected_names=schema.protected_names,
        protected_kinds=[c.kind for c in schema.protected_columns],
        target_name=schema.target_column,
        target_kind=schema.target_kind,
        dropped_rows=dropped,
        category_levels=category_levels,
    )
    log.info("CSV 로드 완료", path=str(path), rows=ds.n, features=len(feature_names), dropped=dropped)
    return ds


def write_csv(ds: Dataset, path: Path) -> Path:
    """인코딩된 데이터셋을 CSV 로 기록합니다 (특징, 보호 속성, 목표 순서)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(ds.X, columns=ds.feature_names)
    for j, name in enumerate(ds.protected_names):
        frame[name] = ds.S[:, j]
    frame[ds.target_name] = ds.y
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def schema_for(ds: Dataset) -> DatasetSchema:
    """write_csv 결과를 다시 읽기 위한 스키마 (인코딩된 특징은 모두 숫자 열)"""
    return DatasetSchema(
        target_column=ds.target_name,
        target_kind=ds.target_kind,
        protected_columns=[
            ProtectedColumn(name=name, kind=kind) for name, kind in zip(ds.protected_names, ds.protected_kinds)
        ],
        feature_columns=list(ds.feature_names),
    )


class CsvDatasetRepository(DatasetRepositoryPort):
    """CSV 데이터셋 저장소 어댑터"""

    def __init__(self, logger: Optional[LoggerPort] = None):
        self.logger = resolve_logger(logger)

    def load(self, path: Path, schema: DatasetSchema) -> Dataset:
        return load_csv(path, schema, logger=self.logger)

    def write(self, dataset: Dataset, path: Path) -> None:
        write_csv(dataset, path)
        self.logger.info("CSV 기록 완료", path=str(path), rows=dataset.n)
