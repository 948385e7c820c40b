"""
실험 결과 기록 어댑터

ε 스윕 절충 표(CSV), 평가 보고서(JSON), 실행 매니페스트(JSON)를 파일로 씁니다.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from core.domain.entities import EvalReport, TradeoffRecord
from core.domain.ports import LoggerPort, ReportWriterPort, resolve_logger

FLOAT_FORMAT = "%.17g"


def tradeoff_columns(protected_names: List[str], binary: bool) -> List[str]:
    """eps,error,sp_<a>...,eop_<a>...,eo_<a>...,sigma_min,fair_gap,pred_gap,wall_time_s"""
    columns = ["eps", "error"] + [f"sp_{a}" for a in protected_names]
    if binary:
        columns += [f"eop_{a}" for a in protected_names] + [f"eo_{a}" for a in protected_names]
    return columns + ["sigma_min", "fair_gap", "pred_gap", "wall_time_s"]


def tradeoff_frame(records: List[TradeoffRecord], protected_names: List[str]) -> pd.DataFrame:
    """ε 오름차순 절충 표"""
    binary = any(r.eop is not None for r in records)
    rows = []
    for r in sorted(records, key=lambda rec: rec.eps):
        row: Dict[str, float] = {"eps": r.eps, "error": r.error}
        row.update({f"sp_{a}": v for a, v in zip(protected_names, r.sp)})
        if binary:
            row.update({f"eop_{a}": v for a, v in zip(protected_names, r.eop or [])})
            row.update({f"eo_{a}": v for a, v in zip(protected_names, r.eo or [])})
        row.update(
            sigma_min=r.sigma_min, fair_gap=r.fair_gap, pred_gap=r.pred_gap, wall_time_s=r.wall_time_s
        )
        rows.append(row)
    return pd.DataFrame(rows, columns=tradeoff_columns(protected_names, binary))


class FileReportWriter(ReportWriterPort):
    """파일 기반 결과 기록 어댑터"""

    def __init__(self, logger: Optional[LoggerPort] = None):
        self.logger = resolve_logger(logger)

    @staticmethod
    def _prepare(path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_tradeoff(
        self, records: List[TradeoffRecord], protected_names: List[str], path: Path
    ) -> Path:
        path = self._prepare(path)
        frame = tradeoff_frame(records, protected_names)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self.logger.info("절충 표 기록 완료", path=str(path), rows=len(frame))
        return path

    def write_report(self, report: EvalReport, path: Path) -> Path:
        path = self._prepare(path)
        path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        self.logger.info("평가 보고서 기록 완료", path=str(path))
        return path

    def write_manifest(self, manifest: Dict[str, Any], path: Path) -> Path:
        path = self._prepare(path)
        path.write_text(
            json.dumps(manifest, indent=2, ensure_ascii=False, sort_keys=True, default=str) + "\n",
            encoding="utf-8",
        )
        return path
