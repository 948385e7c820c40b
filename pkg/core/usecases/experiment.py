"""
공정 실험 유즈케이스

그람 행렬 → 보호 속성 SDR 합집합 → 공정 영공간 → 목표 SDR → 정규직교화 → 모델 부분공간 → FGP 학습
으로 이어지는 전체 파이프라인을 구성하고, 단일 학습, ε 스윕, 저장된 모델 평가를 제공합니다.
"""

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..domain.entities import (
    DatasetKind,
    Dataset,
    EvalReport,
    ExperimentConfig,
    FairBasis,
    FgpModel,
    KernelMatrix,
    KernelSpec,
    OrthonormalBasis,
    Preprocessing,
    SdrResult,
    TargetKind,
    TradeoffRecord,
)
from ..domain.ports import (
    DatasetRepositoryPort,
    LoggerPort,
    ModelRepositoryPort,
    ReportWriterPort,
)
from ..services import fgp
from ..services.fair_subspace import fair_nullspace, protected_sdr_union
from ..services.kernel import gram, median_lengthscale
from ..services.metrics import evaluate
from ..services.model_subspace import model_basis, orthonormalize, projection_gaps
from ..services.preprocessing import split, standardize
from ..services.sdr import default_slice_count, relative_threshold, sdr_subspace, select_dimension
from ..services.synthetic import planted_dataset

ORTHOGONALITY_TOL = 1e-8

_VERSIONED_PACKAGES = ("numpy", "scipy", "scikit-learn", "pandas", "pydantic", "fair-subspace-gp")


class PreparedSubspaces(BaseModel):
    """ε 와 무관하게 공유되는 계산 결과 (읽기 전용으로 공유)"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: KernelSpec
    K: KernelMatrix
    fair: Optional[FairBasis]
    Ffair: Optional[OrthonormalBasis]
    target_sdr: SdrResult
    Gpred: OrthonormalBasis
    d: int


class RunOutcome(BaseModel):
    """단일 ε 실행 결과"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    record: TradeoffRecord
    model: FgpModel
    report: EvalReport


def config_hash(config: ExperimentConfig) -> str:
    """설정의 SHA-256 해시"""
    return hashlib.sha256(config.model_dump_json(by_alias=True).encode("utf-8")).hexdigest()


def package_versions() -> Dict[str, str]:
    versions = {}
    for name in _VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class FairExperimentUseCase:
    """공정 실험 유즈케이스"""

    def __init__(
        self,
        dataset_repository: DatasetRepositoryPort,
        model_repository: ModelRepositoryPort,
        report_writer: ReportWriterPort,
        logger: LoggerPort,
        workers: int = 1,
    ):
        self.dataset_repository = dataset_repository
        self.model_repository = model_repository
        self.report_writer = report_writer
        self.logger = logger
        self.workers = max(1, workers)

    def load_data(self, config: ExperimentConfig) -> Tuple[Dataset, Dataset]:
        """데이터셋을 읽거나 생성한 뒤 학습/테스트로 분할합니다."""
        section = config.dataset
        if section.kind == DatasetKind.CSV:
            assert section.path is not None and section.data_schema is not None
            ds = self.dataset_repository.load(Path(section.path), section.data_schema)
            if ds.dropped_rows:
                self.logger.warning(f"결측 행 {ds.dropped_rows}개를 제거했습니다", path=section.path)
        else:
            ds = planted_dataset(section.n, config.seed, task=section.task, noise=section.noise)
        train, test = split(ds, section.test_fraction, config.seed)
        self.logger.info("데이터 분할 완료", train=train.n, test=test.n, features=train.X.shape[1])
        return train, test

    def _kernel_spec(self, config: ExperimentConfig, train: Dataset) -> KernelSpec:
        section = config.kernel
        lengthscale = section.lengthscale or median_lengthscale(train.X, seed=config.seed)
        return KernelSpec(family=section.family, lengthscale=lengthscale, variance=section.variance)

    def _predictive_subspace(
        self, config: ExperimentConfig, train: Dataset, K: KernelMatrix, max_allowed: int
    ) -> Tuple[SdrResult, OrthonormalBasis, int]:
        sub = config.subspace
        H_y = sub.target_slices or default_slice_count(train.y, train.target_kind == TargetKind.BINARY)
        H_y = min(H_y, train.n)
        max_dim = max(1, min(sub.max_dim, max_allowed, train.n))
        target_sdr = sdr_subspace(K, train.y, max_dim, H_y, eta=sub.eta, logger=self.logger)
        if sub.d == "auto":
            d = select_dimension(
                target_sdr.tau, target_sdr.m, relative_threshold(target_sdr.tau, sub.threshold)
            )
        else:
            d = min(int(sub.d), target_sdr.m)
        Gpred = orthonormalize(K, target_sdr.W[:, :d], rtol=sub.orth_rtol, logger=self.logger)
        self.logger.info("예측 부분공간 추정 완료", d=Gpred.dim, tau_max=float(target_sdr.tau[0]))
        return target_sdr, Gpred, Gpred.dim

    def prepare(self, config: ExperimentConfig, train: Dataset, fairness: bool = True) -> PreparedSubspaces:
        """ε 와 무관한 부분공간들을 계산합니다.

        Args:
            config: 실험 설정
            train: 표준화된 학습 데이터
            fairness: False 이면 공정 부분공간을 계산하지 않습니다 (일반 GP 비교용)

        Returns:
            공유 가능한 부분공간 묶음
        """
        spec = self._kernel_spec(config, train)
        K = gram(spec, train.X)
        self.logger.info("그람 행렬 계산 완료", n=K.n, family=spec.family.value, lengthscale=spec.lengthscale)

        fair: Optional[FairBasis] = None
        Ffair: Optional[OrthonormalBasis] = None
        max_allowed = train.n
        if fairness:
            sub = config.subspace
            W = protected_sdr_union(
                K,
                train.y if config.criterion.requires_labels() else None,
                train.S,
                config.criterion,
                sub.m,
                H=sub.n_slices,
                eta=sub.eta,
                kinds=train.protected_kinds,
                max_workers=self.workers,
                logger=self.logger,
            )
            fair = fair_nullspace(K, W, logger=self.logger)
            if fair.residual > ORTHOGONALITY_TOL:
                self.logger.warning("공정 부분공간 직교성 잔차가 허용치를 넘었습니다", residual=fair.residual)
            Ffair = orthonormalize(K, fair.Q, rtol=sub.orth_rtol, logger=self.logger)
            max_allowed = Ffair.dim

        target_sdr, Gpred, d = self._predictive_subspace(config, train, K, max_allowed)
        return PreparedSubspaces(
            spec=spec, K=K, fair=fair, Ffair=Ffair, target_sdr=target_sdr, Gpred=Gpred, d=d
        )

    def run_eps(
        self,
        config: ExperimentConfig,
        prepared: PreparedSubspaces,
        train: Dataset,
        test: Dataset,
        eps: float,
    ) -> RunOutcome:
        """공유 부분공간 위에서 하나의 ε 에 대해 모델을 학습하고 평가합니다."""
        started = time.perf_counter()
        if prepared.Ffair is None:
            raise ValueError("공정 부분공간 없이 ε 실행을 할 수 없습니다")
        basis = model_basis(prepared.K, prepared.Ffair, prepared.Gpred, eps, logger=self.logger)
        model = fgp.fit(prepared.spec, train.X, train.y, basis.E, config.fit, logger=self.logger)
        report = self._score(config, model, test)
        gaps = projection_gaps(basis.sigma_min, eps)
        elapsed = time.perf_counter() - started
        record = TradeoffRecord(
            eps=eps,
            error=report.error,
            sp=report.sp,
            eop=report.eop,
            eo=report.eo,
            sigma_min=basis.sigma_min,
            fair_gap=gaps.fair_gap,
            pred_gap=gaps.pred_gap,
            wall_time_s=elapsed if config.output.record_wall_time else 0.0,
        )
        self.logger.info(
            "ε 실행 완료", eps=eps, error=report.error, sp=report.sp, fair_gap=gaps.fair_gap
        )
        return RunOutcome(record=record, model=model, report=report)

    def _score(self, config: ExperimentConfig, model: FgpModel, test: Dataset) -> EvalReport:
        mean, var = fgp.predict(model, test.X, logger=self.logger)
        return evaluate(
            mean,
            test.y,
            test.S,
            test.target_kind,
            protected_names=test.protected_names,
            score_labels=config.output.score_labels,
        )

    def _model_metadata(self, config: ExperimentConfig, train: Dataset, eps: float) -> Dict[str, Any]:
        prep = train.preprocessing
        return {
            "config": config.model_dump(mode="json", by_alias=True),
            "eps": eps,
            "feature_names": train.feature_names,
            "protected_names": train.protected_names,
            "protected_kinds": [k.value for k in train.protected_kinds],
            "target_name": train.target_name,
            "target_kind": train.target_kind.value,
            "category_levels": train.category_levels,
            "feature_means": prep.feature_means.tolist() if prep is not None else None,
            "feature_stds": prep.feature_stds.tolist() if prep is not None else None,
        }

    def _manifest(self, config: ExperimentConfig, timings: Dict[str, float], extra: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "name": config.name,
            "config_hash": config_hash(config),
            "seed": config.seed,
            "versions": package_versions(),
            "timings_s": timings,
            **extra,
        }

    def train(self, config: ExperimentConfig) -> RunOutcome:
        """단일 ε 으로 학습하고 모델 덤프, 평가 보고서, 매니페스트를 기록합니다."""
        eps = config.tradeoff.single()
        self.logger.info(f"학습 시작: {config.name}", eps=eps, criterion=config.criterion.value)
        t0 = time.perf_counter()
        train, test = self.load_data(config)
        t1 = time.perf_counter()
        prepared = self.prepare(config, train)
        t2 = time.perf_counter()
        outcome = self.run_eps(config, prepared, train, test, eps)
        t3 = time.perf_counter()

        out_dir = Path(config.output.path)
        model_path = self.model_repository.save(
            outcome.model, out_dir / "model.npz", self._model_metadata(config, train, eps)
        )
        report_path = self.report_writer.write_report(outcome.report, out_dir / "report.json")
        self.report_writer.write_manifest(
            self._manifest(
                config,
                {"data": t1 - t0, "subspaces": t2 - t1, "fit": t3 - t2},
                {"command": "train", "eps": eps, "model": str(model_path), "report": str(report_path)},
            ),
            out_dir / "manifest.json",
        )
        self.logger.info("학습 완료", model=str(model_path), error=outcome.report.error)
        return outcome

    def sweep(self, config: ExperimentConfig) -> List[TradeoffRecord]:
        """ε 격자 전체를 실행해 절충 표를 기록합니다.

        ε 와 무관한 부분공간은 한 번만 계산해 작업자들이 공유하며,
        결과는 완료 순서와 무관하게 ε 오름차순으로 기록됩니다.
        """
        grid = config.tradeoff.grid()
        self.logger.info(f"스윕 시작: {config.name}", grid=grid, workers=self.workers)
        t0 = time.perf_counter()
        train, test = self.load_data(config)
        prepared = self.prepare(config, train)
        t1 = time.perf_counter()

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            outcomes = list(pool.map(lambda e: self.run_eps(config, prepared, train, test, e), grid))
        records = [o.record for o in outcomes]
        t2 = time.perf_counter()

        out_dir = Path(config.output.path)
        csv_path = self.report_writer.write_tradeoff(records, train.protected_names, out_dir / "tradeoff.csv")
        self.report_writer.write_manifest(
            self._manifest(
                config,
                {"prepare": t1 - t0, "sweep": t2 - t1},
                {"command": "sweep", "grid": grid, "table": str(csv_path)},
            ),
            out_dir / "manifest.json",
        )
        self.logger.info("스윕 완료", rows=len(records), table=str(csv_path))
        return records

    def train_plain(self, config: ExperimentConfig) -> RunOutcome:
        """공정성을 끈 동일 파이프라인: span(G) 위의 일반 GP"""
        train, test = self.load_data(config)
        prepared = self.prepare(config, train, fairness=False)
        model = fgp.fit(prepared.spec, train.X, train.y, prepared.Gpred.coeffs, config.fit, logger=self.logger)
        report = self._score(config, model, test)
        record = TradeoffRecord(
            eps=0.0,
            error=report.error,
            sp=report.sp,
            eop=report.eop,
            eo=report.eo,
            sigma_min=0.0,
            fair_gap=0.0,
            pred_gap=0.0,
        )
        return RunOutcome(record=record, model=model, report=report)

    @staticmethod
    def _align_features(ds: Dataset, names: List[str]) -> Dataset:
        """평가 데이터의 원-핫 열을 학습 시 특징 순서에 맞춥니다 (없는 수준은 0)."""
        if ds.feature_names == names:
            return ds
        unknown = sorted(set(ds.feature_names) - set(names))
        if unknown:
            raise ValueError(f"학습 데이터에 없는 특징 수준입니다: {', '.join(unknown)}")
        position = {name: j for j, name in enumerate(ds.feature_names)}
        X = np.column_stack(
            [ds.X[:, position[name]] if name in position else np.zeros(ds.n) for name in names]
        )
        return ds.model_copy(update={"X": X, "feature_names": list(names)})

    def evaluate_dump(self, model_path: Path, data_path: Path) -> EvalReport:
        """저장된 모델을 원 단위 CSV 로 평가합니다.

        모델과 함께 저장된 스키마와 표준화 통계를 사용합니다.
        """
        model, meta = self.model_repository.load(model_path)
        config = ExperimentConfig.model_validate(meta["config"])
        schema = config.dataset.data_schema
        if schema is None:
            raise ValueError("CSV 스키마 없이 학습된 모델은 CSV 로 평가할 수 없습니다")
        ds = self._align_features(self.dataset_repository.load(data_path, schema), meta["feature_names"])
        if meta.get("feature_means") is not None:
            ds = standardize(
                ds,
                Preprocessing(
                    feature_means=np.asarray(meta["feature_means"]),
                    feature_stds=np.asarray(meta["feature_stds"]),
                ),
            )
        report = self._score(config, model, ds)
        self.logger.info("저장된 모델 평가 완료", model=str(model_path), n=ds.n, error=report.error)
        return report
