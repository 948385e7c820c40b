"""모델 저장소와 결과 기록 어댑터 테스트"""

import json

import numpy as np
import pandas as pd
import pytest

from adapters.reporting.report_writer import FileReportWriter, tradeoff_columns, tradeoff_frame
from adapters.storage.model_store import ModelStoreError, NpzModelRepository
from core.domain.entities import EvalReport, FgpModel, FitConfig, TradeoffRecord
from core.domain.exceptions import ModelNotFittedError
from core.services import fgp
from core.services.model_subspace import orthonormalize
from tests.helpers import rbf_gram


@pytest.fixture
def fitted_model(rng):
    X = rng.standard_normal((30, 2))
    spec, K = rbf_gram(X)
    E = orthonormalize(K, rng.standard_normal((30, 2))).coeffs
    y = X[:, 0] + 0.1 * rng.standard_normal(30)
    return fgp.fit(spec, X, y, E, FitConfig(linear_mean=True, max_iters=20))


def record(eps: float, binary: bool = False) -> TradeoffRecord:
    return TradeoffRecord(
        eps=eps,
        error=0.3 + eps,
        sp=[0.1 * eps, 0.2],
        eop=[0.05, 0.06] if binary else None,
        eo=[0.07, 0.08] if binary else None,
        sigma_min=0.4,
        fair_gap=0.5,
        pred_gap=0.6,
    )


class TestModelRepository:
    def test_save_and_load_restore_predictions(self, fitted_model, tmp_path, rng):
        repository = NpzModelRepository()
        path = repository.save(fitted_model, tmp_path / "model.npz", {"eps": 0.5, "names": ["a"]})
        model, metadata = repository.load(path)

        assert metadata == {"eps": 0.5, "names": ["a"]}
        assert model.spec == fitted_model.spec
        assert model.lml_trace == fitted_model.lml_trace
        np.testing.assert_array_equal(model.beta, fitted_model.beta)
        Z = rng.standard_normal((7, 2))
        for restored, original in zip(fgp.predict(model, Z), fgp.predict(fitted_model, Z)):
            np.testing.assert_array_equal(restored, original)

    def test_unfitted_model_cannot_be_saved(self, fitted_model, tmp_path):
        bare = FgpModel(
            spec=fitted_model.spec,
            X_train=fitted_model.X_train,
            train_col_means=fitted_model.train_col_means,
            E=fitted_model.E,
            log_lambda=fitted_model.log_lambda,
            log_noise=fitted_model.log_noise,
        )
        with pytest.raises(ModelNotFittedError):
            NpzModelRepository().save(bare, tmp_path / "model.npz", {})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelStoreError):
            NpzModelRepository().load(tmp_path / "absent.npz")

    def test_file_without_header_is_rejected(self, tmp_path):
        path = tmp_path / "other.npz"
        np.savez(path, values=np.arange(3))
        with pytest.raises(ModelStoreError):
            NpzModelRepository().load(path)


class TestReportWriter:
    def test_header_for_binary_target(self):
        assert tradeoff_columns(["s1", "s2"], binary=True) == [
            "eps", "error", "sp_s1", "sp_s2", "eop_s1", "eop_s2", "eo_s1", "eo_s2",
            "sigma_min", "fair_gap", "pred_gap", "wall_time_s",
        ]

    def test_header_for_continuous_target_omits_label_scores(self):
        assert tradeoff_columns(["s1"], binary=False) == [
            "eps", "error", "sp_s1", "sigma_min", "fair_gap", "pred_gap", "wall_time_s",
        ]

    def test_rows_are_sorted_by_eps(self):
        frame = tradeoff_frame([record(1.0), record(0.0), record(0.5)], ["s1", "s2"])
        assert frame["eps"].tolist() == [0.0, 0.5, 1.0]
        assert frame["sp_s1"].tolist() == pytest.approx([0.0, 0.05, 0.1])

    def test_tradeoff_csv(self, tmp_path):
        path = FileReportWriter().write_tradeoff(
            [record(0.5, binary=True), record(0.0, binary=True)], ["s1", "s2"], tmp_path / "t" / "tradeoff.csv"
        )
        frame = pd.read_csv(path)
        assert list(frame.columns) == tradeoff_columns(["s1", "s2"], binary=True)
        assert frame["eop_s2"].tolist() == [0.06, 0.06]
        assert "\r" not in path.read_text(encoding="utf-8")

    def test_report_and_manifest_are_json(self, tmp_path):
        writer = FileReportWriter()
        report = EvalReport(sp=[0.1], error=0.2, error_kind="rmse", n_test=10)
        report_path = writer.write_report(report, tmp_path / "report.json")
        assert EvalReport.model_validate_json(report_path.read_text(encoding="utf-8")) == report

        manifest_path = writer.write_manifest({"seed": 3, "path": tmp_path}, tmp_path / "manifest.json")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        assert manifest == {"path": str(tmp_path), "seed": 3}
