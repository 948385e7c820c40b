"""
실험 CLI 명령어

FairExperimentUseCase 를 train / sweep / eval 명령으로 노출하는 어댑터입니다.
결과 표는 표준 출력으로, 오류는 표준 오류로 출력합니다.
"""

from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from adapters.factory import get_adapter_factory
from config.experiment import apply_overrides, load_experiment_config
from core.domain.entities import EvalReport, ExperimentConfig, TradeoffRecord
from core.domain.exceptions import ConfigError

console = Console()
err_console = Console(stderr=True)

CONFIG_OPTION = typer.Option(..., "--config", "-c", help="TOML 실험 설정 파일")
SEED_OPTION = typer.Option(None, "--seed", min=0, help="난수 시드 (설정 파일 값 덮어쓰기)")
OUT_OPTION = typer.Option(None, "--out", help="출력 디렉터리 (설정 파일 값 덮어쓰기)")
CRITERION_OPTION = typer.Option(None, "--criterion", help="공정성 기준 (sp, eop, eo)")


def load_config_or_exit(
    path: Path,
    seed: Optional[int] = None,
    out: Optional[Path] = None,
    eps: Optional[float] = None,
    eps_grid: Optional[str] = None,
    criterion: Optional[str] = None,
) -> ExperimentConfig:
    """설정을 읽고 덮어씁니다. 설정 오류는 종료 코드 2 로 끝냅니다."""
    try:
        config = load_experiment_config(path)
        return apply_overrides(config, seed=seed, out=out, eps=eps, eps_grid=eps_grid, criterion=criterion)
    except ConfigError as e:
        err_console.print(f"[red]설정 오류: {str(e)}[/red]")
        raise typer.Exit(2)


def _fmt(values: Optional[List[float]]) -> str:
    return ", ".join(f"{v:.4f}" for v in values) if values else "-"


def print_report(report: EvalReport, title: str) -> None:
    table = Table(title=title)
    table.add_column("항목", style="cyan")
    table.add_column("값", style="green")
    table.add_row(report.error_kind, f"{report.error:.6f}")
    table.add_row("SP", _fmt(report.sp))
    table.add_row("EOP", _fmt(report.eop))
    table.add_row("EO", _fmt(report.eo))
    table.add_row("테스트 샘플 수", str(report.n_test))
    if report.degenerate:
        table.add_row("퇴화 점수", ", ".join(report.degenerate))
    console.print(table)


def print_tradeoff(records: List[TradeoffRecord]) -> None:
    table = Table(title="ε 절충 결과")
    for column, style in (("ε", "cyan"), ("오차", "green"), ("SP", "magenta"), ("σ_min", "blue"), ("‖P_F−P_M‖", "yellow"), ("‖P_G−P_M‖", "yellow")):
        table.add_column(column, style=style)
    for r in records:
        table.add_row(
            f"{r.eps:.3f}",
            f"{r.error:.4f}",
            _fmt(r.sp),
            f"{r.sigma_min:.4f}",
            f"{r.fair_gap:.4f}",
            f"{r.pred_gap:.4f}",
        )
    console.print(table)


def train_command(
    config_path: Path = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    eps: Optional[float] = typer.Option(None, "--eps", help="절충 계수 ε (설정 파일 값 덮어쓰기)"),
    criterion: Optional[str] = CRITERION_OPTION,
):
    """하나의 ε 으로 공정 GP 를 학습하고 모델과 평가 보고서를 저장합니다."""
    config = load_config_or_exit(config_path, seed=seed, out=out, eps=eps, criterion=criterion)
    try:
        usecase = get_adapter_factory().create_experiment_usecase()
        outcome = usecase.train(config)
    except Exception as e:
        err_console.print(f"[red]오류: {str(e)}[/red]")
        raise typer.Exit(1)

    print_report(outcome.report, f"평가 결과 (ε={outcome.record.eps:g})")
    console.print(f"[green]✓ 모델과 보고서를 저장했습니다: {config.output.path}[/green]")


def sweep_command(
    config_path: Path = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    eps_grid: Optional[str] = typer.Option(None, "--eps-grid", help="쉼표로 구분한 ε 목록 (예: 0,0.5,1)"),
    criterion: Optional[str] = CRITERION_OPTION,
):
    """ε 격자 전체에 대해 학습하고 절충 표(CSV)를 기록합니다."""
    config = load_config_or_exit(config_path, seed=seed, out=out, eps_grid=eps_grid, criterion=criterion)
    try:
        usecase = get_adapter_factory().create_experiment_usecase()
        records = usecase.sweep(config)
    except Exception as e:
        err_console.print(f"[red]오류: {str(e)}[/red]")
        raise typer.Exit(1)

    print_tradeoff(records)
    console.print(f"[green]✓ 절충 표를 기록했습니다: {Path(config.output.path) / 'tradeoff.csv'}[/green]")


def eval_command(
    model_path: Path = typer.Option(..., "--model", "-m", help="저장된 모델 덤프 (.npz)"),
    data_path: Path = typer.Option(..., "--data", "-d", help="평가할 CSV 파일"),
    out: Optional[Path] = typer.Option(None, "--out", help="평가 보고서(JSON) 저장 경로"),
):
    """저장된 모델을 CSV 데이터로 평가합니다."""
    try:
        factory = get_adapter_factory()
        report = factory.create_experiment_usecase().evaluate_dump(model_path, data_path)
        if out is not None:
            factory.create_report_writer().write_report(report, out)
    except Exception as e:
        err_console.print(f"[red]오류: {str(e)}[/red]")
        raise typer.Exit(1)

    print_report(report, f"평가 결과 ({data_path.name})")
