"""
검증 CLI 명령어

ValidationUseCase 를 실행해 항목별 측정값과 허용치를 출력합니다.
하나라도 실패하면 종료 코드 1 로 끝납니다.
"""

from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from adapters.factory import get_adapter_factory
from core.domain.entities import ValidationReport

console = Console()
err_console = Console(stderr=True)


def print_validation(report: ValidationReport) -> None:
    table = Table(title=f"수치 검증 (seed={report.seed})")
    table.add_column("검증", style="cyan")
    table.add_column("결과")
    table.add_column("측정값", style="blue")
    table.add_column("허용치", style="dim")
    table.add_column("비고", style="dim")
    for check in report.checks:
        status = "[green]통과[/green]" if check.passed else "[red]실패[/red]"
        table.add_row(check.name, status, f"{check.measured:.3e}", f"{check.tolerance:.3e}", check.detail)
    console.print(table)


def validate_command(
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="난수 시드 (기본값: FAIRGP_DEFAULT_SEED)"),
    corrupt_basis: bool = typer.Option(False, "--corrupt-basis", hidden=True, help="모델 기저를 일부러 망가뜨립니다"),
):
    """공정 부분공간, 모델 부분공간, GP 기울기의 수치 검증을 실행합니다."""
    try:
        factory = get_adapter_factory()
        seed = seed if seed is not None else factory.get_config().get_default_seed()
        report = factory.create_validation_usecase().run(seed, corrupt_basis=corrupt_basis)
    except Exception as e:
        err_console.print(f"[red]오류: {str(e)}[/red]")
        raise typer.Exit(1)

    print_validation(report)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        err_console.print(f"[red]검증 실패: {names}[/red]")
        raise typer.Exit(1)
    console.print("[green]✓ 모든 검증을 통과했습니다[/green]")
