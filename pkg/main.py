"""
커널 공정 부분공간 및 공정 가우시안 프로세스

메인 진입점 파일입니다.
"""

from importlib import metadata

import typer
from rich.console import Console

from adapters.cli.experiment_commands import eval_command, sweep_command, train_command
from adapters.cli.validate_commands import validate_command
from config.adapters import get_config

# 메인 CLI 앱
app = typer.Typer(
    name="fairgp",
    help="커널 공정 부분공간과 ε 절충 공정 가우시안 프로세스 실험 도구",
    no_args_is_help=True,
)

app.command("train")(train_command)
app.command("sweep")(sweep_command)
app.command("eval")(eval_command)
app.command("validate")(validate_command)

console = Console()


@app.command("version")
def show_version():
    """버전 정보를 표시합니다."""
    try:
        version = metadata.version("fair-subspace-gp")
    except metadata.PackageNotFoundError:
        version = "개발 버전"
    console.print("[bold]커널 공정 부분공간 / 공정 GP[/bold]")
    console.print(f"버전: {version}")


@app.command("config")
def show_config():
    """현재 런타임 설정을 표시합니다."""
    try:
        config = get_config()

        console.print("[bold]현재 설정[/bold]")
        console.print(f"환경: {config.get_environment()}")
        console.print(f"디버그 모드: {config.is_debug()}")
        console.print(f"로그 레벨: {config.get_log_level()}")
        console.print(f"로그 형식: {config.get_log_format()}")
        console.print(f"스윕 작업자 수: {config.get_sweep_workers()}")
        console.print(f"기본 시드: {config.get_default_seed()}")

    except Exception as e:
        console.print(f"[red]오류: {str(e)}[/red]")
        raise typer.Exit(1)


if __name__ == "__main__":
    app()
