"""
CLI 어댑터

Typer를 사용한 명령행 인터페이스 어댑터들을 포함합니다.
Core 레이어의 유즈케이스를 train / sweep / eval / validate 명령으로 노출합니다.
"""
