"""
Config 패키지

설정 관리를 위한 포트/어댑터 패턴 구현
- 런타임 설정: pydantic-settings 기반, FAIRGP_ 환경 변수와 .env
- 실험 설정: TOML 파일을 ExperimentConfig 로 검증
- Factory: 환경별 설정 클래스 자동 선택
"""
