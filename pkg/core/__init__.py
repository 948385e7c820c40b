"""
Core 패키지

비즈니스 로직과 도메인 규칙을 포함하는 핵심 레이어입니다.
외부 의존성 없이 독립적으로 동작하며, 다음을 포함합니다:

- domain: 도메인 엔티티, 포트, 예외
- services: 커널, SDR, 공정/모델 부분공간, 공정 GP, 평가 지표 등 수치 도메인 서비스
- usecases: 실험 및 검증 유즈케이스
"""
