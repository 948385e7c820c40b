"""
Usecases 패키지

서비스들을 엮어 실험 단위의 작업을 수행하는 유즈케이스들을 정의합니다.
각 유즈케이스는 포트를 통해 데이터셋, 모델 저장소, 결과 기록기와 상호작용합니다.

주요 유즈케이스:
- 공정 실험 (단일 ε 학습, ε 스윕, 저장된 모델 평가)
- 수치 검증 (공정 부분공간, 모델 부분공간, GP 기울기)
"""
