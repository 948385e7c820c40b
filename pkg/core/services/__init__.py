"""
Services 패키지

상태를 갖지 않는 수치 도메인 서비스들을 정의합니다.
모든 함수는 불변 입력에 대해 순수하며 여러 스레드에서 동시에 호출해도 안전합니다.

- kernel: 커널 평가와 그람 행렬
- sdr: 슬라이스 기반 RKHS 충분 차원 축소
- fair_subspace: 보호 속성 SDR 합집합과 공정 부분공간
- model_subspace: RKHS 정규직교화와 ε 모델 부분공간
- fgp: 공정 가우시안 프로세스
- metrics: 공정성 및 정확도 지표
- preprocessing: 학습/테스트 분할과 표준화
- synthetic: 합성 데이터 생성기
"""
