"""
Domain 패키지

도메인 엔티티, 포트, 예외를 정의합니다.
외부 입출력 없이 순수한 도메인 규칙만 포함합니다.

주요 엔티티:
- KernelSpec / KernelMatrix: 커널 함수와 그람 행렬
- SdrResult / FairBasis / ModelBasis: SDR, 공정, 모델 부분공간 기저
- FgpModel: 공정 가우시안 프로세스
- Dataset / DatasetSchema: 실험 데이터
- TradeoffRecord / EvalReport: 평가 결과
"""
