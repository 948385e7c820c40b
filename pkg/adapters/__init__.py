"""
어댑터 레이어

외부 시스템과의 연결을 담당하는 어댑터들을 포함합니다.
포트/어댑터 패턴을 적용하여 Core 레이어와 분리되어 있습니다.
"""
