"""모델 덤프 저장소"""
