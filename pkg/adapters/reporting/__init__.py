"""
결과 기록 어댑터
"""
