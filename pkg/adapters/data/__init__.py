"""
데이터 어댑터

CSV 데이터셋 읽기/쓰기를 담당합니다.
"""
