#!/usr/bin/env python3
"""
노이즈 강화 양자 가설 검정 - 예외 정의

모든 예외는 QHTError를 상속하며, CLI는 예외 종류에 따라 종료 코드를 결정합니다.
"""

from typing import List, Optional


class QHTError(Exception):
    """패키지 공통 예외"""
    pass


class InvalidArgumentError(QHTError, ValueError):
    """잘못된 인자 (차원 불일치, 비에르미트 행렬, 잘못된 사전확률 등)"""
    pass


class DegenerateAxisError(QHTError):
    """전체 자기장이 0이어서 축을 정의할 수 없음"""
    pass


class UnphysicalNoiseError(QHTError, ValueError):
    """물리적으로 불가능한 노이즈 (T2 > 2·T1)"""
    pass


class DegenerateHypothesesError(QHTError):
    """H1 - H0의 최대/최소 고유값이 축퇴됨"""
    pass


class NumericalFailureError(QHTError):
    """수치 계산 실패 (양정치성 위반 등)"""

    def __init__(
        self,
        message: str,
        min_eigenvalue: Optional[float] = None,
        t: Optional[float] = None
    ):
        """
        Args:
            message: 오류 메시지
            min_eigenvalue: 위반이 발생한 밀도 행렬의 최소 고유값
            t: 위반이 발생한 시간(초)
        """
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.t = t


class ConfigError(QHTError):
    """설정 검증 실패 - 발견된 모든 위반 사항을 담습니다"""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
