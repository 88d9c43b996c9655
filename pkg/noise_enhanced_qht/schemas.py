#!/usr/bin/env python3
"""
데이터 모델 정의

자기장/노이즈/프로브/적분기 설정, 시나리오, 분석 보고서를 pydantic 모델로 정의합니다.
배열을 담는 계산 결과(밀도 행렬, 시계열 등)는 각 모듈의 dataclass를 사용합니다.
"""

import hashlib
import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

GYROMAGNETIC_RATIO_PROTON = 2.6752218744e8  # rad/s/T
PRIOR_TOL = 1e-12


# --------- 물리 설정 ---------

class FieldSpec(BaseModel):
    """xz 평면 자기장 - 방향 n = (cosθ, 0, sinθ)"""
    model_config = ConfigDict(frozen=True)

    magnitude_nT: float = Field(ge=0)
    theta_deg: float = Field(ge=-180, le=180)

    @property
    def direction(self) -> np.ndarray:
        theta = math.radians(self.theta_deg)
        return np.array([math.cos(theta), 0.0, math.sin(theta)])


class AxisBinding(str, Enum):
    """노이즈 축 결합 방식"""
    HAMILTONIAN_LOCKED = "hamiltonian_locked"  # 각 가설의 전체 자기장 방향을 따름
    FIXED_AXIS = "fixed_axis"                  # 두 가설이 같은 축을 공유


class NoiseSpec(BaseModel):
    """
    노이즈 설정

    kappa1: 디페이징 비율(1/s), kappa2: 감쇠 비율(1/s),
    p_ground: 정상 상태의 바닥 상태 점유율
    """
    model_config = ConfigDict(frozen=True)

    kappa1: float = Field(0.0, ge=0)
    kappa2: float = Field(0.0, ge=0)
    p_ground: float = Field(0.5, ge=0, le=1)
    axis_binding: AxisBinding = AxisBinding.HAMILTONIAN_LOCKED
    fixed_axis_theta_deg: float = Field(90.0, ge=-180, le=180)

    @property
    def is_silent(self) -> bool:
        return self.kappa1 == 0 and self.kappa2 == 0


class ProbeKind(str, Enum):
    """프로브 상태 종류"""
    KET0 = "ket0"
    ALONG_X = "along_x"
    OPTIMAL_SUPERPOSITION = "optimal_superposition"
    BLOCH = "bloch"
    THERMAL = "thermal"


class ProbeSpec(BaseModel):
    """프로브 상태 설정 (bloch: 극각/방위각, thermal: 편극 epsilon)"""
    model_config = ConfigDict(frozen=True)

    kind: ProbeKind = ProbeKind.KET0
    theta_deg: float = 0.0
    phi_deg: float = 0.0
    epsilon: float = Field(1.0, ge=0, le=1)


class PropagationMethod(str, Enum):
    SUPEROP_EXACT = "superop_exact"
    RK4 = "rk4"


class PropagationSettings(BaseModel):
    """시간 전개 설정"""
    model_config = ConfigDict(frozen=True)

    method: PropagationMethod = PropagationMethod.SUPEROP_EXACT
    dt_max: float = Field(0.01, gt=0)
    richardson_check: bool = False


# --------- 시나리오 ---------

class Scenario(BaseModel):
    """두 가설, 노이즈, 프로브, 시간 격자를 묶은 판별 시나리오"""
    model_config = ConfigDict(frozen=True)

    q0: float = Field(0.5, ge=0, le=1)
    q1: float = Field(0.5, ge=0, le=1)
    gamma: float = Field(GYROMAGNETIC_RATIO_PROTON, gt=0)
    field0: FieldSpec
    field1: FieldSpec
    control_Bc_nT: float = 0.0
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    probe: ProbeSpec = Field(default_factory=ProbeSpec)
    horizon: float = Field(20.0, gt=0)
    grid_points: int = Field(400, ge=2)
    settings: PropagationSettings = Field(default_factory=PropagationSettings)

    @model_validator(mode="after")
    def check_priors(self) -> "Scenario":
        """사전확률의 합이 1인지 확인"""
        if abs(self.q0 + self.q1 - 1.0) > PRIOR_TOL:
            raise ValueError(f"사전확률의 합이 1이 아닙니다: q0={self.q0}, q1={self.q1}")
        return self

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.grid_points)

    def fingerprint(self) -> str:
        """시나리오 식별용 짧은 해시"""
        payload = self.model_dump_json().encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]


# --------- 보고서 ---------

class ConditionReport(BaseModel):
    """충분 조건 검사 결과"""
    x1: float
    y1: float
    z1: float
    w1: float
    lambda_max: float
    lambda_min: float
    cond1: bool
    cond2: bool
    near_boundary: bool = False
    noisy_rate: float
    unitary_rate: float

    @property
    def any_condition(self) -> bool:
        return self.cond1 or self.cond2


class EnhancementReport(BaseModel):
    """
    노이즈에 의한 성공 확률 향상 η

    ceiling_excess: max_t [p_noisy(t) − max_{s ≤ t} p*(s)], p*는 모든 프로브에 대한 유니터리 최대값
    """
    eta: float
    t_star: float
    exceeds_unitary_max: bool
    p_noisy_max: float
    unitary_max: float
    ceiling_excess: float
    t_excess: float


class SweepPoint(BaseModel):
    """스윕 한 점의 요약 (실패 시 error에 메시지, 수치는 NaN)"""
    value: float
    eta: float = float("nan")
    t_star: float = float("nan")
    exceeds_unitary_max: bool = False
    p_noisy_max: float = float("nan")
    unitary_max: float = float("nan")
    ceiling_excess: float = float("nan")
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None
