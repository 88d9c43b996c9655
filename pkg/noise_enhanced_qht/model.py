#!/usr/bin/env python3
"""
물리 모델 모듈

자기장/노이즈 설정으로부터 해밀토니안, 노이즈 축, 린드블라드 연산자 집합을 구성합니다.
단위: 인터페이스는 nT, 내부는 rad/s (변환은 build_hamiltonian 에서만 수행).
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DegenerateAxisError, InvalidArgumentError, UnphysicalNoiseError
from .linalg_core import hermitian_eig, sigma_along
from .schemas import (
    GYROMAGNETIC_RATIO_PROTON,
    AxisBinding,
    FieldSpec,
    NoiseSpec,
    Scenario,
)

logger = logging.getLogger("model")

NANOTESLA = 1e-9
AXIS_TOL = 1e-9
Z_AXIS = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class Hypothesis:
    """하나의 가설: 자기장, 해밀토니안(rad/s), 노이즈 축과 린드블라드 연산자"""
    field: FieldSpec
    control_Bc_nT: float
    hamiltonian: np.ndarray
    noise_axis: np.ndarray
    lindblad_ops: List[np.ndarray]
    ground_state: np.ndarray
    excited_state: np.ndarray


def build_hamiltonian(
    field_spec: FieldSpec,
    control_Bc_nT: float = 0.0,
    gamma: float = GYROMAGNETIC_RATIO_PROTON
) -> np.ndarray:
    """
    H = −γ·(B·σ_n + B_c·σ_x)/2 (rad/s)

    Args:
        field_spec: 가설 자기장
        control_Bc_nT: x 방향 제어 자기장(nT)
        gamma: 자기회전비(rad/s/T)

    Returns:
        np.ndarray: 2x2 에르미트, 트레이스 0 해밀토니안
    """
    if gamma <= 0:
        raise InvalidArgumentError(f"gamma는 양수여야 합니다: {gamma}")
    b_field = field_spec.magnitude_nT * field_spec.direction + np.array([control_Bc_nT, 0.0, 0.0])
    return -gamma * NANOTESLA * sigma_along(b_field) / 2.0


def effective_axis(field_spec: FieldSpec, control_Bc_nT: float = 0.0) -> np.ndarray:
    """
    전체 자기장(가설 자기장 + x 방향 제어)의 단위 방향

    Raises:
        DegenerateAxisError: 전체 자기장이 0인 경우
    """
    total = field_spec.magnitude_nT * field_spec.direction + np.array([control_Bc_nT, 0.0, 0.0])
    norm = float(np.linalg.norm(total))
    if norm == 0.0:
        raise DegenerateAxisError(
            f"전체 자기장이 0입니다 (B={field_spec.magnitude_nT} nT, Bc={control_Bc_nT} nT)"
        )
    return total / norm


def axis_from_theta(theta_deg: float) -> np.ndarray:
    theta = math.radians(theta_deg)
    return np.array([math.cos(theta), 0.0, math.sin(theta)])


def ground_excited(axis) -> Tuple[np.ndarray, np.ndarray]:
    """
    σ_n의 +1 고유벡터(바닥 상태)와 −1 고유벡터(들뜬 상태)

    H = −γBσ_n/2 (γB > 0)에서 +1 고유벡터가 에너지가 가장 낮습니다.
    θ → 90° 에서도 고유분해를 사용하므로 극한이 자연스럽게 처리됩니다.

    Args:
        axis: xz 평면 단위 벡터 (cosθ, 0, sinθ)

    Returns:
        Tuple[np.ndarray, np.ndarray]: (ground, excited), 위상 고정
    """
    n = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > AXIS_TOL or abs(n[1]) > AXIS_TOL:
        raise InvalidArgumentError(f"xz 평면의 단위 벡터가 아닙니다: {n}")
    eig = hermitian_eig(sigma_along(n))
    excited = eig.eigenvectors[:, 0]
    ground = eig.eigenvectors[:, 1]
    return ground, excited


def lindblad_ops(axis, noise: NoiseSpec) -> List[np.ndarray]:
    """
    [√κ₁·σ_n, √(κ₂p)·|g⟩⟨e|, √(κ₂(1−p))·|e⟩⟨g|]

    계수가 0인 연산자도 영행렬로 포함하여 목록의 모양을 고정합니다.
    """
    ground, excited = ground_excited(axis)
    lowering = np.outer(ground, excited.conj())
    raising = np.outer(excited, ground.conj())
    return [
        math.sqrt(noise.kappa1) * sigma_along(axis),
        math.sqrt(noise.kappa2 * noise.p_ground) * lowering,
        math.sqrt(noise.kappa2 * (1.0 - noise.p_ground)) * raising,
    ]


def rates_to_times(kappa1: float, kappa2: float) -> Tuple[float, float]:
    """(κ₁, κ₂) → (T1, T2) = (1/κ₂, 2/(4κ₁+κ₂))"""
    if kappa2 <= 0:
        raise InvalidArgumentError(f"kappa2는 양수여야 합니다: {kappa2}")
    if kappa1 < 0:
        raise InvalidArgumentError(f"kappa1은 음수일 수 없습니다: {kappa1}")
    return 1.0 / kappa2, 2.0 / (4.0 * kappa1 + kappa2)


def times_to_rates(T1: float, T2: float) -> Tuple[float, float]:
    """
    (T1, T2) → (κ₁, κ₂)

    Raises:
        InvalidArgumentError: T1 또는 T2가 양수가 아닌 경우
        UnphysicalNoiseError: T2 > 2·T1 (κ₁ < 0이 필요함)
    """
    if not (T1 > 0 and T2 > 0):
        raise InvalidArgumentError(f"T1, T2는 양수여야 합니다: T1={T1}, T2={T2}")
    if T2 > 2.0 * T1 * (1.0 + 1e-12):
        raise UnphysicalNoiseError(
            f"T2 ≤ 2·T1 조건 위반: T1={T1} s, T2={T2} s (허용 최대 T2={2.0 * T1} s)"
        )
    kappa2 = 1.0 / T1
    kappa1 = max(0.0, (2.0 / T2 - kappa2) / 4.0)
    return kappa1, kappa2


def noise_from_times(
    T1: float,
    T2: float,
    p_ground: float = 0.5,
    axis_binding: AxisBinding = AxisBinding.HAMILTONIAN_LOCKED,
    fixed_axis_theta_deg: float = 90.0
) -> NoiseSpec:
    """T1/T2로부터 NoiseSpec 생성"""
    kappa1, kappa2 = times_to_rates(T1, T2)
    return NoiseSpec(
        kappa1=kappa1,
        kappa2=kappa2,
        p_ground=p_ground,
        axis_binding=axis_binding,
        fixed_axis_theta_deg=fixed_axis_theta_deg
    )


def noise_axis(field_spec: FieldSpec, control_Bc_nT: float, noise: NoiseSpec) -> np.ndarray:
    """결합 방식에 따른 노이즈 축"""
    if noise.axis_binding == AxisBinding.FIXED_AXIS:
        return axis_from_theta(noise.fixed_axis_theta_deg)
    try:
        return effective_axis(field_spec, control_Bc_nT)
    except DegenerateAxisError:
        if noise.is_silent:
            # 노이즈가 없으면 축은 의미가 없음
            logger.debug("자기장 0, 노이즈 0: z축 사용")
            return Z_AXIS.copy()
        raise


def build_hypothesis(
    field_spec: FieldSpec,
    control_Bc_nT: float,
    noise: NoiseSpec,
    gamma: float = GYROMAGNETIC_RATIO_PROTON
) -> Hypothesis:
    """자기장과 노이즈 설정으로 Hypothesis 구성"""
    axis = noise_axis(field_spec, control_Bc_nT, noise)
    ground, excited = ground_excited(axis)
    return Hypothesis(
        field=field_spec,
        control_Bc_nT=control_Bc_nT,
        hamiltonian=build_hamiltonian(field_spec, control_Bc_nT, gamma),
        noise_axis=axis,
        lindblad_ops=lindblad_ops(axis, noise),
        ground_state=ground,
        excited_state=excited
    )


def scenario_hypotheses(scenario: Scenario) -> Tuple[Hypothesis, Hypothesis]:
    """시나리오의 두 가설 (H0, H1)"""
    return (
        build_hypothesis(scenario.field0, scenario.control_Bc_nT, scenario.noise, scenario.gamma),
        build_hypothesis(scenario.field1, scenario.control_Bc_nT, scenario.noise, scenario.gamma),
    )

