#!/usr/bin/env python3
"""
시간 전개 모듈

린드블라드 마스터 방정식을 4x4 초연산자(Liouvillian)의 정확한 지수로 전개하고,
독립적인 고정 스텝 RK4 적분기와 블로흐 방정식 해석해를 검증용으로 제공합니다.

벡터화 규약: 열 우선 적층, vec(|i⟩⟨j|) = e_j ⊗ e_i
"""

import math
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidArgumentError, NumericalFailureError
from .linalg_core import (
    DensityMatrix,
    as_matrix,
    expm_scaled,
    unitary_2x2,
)
from .schemas import PropagationMethod, PropagationSettings

logger = logging.getLogger("propagator")

POSITIVITY_FAILURE_TOL = 1e-7
RICHARDSON_WARN = 1e-8
RK4_STABILITY = 0.05
UNIFORM_GRID_RTOL = 1e-9

StateLike = Union[DensityMatrix, np.ndarray]


# --------- 벡터화 ---------

def vec(rho) -> np.ndarray:
    """열 우선 적층"""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int = 2) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


def _state_matrix(rho: StateLike) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return as_matrix(rho)


def _operators(H, Ls: Sequence) -> Tuple[np.ndarray, list]:
    h = as_matrix(H)
    ops = []
    for L in Ls:
        op = as_matrix(L)
        if op.shape != h.shape:
            raise InvalidArgumentError(f"린드블라드 연산자 차원 불일치: {op.shape} vs {h.shape}")
        ops.append(op)
    return h, ops


# --------- 생성자 ---------

def lindblad_rhs(rho: StateLike, H, Ls: Sequence) -> np.ndarray:
    """
    ρ̇ = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})

    Args:
        rho: 밀도 행렬
        H: 해밀토니안 (rad/s)
        Ls: 린드블라드 연산자 목록 (√(1/s))

    Returns:
        np.ndarray: 우변 행렬

    Raises:
        InvalidArgumentError: 차원 불일치
    """
    r = _state_matrix(rho)
    h, ops = _operators(H, Ls)
    if r.shape != h.shape:
        raise InvalidArgumentError(f"밀도 행렬과 해밀토니안 차원 불일치: {r.shape} vs {h.shape}")
    out = -1j * (h @ r - r @ h)
    for op in ops:
        op_dag = op.conj().T
        decay = op_dag @ op
        out = out + op @ r @ op_dag - 0.5 * (decay @ r + r @ decay)
    return out


@dataclass(frozen=True)
class Liouvillian:
    """열 적층 밀도 행렬에 작용하는 초연산자 (1/s)"""
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(math.sqrt(self.matrix.shape[0])))

    def apply(self, rho: StateLike) -> np.ndarray:
        return unvec(self.matrix @ vec(_state_matrix(rho)), self.dim)

    def trace_row(self) -> np.ndarray:
        """vec(I)† L - 트레이스 보존이면 0"""
        return vec(np.eye(self.dim)).conj() @ self.matrix

    def propagator(self, t: float) -> np.ndarray:
        """exp(L·t)"""
        return expm_scaled(self.matrix * t)


def build_liouvillian(H, Ls: Sequence) -> Liouvillian:
    """
    린드블라드 생성자의 초연산자 행렬

    vec(AXB) = (Bᵀ ⊗ A) vec(X) 를 사용합니다.
    """
    h, ops = _operators(H, Ls)
    identity = np.eye(h.shape[0], dtype=complex)
    matrix = -1j * (np.kron(identity, h) - np.kron(h.T, identity))
    for op in ops:
        decay = op.conj().T @ op
        matrix = matrix + (
            np.kron(op.conj(), op)
            - 0.5 * np.kron(identity, decay)
            - 0.5 * np.kron(decay.T, identity)
        )
    return Liouvillian(matrix=matrix)


# --------- 전파자 캐시 ---------

class PropagatorCache:
    """
    (H, Ls, Δt) → exp(L·Δt) 캐시

    저장된 행렬은 읽기 전용이며, 조회/저장은 잠금으로 보호됩니다.
    """

    def __init__(self, max_entries: int = 256):
        """
        Args:
            max_entries: 최대 저장 항목 수 (초과 시 가장 오래된 항목 제거)
        """
        self.max_entries = max_entries
        self._entries: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(H, Ls: Sequence, dt: float) -> tuple:
        return (
            np.ascontiguousarray(H, dtype=complex).tobytes(),
            tuple(np.ascontiguousarray(L, dtype=complex).tobytes() for L in Ls),
            float(dt),
        )

    def get(self, H, Ls: Sequence, dt: float) -> np.ndarray:
        """
        한 스텝 전파자 조회 (없으면 계산 후 저장)

        Args:
            H: 해밀토니안
            Ls: 린드블라드 연산자 목록
            dt: 스텝 크기(초)

        Returns:
            np.ndarray: exp(L·dt), 읽기 전용
        """
        key = self._key(H, Ls, dt)
        with self._lock:
            cached = self._entries.get(key)
            if cached is not None:
                self._entries.move_to_end(key)
                self.hits += 1
                return cached

        step = build_liouvillian(H, Ls).propagator(dt)
        step.setflags(write=False)

        with self._lock:
            self.misses += 1
            self._entries[key] = step
            while len(self._entries) > self.max_entries:
                self._entries.popitem(last=False)
        logger.debug(f"전파자 계산: dt={dt:.6g}s (캐시 {len(self._entries)}개)")
        return step

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
            self.hits = 0
            self.misses = 0


# 싱글톤 인스턴스
_cache: Optional[PropagatorCache] = None
_cache_lock = threading.Lock()


def get_propagator_cache() -> PropagatorCache:
    """캐시 싱글톤 인스턴스 반환"""
    global _cache
    with _cache_lock:
        if _cache is None:
            _cache = PropagatorCache()
    return _cache


# --------- RK4 ---------

def rk4_step_limit(H, Ls: Sequence, dt_max: float) -> float:
    """
    RK4 스텝 상한: min(dt_max, 0.05/Λ)

    Λ = (λmax(H) − λmin(H)) + 4·Σ‖L_k‖₂² 는 |γB| + 4κ₁ + κ₂ 이상인 상한입니다.
    """
    h, ops = _operators(H, Ls)
    values = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    scale = float(values[-1] - values[0]) + 4.0 * sum(np.linalg.norm(op, 2) ** 2 for op in ops)
    return min(dt_max, RK4_STABILITY / max(scale, 1e-6))


def _rk4_step_matrix(m: np.ndarray, h: float) -> np.ndarray:
    """선형 생성자 m에 대한 고전 RK4 한 스텝의 전달 행렬"""
    identity = np.eye(m.shape[0], dtype=complex)
    k1 = m @ identity
    k2 = m @ (identity + 0.5 * h * k1)
    k3 = m @ (identity + 0.5 * h * k2)
    k4 = m @ (identity + h * k3)
    return identity + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_transfer(liouvillian: Liouvillian, t: float, h_max: float) -> np.ndarray:
    steps = max(1, int(math.ceil(t / h_max)))
    return np.linalg.matrix_power(_rk4_step_matrix(liouvillian.matrix, t / steps), steps)


def _rk4_evolve(
    liouvillian: Liouvillian,
    rho: np.ndarray,
    t: float,
    h_max: float,
    richardson_check: bool
) -> np.ndarray:
    coarse = _rk4_transfer(liouvillian, t, h_max) @ vec(rho)
    if not richardson_check:
        return unvec(coarse)

    fine = _rk4_transfer(liouvillian, t, h_max / 2.0) @ vec(rho)
    estimate = float(np.max(np.abs(fine - coarse))) / 15.0
    if estimate > RICHARDSON_WARN:
        logger.warning(f"RK4 Richardson 오차 추정 {estimate:.3e} (t={t:.6g}s)")
    else:
        logger.debug(f"RK4 Richardson 오차 추정 {estimate:.3e}")
    return unvec(fine)


# --------- 전개 ---------

def _checked(matrix: np.ndarray, t: float) -> DensityMatrix:
    sym = 0.5 * (matrix + matrix.conj().T)
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    if min_eig < -POSITIVITY_FAILURE_TOL:
        raise NumericalFailureError(
            f"양정치성 위반: 최소 고유값 {min_eig:.3e} (t={t:.6g}s)",
            min_eigenvalue=min_eig,
            t=t
        )
    return DensityMatrix(matrix=sym)


def _require_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise InvalidArgumentError(f"시간은 0 이상의 유한값이어야 합니다: {t}")
    return t


def evolve(
    rho0: StateLike,
    H,
    Ls: Sequence,
    t: float,
    settings: Optional[PropagationSettings] = None
) -> DensityMatrix:
    """
    린드블라드 동역학으로 시간 t까지 전개

    Args:
        rho0: 초기 밀도 행렬
        H: 해밀토니안 (rad/s)
        Ls: 린드블라드 연산자 목록
        t: 전개 시간(초)
        settings: 전개 방법 설정 (기본: superop_exact)

    Returns:
        DensityMatrix: 전개된 상태

    Raises:
        InvalidArgumentError: 음수 시간, 차원 불일치
        NumericalFailureError: 최소 고유값 < −1e-7
    """
    settings = settings or PropagationSettings()
    t = _require_time(t)
    rho = _state_matrix(rho0)
    if rho.shape != as_matrix(H).shape:
        raise InvalidArgumentError(f"밀도 행렬과 해밀토니안 차원 불일치: {rho.shape} vs {as_matrix(H).shape}")
    if t == 0.0:
        return DensityMatrix(matrix=rho.copy())

    liouvillian = build_liouvillian(H, Ls)
    if settings.method == PropagationMethod.SUPEROP_EXACT:
        out = unvec(liouvillian.propagator(t) @ vec(rho))
    else:
        h_max = rk4_step_limit(H, Ls, settings.dt_max)
        out = _rk4_evolve(liouvillian, rho, t, h_max, settings.richardson_check)
    return _checked(out, t)


def evolve_unitary(rho0: StateLike, H, t: float) -> DensityMatrix:
    """노이즈 없는 전개 U ρ U†, U = exp(−iHt)"""
    t = _require_time(t)
    rho = _state_matrix(rho0)
    u = unitary_2x2(H, t)
    out = u @ rho @ u.conj().T
    return DensityMatrix(matrix=0.5 * (out + out.conj().T))


def _is_uniform(times: np.ndarray) -> bool:
    if times.size < 3:
        return True
    steps = np.diff(times)
    return bool(np.allclose(steps, steps[0], rtol=UNIFORM_GRID_RTOL, atol=1e-15))


def _interval_transfer(H, Ls: Sequence, dt: float, settings: PropagationSettings) -> np.ndarray:
    if settings.method == PropagationMethod.SUPEROP_EXACT:
        return get_propagator_cache().get(H, Ls, dt)
    h_max = rk4_step_limit(H, Ls, settings.dt_max)
    return _rk4_transfer(build_liouvillian(H, Ls), dt, h_max)


def evolve_grid(
    rho0: StateLike,
    H,
    Ls: Sequence,
    times: Sequence[float],
    settings: Optional[PropagationSettings] = None
) -> np.ndarray:
    """
    시간 격자 전체에 대한 전개

    균일 격자는 한 구간 전파자를 반복 적용하고(반군 성질),
    비균일 격자는 각 시점을 개별적으로 전개합니다.

    Returns:
        np.ndarray: (n, 2, 2) 밀도 행렬 배열

    Raises:
        NumericalFailureError: 어느 시점에서든 양정치성 위반
    """
    settings = settings or PropagationSettings()
    grid = np.asarray(times, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidArgumentError("시간 격자는 비어 있지 않은 1차원 배열이어야 합니다")
    if grid[0] < 0 or np.any(np.diff(grid) < 0):
        raise InvalidArgumentError("시간 격자는 0 이상이고 단조 증가해야 합니다")

    states = np.empty((grid.size, 2, 2), dtype=complex)
    if not _is_uniform(grid):
        for k, t in enumerate(grid):
            states[k] = evolve(rho0, H, Ls, t, settings).matrix
        return states

    states[0] = evolve(rho0, H, Ls, grid[0], settings).matrix
    if grid.size > 1:
        dt = float(grid[-1] - grid[0]) / (grid.size - 1)
        transfer = _interval_transfer(H, Ls, dt, settings)
        v = vec(states[0])
        for k in range(1, grid.size):
            v = transfer @ v
            states[k] = unvec(v)

    states = 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))
    minima = np.linalg.eigvalsh(states)[:, 0]
    bad = np.flatnonzero(minima < -POSITIVITY_FAILURE_TOL)
    if bad.size:
        k = int(bad[0])
        raise NumericalFailureError(
            f"양정치성 위반: 최소 고유값 {minima[k]:.3e} (t={grid[k]:.6g}s)",
            min_eigenvalue=float(minima[k]),
            t=float(grid[k])
        )
    return states


def evolve_unitary_grid(rho0: StateLike, H, times: Sequence[float]) -> np.ndarray:
    """노이즈 없는 전개의 격자 버전 - (n, 2, 2)"""
    grid = np.asarray(times, dtype=float)
    if np.any(grid < 0):
        raise InvalidArgumentError("시간은 0 이상이어야 합니다")
    rho = _state_matrix(rho0)
    u = unitary_2x2(H, grid)
    states = u @ rho @ np.conj(np.swapaxes(u, -1, -2))
    return 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))


# --------- 검증용 해석해 ---------

def bloch_oracle_zfield(
    r0: Sequence[float],
    omega: float,
    T1: float,
    T2: float,
    p_ground: float,
    t: float
) -> np.ndarray:
    """
    z축 자기장 + z축 노이즈의 블로흐 방정식 해석해

    omega는 H = ω·σ_z/2 의 계수입니다 (H = −γBσ_z/2 이면 ω = −γB).
    r_x + i·r_y = (r0_x + i·r0_y)·e^{(iω − 1/T2)t},
    r_z = r_eq + (r0_z − r_eq)·e^{−t/T1}, r_eq = 2p − 1
    """
    if T1 <= 0 or T2 <= 0:
        raise InvalidArgumentError(f"T1, T2는 양수여야 합니다: T1={T1}, T2={T2}")
    r = np.asarray(r0, dtype=float)
    transverse = (r[0] + 1j * r[1]) * np.exp((1j * omega - 1.0 / T2) * t)
    r_eq = 2.0 * p_ground - 1.0
    longitudinal = r_eq + (r[2] - r_eq) * math.exp(-t / T1)
    return np.array([transverse.real, transverse.imag, longitudinal])
