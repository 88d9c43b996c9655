#!/usr/bin/env python3
"""
선형대수 코어 모듈

2x2 / 4x4 복소 행렬 연산, 에르미트 고유분해(위상 고정), 트레이스 노름,
2x2 유니터리의 닫힌 형태, 스케일링-스퀘어링 행렬 지수를 제공합니다.
모든 함수는 입력에만 의존하는 순수 함수입니다.
"""

import math
import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InvalidArgumentError

logger = logging.getLogger("linalg_core")


HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9
DEGENERACY_GAP = 1e-12
PHASE_THRESHOLD = 1e-12
SUPPORTED_DIMS = (2, 4)

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


# --------- 입력 검증 ---------

def as_matrix(m) -> np.ndarray:
    """
    정사각 복소 행렬로 변환하고 불변식(유한값, 차원 2 또는 4)을 확인합니다.

    Raises:
        InvalidArgumentError: 모양이 잘못되었거나 NaN/Inf가 포함된 경우
    """
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidArgumentError(f"정사각 행렬이 아닙니다: shape={arr.shape}")
    if arr.shape[0] not in SUPPORTED_DIMS:
        raise InvalidArgumentError(f"지원하지 않는 차원입니다: {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("행렬에 NaN 또는 Inf가 포함되어 있습니다")
    return arr


def _same_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise InvalidArgumentError(f"차원 불일치: {a.shape} vs {b.shape}")


def hermiticity_defect(m) -> float:
    """‖M − M†‖_max"""
    arr = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(arr - arr.conj().T)))


def require_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """에르미트가 아니면 InvalidArgumentError"""
    arr = as_matrix(m)
    defect = hermiticity_defect(arr)
    if defect > tol:
        raise InvalidArgumentError(f"에르미트 행렬이 아닙니다 (defect={defect:.3e})")
    return arr


# --------- 기본 연산 ---------

def adjoint(a) -> np.ndarray:
    """켤레 전치"""
    return as_matrix(a).conj().T


def commutator(a, b) -> np.ndarray:
    """[A, B] = AB − BA"""
    a, b = as_matrix(a), as_matrix(b)
    _same_dims(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    """{A, B} = AB + BA"""
    a, b = as_matrix(a), as_matrix(b)
    _same_dims(a, b)
    return a @ b + b @ a


def sigma_along(axis: Sequence[float]) -> np.ndarray:
    """n·σ"""
    n = np.asarray(axis, dtype=float)
    return np.tensordot(n, PAULIS, axes=1)


def ket_to_density(ket) -> np.ndarray:
    """|ψ⟩ → |ψ⟩⟨ψ| (정규화 포함)"""
    psi = np.asarray(ket, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


# --------- 고유분해 ---------

@dataclass(frozen=True)
class EigenSystem:
    """에르미트 고유분해 결과 (오름차순 고유값, 위상 고정된 열 고유벡터)"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: bool = False

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return v @ np.diag(self.eigenvalues) @ v.conj().T

    @property
    def spread(self) -> float:
        """λmax − λmin"""
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    """
    각 열벡터의 첫 번째 유의미한 성분(|v| > 1e-12)이 양의 실수가 되도록 위상을 맞춥니다.

    Args:
        vectors: 열벡터들로 이루어진 행렬 (1차원 배열이면 단일 벡터)

    Returns:
        np.ndarray: 위상이 고정된 벡터(들)
    """
    v = np.array(vectors, dtype=complex)
    single = v.ndim == 1
    if single:
        v = v[:, None]
    for k in range(v.shape[1]):
        column = v[:, k]
        significant = np.flatnonzero(np.abs(column) > PHASE_THRESHOLD)
        if significant.size == 0:
            continue
        lead = column[significant[0]]
        v[:, k] = column * (abs(lead) / lead)
    return v[:, 0] if single else v


def hermitian_eig(m) -> EigenSystem:
    """
    에르미트 행렬의 고유분해

    Args:
        m: 에르미트 행렬 (차원 2 또는 4)

    Returns:
        EigenSystem: 오름차순 고유값, 정규직교 위상 고정 고유벡터, 축퇴 플래그

    Raises:
        InvalidArgumentError: 에르미트가 아닌 입력
    """
    arr = require_hermitian(m)
    values, vectors = np.linalg.eigh(0.5 * (arr + arr.conj().T))
    degenerate = bool(np.any(np.diff(values) < DEGENERACY_GAP))
    return EigenSystem(
        eigenvalues=values,
        eigenvectors=fix_phase(vectors),
        degenerate=degenerate
    )


def trace_norm_hermitian(m) -> float:
    """에르미트 행렬의 트레이스 노름 Σ|λ_k|"""
    arr = require_hermitian(m)
    values = np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))
    return float(np.sum(np.abs(values)))


def trace_norms(stack: np.ndarray) -> np.ndarray:
    """(n, d, d) 에르미트 행렬 묶음의 트레이스 노름 (곡선 계산용)"""
    arr = np.asarray(stack, dtype=complex)
    sym = 0.5 * (arr + np.conj(np.swapaxes(arr, -1, -2)))
    return np.sum(np.abs(np.linalg.eigvalsh(sym)), axis=-1)


# --------- 지수 함수 ---------

def pauli_decompose(h) -> tuple:
    """2x2 에르미트 H = a·I + b·σ 의 (a, b) 계수"""
    arr = require_hermitian(h)
    if arr.shape != (2, 2):
        raise InvalidArgumentError("2x2 행렬만 파울리 분해할 수 있습니다")
    a = 0.5 * np.trace(arr).real
    b = np.array([0.5 * np.trace(arr @ p).real for p in PAULIS])
    return a, b


def unitary_2x2(h, t: Union[float, np.ndarray]) -> np.ndarray:
    """
    exp(−iHt)의 닫힌 형태: e^{−iat}(cos(|b|t)·I − i·sin(|b|t)·b̂·σ)

    Args:
        h: 2x2 에르미트 해밀토니안 (rad/s)
        t: 시간(초) - 스칼라 또는 1차원 배열

    Returns:
        np.ndarray: t가 스칼라이면 (2, 2), 배열이면 (n, 2, 2)
    """
    a, b = pauli_decompose(h)
    norm_b = float(np.linalg.norm(b))
    times = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(times)):
        raise InvalidArgumentError("시간 값이 유한하지 않습니다")
    tt = np.atleast_1d(times)[:, None, None]
    b_sigma = np.tensordot(b, PAULIS, axes=1)
    # sin(|b|t)·b̂ = t·sinc(|b|t/π)·b : |b| = 0에서도 안정적
    u = np.exp(-1j * a * tt) * (
        np.cos(norm_b * tt) * IDENTITY
        - 1j * tt * np.sinc(norm_b * tt / np.pi) * b_sigma
    )
    return u[0] if times.ndim == 0 else u


def expm_scaled(m, order: int = 12, theta: float = 0.5) -> np.ndarray:
    """
    스케일링-스퀘어링 행렬 지수 (Taylor 코어)

    ‖M‖₁/2^s ≤ theta 가 되도록 s를 고른 뒤 order차 Taylor 급수를
    Horner 방식으로 계산하고 s번 제곱합니다.
    """
    arr = np.asarray(m, dtype=complex)
    n = arr.shape[0]
    norm = float(np.linalg.norm(arr, 1))
    squarings = 0
    if norm > theta:
        squarings = int(math.ceil(math.log2(norm / theta)))
    scaled = arr / 2.0 ** squarings

    identity = np.eye(n, dtype=complex)
    result = identity.copy()
    for k in range(order, 0, -1):
        result = identity + (scaled @ result) / k

    for _ in range(squarings):
        result = result @ result
    return result


# --------- 블로흐 표현 ---------

def bloch_vector(rho) -> np.ndarray:
    """r_k = Tr(ρσ_k)"""
    arr = np.asarray(rho, dtype=complex)
    return np.real(np.einsum("...ij,kji->...k", arr, PAULIS))


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 밀도 행렬과 진단 값"""
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, m, check: bool = True) -> "DensityMatrix":
        """
        행렬로부터 밀도 행렬을 생성합니다.

        Args:
            m: 2x2 복소 행렬
            check: 에르미트성/트레이스/양정치성 불변식 확인 여부

        Raises:
            InvalidArgumentError: check=True이고 불변식이 깨진 경우
        """
        arr = as_matrix(m)
        if arr.shape != (2, 2):
            raise InvalidArgumentError("밀도 행렬은 2x2여야 합니다")
        dm = cls(matrix=arr)
        if check:
            dm.validate()
        return dm

    @classmethod
    def pure(cls, ket) -> "DensityMatrix":
        return cls.from_matrix(ket_to_density(ket))

    @classmethod
    def from_bloch(cls, r: Sequence[float]) -> "DensityMatrix":
        """ρ = (I + r·σ)/2"""
        return cls.from_matrix(0.5 * (IDENTITY + sigma_along(r)))

    @property
    def hermiticity_defect(self) -> float:
        return hermiticity_defect(self.matrix)

    @property
    def trace_defect(self) -> float:
        return float(abs(np.trace(self.matrix) - 1.0))

    @property
    def min_eigenvalue(self) -> float:
        sym = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(sym)[0])

    @property
    def bloch(self) -> np.ndarray:
        return bloch_vector(self.matrix)

    @property
    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def validate(self) -> None:
        if self.hermiticity_defect > HERMITIAN_TOL:
            raise InvalidArgumentError(f"에르미트성 위반: {self.hermiticity_defect:.3e}")
        if self.trace_defect > TRACE_TOL:
            raise InvalidArgumentError(f"트레이스 위반: {self.trace_defect:.3e}")
        if self.min_eigenvalue < -POSITIVITY_TOL:
            raise InvalidArgumentError(f"양정치성 위반: 최소 고유값 {self.min_eigenvalue:.3e}")
