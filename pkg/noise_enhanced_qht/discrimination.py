#!/usr/bin/env python3
"""
가설 판별 분석 모듈

프로브 상태, Helstrom 성공 확률, 성공 확률 곡선, 유니터리 최대값,
노이즈 강화 충분 조건, 향상도 η, 강한 디페이징 극한, 양자 Chernoff 지수를 계산합니다.
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DegenerateHypothesesError, InvalidArgumentError
from .linalg_core import (
    IDENTITY,
    KET0,
    SIGMA_Z,
    DensityMatrix,
    as_matrix,
    hermitian_eig,
    ket_to_density,
    trace_norm_hermitian,
    trace_norms,
    unitary_2x2,
)
from .model import scenario_hypotheses
from .propagator import evolve_grid, evolve_unitary_grid, lindblad_rhs
from .schemas import (
    PRIOR_TOL,
    ConditionReport,
    EnhancementReport,
    ProbeKind,
    ProbeSpec,
    Scenario,
)

logger = logging.getLogger("discrimination")

CONDITION_SLACK = 1e-12
EXCEEDS_SLACK = 1e-9
UNITARY_MAX_TOL = 1e-4
UNITARY_MAX_DOUBLINGS = 8
CHERNOFF_GRID_POINTS = 101
CHERNOFF_S_TOL = 1e-6
CHERNOFF_ZERO_EIGENVALUE = 1e-12
CHERNOFF_CLIP = 1e-9
CHERNOFF_Q_FLOOR = 1e-15
HYPOTHESIS_ATOL = 1e-15
MAX_GRID_POINTS = 40001
STEPS_PER_T2 = 4

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


# --------- 프로브 ---------

def optimal_eigenpair(H0, H1) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """
    H1 − H0의 (λmax, λmin, |λmax⟩, |λmin⟩) - 위상 고정 고유벡터

    Raises:
        DegenerateHypothesesError: λmax − λmin < 1e-12 rad/s
    """
    eig = hermitian_eig(as_matrix(H1) - as_matrix(H0))
    if eig.degenerate:
        raise DegenerateHypothesesError(
            f"H1 − H0가 축퇴되었습니다 (λmax − λmin = {eig.spread:.3e} rad/s)"
        )
    vectors = eig.eigenvectors
    return float(eig.eigenvalues[-1]), float(eig.eigenvalues[0]), vectors[:, -1], vectors[:, 0]


def probe_state(spec: ProbeSpec, H0=None, H1=None) -> DensityMatrix:
    """
    프로브 상태 생성

    Args:
        spec: 프로브 설정
        H0, H1: 가설 해밀토니안 (optimal_superposition 에만 필요)

    Returns:
        DensityMatrix: 프로브 밀도 행렬 (thermal 외에는 순수 상태)
    """
    if spec.kind == ProbeKind.KET0:
        return DensityMatrix.pure(KET0)
    if spec.kind == ProbeKind.ALONG_X:
        return DensityMatrix.pure(np.array([1, 1], dtype=complex) / math.sqrt(2))
    if spec.kind == ProbeKind.BLOCH:
        theta = math.radians(spec.theta_deg)
        phi = math.radians(spec.phi_deg)
        ket = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
        return DensityMatrix.pure(ket)
    if spec.kind == ProbeKind.THERMAL:
        return DensityMatrix.from_matrix(0.5 * (IDENTITY + spec.epsilon * SIGMA_Z))

    if H0 is None or H1 is None:
        raise InvalidArgumentError("optimal_superposition 프로브에는 H0, H1이 필요합니다")
    _, _, v_max, v_min = optimal_eigenpair(H0, H1)
    return DensityMatrix.pure((v_max + v_min) / math.sqrt(2))


# --------- 성공 확률 ---------

def check_priors(q0: float, q1: float) -> None:
    if q0 < 0 or q1 < 0 or abs(q0 + q1 - 1.0) > PRIOR_TOL:
        raise InvalidArgumentError(f"잘못된 사전확률: q0={q0}, q1={q1}")


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)


def success_probability(rho0, rho1, q0: float = 0.5, q1: float = 0.5) -> float:
    """
    Helstrom 성공 확률 (1 + ‖q0ρ0 − q1ρ1‖_tr)/2

    Raises:
        InvalidArgumentError: 사전확률이 음수이거나 합이 1이 아닌 경우
    """
    check_priors(q0, q1)
    return 0.5 * (1.0 + trace_norm_hermitian(q0 * _matrix(rho0) - q1 * _matrix(rho1)))


@dataclass(frozen=True)
class TimeSeries:
    """성공 확률 곡선 (노이즈/유니터리)"""
    times: np.ndarray
    p_noisy: np.ndarray
    p_unitary: np.ndarray
    trace_distance_noisy: np.ndarray
    trace_distance_unitary: np.ndarray
    p_unitary_ceiling: np.ndarray
    fingerprint: str

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def trace_distance(self) -> np.ndarray:
        return self.trace_distance_noisy


@dataclass(frozen=True)
class EvolvedStates:
    """시나리오의 두 가설에 대한 노이즈/유니터리 전개 결과 - (n, 2, 2) 배열"""
    times: np.ndarray
    noisy0: np.ndarray
    noisy1: np.ndarray
    unitary0: np.ndarray
    unitary1: np.ndarray


def with_time_grid(
    scenario: Scenario,
    horizon: Optional[float] = None,
    grid_points: Optional[int] = None
) -> Scenario:
    """시간 격자만 바꾼 새 시나리오 (검증 포함)"""
    if horizon is None and grid_points is None:
        return scenario
    data = scenario.model_dump()
    if horizon is not None:
        data["horizon"] = horizon
    if grid_points is not None:
        data["grid_points"] = grid_points
    return Scenario(**data)


def resolve_time_grid(scenario: Scenario) -> Scenario:
    """
    격자 간격이 T2/4 이하가 되도록 격자점 수를 늘린 시나리오

    최대 40001점으로 제한하며, 제한에 걸리면 경고를 남깁니다.
    """
    noise = scenario.noise
    rate = 4.0 * noise.kappa1 + noise.kappa2
    if rate <= 0:
        return scenario
    T2 = 2.0 / rate
    step = scenario.horizon / (scenario.grid_points - 1)
    if step <= T2 / STEPS_PER_T2:
        return scenario

    needed = int(math.ceil(STEPS_PER_T2 * scenario.horizon / T2)) + 1
    if needed > MAX_GRID_POINTS:
        logger.warning(f"격자점 {needed}개가 필요하지만 {MAX_GRID_POINTS}개로 제한합니다 (T2={T2:.4g}s)")
        needed = MAX_GRID_POINTS
    logger.debug(f"시간 격자 세분: {scenario.grid_points} → {needed}")
    return with_time_grid(scenario, grid_points=needed)


def require_distinct_hypotheses(scenario: Scenario) -> None:
    """
    두 가설의 해밀토니안과 린드블라드 연산자가 모두 같으면 판별할 대상이 없습니다.

    Raises:
        DegenerateHypothesesError: 두 가설이 동일한 경우
    """
    h0, h1 = scenario_hypotheses(scenario)
    same_hamiltonian = np.allclose(h0.hamiltonian, h1.hamiltonian, rtol=0.0, atol=HYPOTHESIS_ATOL)
    same_noise = all(
        np.allclose(a, b, rtol=0.0, atol=HYPOTHESIS_ATOL) for a, b in zip(h0.lindblad_ops, h1.lindblad_ops)
    )
    if same_hamiltonian and same_noise:
        raise DegenerateHypothesesError("두 가설의 동역학이 동일하여 판별할 수 없습니다")


def unitary_ceiling(scenario: Scenario, times=None) -> np.ndarray:
    """
    각 시점에서 모든 프로브 중 가장 좋은 유니터리 성공 확률

    W = U0(t)†U1(t) 일 때 순수 프로브의 최소 겹침은 min_ψ |⟨ψ|W|ψ⟩|² = |Tr W|²/4 이고,
    혼합 프로브는 이보다 나을 수 없으므로 p*(t) = ½(1 + √(1 − q0·q1·|Tr W|²)) 입니다.

    Args:
        scenario: 시나리오 (해밀토니안, 사전확률)
        times: 시점 배열, 기본값은 시나리오의 시간 격자

    Returns:
        np.ndarray: p*(t)
    """
    grid = scenario.time_grid() if times is None else np.asarray(times, dtype=float)
    h0, h1 = scenario_hypotheses(scenario)
    u0 = unitary_2x2(h0.hamiltonian, grid)
    u1 = unitary_2x2(h1.hamiltonian, grid)
    overlap_trace = np.sum(np.conj(u0) * u1, axis=(-2, -1))
    spread = 1.0 - scenario.q0 * scenario.q1 * np.abs(overlap_trace) ** 2
    return 0.5 * (1.0 + np.sqrt(np.clip(spread, 0.0, None)))


def evolve_scenario(scenario: Scenario) -> EvolvedStates:
    """
    시나리오의 프로브를 두 가설 아래에서 시간 격자 전체로 전개

    Raises:
        NumericalFailureError: 전개 중 양정치성 위반 (위반 시점 포함)
    """
    h0, h1 = scenario_hypotheses(scenario)
    probe = probe_state(scenario.probe, h0.hamiltonian, h1.hamiltonian)
    times = scenario.time_grid()
    return EvolvedStates(
        times=times,
        noisy0=evolve_grid(probe, h0.hamiltonian, h0.lindblad_ops, times, scenario.settings),
        noisy1=evolve_grid(probe, h1.hamiltonian, h1.lindblad_ops, times, scenario.settings),
        unitary0=evolve_unitary_grid(probe, h0.hamiltonian, times),
        unitary1=evolve_unitary_grid(probe, h1.hamiltonian, times),
    )


def success_curve(scenario: Scenario) -> TimeSeries:
    """시간 격자 위의 p_noisy, p_unitary와 유니터리 상한 p*(t)"""
    states = evolve_scenario(scenario)
    q0, q1 = scenario.q0, scenario.q1
    d_noisy = trace_norms(q0 * states.noisy0 - q1 * states.noisy1)
    d_unitary = trace_norms(q0 * states.unitary0 - q1 * states.unitary1)
    return TimeSeries(
        times=states.times,
        p_noisy=0.5 * (1.0 + d_noisy),
        p_unitary=0.5 * (1.0 + d_unitary),
        trace_distance_noisy=d_noisy,
        trace_distance_unitary=d_unitary,
        p_unitary_ceiling=unitary_ceiling(scenario, states.times),
        fingerprint=scenario.fingerprint()
    )


def unitary_max(
    scenario: Scenario,
    horizon: Optional[float] = None,
    grid_points: Optional[int] = None
) -> float:
    """
    유니터리 동역학의 최대 성공 확률

    격자를 n → 2n−1 로 세분하며 최대값 변화가 1e-4 미만이 될 때까지 반복합니다.

    Args:
        scenario: 시나리오 (프로브, 해밀토니안, 사전확률)
        horizon: 탐색 구간(초), 기본값은 시나리오의 horizon
        grid_points: 시작 격자점 수, 기본값은 시나리오의 grid_points

    Returns:
        float: max_t p_unitary(t)
    """
    horizon = scenario.horizon if horizon is None else horizon
    points = scenario.grid_points if grid_points is None else grid_points
    h0, h1 = scenario_hypotheses(scenario)
    probe = probe_state(scenario.probe, h0.hamiltonian, h1.hamiltonian)

    gap = float(np.ptp(np.linalg.eigvalsh(h1.hamiltonian - h0.hamiltonian)))
    if gap > 0 and horizon < 2 * math.pi / gap:
        logger.warning(
            f"탐색 구간 {horizon:.4g}s가 차이 동역학 주기 {2 * math.pi / gap:.4g}s보다 짧습니다"
        )

    def grid_max(n: int) -> float:
        times = np.linspace(0.0, horizon, n)
        s0 = evolve_unitary_grid(probe, h0.hamiltonian, times)
        s1 = evolve_unitary_grid(probe, h1.hamiltonian, times)
        distances = trace_norms(scenario.q0 * s0 - scenario.q1 * s1)
        return float(np.max(0.5 * (1.0 + distances)))

    best = grid_max(points)
    for _ in range(UNITARY_MAX_DOUBLINGS):
        points = 2 * points - 1
        refined = grid_max(points)
        change = abs(refined - best)
        best = max(best, refined)
        logger.debug(f"유니터리 최대값 세분: n={points}, 변화={change:.2e}")
        if change < UNITARY_MAX_TOL:
            break
    return best


def initial_rates(scenario: Scenario) -> Tuple[float, float]:
    """
    t → 0⁺ 에서 성공 확률의 증가율 (노이즈, 유니터리) - 동일 사전확률 전용

    p = ½ + ¼‖ρ0 − ρ1‖ 이므로 증가율은 ¼‖ρ̇0(0) − ρ̇1(0)‖ 입니다.
    """
    if abs(scenario.q0 - scenario.q1) > PRIOR_TOL:
        raise InvalidArgumentError("초기 증가율은 q0 = q1 에서만 정의됩니다")
    h0, h1 = scenario_hypotheses(scenario)
    probe = probe_state(scenario.probe, h0.hamiltonian, h1.hamiltonian)
    noisy = lindblad_rhs(probe, h1.hamiltonian, h1.lindblad_ops) - lindblad_rhs(
        probe, h0.hamiltonian, h0.lindblad_ops
    )
    unitary = lindblad_rhs(probe, h1.hamiltonian, []) - lindblad_rhs(probe, h0.hamiltonian, [])
    return 0.25 * trace_norm_hermitian(noisy), 0.25 * trace_norm_hermitian(unitary)


# --------- 충분 조건 ---------

def check_conditions(scenario: Scenario) -> ConditionReport:
    """
    최적 프로브 (|λmax⟩+|λmin⟩)/√2 에 대한 노이즈 강화 충분 조건 검사

    조건 1: |x1 + w1| > λmax − λmin
    조건 2: (w1 − x1)² + 4y1² + 4z1² > 4·z1·(λmax − λmin)
    x1, y1, z1, w1은 N1 − N0의 |λmax⟩, |λmin⟩ 기저 행렬 원소이며,
    N_j는 가설 j의 소산자를 프로브에 적용한 값입니다.

    Raises:
        DegenerateHypothesesError: H1 − H0가 축퇴된 경우
    """
    h0, h1 = scenario_hypotheses(scenario)
    lam_max, lam_min, v_max, v_min = optimal_eigenpair(h0.hamiltonian, h1.hamiltonian)
    rho = ket_to_density((v_max + v_min) / math.sqrt(2))

    zero = np.zeros((2, 2), dtype=complex)
    delta_n = lindblad_rhs(rho, zero, h1.lindblad_ops) - lindblad_rhs(rho, zero, h0.lindblad_ops)

    x1 = float(np.real(v_max.conj() @ delta_n @ v_max))
    off = complex(v_max.conj() @ delta_n @ v_min)
    y1, z1 = off.real, off.imag
    w1 = float(np.real(v_min.conj() @ delta_n @ v_min))
    gap = lam_max - lam_min

    lhs1 = abs(x1 + w1)
    lhs2 = (w1 - x1) ** 2 + 4 * y1 ** 2 + 4 * z1 ** 2
    rhs2 = 4 * z1 * gap
    unitary_part = lindblad_rhs(rho, h1.hamiltonian - h0.hamiltonian, [])

    return ConditionReport(
        x1=x1,
        y1=y1,
        z1=z1,
        w1=w1,
        lambda_max=lam_max,
        lambda_min=lam_min,
        cond1=lhs1 > gap + CONDITION_SLACK,
        cond2=lhs2 > rhs2 + CONDITION_SLACK,
        near_boundary=abs(lhs1 - gap) <= CONDITION_SLACK or abs(lhs2 - rhs2) <= CONDITION_SLACK,
        noisy_rate=0.25 * trace_norm_hermitian(unitary_part + delta_n),
        unitary_rate=0.25 * trace_norm_hermitian(unitary_part),
    )


# --------- 향상도 ---------

def enhancement_from_curve(curve: TimeSeries, unitary_maximum: float) -> EnhancementReport:
    """
    이미 계산된 곡선과 유니터리 최대값으로 η 보고서 구성

    초과 여부는 시점 t까지 어떤 프로브로든 유니터리 동역학이 도달할 수 있는
    최대 성공 확률 max_{s ≤ t} p*(s) 와 p_noisy(t)를 비교해 판정합니다.
    """
    gain = curve.p_noisy - curve.p_unitary
    k = int(np.argmax(gain))
    reachable = np.maximum.accumulate(curve.p_unitary_ceiling)
    excess = curve.p_noisy - reachable
    j = int(np.argmax(excess))
    return EnhancementReport(
        eta=float(gain[k]),
        t_star=float(curve.times[k]),
        exceeds_unitary_max=bool(excess[j] > EXCEEDS_SLACK),
        p_noisy_max=float(np.max(curve.p_noisy)),
        unitary_max=unitary_maximum,
        ceiling_excess=float(excess[j]),
        t_excess=float(curve.times[j])
    )


def enhancement_curve(scenario: Scenario) -> Tuple[TimeSeries, EnhancementReport]:
    """T2/4 간격으로 세분된 격자에서 곡선과 향상도 계산"""
    scenario = resolve_time_grid(scenario)
    curve = success_curve(scenario)
    return curve, enhancement_from_curve(curve, unitary_max(scenario))


def enhancement_eta(
    scenario: Scenario,
    horizon: Optional[float] = None,
    grid_points: Optional[int] = None
) -> EnhancementReport:
    """
    η = max_t (p_noisy − p_unitary) 와 유니터리 상한 초과 여부

    η는 음수일 수 있으며 그대로 보고합니다.
    """
    _, report = enhancement_curve(with_time_grid(scenario, horizon, grid_points))
    return report


def strong_dephasing_limit(theta0_deg: float, theta1_deg: float) -> float:
    """강한 디페이징 극한의 성공 확률 ½ + ¼|sin(θ0 − θ1)|"""
    return 0.5 + 0.25 * abs(math.sin(math.radians(theta0_deg - theta1_deg)))


# --------- Chernoff ---------

@dataclass(frozen=True)
class ChernoffResult:
    """min_s Tr(ρ0^s ρ1^{1−s}) 결과"""
    s_star: float
    q_star: float
    exponent: float
    grid_q: float
    golden_q: float


def _spectrum(rho) -> Tuple[np.ndarray, np.ndarray]:
    m = _matrix(rho)
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    if values[0] < -CHERNOFF_CLIP:
        raise InvalidArgumentError(f"음의 고유값 {values[0]:.3e}: 밀도 행렬이 아닙니다")
    # 1e-12 미만은 정확한 0으로 취급 (0^0 := 0)
    values = np.where(values < CHERNOFF_ZERO_EIGENVALUE, 0.0, values)
    return values, vectors


def _powers(values: np.ndarray, s: np.ndarray) -> np.ndarray:
    positive = values > 0
    safe = np.where(positive, values, 1.0)
    return np.where(positive[None, :], safe[None, :] ** s[:, None], 0.0)


def chernoff_q(rho0, rho1, s) -> np.ndarray:
    """
    Q(s) = Tr(ρ0^s ρ1^{1−s}) = Σ_ij a_i^s b_j^{1−s} |⟨u_i|v_j⟩|²

    Args:
        rho0, rho1: 밀도 행렬
        s: 스칼라 또는 배열, [0, 1]

    Returns:
        np.ndarray: s와 같은 모양의 Q 값
    """
    a, u = _spectrum(rho0)
    b, v = _spectrum(rho1)
    overlaps = np.abs(u.conj().T @ v) ** 2
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    q = np.einsum("mi,ij,mj->m", _powers(a, s_arr), overlaps, _powers(b, 1.0 - s_arr))
    return q.reshape(np.shape(s))


def _golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> Tuple[float, float]:
    """
    황금분할 탐색

    [a, b] 에 최소가 하나 있는 f에 대해 길이 ≤ tol 인 구간을 반환합니다.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return a, d
    return c, b


def chernoff(rho0, rho1) -> ChernoffResult:
    """
    양자 Chernoff 양 min_{s∈[0,1]} Q(s) 와 지수 −ln Q*

    101점 격자 탐색으로 최소 부근을 찾은 뒤 인접 구간에서 황금분할 탐색(|Δs| < 1e-6)을 수행합니다.
    Q* < 1e-15 이면 지수는 무한대로 보고합니다.
    """
    grid = np.linspace(0.0, 1.0, CHERNOFF_GRID_POINTS)
    values = chernoff_q(rho0, rho1, grid)
    k = int(np.argmin(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]

    a, b = _golden_section(lambda s: float(chernoff_q(rho0, rho1, s)), lo, hi, CHERNOFF_S_TOL)
    s_golden = 0.5 * (a + b)
    q_golden = float(chernoff_q(rho0, rho1, s_golden))
    q_grid = float(values[k])

    if q_golden <= q_grid:
        s_star, q_star = s_golden, q_golden
    else:
        s_star, q_star = float(grid[k]), q_grid
    q_star = min(max(q_star, 0.0), 1.0)
    exponent = math.inf if q_star < CHERNOFF_Q_FLOOR else max(0.0, -math.log(q_star))
    return ChernoffResult(
        s_star=s_star,
        q_star=q_star,
        exponent=exponent,
        grid_q=q_grid,
        golden_q=q_golden
    )


@dataclass(frozen=True)
class ChernoffSeries:
    """시간에 따른 Chernoff 지수 (노이즈/유니터리)"""
    times: np.ndarray
    exponent_noisy: np.ndarray
    exponent_unitary: np.ndarray
    q_noisy: np.ndarray
    q_unitary: np.ndarray


def chernoff_curve(scenario: Scenario) -> ChernoffSeries:
    """시나리오 시간 격자의 각 시점에서 Chernoff 양 계산"""
    states = evolve_scenario(scenario)
    noisy = [chernoff(r0, r1) for r0, r1 in zip(states.noisy0, states.noisy1)]
    unitary = [chernoff(r0, r1) for r0, r1 in zip(states.unitary0, states.unitary1)]
    return ChernoffSeries(
        times=states.times,
        exponent_noisy=np.array([c.exponent for c in noisy]),
        exponent_unitary=np.array([c.exponent for c in unitary]),
        q_noisy=np.array([c.q_star for c in noisy]),
        q_unitary=np.array([c.q_star for c in unitary]),
    )
