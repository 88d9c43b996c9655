#!/usr/bin/env python3
"""
실험 시나리오 모듈

자기장 방향 판별(fig3)과 제어 자기장 보조 판별(fig4) 시나리오 생성기,
단일 파라미터 스윕(T2, T1/T2 비율, 제어 자기장), 그림용 곡선 묶음을 제공합니다.

스윕의 각 점은 독립적이므로 스레드에서 병렬로 계산하고, 결과는 입력 순서대로 정렬합니다.
"""

import asyncio
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .discrimination import TimeSeries, enhancement_curve
from .errors import InvalidArgumentError, QHTError
from .model import noise_from_times, rates_to_times
from .schemas import (
    EnhancementReport,
    FieldSpec,
    ProbeKind,
    ProbeSpec,
    Scenario,
    SweepPoint,
)
from .settings import get_settings

logger = logging.getLogger("experiments")

# 자기장 방향 판별 (fig3)
FIG3_B_NT = 1.86
FIG3_THETA0_DEG = 75.0
FIG3_THETA1_DEG = 30.0
FIG3_T1 = 5.5
FIG3_HORIZON = 20.0
FIG3_GRID_POINTS = 400
FIG3_T2_VALUES = (5.4, 1.0, 0.6)

# 제어 자기장 보조 판별 (fig4)
FIG4_B0_NT = 0.2
FIG4_B1_NT = 2.79
FIG4_THETA_DEG = 90.0
FIG4_BC_NT = 0.75
FIG4_T1 = 7.4
FIG4_HORIZON = 15.0
FIG4_GRID_POINTS = 300
FIG4_T2_VALUES = (7.4, 1.0, 0.6)

# 스윕 기본 격자
RATIO_LOG10_GRID = tuple(np.linspace(0.0, 3.0, 25))
BC_GRID_NT = tuple(np.linspace(0.0, 3.0, 21))

T = TypeVar("T")
R = TypeVar("R")


class SweepMode(str, Enum):
    """T1/T2 비율 스윕에서 고정할 시간 상수"""
    FIX_T1 = "fix_T1"
    FIX_T2 = "fix_T2"


# --------- 시나리오 생성 ---------

def scenario_fig3(T2: float = 1.0, T1: float = FIG3_T1) -> Scenario:
    """
    자기장 방향 판별 시나리오

    B0 = B1 = 1.86 nT, θ0 = 75°, θ1 = 30°, 프로브 |0⟩, 해밀토니안 결합 노이즈(p = ½)

    Raises:
        UnphysicalNoiseError: T2 > 2·T1
    """
    return Scenario(
        field0=FieldSpec(magnitude_nT=FIG3_B_NT, theta_deg=FIG3_THETA0_DEG),
        field1=FieldSpec(magnitude_nT=FIG3_B_NT, theta_deg=FIG3_THETA1_DEG),
        noise=noise_from_times(T1, T2),
        probe=ProbeSpec(kind=ProbeKind.KET0),
        horizon=FIG3_HORIZON,
        grid_points=FIG3_GRID_POINTS
    )


def scenario_fig4(T2: float = 1.0, Bc_nT: float = FIG4_BC_NT, T1: float = FIG4_T1) -> Scenario:
    """
    제어 자기장 보조 판별 시나리오

    두 자기장 모두 z축(θ = 90°), x 방향 제어 B_c, 프로브 |+⟩.
    B_c = 0 이면 두 가설의 노이즈 축이 모두 z축으로 같아집니다.
    """
    if Bc_nT < 0:
        raise InvalidArgumentError(f"제어 자기장은 0 이상이어야 합니다: {Bc_nT} nT")
    return Scenario(
        field0=FieldSpec(magnitude_nT=FIG4_B0_NT, theta_deg=FIG4_THETA_DEG),
        field1=FieldSpec(magnitude_nT=FIG4_B1_NT, theta_deg=FIG4_THETA_DEG),
        control_Bc_nT=Bc_nT,
        noise=noise_from_times(T1, T2),
        probe=ProbeSpec(kind=ProbeKind.ALONG_X),
        horizon=FIG4_HORIZON,
        grid_points=FIG4_GRID_POINTS
    )


def ratio_times(log10_ratio: float, mode: SweepMode, T1: float, T2: float) -> Tuple[float, float]:
    """log₁₀(T1/T2) 값을 (T1, T2)로 변환 - mode에 따라 T1 또는 T2를 고정"""
    ratio = 10.0 ** log10_ratio
    if SweepMode(mode) == SweepMode.FIX_T1:
        return T1, T1 / ratio
    return T2 * ratio, T2


def noise_times(scenario: Scenario) -> Tuple[float, float]:
    """
    시나리오 노이즈의 (T1, T2)

    Raises:
        InvalidArgumentError: κ₂ = 0 이라 T1이 정의되지 않는 경우
    """
    return rates_to_times(scenario.noise.kappa1, scenario.noise.kappa2)


def with_noise_times(base: Scenario, T1: float, T2: float) -> Scenario:
    """T1, T2만 바꾼 시나리오 - p_ground와 노이즈 축 결합 방식은 유지"""
    noise = noise_from_times(
        T1,
        T2,
        p_ground=base.noise.p_ground,
        axis_binding=base.noise.axis_binding,
        fixed_axis_theta_deg=base.noise.fixed_axis_theta_deg
    )
    return base.model_copy(update={"noise": noise})


def with_control(base: Scenario, Bc_nT: float) -> Scenario:
    """제어 자기장만 바꾼 시나리오"""
    if Bc_nT < 0:
        raise InvalidArgumentError(f"제어 자기장은 0 이상이어야 합니다: {Bc_nT} nT")
    return base.model_copy(update={"control_Bc_nT": float(Bc_nT)})


# --------- 병렬 실행 ---------

async def _gather_ordered(fn: Callable[[T], R], items: Sequence[T], max_workers: int) -> List[R]:
    semaphore = asyncio.Semaphore(max_workers)

    async def run_one(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(fn, item)

    # gather는 입력 순서대로 결과를 반환
    return await asyncio.gather(*(run_one(item) for item in items))


def run_concurrently(fn: Callable[[T], R], items: Iterable[T], max_workers: Optional[int] = None) -> List[R]:
    """
    독립 작업을 스레드에서 병렬 실행하고 입력 순서대로 결과 반환

    Args:
        fn: 각 항목에 적용할 함수
        items: 입력 항목
        max_workers: 동시 실행 수 (기본: QHT_THREADS)
    """
    items = list(items)
    if not items:
        return []
    workers = max_workers or get_settings().threads
    if workers <= 1:
        return [fn(item) for item in items]
    return asyncio.run(_gather_ordered(fn, items, workers))


# --------- 스윕 ---------

@dataclass
class SweepResult:
    """
    단일 파라미터 스윕 결과 (입력 순서 유지)

    metric은 argmax_value가 비교하는 SweepPoint 필드입니다 (eta 또는 ceiling_excess).
    """
    parameter: str
    values: np.ndarray
    points: List[SweepPoint]
    series: List[Optional[TimeSeries]] = field(default_factory=list)
    metric: str = "eta"

    def __len__(self) -> int:
        return len(self.points)

    def etas(self) -> np.ndarray:
        return np.array([p.eta for p in self.points], dtype=float)

    def excesses(self) -> np.ndarray:
        return np.array([p.ceiling_excess for p in self.points], dtype=float)

    def argmax_value(self) -> Optional[float]:
        """metric이 가장 큰 파라미터 값 (성공한 점이 없으면 None)"""
        ok = [p for p in self.points if p.ok]
        if not ok:
            return None
        return max(ok, key=lambda p: getattr(p, self.metric)).value

    def is_monotone_nondecreasing(self, tol: float = 0.0) -> bool:
        """성공한 점들의 η가 입력 순서대로 감소하지 않는지"""
        etas = np.array([p.eta for p in self.points if p.ok])
        return bool(np.all(np.diff(etas) >= -tol))

    @property
    def failures(self) -> List[SweepPoint]:
        return [p for p in self.points if not p.ok]


def run_sweep(
    parameter: str,
    factory: Callable[[float], Scenario],
    values: Iterable[float],
    keep_series: bool = False,
    max_workers: Optional[int] = None,
    metric: str = "eta"
) -> SweepResult:
    """
    파라미터 값마다 시나리오를 만들어 향상도를 계산

    각 점의 오류는 SweepPoint.error에 기록하고 스윕은 계속 진행합니다.
    """
    grid = np.asarray(list(values), dtype=float)

    def run_one(value: float) -> Tuple[SweepPoint, Optional[TimeSeries]]:
        try:
            curve, report = enhancement_curve(factory(value))
        except (QHTError, ValueError) as e:
            logger.warning(f"스윕 점 실패: {parameter}={value:.6g}: {e}")
            return SweepPoint(value=value, error=str(e)), None
        point = SweepPoint(
            value=value,
            eta=report.eta,
            t_star=report.t_star,
            exceeds_unitary_max=report.exceeds_unitary_max,
            p_noisy_max=report.p_noisy_max,
            unitary_max=report.unitary_max,
            ceiling_excess=report.ceiling_excess
        )
        return point, curve if keep_series else None

    logger.info(f"스윕 시작: {parameter}, {grid.size}개 점")
    results = run_concurrently(run_one, [float(v) for v in grid], max_workers)
    sweep = SweepResult(
        parameter=parameter,
        values=grid,
        points=[point for point, _ in results],
        series=[curve for _, curve in results] if keep_series else [],
        metric=metric
    )
    logger.info(f"스윕 완료: {parameter}, 실패 {len(sweep.failures)}개")
    return sweep


def sweep_T2(
    T2_values: Iterable[float] = FIG3_T2_VALUES,
    T1: float = FIG3_T1,
    keep_series: bool = True,
    max_workers: Optional[int] = None,
    base: Optional[Scenario] = None
) -> SweepResult:
    """
    T2 스윕

    Args:
        T2_values: T2 값들(초)
        T1: 모든 점에 공통인 T1(초)
        base: 나머지 설정을 가져올 시나리오 (기본: fig3)
    """
    base = base if base is not None else scenario_fig3(T1, T1)
    return run_sweep(
        "T2_s", lambda T2: with_noise_times(base, T1, T2), T2_values, keep_series, max_workers
    )


def sweep_ratio(
    log10_ratios: Iterable[float] = RATIO_LOG10_GRID,
    mode: SweepMode = SweepMode.FIX_T1,
    T1: float = FIG3_T1,
    T2: float = 1.0,
    keep_series: bool = False,
    max_workers: Optional[int] = None,
    base: Optional[Scenario] = None
) -> SweepResult:
    """
    log₁₀(T1/T2) 스윕

    Args:
        log10_ratios: log₁₀(T1/T2) 값들
        mode: fix_T1이면 T1을 고정하고 T2 = T1/비율, fix_T2이면 T2를 고정하고 T1 = T2·비율
        T1: fix_T1 모드의 T1(초)
        T2: fix_T2 모드의 T2(초)
        base: 나머지 설정을 가져올 시나리오 (기본: fig3)
    """
    mode = SweepMode(mode)
    base = base if base is not None else scenario_fig3()

    def factory(log10_ratio: float) -> Scenario:
        t1, t2 = ratio_times(log10_ratio, mode, T1, T2)
        return with_noise_times(base, t1, t2)

    return run_sweep("log10_T1_over_T2", factory, log10_ratios, keep_series, max_workers)


def sweep_control(
    Bc_values: Iterable[float] = BC_GRID_NT,
    T2: float = 1.0,
    T1: float = FIG4_T1,
    keep_series: bool = False,
    max_workers: Optional[int] = None,
    base: Optional[Scenario] = None
) -> SweepResult:
    """
    제어 자기장 B_c(nT) 스윕

    B_c가 커질수록 유니터리 상한 대비 이득은 먼저 커졌다가 줄어들므로
    argmax_value는 ceiling_excess 기준입니다.

    Args:
        Bc_values: B_c 값들(nT)
        T2, T1: base가 없을 때 fig4 시나리오의 시간 상수(초)
        base: 나머지 설정을 가져올 시나리오 (기본: fig4)
    """
    base = base if base is not None else scenario_fig4(T2, FIG4_BC_NT, T1)
    return run_sweep(
        "Bc_nT",
        lambda bc: with_control(base, bc),
        Bc_values,
        keep_series,
        max_workers,
        metric="ceiling_excess"
    )


# --------- 그림용 곡선 묶음 ---------

@dataclass(frozen=True)
class FigureCurve:
    """곡선 하나: 시나리오, 성공 확률 곡선(유니터리 기준 포함), 향상도"""
    label: str
    scenario: Scenario
    series: TimeSeries
    report: EnhancementReport


@dataclass(frozen=True)
class FigureBundle:
    name: str
    curves: List[FigureCurve]

    def curve(self, label: str) -> FigureCurve:
        for c in self.curves:
            if c.label == label:
                return c
        raise KeyError(label)

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.curves]


def _bundle(name: str, labelled: List[Tuple[str, Scenario]], max_workers: Optional[int]) -> FigureBundle:
    def run_one(item: Tuple[str, Scenario]) -> FigureCurve:
        label, scenario = item
        curve, report = enhancement_curve(scenario)
        return FigureCurve(label=label, scenario=scenario, series=curve, report=report)

    return FigureBundle(name=name, curves=run_concurrently(run_one, labelled, max_workers))


def fig3_bundle(
    T2_values: Sequence[float] = FIG3_T2_VALUES,
    T1: float = FIG3_T1,
    max_workers: Optional[int] = None,
    base: Optional[Scenario] = None
) -> FigureBundle:
    """T2 곡선들과 T2 = 2·T1 경계 곡선 (유니터리 기준은 각 곡선의 p_unitary와 p_unitary_ceiling)"""
    base = base if base is not None else scenario_fig3(T1, T1)
    labelled = [(f"T2={t2:g}", with_noise_times(base, T1, t2)) for t2 in T2_values]
    labelled.append(("T2=2T1", with_noise_times(base, T1, 2.0 * T1)))
    return _bundle("fig3", labelled, max_workers)


def fig4_bundle(
    T2_values: Sequence[float] = FIG4_T2_VALUES,
    Bc_nT: float = FIG4_BC_NT,
    T1: float = FIG4_T1,
    max_workers: Optional[int] = None,
    base: Optional[Scenario] = None
) -> FigureBundle:
    """제어 자기장 곡선들, T2 = 2·T1 경계, 제어 없는 T2 = 1.0 기준 곡선"""
    base = base if base is not None else scenario_fig4(T1, FIG4_BC_NT, T1)
    controlled = with_control(base, Bc_nT)
    labelled = [(f"Bc={Bc_nT:g},T2={t2:g}", with_noise_times(controlled, T1, t2)) for t2 in T2_values]
    labelled.append((f"Bc={Bc_nT:g},T2=2T1", with_noise_times(controlled, T1, 2.0 * T1)))
    labelled.append(("Bc=0,T2=1", with_noise_times(with_control(base, 0.0), T1, 1.0)))
    return _bundle("fig4", labelled, max_workers)


__all__ = [
    "Scenario",
    "SweepMode",
    "SweepResult",
    "FigureBundle",
    "FigureCurve",
    "scenario_fig3",
    "scenario_fig4",
    "noise_times",
    "with_noise_times",
    "with_control",
    "run_sweep",
    "sweep_T2",
    "sweep_ratio",
    "sweep_control",
    "fig3_bundle",
    "fig4_bundle",
]
