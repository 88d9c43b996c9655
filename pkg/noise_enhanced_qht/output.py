#!/usr/bin/env python3
"""
출력 모듈

곡선/스윕 결과를 pandas DataFrame으로 변환해 CSV로 저장하고(임시 파일 → 이름 변경),
표준 출력용 텍스트 보고서를 tabulate로 만듭니다.
"""

import os
import logging
import tempfile
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from pydantic import BaseModel
from tabulate import tabulate

from .discrimination import ChernoffSeries, TimeSeries
from .experiments import FigureBundle, SweepResult
from .schemas import ConditionReport, EnhancementReport

logger = logging.getLogger("output")

CURVE_COLUMNS = [
    "t_s", "p_noisy", "p_unitary", "trace_distance_noisy", "trace_distance_unitary", "p_unitary_ceiling",
]
SWEEP_COLUMNS = ["param_value", "eta", "t_star_s", "exceeds_unitary_max", "p_noisy_max", "ceiling_excess"]
CHERNOFF_COLUMNS = ["t_s", "exponent_noisy", "exponent_unitary", "q_noisy", "q_unitary"]
FLOAT_FORMAT = "%.17g"


# --------- DataFrame 변환 ---------

def curve_frame(series: TimeSeries) -> pd.DataFrame:
    return pd.DataFrame({
        "t_s": series.times,
        "p_noisy": series.p_noisy,
        "p_unitary": series.p_unitary,
        "trace_distance_noisy": series.trace_distance_noisy,
        "trace_distance_unitary": series.trace_distance_unitary,
        "p_unitary_ceiling": series.p_unitary_ceiling,
    }, columns=CURVE_COLUMNS)


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    """스윕 요약 (실패한 점은 수치 열이 NaN)"""
    return pd.DataFrame({
        "param_value": [p.value for p in result.points],
        "eta": [p.eta for p in result.points],
        "t_star_s": [p.t_star for p in result.points],
        "exceeds_unitary_max": [p.exceeds_unitary_max for p in result.points],
        "p_noisy_max": [p.p_noisy_max for p in result.points],
        "ceiling_excess": [p.ceiling_excess for p in result.points],
    }, columns=SWEEP_COLUMNS)


def chernoff_frame(series: ChernoffSeries) -> pd.DataFrame:
    return pd.DataFrame({
        "t_s": series.times,
        "exponent_noisy": series.exponent_noisy,
        "exponent_unitary": series.exponent_unitary,
        "q_noisy": series.q_noisy,
        "q_unitary": series.q_unitary,
    }, columns=CHERNOFF_COLUMNS)


def bundle_frame(bundle: FigureBundle) -> pd.DataFrame:
    """곡선 묶음을 label 열이 붙은 긴 형식으로"""
    frames = [curve_frame(c.series).assign(label=c.label) for c in bundle.curves]
    if not frames:
        return pd.DataFrame(columns=["label"] + CURVE_COLUMNS)
    return pd.concat(frames, ignore_index=True)[["label"] + CURVE_COLUMNS]


def report_frame(report: BaseModel) -> pd.DataFrame:
    """보고서 하나를 한 행짜리 표로"""
    return pd.DataFrame([report.model_dump()])


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """
    CSV 저장 - 같은 디렉터리의 임시 파일에 쓴 뒤 원자적으로 이름을 바꿉니다.

    부동소수점은 유효숫자 17자리, 줄바꿈은 '\\n' 입니다.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.info(f"CSV 저장: {target} ({len(frame)}행)")
    return target


# --------- 텍스트 보고서 ---------

def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _key_value_table(rows) -> str:
    # bool과 float가 섞인 값 열은 문자열로 미리 변환
    return tabulate(
        [[name, _cell(value)] for name, value in rows],
        headers=["항목", "값"],
        disable_numparse=True
    )


def format_conditions(report: ConditionReport) -> str:
    rows = [
        ["x1", report.x1],
        ["y1", report.y1],
        ["z1", report.z1],
        ["w1", report.w1],
        ["λmax − λmin (rad/s)", report.lambda_max - report.lambda_min],
        ["조건 1", report.cond1],
        ["조건 2", report.cond2],
        ["경계 근접", report.near_boundary],
        ["초기 증가율 (노이즈)", report.noisy_rate],
        ["초기 증가율 (유니터리)", report.unitary_rate],
    ]
    return _key_value_table(rows)


def format_enhancement(report: EnhancementReport) -> str:
    rows = [
        ["η", report.eta],
        ["t* (s)", report.t_star],
        ["max p_noisy", report.p_noisy_max],
        ["유니터리 최대값", report.unitary_max],
        ["유니터리 상한 대비 최대 이득", report.ceiling_excess],
        ["이득 시점 (s)", report.t_excess],
        ["유니터리 상한 초과", report.exceeds_unitary_max],
    ]
    return _key_value_table(rows)


def format_curve(series: TimeSeries, report: EnhancementReport) -> str:
    header = f"시나리오 {series.fingerprint}: {len(series)}개 시점, 0 ~ {series.times[-1]:g} s"
    return f"{header}\n{format_enhancement(report)}"


def format_sweep(result: SweepResult) -> str:
    rows = [
        [p.value, p.eta, p.t_star, p.exceeds_unitary_max, p.p_noisy_max, p.ceiling_excess, p.error or ""]
        for p in result.points
    ]
    table = tabulate(
        rows,
        headers=[result.parameter, "η", "t* (s)", "초과", "max p_noisy", "상한 대비 이득", "오류"],
        floatfmt=".6g"
    )
    best = result.argmax_value()
    if best is None:
        return table
    label = "η" if result.metric == "eta" else "상한 대비 이득"
    return f"{table}\n\n{label} 최대: {result.parameter} = {best:g}"


def format_bundle(bundle: FigureBundle) -> str:
    rows = [
        [c.label, c.report.eta, c.report.t_star, c.report.p_noisy_max,
         c.report.unitary_max, c.report.ceiling_excess, c.report.exceeds_unitary_max]
        for c in bundle.curves
    ]
    return tabulate(
        rows,
        headers=["곡선", "η", "t* (s)", "max p_noisy", "유니터리 최대값", "상한 대비 이득", "초과"],
        floatfmt=".6g"
    )


def format_chernoff(series: ChernoffSeries) -> str:
    k_noisy = int(np.argmax(series.exponent_noisy))
    k_unitary = int(np.argmax(series.exponent_unitary))
    rows = [
        ["노이즈", series.exponent_noisy[k_noisy], series.times[k_noisy]],
        ["유니터리", series.exponent_unitary[k_unitary], series.times[k_unitary]],
    ]
    return tabulate(rows, headers=["동역학", "최대 Chernoff 지수", "t (s)"], floatfmt=".6g")
