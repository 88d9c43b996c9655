#!/usr/bin/env python3
"""
명령행 인터페이스

하위 명령:
- simulate: 성공 확률 곡선 (노이즈/유니터리)
- conditions: 노이즈 강화 충분 조건 검사
- eta: 향상도 η
- sweep: T2, T1/T2 비율, 제어 자기장 스윕
- chernoff: 시간에 따른 Chernoff 지수
- fig3, fig4: 그림용 곡선 묶음

종료 코드: 0 성공, 2 설정/사용법/입출력 오류, 3 수치 계산 실패
"""

import sys
import logging
import argparse
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .config import Preset, apply_overrides, load_config, parse_config
from .discrimination import (
    check_conditions,
    chernoff_curve,
    enhancement_curve,
    enhancement_eta,
    require_distinct_hypotheses,
)
from .errors import (
    ConfigError,
    DegenerateAxisError,
    DegenerateHypothesesError,
    InvalidArgumentError,
    NumericalFailureError,
    UnphysicalNoiseError,
)
from .experiments import (
    BC_GRID_NT,
    FIG3_T2_VALUES,
    RATIO_LOG10_GRID,
    SweepMode,
    fig3_bundle,
    fig4_bundle,
    noise_times,
    sweep_control,
    sweep_ratio,
    sweep_T2,
)
from .output import (
    bundle_frame,
    chernoff_frame,
    curve_frame,
    format_bundle,
    format_chernoff,
    format_conditions,
    format_curve,
    format_enhancement,
    format_sweep,
    report_frame,
    sweep_frame,
    write_csv,
)
from .schemas import ProbeKind, PropagationMethod, Scenario
from .settings import get_settings

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


# --------- 인자 파서 ---------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI 설정 파일")
    common.add_argument("--preset", choices=[p.value for p in Preset], help="기본 시나리오 (기본: fig3)")
    common.add_argument("--t1", type=float, help="T1 (s)")
    common.add_argument("--t2", type=float, help="T2 (s)")
    common.add_argument("--bc", type=float, help="x 방향 제어 자기장 (nT)")
    common.add_argument("--p-ground", type=float, help="정상 상태 바닥 상태 점유율")
    common.add_argument("--probe", choices=[k.value for k in ProbeKind], help="프로브 상태")
    common.add_argument("--horizon", type=float, help="시간 구간 (s)")
    common.add_argument("--grid-points", type=int, help="시간 격자점 수")
    common.add_argument("--method", choices=[m.value for m in PropagationMethod], help="시간 전개 방법")
    common.add_argument("--out", type=Path, help="CSV 출력 경로")
    common.add_argument("--verbose", "-v", action="store_true", help="INFO 로그 출력")

    parser = argparse.ArgumentParser(
        prog="noise_enhanced_qht",
        description="노이즈 강화 양자 가설 검정 시뮬레이터"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="성공 확률 곡선")
    sub.add_parser("conditions", parents=[common], help="충분 조건 검사")
    sub.add_parser("eta", parents=[common], help="향상도 η")
    sub.add_parser("chernoff", parents=[common], help="Chernoff 지수 곡선")
    sub.add_parser("fig3", parents=[common], help="자기장 방향 판별 곡선 묶음")
    sub.add_parser("fig4", parents=[common], help="제어 자기장 보조 판별 곡선 묶음")

    sweep = sub.add_parser("sweep", parents=[common], help="단일 파라미터 스윕")
    sweep.add_argument("--param", required=True, choices=["t2", "ratio", "bc"], help="스윕 파라미터")
    sweep.add_argument("--values", nargs="+", type=float, help="파라미터 값 목록 (ratio는 log10(T1/T2))")
    sweep.add_argument("--mode", choices=[m.value for m in SweepMode], default=SweepMode.FIX_T1.value,
                       help="ratio 스윕에서 고정할 시간 상수")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, object]:
    return {
        "preset": args.preset,
        "t1": args.t1,
        "t2": args.t2,
        "bc": args.bc,
        "p_ground": args.p_ground,
        "probe": args.probe,
        "horizon": args.horizon,
        "grid_points": args.grid_points,
        "method": args.method,
    }


def resolve_scenario(args: argparse.Namespace, default_preset: Optional[Preset] = None) -> Scenario:
    """
    프리셋 → 설정 파일 → 명령행 순서로 적용한 시나리오

    Args:
        args: 파싱된 인자
        default_preset: 설정 파일과 명령행 모두 프리셋을 정하지 않았을 때 쓸 프리셋

    Raises:
        ConfigError: 설정 위반
        DegenerateHypothesesError: 두 가설의 동역학이 동일한 경우
    """
    config = load_config(args.config) if args.config else parse_config("")
    overrides = _overrides(args)
    if overrides["preset"] is None and config.scenario.preset is None and default_preset is not None:
        overrides["preset"] = default_preset.value
    scenario = apply_overrides(config, overrides).to_scenario()
    require_distinct_hypotheses(scenario)
    return scenario


def _reject(args: argparse.Namespace, *names: str) -> None:
    """명령이 스스로 정하는 값을 옵션으로 준 경우 오류"""
    given = [name for name in names if getattr(args, name) is not None]
    if given:
        raise ConfigError([
            f"--{name.replace('_', '-')} 옵션은 {args.command} 명령에 적용되지 않습니다" for name in given
        ])


def _emit(text: str) -> None:
    print(text)


def _save(frame, args: argparse.Namespace) -> None:
    if args.out is not None:
        write_csv(frame, args.out)


# --------- 명령 ---------

def cmd_simulate(args: argparse.Namespace) -> int:
    curve, report = enhancement_curve(resolve_scenario(args))
    _emit(format_curve(curve, report))
    _save(curve_frame(curve), args)
    return EXIT_OK


def cmd_conditions(args: argparse.Namespace) -> int:
    report = check_conditions(resolve_scenario(args))
    _emit(format_conditions(report))
    _save(report_frame(report), args)
    return EXIT_OK


def cmd_eta(args: argparse.Namespace) -> int:
    report = enhancement_eta(resolve_scenario(args))
    _emit(format_enhancement(report))
    _save(report_frame(report), args)
    return EXIT_OK


def cmd_chernoff(args: argparse.Namespace) -> int:
    series = chernoff_curve(resolve_scenario(args))
    _emit(format_chernoff(series))
    _save(chernoff_frame(series), args)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """스윕하는 값 외의 설정은 모두 resolve_scenario의 시나리오를 따릅니다"""
    if args.param == "t2":
        _reject(args, "t2")
        base = resolve_scenario(args)
        T1, _ = noise_times(base)
        result = sweep_T2(args.values or FIG3_T2_VALUES, T1=T1, keep_series=False, base=base)
    elif args.param == "ratio":
        mode = SweepMode(args.mode)
        _reject(args, "t2" if mode == SweepMode.FIX_T1 else "t1")
        base = resolve_scenario(args)
        T1, T2 = noise_times(base)
        result = sweep_ratio(args.values or RATIO_LOG10_GRID, mode=mode, T1=T1, T2=T2, base=base)
    else:
        _reject(args, "bc")
        base = resolve_scenario(args, default_preset=Preset.FIG4)
        result = sweep_control(args.values or BC_GRID_NT, base=base)
    _emit(format_sweep(result))
    _save(sweep_frame(result), args)
    return EXIT_OK


def cmd_fig3(args: argparse.Namespace) -> int:
    _reject(args, "t2")
    base = resolve_scenario(args, default_preset=Preset.FIG3)
    T1, _ = noise_times(base)
    bundle = fig3_bundle(T1=T1, base=base)
    _emit(format_bundle(bundle))
    _save(bundle_frame(bundle), args)
    return EXIT_OK


def cmd_fig4(args: argparse.Namespace) -> int:
    _reject(args, "t2")
    base = resolve_scenario(args, default_preset=Preset.FIG4)
    T1, _ = noise_times(base)
    bundle = fig4_bundle(Bc_nT=base.control_Bc_nT, T1=T1, base=base)
    _emit(format_bundle(bundle))
    _save(bundle_frame(bundle), args)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "simulate": cmd_simulate,
    "conditions": cmd_conditions,
    "eta": cmd_eta,
    "chernoff": cmd_chernoff,
    "sweep": cmd_sweep,
    "fig3": cmd_fig3,
    "fig4": cmd_fig4,
}


# --------- 진입점 ---------

def configure_logging(verbose: bool) -> None:
    level = "INFO" if verbose else get_settings().log_level
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT)


def run_command(argv: Optional[List[str]] = None) -> int:
    """
    명령 실행

    Args:
        argv: 명령행 인자 (None이면 sys.argv[1:])

    Returns:
        int: 종료 코드
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    try:
        configure_logging(args.verbose)
        return COMMANDS[args.command](args)
    except ConfigError as e:
        for violation in e.violations:
            print(f"설정 오류: {violation}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidArgumentError, UnphysicalNoiseError, DegenerateAxisError) as e:
        print(f"오류: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailureError, DegenerateHypothesesError) as e:
        print(f"수치 계산 실패: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"입출력 오류: {e}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
