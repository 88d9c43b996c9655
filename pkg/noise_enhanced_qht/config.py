#!/usr/bin/env python3
"""
실행 설정 모듈

INI 형식 설정 파일을 파싱하고 pydantic 섹션 모델로 검증한 뒤
프리셋 → 파일 → 명령행 순서로 값을 적용하여 Scenario를 만듭니다.

검증 실패 시 첫 번째 오류에서 멈추지 않고 모든 위반 사항을 ConfigError로 보고합니다.
"""

import logging
import configparser
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError, QHTError
from .experiments import FIG3_T1, FIG4_BC_NT, FIG4_T1, scenario_fig3, scenario_fig4
from .model import noise_from_times
from .schemas import (
    PRIOR_TOL,
    AxisBinding,
    ProbeKind,
    PropagationMethod,
    Scenario,
)

logger = logging.getLogger("config")

DEFAULT_T2 = 1.0


class Preset(str, Enum):
    FIG3 = "fig3"
    FIG4 = "fig4"


PRESET_T1 = {Preset.FIG3: FIG3_T1, Preset.FIG4: FIG4_T1}


# --------- 섹션 모델 ---------

class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ScenarioSection(_Section):
    preset: Optional[Preset] = None
    q0: Optional[float] = Field(None, ge=0, le=1)
    q1: Optional[float] = Field(None, ge=0, le=1)
    gamma: Optional[float] = Field(None, gt=0)


class HypothesisSection(_Section):
    B_nT: Optional[float] = Field(None, ge=0)
    theta_deg: Optional[float] = Field(None, ge=-180, le=180)


class ControlSection(_Section):
    Bc_nT: Optional[float] = None


class NoiseSection(_Section):
    T1_s: Optional[float] = Field(None, gt=0)
    T2_s: Optional[float] = Field(None, gt=0)
    p_ground: Optional[float] = Field(None, ge=0, le=1)
    axis_binding: Optional[AxisBinding] = None
    fixed_axis_theta_deg: Optional[float] = Field(None, ge=-180, le=180)


class ProbeSection(_Section):
    kind: Optional[ProbeKind] = None
    theta_deg: Optional[float] = None
    phi_deg: Optional[float] = None
    epsilon: Optional[float] = Field(None, ge=0, le=1)


class TimeSection(_Section):
    horizon_s: Optional[float] = Field(None, gt=0)
    grid_points: Optional[int] = Field(None, ge=2)


class IntegratorSection(_Section):
    method: Optional[PropagationMethod] = None
    dt_max_s: Optional[float] = Field(None, gt=0)
    richardson_check: Optional[bool] = None


SECTIONS: Dict[str, Type[_Section]] = {
    "scenario": ScenarioSection,
    "hypothesis0": HypothesisSection,
    "hypothesis1": HypothesisSection,
    "control": ControlSection,
    "noise": NoiseSection,
    "probe": ProbeSection,
    "time": TimeSection,
    "integrator": IntegratorSection,
}

# 명령행 옵션 → (섹션, 키)
OVERRIDE_KEYS = {
    "preset": ("scenario", "preset"),
    "t1": ("noise", "T1_s"),
    "t2": ("noise", "T2_s"),
    "bc": ("control", "Bc_nT"),
    "p_ground": ("noise", "p_ground"),
    "probe": ("probe", "kind"),
    "horizon": ("time", "horizon_s"),
    "grid_points": ("time", "grid_points"),
    "method": ("integrator", "method"),
}


def _pick(value, default):
    return default if value is None else value


class RunConfig(_Section):
    """검증된 실행 설정 - 지정되지 않은 값은 프리셋 기본값을 따릅니다"""
    scenario: ScenarioSection = Field(default_factory=ScenarioSection)
    hypothesis0: HypothesisSection = Field(default_factory=HypothesisSection)
    hypothesis1: HypothesisSection = Field(default_factory=HypothesisSection)
    control: ControlSection = Field(default_factory=ControlSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    probe: ProbeSection = Field(default_factory=ProbeSection)
    time: TimeSection = Field(default_factory=TimeSection)
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)

    @property
    def preset(self) -> Preset:
        return _pick(self.scenario.preset, Preset.FIG3)

    @property
    def T1(self) -> float:
        return _pick(self.noise.T1_s, PRESET_T1[self.preset])

    @property
    def T2(self) -> float:
        return _pick(self.noise.T2_s, DEFAULT_T2)

    def priors(self) -> tuple:
        """(q0, q1) - 하나만 지정되면 나머지는 1에서 뺀 값"""
        q0, q1 = self.scenario.q0, self.scenario.q1
        if q0 is None and q1 is None:
            return 0.5, 0.5
        if q1 is None:
            return q0, 1.0 - q0
        if q0 is None:
            return 1.0 - q1, q1
        return q0, q1

    def violations(self) -> List[str]:
        """섹션 간 의미 검사 (사전확률, T2 ≤ 2·T1)"""
        problems = []
        q0, q1 = self.priors()
        if abs(q0 + q1 - 1.0) > PRIOR_TOL:
            problems.append(f"[scenario] 사전확률의 합이 1이 아닙니다: q0={q0}, q1={q1}")
        if self.T2 > 2.0 * self.T1 * (1.0 + 1e-12):
            problems.append(
                f"[noise] T2 ≤ 2·T1 조건 위반: T1={self.T1} s, T2={self.T2} s"
            )
        return problems

    def to_scenario(self) -> Scenario:
        """
        프리셋 시나리오에 설정 값을 덮어써서 Scenario 생성

        Raises:
            ConfigError: 결합된 값이 시나리오 불변식을 깨는 경우
        """
        problems = self.violations()
        if problems:
            raise ConfigError(problems)

        try:
            if self.preset == Preset.FIG4:
                base = scenario_fig4(self.T2, _pick(self.control.Bc_nT, FIG4_BC_NT), self.T1)
            else:
                base = scenario_fig3(self.T2, self.T1)
            data = base.model_dump()

            data["q0"], data["q1"] = self.priors()
            data["gamma"] = _pick(self.scenario.gamma, data["gamma"])
            for name, section in (("field0", self.hypothesis0), ("field1", self.hypothesis1)):
                data[name]["magnitude_nT"] = _pick(section.B_nT, data[name]["magnitude_nT"])
                data[name]["theta_deg"] = _pick(section.theta_deg, data[name]["theta_deg"])
            data["control_Bc_nT"] = _pick(self.control.Bc_nT, data["control_Bc_nT"])

            data["noise"] = noise_from_times(
                self.T1,
                self.T2,
                p_ground=_pick(self.noise.p_ground, 0.5),
                axis_binding=_pick(self.noise.axis_binding, AxisBinding.HAMILTONIAN_LOCKED),
                fixed_axis_theta_deg=_pick(self.noise.fixed_axis_theta_deg, 90.0)
            ).model_dump()

            data["probe"]["kind"] = _pick(self.probe.kind, data["probe"]["kind"])
            data["probe"]["theta_deg"] = _pick(self.probe.theta_deg, data["probe"]["theta_deg"])
            data["probe"]["phi_deg"] = _pick(self.probe.phi_deg, data["probe"]["phi_deg"])
            data["probe"]["epsilon"] = _pick(self.probe.epsilon, data["probe"]["epsilon"])

            data["horizon"] = _pick(self.time.horizon_s, data["horizon"])
            data["grid_points"] = _pick(self.time.grid_points, data["grid_points"])

            settings = data["settings"]
            settings["method"] = _pick(self.integrator.method, settings["method"])
            settings["dt_max"] = _pick(self.integrator.dt_max_s, settings["dt_max"])
            settings["richardson_check"] = _pick(
                self.integrator.richardson_check, settings["richardson_check"]
            )
            return Scenario(**data)
        except ValidationError as e:
            raise ConfigError([_format_error("scenario", err) for err in e.errors()]) from e
        except QHTError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError([str(e)]) from e


# --------- 파싱 ---------

def _format_error(section: str, err: Dict[str, Any]) -> str:
    location = ".".join(str(part) for part in err.get("loc", ()))
    return f"[{section}] {location}: {err.get('msg', 'invalid')}"


def build_config(raw: Dict[str, Dict[str, Any]]) -> RunConfig:
    """
    섹션별 원시 값(dict)을 검증하여 RunConfig 생성

    알 수 없는 섹션/키, 타입 오류, 범위 오류, 의미 검사 위반을 모두 모아서 보고합니다.

    Raises:
        ConfigError: 위반 사항이 하나 이상인 경우
    """
    violations = []
    sections = {}
    for name, values in raw.items():
        model = SECTIONS.get(name)
        if model is None:
            violations.append(f"알 수 없는 섹션: [{name}]")
            continue
        try:
            sections[name] = model(**values)
        except ValidationError as e:
            violations.extend(_format_error(name, err) for err in e.errors())

    if violations:
        raise ConfigError(violations)

    config = RunConfig(**sections)
    problems = config.violations()
    if problems:
        raise ConfigError(problems)
    return config


def parse_config(text: str) -> RunConfig:
    """
    INI 형식 텍스트를 RunConfig로 변환

    빈 텍스트는 모든 값이 기본값인 설정(fig3 프리셋, T2 = 1.0 s)이 됩니다.

    Raises:
        ConfigError: 구문 오류 또는 검증 위반
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # 키의 대소문자 유지 (T1_s, B_nT)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError([f"설정 구문 오류: {e}"]) from e

    raw = {name: dict(parser.items(name)) for name in parser.sections()}
    config = build_config(raw)
    logger.debug(f"설정 파싱 완료: 섹션 {sorted(raw)}")
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    """설정 파일 읽기 (UTF-8)"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError([f"설정 파일을 읽을 수 없습니다: {path}: {e}"]) from e
    return parse_config(text)


def apply_overrides(config: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """
    명령행 값 적용 - 새 RunConfig를 반환하며 원래 설정은 변경되지 않습니다.

    Args:
        config: 기존 설정
        overrides: OVERRIDE_KEYS의 키 → 값 (None은 무시)

    Raises:
        ConfigError: 알 수 없는 키 또는 검증 위반
    """
    unknown = [key for key in overrides if key not in OVERRIDE_KEYS]
    if unknown:
        raise ConfigError([f"알 수 없는 옵션: {key}" for key in unknown])

    raw = {name: getattr(config, name).model_dump(exclude_none=True) for name in SECTIONS}
    for key, value in overrides.items():
        if value is None:
            continue
        section, name = OVERRIDE_KEYS[key]
        raw[section][name] = value
    return build_config(raw)
