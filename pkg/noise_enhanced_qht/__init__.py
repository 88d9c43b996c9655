"""
노이즈 강화 양자 가설 검정

린드블라드 노이즈가 있는 2준위 스핀으로 두 자기장 가설을 판별할 때의
성공 확률, 노이즈 강화 조건, 향상도, Chernoff 지수를 계산합니다.
"""

from .discrimination import (
    chernoff,
    chernoff_curve,
    check_conditions,
    enhancement_curve,
    enhancement_eta,
    initial_rates,
    probe_state,
    strong_dephasing_limit,
    success_curve,
    success_probability,
    unitary_ceiling,
    unitary_max,
)
from .errors import (
    ConfigError,
    DegenerateAxisError,
    DegenerateHypothesesError,
    InvalidArgumentError,
    NumericalFailureError,
    QHTError,
    UnphysicalNoiseError,
)
from .experiments import (
    fig3_bundle,
    fig4_bundle,
    scenario_fig3,
    scenario_fig4,
    sweep_control,
    sweep_ratio,
    sweep_T2,
)
from .linalg_core import DensityMatrix
from .schemas import (
    FieldSpec,
    NoiseSpec,
    ProbeSpec,
    PropagationSettings,
    Scenario,
)

__version__ = "1.0.0"
