import math

import numpy as np
import pytest

from noise_enhanced_qht.discrimination import MAX_GRID_POINTS, enhancement_eta, resolve_time_grid
from noise_enhanced_qht.errors import InvalidArgumentError, UnphysicalNoiseError
from noise_enhanced_qht.experiments import (
    Scenario,
    SweepMode,
    SweepResult,
    fig3_bundle,
    fig4_bundle,
    noise_times,
    ratio_times,
    run_concurrently,
    scenario_fig3,
    scenario_fig4,
    sweep_control,
    sweep_ratio,
    sweep_T2,
    with_control,
    with_noise_times,
)
from noise_enhanced_qht.model import rates_to_times, scenario_hypotheses
from noise_enhanced_qht.schemas import ProbeKind, ProbeSpec, SweepPoint


class TestScenarioBuilders:
    def test_fig3_rates(self):
        scenario = scenario_fig3(0.6)
        assert scenario.noise.kappa1 == pytest.approx(0.78788, abs=1e-5)
        assert scenario.noise.kappa2 == pytest.approx(0.18182, abs=1e-5)
        assert scenario.probe.kind == ProbeKind.KET0
        assert (scenario.horizon, scenario.grid_points) == (20.0, 400)

    def test_fig3_round_trip(self):
        for T2 in (5.4, 1.0, 0.6):
            noise = scenario_fig3(T2).noise
            T1, T2_back = rates_to_times(noise.kappa1, noise.kappa2)
            assert T1 == pytest.approx(5.5, abs=1e-12)
            assert T2_back == pytest.approx(T2, abs=1e-12)

    def test_fig3_pure_damping(self):
        assert scenario_fig3(11.0).noise.kappa1 == pytest.approx(0.0, abs=1e-15)

    def test_fig3_unphysical(self):
        with pytest.raises(UnphysicalNoiseError):
            scenario_fig3(12.0)

    def test_fig4_geometry(self):
        scenario = scenario_fig4(1.0, 0.75)
        assert scenario.field0.theta_deg == scenario.field1.theta_deg == 90.0
        assert scenario.control_Bc_nT == 0.75
        assert scenario.probe.kind == ProbeKind.ALONG_X
        assert scenario_fig4(14.8).noise.kappa1 == pytest.approx(0.0, abs=1e-15)

    def test_fig4_negative_control(self):
        with pytest.raises(InvalidArgumentError):
            scenario_fig4(1.0, -0.1)

    def test_fig4_noise_shared_without_control(self):
        h0, h1 = scenario_hypotheses(scenario_fig4(1.0, 0.0))
        for a, b in zip(h0.lindblad_ops, h1.lindblad_ops):
            np.testing.assert_allclose(a, b, atol=1e-15)

    def test_fig4_noise_differs_with_control(self):
        h0, h1 = scenario_hypotheses(scenario_fig4(1.0, 0.75))
        assert not np.allclose(h0.lindblad_ops[0], h1.lindblad_ops[0])

    def test_scenario_reexport(self):
        assert isinstance(scenario_fig3(), Scenario)

    def test_with_noise_times_keeps_other_noise_settings(self):
        base = scenario_fig3().model_copy(update={"noise": scenario_fig3().noise.model_copy(update={"p_ground": 0.8})})
        scenario = with_noise_times(base, 5.5, 0.6)
        assert scenario.noise.p_ground == 0.8
        assert scenario.noise.axis_binding == base.noise.axis_binding
        assert noise_times(scenario) == pytest.approx((5.5, 0.6), abs=1e-12)
        assert scenario.field0 == base.field0

    def test_with_control(self):
        scenario = with_control(scenario_fig4(1.0, 0.0), 1.5)
        assert scenario.control_Bc_nT == 1.5
        assert scenario.noise == scenario_fig4(1.0, 0.0).noise
        with pytest.raises(InvalidArgumentError):
            with_control(scenario, -0.5)


class TestTimeGrid:
    def test_unchanged_when_resolved(self):
        scenario = scenario_fig3(0.6)
        assert resolve_time_grid(scenario) is scenario

    def test_refined_for_short_T2(self):
        scenario = resolve_time_grid(scenario_fig3(5.5e-3))
        assert scenario.grid_points == math.ceil(4 * 20.0 / 5.5e-3) + 1
        assert scenario.horizon / (scenario.grid_points - 1) <= 5.5e-3 / 4

    def test_capped(self, caplog):
        with caplog.at_level("WARNING", logger="discrimination"):
            scenario = resolve_time_grid(scenario_fig3(1e-4))
        assert scenario.grid_points == MAX_GRID_POINTS
        assert caplog.records

    def test_ratio_times(self):
        assert ratio_times(1.0, SweepMode.FIX_T1, 5.5, 1.0) == pytest.approx((5.5, 0.55))
        assert ratio_times(2.0, SweepMode.FIX_T2, 5.5, 0.3) == pytest.approx((30.0, 0.3))


class TestSweeps:
    def test_empty(self):
        result = sweep_T2([])
        assert len(result) == 0
        assert result.argmax_value() is None

    @pytest.mark.parametrize("T2", [0.6, 0.01])
    def test_single_point_matches_direct_run(self, T2):
        result = sweep_T2([T2])
        direct = enhancement_eta(scenario_fig3(T2))
        point = result.points[0]
        assert point.ok
        assert point.eta == direct.eta
        assert point.t_star == direct.t_star
        assert point.exceeds_unitary_max == direct.exceeds_unitary_max
        assert point.ceiling_excess == direct.ceiling_excess
        assert result.series[0] is not None

    def test_base_scenario_carried_into_points(self):
        base = scenario_fig3(5.5, 5.5).model_copy(update={"probe": ProbeSpec(kind=ProbeKind.ALONG_X)})
        result = sweep_T2([0.6], keep_series=False, base=base)
        direct = enhancement_eta(scenario_fig3(0.6).model_copy(update={"probe": ProbeSpec(kind=ProbeKind.ALONG_X)}))
        assert result.points[0].eta == direct.eta
        assert result.points[0].eta != sweep_T2([0.6], keep_series=False).points[0].eta

    def test_ratio_uses_base_T1(self):
        base = scenario_fig3(1.0, 1.0)
        result = sweep_ratio([1.0], T1=1.0, base=base)
        direct = enhancement_eta(scenario_fig3(0.1, 1.0))
        assert result.points[0].eta == direct.eta

    def test_errors_recorded_and_sweep_continues(self):
        result = sweep_T2([0.6, 12.0, 1.0])
        assert [p.ok for p in result.points] == [True, False, True]
        assert "2·T1" in result.points[1].error
        assert math.isnan(result.points[1].eta)
        assert result.series[1] is None
        np.testing.assert_array_equal(result.values, [0.6, 12.0, 1.0])

    def test_deterministic_across_concurrency(self):
        serial = sweep_T2([1.0, 0.6, 2.0], max_workers=1)
        parallel = sweep_T2([1.0, 0.6, 2.0], max_workers=3)
        np.testing.assert_array_equal(serial.etas(), parallel.etas())
        assert [p.t_star for p in serial.points] == [p.t_star for p in parallel.points]

    def test_ratio_boundary_point(self):
        result = sweep_ratio([math.log10(0.5), 0.5], keep_series=False)
        assert all(p.ok for p in result.points)
        assert result.parameter == "log10_T1_over_T2"

    def test_ratio_below_boundary_fails(self):
        result = sweep_ratio([-1.0])
        assert not result.points[0].ok

    def test_control_without_field_has_no_enhancement(self):
        result = sweep_control([0.0])
        assert result.points[0].eta <= 1e-9
        assert result.points[0].ceiling_excess <= 1e-9
        assert not result.points[0].exceeds_unitary_max

    def test_control_single_point_matches_direct_run(self):
        result = sweep_control([0.75])
        direct = enhancement_eta(scenario_fig4(1.0, 0.75))
        assert result.points[0].eta == direct.eta

    def test_negative_control_recorded(self):
        result = sweep_control([-1.0])
        assert result.failures and "0 이상" in result.failures[0].error

    def test_run_concurrently_preserves_order(self):
        assert run_concurrently(lambda x: x * x, range(10), max_workers=4) == [x * x for x in range(10)]

    def test_thread_setting_from_environment(self, monkeypatch):
        monkeypatch.setenv("QHT_THREADS", "2")
        assert run_concurrently(str, [1, 2, 3]) == ["1", "2", "3"]


class TestSweepResult:
    def _result(self, etas, errors=None):
        errors = errors or [None] * len(etas)
        points = [
            SweepPoint(value=float(k), eta=eta, error=err) if err is None else SweepPoint(value=float(k), error=err)
            for k, (eta, err) in enumerate(zip(etas, errors))
        ]
        return SweepResult(parameter="x", values=np.arange(len(etas), dtype=float), points=points)

    def test_argmax(self):
        assert self._result([0.1, 0.3, 0.2]).argmax_value() == 1.0

    def test_argmax_skips_failures(self):
        result = self._result([0.1, 0.0, 0.2], errors=[None, "boom", None])
        assert result.argmax_value() == 2.0

    def test_argmax_by_ceiling_excess(self):
        points = [
            SweepPoint(value=0.0, eta=0.3, ceiling_excess=0.0),
            SweepPoint(value=1.0, eta=0.2, ceiling_excess=0.01),
            SweepPoint(value=2.0, eta=0.1, ceiling_excess=0.005),
        ]
        result = SweepResult(parameter="Bc_nT", values=np.arange(3.0), points=points, metric="ceiling_excess")
        assert result.argmax_value() == 1.0
        np.testing.assert_array_equal(result.excesses(), [0.0, 0.01, 0.005])
        assert SweepResult(parameter="Bc_nT", values=np.arange(3.0), points=points).argmax_value() == 0.0

    def test_monotone(self):
        assert self._result([0.1, 0.1, 0.2]).is_monotone_nondecreasing()
        assert not self._result([0.1, 0.3, 0.2]).is_monotone_nondecreasing()
        assert self._result([0.1, 0.3, 0.2999]).is_monotone_nondecreasing(tol=1e-3)


@pytest.mark.slow
class TestBundles:
    def test_fig3_bundle_labels(self):
        bundle = fig3_bundle()
        assert bundle.labels == ["T2=5.4", "T2=1", "T2=0.6", "T2=2T1"]
        reference = bundle.curves[0].series.p_unitary
        for curve in bundle.curves[1:]:
            np.testing.assert_allclose(curve.series.p_unitary, reference, atol=1e-15)
        assert bundle.curve("T2=2T1").scenario.noise.kappa1 == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(KeyError):
            bundle.curve("missing")

    def test_fig4_bundle_labels(self):
        bundle = fig4_bundle(T2_values=(1.0,))
        assert bundle.labels == ["Bc=0.75,T2=1", "Bc=0.75,T2=2T1", "Bc=0,T2=1"]
        assert bundle.curve("Bc=0,T2=1").scenario.control_Bc_nT == 0.0
        assert bundle.curve("Bc=0,T2=1").report.ceiling_excess <= 1e-9
        assert bundle.curve("Bc=0.75,T2=1").report.exceeds_unitary_max

    def test_bundle_follows_base(self):
        base = scenario_fig3(5.5, 5.5).model_copy(update={"probe": ProbeSpec(kind=ProbeKind.ALONG_X)})
        bundle = fig3_bundle(T2_values=(0.6,), base=base)
        assert all(c.scenario.probe.kind == ProbeKind.ALONG_X for c in bundle.curves)
