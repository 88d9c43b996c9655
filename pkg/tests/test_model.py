import math

import numpy as np
import pytest

from noise_enhanced_qht.errors import DegenerateAxisError, InvalidArgumentError, UnphysicalNoiseError
from noise_enhanced_qht.linalg_core import SIGMA_Z, hermitian_eig, sigma_along
from noise_enhanced_qht.model import (
    axis_from_theta,
    build_hamiltonian,
    build_hypothesis,
    effective_axis,
    ground_excited,
    lindblad_ops,
    noise_axis,
    noise_from_times,
    rates_to_times,
    times_to_rates,
)
from noise_enhanced_qht.schemas import AxisBinding, FieldSpec, NoiseSpec


class TestHamiltonian:
    def test_splitting_matches_larmor(self):
        h = build_hamiltonian(FieldSpec(magnitude_nT=1.86, theta_deg=75))
        eig = hermitian_eig(h)
        assert eig.spread == pytest.approx(0.497591268638, rel=1e-10)

    def test_traceless_hermitian(self):
        h = build_hamiltonian(FieldSpec(magnitude_nT=2.79, theta_deg=30), control_Bc_nT=0.75)
        assert abs(np.trace(h)) < 1e-15
        np.testing.assert_allclose(h, h.conj().T)

    def test_field_along_z(self):
        gamma = 2.6752218744e8
        h = build_hamiltonian(FieldSpec(magnitude_nT=1.0, theta_deg=90))
        np.testing.assert_allclose(h, -gamma * 1e-9 * SIGMA_Z / 2, atol=1e-15)

    def test_zero_field(self):
        np.testing.assert_allclose(build_hamiltonian(FieldSpec(magnitude_nT=0, theta_deg=0)), 0)

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(InvalidArgumentError):
            build_hamiltonian(FieldSpec(magnitude_nT=1, theta_deg=0), gamma=0.0)


class TestAxes:
    def test_effective_axis_with_control(self):
        axis = effective_axis(FieldSpec(magnitude_nT=1.0, theta_deg=90), control_Bc_nT=0.75)
        np.testing.assert_allclose(axis, [0.6, 0.0, 0.8])

    def test_zero_total_field(self):
        with pytest.raises(DegenerateAxisError):
            effective_axis(FieldSpec(magnitude_nT=0, theta_deg=0))

    @pytest.mark.parametrize("theta", [-120.0, 0.0, 30.0, 75.0, 90.0, 150.0])
    def test_ground_excited_eigenvectors(self, theta):
        axis = axis_from_theta(theta)
        ground, excited = ground_excited(axis)
        sigma = sigma_along(axis)
        np.testing.assert_allclose(sigma @ ground, ground, atol=1e-14)
        np.testing.assert_allclose(sigma @ excited, -excited, atol=1e-14)
        # 바닥 상태가 더 낮은 에너지
        h = build_hamiltonian(FieldSpec(magnitude_nT=1.0, theta_deg=theta))
        assert np.real(ground.conj() @ h @ ground) < np.real(excited.conj() @ h @ excited)

    @pytest.mark.parametrize("B, Bc", [(0.2, 0.75), (2.79, 0.75), (1.0, 3.0)])
    def test_ground_state_with_control(self, B, Bc):
        axis = effective_axis(FieldSpec(magnitude_nT=B, theta_deg=90), control_Bc_nT=Bc)
        ground, _ = ground_excited(axis)
        angle = math.atan2(Bc, B)
        np.testing.assert_allclose(ground, [math.cos(angle / 2), math.sin(angle / 2)], atol=1e-14)

    def test_rejects_out_of_plane_axis(self):
        with pytest.raises(InvalidArgumentError):
            ground_excited([0.0, 1.0, 0.0])

    def test_silent_noise_with_zero_field(self):
        axis = noise_axis(FieldSpec(magnitude_nT=0, theta_deg=0), 0.0, NoiseSpec())
        np.testing.assert_allclose(axis, [0, 0, 1])

    def test_noisy_zero_field_raises(self):
        with pytest.raises(DegenerateAxisError):
            noise_axis(FieldSpec(magnitude_nT=0, theta_deg=0), 0.0, NoiseSpec(kappa1=1.0, kappa2=1.0))

    def test_fixed_axis(self):
        noise = NoiseSpec(kappa1=1.0, kappa2=1.0, axis_binding=AxisBinding.FIXED_AXIS, fixed_axis_theta_deg=0)
        axis = noise_axis(FieldSpec(magnitude_nT=1.0, theta_deg=75), 0.0, noise)
        np.testing.assert_allclose(axis, [1, 0, 0], atol=1e-15)


class TestNoise:
    def test_times_to_rates(self):
        kappa1, kappa2 = times_to_rates(5.5, 0.6)
        assert kappa1 == pytest.approx(0.787878787878, rel=1e-10)
        assert kappa2 == pytest.approx(0.181818181818, rel=1e-10)

    def test_round_trip(self):
        T1, T2 = rates_to_times(*times_to_rates(5.5, 0.6))
        assert T1 == pytest.approx(5.5, abs=1e-12)
        assert T2 == pytest.approx(0.6, abs=1e-12)

    def test_pure_damping_boundary(self):
        kappa1, _ = times_to_rates(5.5, 11.0)
        assert kappa1 == pytest.approx(0.0, abs=1e-15)

    def test_unphysical(self):
        with pytest.raises(UnphysicalNoiseError, match="2·T1"):
            times_to_rates(5.5, 12.0)

    @pytest.mark.parametrize("T1, T2", [(0.0, 1.0), (1.0, -1.0)])
    def test_nonpositive_times(self, T1, T2):
        with pytest.raises(InvalidArgumentError):
            times_to_rates(T1, T2)

    def test_lindblad_operators(self):
        noise = NoiseSpec(kappa1=0.5, kappa2=2.0, p_ground=0.8)
        axis = axis_from_theta(90)
        ops = lindblad_ops(axis, noise)
        assert len(ops) == 3
        np.testing.assert_allclose(ops[0], math.sqrt(0.5) * SIGMA_Z, atol=1e-15)
        # z축에서 바닥 상태는 |0⟩: 감쇠 연산자는 |0⟩⟨1|
        np.testing.assert_allclose(ops[1], math.sqrt(1.6) * np.array([[0, 1], [0, 0]]), atol=1e-15)
        np.testing.assert_allclose(ops[2], math.sqrt(0.4) * np.array([[0, 0], [1, 0]]), atol=1e-15)

    def test_zero_rates_give_zero_operators(self):
        ops = lindblad_ops(axis_from_theta(30), NoiseSpec())
        assert all(np.allclose(op, 0) for op in ops)

    def test_noise_from_times(self):
        noise = noise_from_times(5.5, 0.6, p_ground=0.7)
        assert noise.kappa2 == pytest.approx(1 / 5.5)
        assert noise.p_ground == 0.7
        assert noise.axis_binding == AxisBinding.HAMILTONIAN_LOCKED


class TestHypothesis:
    def test_locked_axis_follows_field(self):
        hyp = build_hypothesis(FieldSpec(magnitude_nT=1.86, theta_deg=30), 0.0, noise_from_times(5.5, 0.6))
        kappa1, _ = times_to_rates(5.5, 0.6)
        np.testing.assert_allclose(hyp.noise_axis, axis_from_theta(30))
        np.testing.assert_allclose(hyp.lindblad_ops[0], math.sqrt(kappa1) * sigma_along(axis_from_theta(30)), atol=1e-15)
