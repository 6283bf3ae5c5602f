import numpy as np
import pytest

from storedlight import (
    CapacityError,
    HomodyneConfig,
    PROBE_CLASSICAL,
    PROBE_QUANTUM,
    ParameterDomainError,
    StageAngles,
    balanced_variance,
    general_variance,
    homodyne_oracle,
)

BALANCED_STORAGE = StageAngles(0.0, 0.0, 0.0)


def balanced_release(chi21=0.0):
    return StageAngles(np.pi / 4, chi21, 0.0)


def plain_config(r1, alpha2_mod, gamma, phi0, phi1, probe=PROBE_QUANTUM):
    return HomodyneConfig(r1, alpha2_mod, gamma,
                          StageAngles(phi0, 0.0, 0.0), StageAngles(phi1, 0.0, 0.0),
                          probe_treatment=probe)


class TestBalancedVariance:
    def test_quadrature_extremes(self):
        # phase-matched probe reads the squeezed axis, quarter turn the other
        for r1 in (0.0, 0.4, 1.0):
            amplified = 4.0  # |alpha2|^2
            assert np.allclose(balanced_variance(r1, 2.0, 0.0, 0.0),
                               amplified * np.exp(-2 * r1), atol=1e-12)
            assert np.allclose(balanced_variance(r1, 2.0, np.pi / 2, 0.0),
                               amplified * np.exp(2 * r1), atol=1e-12)

    def test_phase_enters_as_a_sum(self, rng):
        for _ in range(10):
            r1, amp = rng.uniform(0, 1), rng.uniform(0, 3)
            chi21, gamma = rng.uniform(0, 2 * np.pi, 2)
            assert np.allclose(balanced_variance(r1, amp, gamma, chi21),
                               balanced_variance(r1, amp, gamma + chi21, 0.0), atol=1e-12)

    def test_rejects_negative_probe_amplitude(self):
        with pytest.raises(ParameterDomainError):
            balanced_variance(0.5, -1.0, 0.0, 0.0)


class TestGeneralVariance:
    def test_no_mixing_reads_the_direct_term(self):
        config = plain_config(0.7, 2.0, 1.3, 0.4, 0.4)
        expected = 0.5 * np.sinh(1.4) ** 2 + 4.0
        assert np.allclose(general_variance(config), expected, atol=1e-12)

    def test_full_mixing_reads_the_probed_quadrature(self):
        config = plain_config(0.7, 2.0, 0.9, 0.0, np.pi / 4)
        expected = 4.0 * (np.cosh(1.4) - np.sinh(1.4) * np.cos(1.8)) + np.sinh(0.7) ** 2
        assert np.allclose(general_variance(config), expected, atol=1e-12)

    def test_classical_drops_the_probe_vacuum_term(self, rng):
        for _ in range(20):
            r1 = rng.uniform(0, 1)
            phi0, phi1, gamma = rng.uniform(0, 2 * np.pi, 3)
            quantum = general_variance(plain_config(r1, 1.5, gamma, phi0, phi1))
            classical = general_variance(
                plain_config(r1, 1.5, gamma, phi0, phi1, probe=PROBE_CLASSICAL))
            gap = np.sin(2 * (phi1 - phi0)) ** 2 * np.sinh(r1) ** 2
            assert np.allclose(quantum - classical, gap, atol=1e-12)

    def test_depends_only_on_the_angle_difference(self, rng):
        for _ in range(10):
            r1, gamma = rng.uniform(0, 1), rng.uniform(0, 2 * np.pi)
            phi0, shift = rng.uniform(0, np.pi, 2)
            first = general_variance(plain_config(r1, 2.0, gamma, phi0, phi0 + 0.6))
            second = general_variance(plain_config(r1, 2.0, gamma, phi0 + shift, phi0 + shift + 0.6))
            assert np.allclose(first, second, atol=1e-12)

    def test_control_phases_must_vanish(self):
        config = HomodyneConfig(0.3, 1.0, 0.0, StageAngles(0.1, 0.2, 0.0),
                                StageAngles(0.5, 0.0, 0.0))
        with pytest.raises(ParameterDomainError):
            general_variance(config)


class TestHomodyneOracle:
    def test_quantum_route_matches_closed_form(self, rng):
        for _ in range(4):
            r1 = rng.uniform(0, 0.5)
            amp = rng.uniform(0.3, 1.5)
            gamma, phi0, phi1 = rng.uniform(0, 2 * np.pi, 3)
            config = plain_config(r1, amp, gamma, phi0, phi1)
            closed = general_variance(config)
            oracle = homodyne_oracle(config, cutoff=40)
            assert np.allclose(oracle, closed, rtol=1e-8, atol=1e-10)

    def test_classical_route_matches_balanced_form(self, rng):
        for _ in range(4):
            r1 = rng.uniform(0, 0.5)
            amp = rng.uniform(0.3, 1.5)
            gamma, chi21 = rng.uniform(0, 2 * np.pi, 2)
            config = HomodyneConfig(r1, amp, gamma, BALANCED_STORAGE,
                                    balanced_release(chi21),
                                    probe_treatment=PROBE_CLASSICAL)
            closed = balanced_variance(r1, amp, gamma, chi21)
            oracle = homodyne_oracle(config, cutoff=40)
            assert np.allclose(oracle, closed, rtol=1e-8, atol=1e-10)

    def test_classical_route_requires_balanced_mixing(self):
        config = plain_config(0.3, 1.0, 0.0, 0.0, 0.3, probe=PROBE_CLASSICAL)
        with pytest.raises(ParameterDomainError):
            homodyne_oracle(config, cutoff=16)

    def test_vacuum_probe_balanced_splitter(self):
        # r1 = 0, alpha2 = 0: the count difference has zero variance
        config = plain_config(0.0, 0.0, 0.0, 0.0, np.pi / 4)
        assert homodyne_oracle(config, cutoff=8) == pytest.approx(0.0, abs=1e-12)
        assert general_variance(config) == pytest.approx(0.0, abs=1e-12)

    def test_truncation_gate_reports_a_sufficient_cutoff(self):
        config = plain_config(0.2, 6.0, 0.0, 0.0, np.pi / 4)
        with pytest.raises(CapacityError) as info:
            homodyne_oracle(config, cutoff=8)
        assert info.value.required is not None
        assert info.value.required > 8

    def test_rejects_unusable_cutoff(self):
        config = plain_config(0.0, 0.5, 0.0, 0.0, 0.0)
        with pytest.raises(ParameterDomainError):
            homodyne_oracle(config, cutoff=1)


class TestConfigValidation:
    def test_negative_probe_amplitude(self):
        with pytest.raises(ParameterDomainError):
            plain_config(0.1, -0.5, 0.0, 0.0, 0.0)

    def test_unknown_probe_treatment(self):
        with pytest.raises(ParameterDomainError):
            HomodyneConfig(0.1, 1.0, 0.0, BALANCED_STORAGE, balanced_release(),
                           probe_treatment="semiclassical")

    def test_probe_amplitude_convention(self):
        config = plain_config(0.0, 2.0, np.pi / 2, 0.0, 0.0)
        assert np.allclose(config.alpha2, -2.0j, atol=1e-15)
