"""Optical-element model, black-box composition and detector statistics."""

import numpy as np
import pytest

from ququart_parity import (
    BeamSplitter,
    BlackBoxConfig,
    DovePrism,
    HalfWavePlate,
    ModeLabel,
    NonUnitaryElementError,
    OpticalTable,
    PhaseShifter,
    Polarizer,
    apply,
    basis_state,
    black_box_unitary,
    box,
    config_for,
    decode,
    detect_probabilities,
    element_unitary,
    encode,
    equal_up_to_global_phase,
    permutation_matrix,
    prepare_input,
    run_box,
)

from _reference import CONFIG_TABLE, PARITY_TABLE, closed_form_output, input_state

PHI_GRID = np.linspace(0.0, 2.0 * np.pi, 33)  # steps of pi/16


class TestEncoding:
    def test_table(self):
        assert encode(ModeLabel("H", "l")) == 1
        assert encode(ModeLabel("H", "r")) == 2
        assert encode(ModeLabel("V", "l")) == 3
        assert encode(ModeLabel("V", "r")) == 4

    def test_round_trip(self):
        for j in range(1, 5):
            assert encode(decode(j)) == j

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            decode(5)
        with pytest.raises(ValueError):
            ModeLabel("D", "l")
        with pytest.raises(ValueError):
            ModeLabel("H", "up")


class TestElementUnitary:
    def test_dove_prism_swaps_paths(self):
        u = element_unitary(DovePrism())
        for start, end in ((1, 2), (2, 1), (3, 4), (4, 3)):
            out = apply(u, basis_state(start, 4))
            assert np.allclose(out.amps, basis_state(end, 4).amps)

    def test_hwp45_left_swaps_polarization_on_l_only(self):
        u = element_unitary(HalfWavePlate(45.0, "l"))
        out_l = apply(u, basis_state(1, 4))  # |H,l>
        assert np.allclose(out_l.amps, basis_state(3, 4).amps)
        out_r = apply(u, basis_state(2, 4))  # |H,r>
        assert np.allclose(out_r.amps, basis_state(2, 4).amps)

    def test_hwp0_is_identity(self):
        u = element_unitary(HalfWavePlate(0.0, "r"))
        assert np.array_equal(u.entries, np.eye(4))

    def test_general_hwp_retarder_action(self):
        u = element_unitary(HalfWavePlate(22.5, "l")).entries
        s = np.sqrt(0.5)
        jones = np.array([[s, s], [s, -s]])
        assert np.allclose(u[np.ix_([0, 2], [0, 2])], jones, atol=1e-12)
        assert np.allclose(u[np.ix_([1, 3], [1, 3])], np.eye(2), atol=1e-12)

    def test_hwp_angle_range(self):
        with pytest.raises(ValueError):
            HalfWavePlate(180.0, "l")
        with pytest.raises(ValueError):
            HalfWavePlate(-1.0, "l")

    def test_phase_shifter_phases_right_path(self):
        u = element_unitary(PhaseShifter(np.pi / 3)).entries
        z = np.exp(1j * np.pi / 3)
        assert np.allclose(np.diag(u), [1.0, z, 1.0, z], atol=1e-12)

    def test_beam_splitter_matches_detection_rule(self):
        u = element_unitary(BeamSplitter())
        for k in (1, 8):
            for phi in PHI_GRID[::4]:
                state = run_box(k, phi)
                after = apply(u, state)
                # D1 sits on the l output port, D2 on the r port
                p1 = float(np.sum(after.probabilities()[[0, 2]]))
                p2 = float(np.sum(after.probabilities()[[1, 3]]))
                q1, q2 = detect_probabilities(state)
                assert p1 == pytest.approx(q1, abs=1e-12)
                assert p2 == pytest.approx(q2, abs=1e-12)

    def test_polarizer_is_not_unitary(self):
        with pytest.raises(NonUnitaryElementError):
            element_unitary(Polarizer(0.0))


class TestBlackBox:
    def test_config_table(self):
        for k, (dp, hwp1, hwp2) in CONFIG_TABLE.items():
            assert config_for(k) == BlackBoxConfig(dp, hwp1, hwp2)
        with pytest.raises(ValueError):
            config_for(0)
        with pytest.raises(ValueError):
            config_for(9)

    def test_all_configs_compose_to_their_unitaries(self):
        for k in range(1, 9):
            same, phase = equal_up_to_global_phase(
                black_box_unitary(config_for(k)), permutation_matrix(box(k)), 1e-12
            )
            assert same, f"box f{k} composition deviates"
            assert phase == pytest.approx(1.0, abs=1e-12)

    def test_identity_box(self):
        assert np.array_equal(black_box_unitary(config_for(1)).entries, np.eye(4))

    def test_plates_commute(self):
        left_first = OpticalTable((HalfWavePlate(45.0, "l"), HalfWavePlate(45.0, "r")))
        right_first = OpticalTable((HalfWavePlate(45.0, "r"), HalfWavePlate(45.0, "l")))
        assert np.array_equal(left_first.unitary().entries, right_first.unitary().entries)

    def test_table_composition_is_unitary(self):
        table = OpticalTable((DovePrism(), HalfWavePlate(45.0, "l"), PhaseShifter(0.7)))
        u = table.unitary().entries
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-10

    def test_empty_table_is_identity(self):
        assert np.array_equal(OpticalTable(()).unitary().entries, np.eye(4))


class TestPrepareInput:
    def test_probe_phases(self):
        psi2 = np.array([1, 1j, -1, -1j]) / 2
        psi4 = np.array([1, -1j, -1, 1j]) / 2
        assert np.allclose(prepare_input(np.pi / 2).amps, psi2, atol=1e-12)
        assert np.allclose(prepare_input(3 * np.pi / 2).amps, psi4, atol=1e-12)

    def test_zero_phase(self):
        assert np.allclose(prepare_input(0.0).amps, np.array([1, 1, -1, -1]) / 2)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            prepare_input(np.inf)


class TestRunBox:
    def test_identity_box_passes_input_through(self):
        for phi in PHI_GRID[::4]:
            assert np.allclose(run_box(1, phi).amps, input_state(phi), atol=1e-12)

    def test_closed_forms_all_boxes(self):
        for k in range(1, 9):
            for phi in PHI_GRID:
                dev = np.max(np.abs(run_box(k, phi).amps - closed_form_output(k, phi)))
                assert dev < 1e-12, f"box f{k} at phi={phi}"

    def test_polarization_factor_is_h_minus_v(self):
        for k in range(1, 9):
            for phi in PHI_GRID[::4]:
                a = run_box(k, phi).amps
                assert abs(a[0] + a[2]) < 1e-12
                assert abs(a[1] + a[3]) < 1e-12


class TestDetection:
    def test_identity_box_at_probe_phase_clicks_d2(self):
        p1, p2 = detect_probabilities(run_box(1, np.pi / 2))
        assert p1 == pytest.approx(0.0, abs=1e-12)
        assert p2 == pytest.approx(1.0, abs=1e-12)

    def test_odd_box_at_probe_phase_clicks_d1(self):
        p1, p2 = detect_probabilities(run_box(8, np.pi / 2))
        assert p1 == pytest.approx(1.0, abs=1e-12)
        assert p2 == pytest.approx(0.0, abs=1e-12)

    def test_identity_box_fringe_formula(self):
        for phi in PHI_GRID:
            _, p2 = detect_probabilities(run_box(1, phi))
            assert p2 == pytest.approx((1.0 + np.sin(phi)) / 2.0, abs=1e-12)

    def test_probabilities_sum_to_one(self):
        for k in range(1, 9):
            for phi in PHI_GRID:
                p1, p2 = detect_probabilities(run_box(k, phi))
                assert p1 + p2 == pytest.approx(1.0, abs=1e-12)

    def test_wrong_dimension_rejected(self):
        with pytest.raises(ValueError):
            detect_probabilities(basis_state(1, 2))

    @pytest.mark.parametrize("n", range(-2, 3))
    def test_decision_rule_at_marked_phases(self, n):
        psi2_point = (2 * n + 0.5) * np.pi
        psi4_point = (2 * n + 1.5) * np.pi
        for k in range(1, 9):
            p1, p2 = detect_probabilities(run_box(k, psi2_point))
            if PARITY_TABLE[k] == "odd":
                assert p1 == pytest.approx(1.0, abs=1e-12)
            else:
                assert p2 == pytest.approx(1.0, abs=1e-12)
            p1, p2 = detect_probabilities(run_box(k, psi4_point))
            if PARITY_TABLE[k] == "odd":
                assert p2 == pytest.approx(1.0, abs=1e-12)
            else:
                assert p1 == pytest.approx(1.0, abs=1e-12)
