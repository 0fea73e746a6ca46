import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phstring.control import (
    ControllerState,
    casimir_residuals_jb,
    casimir_residuals_sd,
    casimir_value,
    casimir_value_sd,
    control_law_jb,
    control_law_sd,
    controller_step_rhs,
    linear_product_pairing,
    psi1,
    psi1_exact,
    psi1_field,
    string_ansatz_jb,
    string_ansatz_sd,
    target_xcd,
)
from phstring.grid import d1, quad
from phstring.models import PatchActuator, StringParams, equilibrium_profile, make_model

PATCH = PatchActuator(0.4, 0.6)
XCD_EXACT = 0.06 - 0.0413333333333333333  # integral of the target over the patch


def preset_ctrl(x_c_d, c1=5.0, c2=30.0, u_s=1.0):
    return ControllerState(x_c=0.0, c1=c1, c2=c2, u_s=u_s, x_c_d=x_c_d)


class TestControllerState:
    def test_energy_minimum_is_shifted(self):
        ctrl = preset_ctrl(0.02)
        x_min = 0.02 + 1.0 / 5.0
        assert ctrl.energy(x_min) == 0.0
        assert ctrl.output(x_min) == pytest.approx(0.0, abs=1e-15)

    def test_output_is_energy_gradient(self):
        ctrl = preset_ctrl(0.02)
        h = 1e-6
        fd = (ctrl.energy(0.3 + h) - ctrl.energy(0.3 - h)) / (2 * h)
        assert ctrl.output(0.3) == pytest.approx(fd, rel=1e-8)

    def test_zero_shaping_gain_limit(self):
        ctrl = preset_ctrl(0.02, c1=0.0)
        assert ctrl.energy(0.5) == pytest.approx(-1.0 * (0.5 - 0.02))
        assert ctrl.output(0.5) == -1.0

    def test_negative_gain(self):
        with pytest.raises(ValueError):
            preset_ctrl(0.0, c1=-1.0)

    def test_interconnection(self):
        ctrl = preset_ctrl(0.0)
        assert ctrl.interconnect(0.01, 0.0) == pytest.approx(1.0 - 0.3)


@pytest.mark.parametrize("y_hat, expected", [(0.0, 0.0), (0.3, 0.3)])
def test_controller_dynamics(y_hat, expected):
    assert controller_step_rhs(preset_ctrl(0.0), y_hat) == expected


class TestTarget:
    def test_fine_grid(self):
        m = make_model(StringParams(), PATCH, 200)
        w_d = equilibrium_profile(0.2, 0.5, m).w_d
        assert target_xcd(w_d, m) == pytest.approx(0.0186667, abs=1e-6)

    def test_trapezoid_error_is_exact(self, model, target):
        # Euler-Maclaurin terminates for quadratics: error = dz^2/12 (w'(z_p2) - w'(z_p1))
        oracle = XCD_EXACT + model.grid.dz**2 / 12.0 * (0.0 - 0.2)
        assert target_xcd(target.w_d, model) == pytest.approx(oracle, abs=1e-14)

    @pytest.mark.parametrize("value, expected", [(0.0, 0.0), (1.0, 0.2)])
    def test_constants(self, model, value, expected):
        assert target_xcd(np.full(model.grid.n_nodes, value), model) == pytest.approx(expected, abs=1e-15)


class TestJetBundleLaw:
    def test_target_gives_feedforward(self, model, target):
        ctrl = preset_ctrl(target_xcd(target.w_d, model))
        assert control_law_jb(ctrl, target.w_d, 0.0, model) == pytest.approx(1.0, abs=1e-15)

    def test_zero_deflection(self, model, target):
        x_c_d = target_xcd(target.w_d, model)
        u = control_law_jb(preset_ctrl(x_c_d), np.zeros_like(target.w_d), 0.0, model)
        assert u == pytest.approx(1.0 + 5.0 * x_c_d, abs=1e-15)
        assert u == pytest.approx(1.0933335, abs=1e-5)

    def test_damping(self, model, target):
        ctrl = preset_ctrl(target_xcd(target.w_d, model))
        assert control_law_jb(ctrl, target.w_d, 0.01, model) == pytest.approx(0.7, abs=1e-14)


class TestPsi:
    def test_values(self):
        assert psi1(1.0, PATCH) == 0.0
        assert psi1(0.0, PATCH) == pytest.approx(-0.2)
        assert psi1(0.5, PATCH) == pytest.approx(-0.1)

    def test_exact_matches_closed_form_with_half_edges(self, model):
        np.testing.assert_allclose(psi1_exact(model), psi1_field(model), atol=1e-14)

    def test_exact_antiderivative(self, model):
        psi = psi1_exact(model)
        assert psi[-1] == 0.0
        np.testing.assert_allclose(d1(psi, model.grid)[1:], model.g[1:], atol=1e-12)

    @pytest.mark.parametrize("edge_weight", [0.5, 1.0])
    def test_summation_by_parts(self, edge_weight):
        m = make_model(StringParams(), PatchActuator(0.4, 0.6, edge_weight), 40)
        w = np.random.default_rng(3).standard_normal(m.grid.n_nodes)
        w[0] = 0.0
        lhs = -quad(psi1_exact(m) * d1(w, m.grid), m.grid)
        assert lhs == pytest.approx(quad(m.g * w, m.grid), abs=1e-13)


class TestStokesDiracLaw:
    def test_target(self, model, target):
        ctrl = preset_ctrl(target_xcd(target.w_d, model))
        psi = psi1_exact(model)
        u = control_law_sd(ctrl, target.q_d, target.q_d, 0.0, psi, model.grid)
        assert u == 1.0

    def test_zero_deflection_matches_jet_bundle(self, model, target):
        ctrl = preset_ctrl(target_xcd(target.w_d, model))
        w = np.zeros_like(target.w_d)
        u_jb = control_law_jb(ctrl, w, 0.0, model)
        u_sd = control_law_sd(ctrl, d1(w, model.grid), target.q_d, 0.0, psi1_exact(model), model.grid)
        assert abs(u_jb - u_sd) <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), y=st.floats(-1.0, 1.0))
    def test_random_state_exact_mode(self, seed, y):
        m = make_model(StringParams(), PATCH, 100)
        eq = equilibrium_profile(0.2, 0.5, m)
        ctrl = preset_ctrl(target_xcd(eq.w_d, m))
        w = np.random.default_rng(seed).standard_normal(m.grid.n_nodes)
        w[0] = 0.0
        u_jb = control_law_jb(ctrl, w, y, m)
        u_sd = control_law_sd(ctrl, d1(w, m.grid), eq.q_d, y, psi1_exact(m), m.grid)
        assert abs(u_jb - u_sd) <= 1e-12 * (1 + abs(u_jb))

    def test_analytic_mode_second_order(self):
        devs = []
        for n in (50, 100, 200):
            m = make_model(StringParams(), PATCH, n)
            eq = equilibrium_profile(0.2, 0.5, m)
            ctrl = preset_ctrl(target_xcd(eq.w_d, m))
            w = 0.1 * m.grid.nodes
            u_jb = control_law_jb(ctrl, w, 0.0, m)
            u_an = control_law_sd(ctrl, d1(w, m.grid), eq.q_d, 0.0, psi1_field(m), m.grid, linear_product_pairing)
            devs.append(abs(u_jb - u_an))
        assert devs[0] / devs[1] == pytest.approx(4.0, abs=0.7)
        assert devs[1] / devs[2] == pytest.approx(4.0, abs=0.7)


class TestCasimirValue:
    def test_zero_when_tied(self, model):
        w = np.sin(model.grid.nodes)
        assert casimir_value(quad(model.g * w, model.grid), w, model) == 0.0

    def test_observer_initialisation(self, model):
        w_hat0 = 0.1 * model.grid.nodes
        x_c0 = quad(model.g * w_hat0, model.grid)
        assert x_c0 == pytest.approx(0.01, abs=1e-15)
        assert casimir_value(x_c0, w_hat0, model) == 0.0

    def test_frameworks_agree(self, model):
        w = np.sin(model.grid.nodes)
        psi = psi1_exact(model)
        q = d1(w, model.grid)
        v_c = -quad(psi * q, model.grid)
        assert casimir_value_sd(v_c, q, psi, model.grid) == 0.0
        assert v_c == pytest.approx(quad(model.g * w, model.grid), abs=1e-14)


class TestResidualsJB:
    def test_string_ansatz(self, model):
        r = casimir_residuals_jb(string_ansatz_jb(model), model)
        assert r.passes(1e-12)

    def test_momentum_dependence_blocks_input(self, model):
        ansatz = dataclasses.replace(string_ansatz_jb(model), dC_dp=model.g.copy())
        r = casimir_residuals_jb(ansatz, model)
        assert r.input_norm == pytest.approx(quad(model.g**2, model.grid), abs=1e-15)
        assert r.input_norm == pytest.approx(0.2, abs=model.grid.dz)
        assert not r.passes()

    def test_slope_dependence_leaks_at_boundary(self, model):
        ansatz = dataclasses.replace(string_ansatz_jb(model), boundary_coeff=np.ones(model.grid.n_nodes))
        r = casimir_residuals_jb(ansatz, model)
        assert r.r_boundary != 0.0
        assert r.input_norm == 0.0 and r.domain_norm == 0.0


class TestResidualsSD:
    @pytest.mark.parametrize("exact", [True, False])
    def test_string_ansatz(self, model, exact):
        psi = psi1_exact(model) if exact else psi1_field(model)
        r = casimir_residuals_sd(string_ansatz_sd(model, psi), model)
        assert r.passes(1e-10)
        assert r.excluded == model.kink_idx

    def test_constant_psi2_blocks_input(self, model):
        ansatz = dataclasses.replace(string_ansatz_sd(model), Psi2=np.full(model.grid.n_nodes, 0.1))
        r = casimir_residuals_sd(ansatz, model)
        assert r.input_norm == pytest.approx(0.1 * np.sqrt(quad(model.g**2, model.grid)), rel=1e-12)
        assert r.input_norm == pytest.approx(0.1 * np.sqrt(0.2), abs=0.1 * model.grid.dz)
        assert not r.passes()

    def test_shifted_psi1_breaks_boundary(self, model):
        ansatz = string_ansatz_sd(model, psi1_field(model) + 0.05)
        r = casimir_residuals_sd(ansatz, model)
        assert abs(r.r_boundary) > 1e-3
        assert r.input_norm == 0.0
