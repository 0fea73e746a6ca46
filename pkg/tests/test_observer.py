import numpy as np
import pytest

from phstring.errors import FrameworkMismatch
from phstring.models import JetBundleState, StokesDiracState, integrated_output, jb_rhs, project_sd, sd_rhs
from phstring.observer import ObserverState, error_energy, observer_rhs_jb, observer_rhs_sd


def random_state(model, seed, framework):
    rng = np.random.default_rng(seed)
    x, p = rng.standard_normal((2, model.grid.n_nodes))
    if framework == "jb":
        x[0] = p[0] = 0.0
    else:
        project_sd(x, p)
    return x, p


class TestObserverState:
    def test_negative_gain(self):
        with pytest.raises(ValueError):
            ObserverState("jb", np.zeros(3), np.zeros(3), -1.0)

    def test_unknown_framework(self):
        with pytest.raises(ValueError):
            ObserverState("xx", np.zeros(3), np.zeros(3), 1.0)


@pytest.mark.parametrize(
    "framework, obs_rhs, plant_rhs, State",
    [("jb", observer_rhs_jb, jb_rhs, JetBundleState), ("sd", observer_rhs_sd, sd_rhs, StokesDiracState)],
)
class TestInjection:
    def test_zero_error_copies_plant(self, model, framework, obs_rhs, plant_rhs, State):
        x, p = random_state(model, 0, framework)
        y = integrated_output(p, model)
        d_obs = obs_rhs(ObserverState(framework, x, p, 30.0), 0.7, y, model)
        d_plant = plant_rhs(State(x, p), 0.7, model)
        for a, b in zip(d_obs, d_plant):
            np.testing.assert_array_equal(a, b)

    def test_injection_term(self, model, framework, obs_rhs, plant_rhs, State):
        n = model.grid.n_nodes
        rho = model.params.rho
        y_meas = integrated_output(np.full(n, rho), model)
        assert y_meas == pytest.approx(0.2)
        zero = np.zeros(n)
        _, dp = obs_rhs(ObserverState(framework, zero, zero, 30.0), 0.0, y_meas, model)
        expected = 6.0 * model.g
        expected[0] = 0.0
        np.testing.assert_allclose(dp, expected, atol=1e-14)

    def test_zero_gain_is_open_loop_copy(self, model, framework, obs_rhs, plant_rhs, State):
        x, p = random_state(model, 1, framework)
        d_obs = obs_rhs(ObserverState(framework, x, p, 0.0), 0.3, 123.0, model)
        d_plant = plant_rhs(State(x, p), 0.3, model)
        for a, b in zip(d_obs, d_plant):
            np.testing.assert_array_equal(a, b)

    def test_wrong_framework(self, model, framework, obs_rhs, plant_rhs, State):
        other = "sd" if framework == "jb" else "jb"
        n = model.grid.n_nodes
        with pytest.raises(FrameworkMismatch):
            obs_rhs(ObserverState(other, np.zeros(n), np.zeros(n), 1.0), 0.0, 0.0, model)


class TestErrorEnergy:
    def test_zero_error(self, model):
        x, p = random_state(model, 2, "jb")
        d = error_energy(JetBundleState(x, p), ObserverState("jb", x, p, 30.0), model)
        assert d.H_tilde == 0.0 and d.dissipation_rate == 0.0 and d.innovation == 0.0

    @pytest.mark.parametrize("framework", ["jb", "sd"])
    def test_linear_initial_estimate(self, model, framework):
        z = model.grid.nodes
        zero = np.zeros_like(z)
        if framework == "jb":
            plant, x_hat = JetBundleState(zero, zero), 0.1 * z
        else:
            plant, x_hat = StokesDiracState(zero, zero), np.full_like(z, 0.1)
        d = error_energy(plant, ObserverState(framework, x_hat, zero, 30.0), model)
        assert d.H_tilde == pytest.approx(0.005, abs=1e-15)
        assert d.dissipation_rate == 0.0

    def test_rate_sign(self, model):
        x, p = random_state(model, 3, "jb")
        zero = np.zeros_like(x)
        d = error_energy(JetBundleState(x, p), ObserverState("jb", zero, zero, 30.0), model)
        assert d.H_tilde > 0
        assert d.dissipation_rate == pytest.approx(-30.0 * integrated_output(p, model) ** 2)

    def test_not_a_sum_of_energies(self, model):
        z = model.grid.nodes
        w = 0.1 * z
        d = error_energy(JetBundleState(w, np.zeros_like(z)), ObserverState("jb", w, np.zeros_like(z), 1.0), model)
        assert d.H_tilde == 0.0

    def test_mismatch(self, model):
        n = model.grid.n_nodes
        with pytest.raises(FrameworkMismatch):
            error_energy(JetBundleState(np.zeros(n), np.zeros(n)), ObserverState("sd", np.zeros(n), np.zeros(n), 1.0), model)
