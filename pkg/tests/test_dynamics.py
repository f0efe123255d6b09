import numpy as np
import pytest

from iampc.dynamics import (
    PlantModel,
    discrete_map,
    fd_jacobians,
    make_bilinear_motor,
    make_cstr,
    make_plant,
    make_two_tank,
    make_van_der_pol,
    plant_names,
    rk4_step,
)
from iampc.errors import IntegrationFailureError


def scalar_decay():
    return PlantModel(name="stub", n_x=1, n_u=1, n_d=0, n_y=1,
                      f=lambda x, u, d, t: -x,
                      g=lambda x, d: x.copy())


def test_rk4_matches_exponential():
    plant = scalar_decay()
    out = rk4_step(plant, np.array([1.0]), np.zeros(1), np.zeros(0), 0.0, 0.2)
    # one-step remainder of classical RK4 at lam*h = -0.2 is h^5/5! = 2.6e-6
    assert abs(out[0] - np.exp(-0.2)) < 3e-6


def test_rk4_local_error_order():
    # classical RK4 on xdot = lam*x: one-step error is O((lam*h)^5)
    for lam in (-0.5, -1.0, -2.5):
        plant = PlantModel(name="stub", n_x=1, n_u=1, n_d=0, n_y=1,
                           f=lambda x, u, d, t, lam=lam: lam * x,
                           g=lambda x, d: x.copy())
        for h in (0.05, 0.1, 0.2):
            z = abs(lam * h)
            if z > 0.5:
                continue
            out = rk4_step(plant, np.array([1.0]), np.zeros(1), np.zeros(0), 0.0, h)
            assert abs(out[0] - np.exp(lam * h)) < 10.0 * z ** 5


def test_zero_dynamics_identity():
    plant = PlantModel(name="stub", n_x=2, n_u=1, n_d=0, n_y=1,
                       f=lambda x, u, d, t: np.zeros(2),
                       g=lambda x, d: x[:1])
    x = np.array([3.0, -1.0])
    np.testing.assert_array_equal(rk4_step(plant, x, np.zeros(1), np.zeros(0), 0.0, 0.5), x)


def test_two_tank_equilibrium_fixed_point():
    plant = make_two_tank()
    x = np.array([1.0, 1.0])
    u = np.array([1.0])
    np.testing.assert_allclose(rk4_step(plant, x, u, np.zeros(0), 0.0, 0.2), x, atol=1e-12)
    np.testing.assert_allclose(
        discrete_map(plant, x, u, np.zeros(0), 0.0, 0.2, n_sub=1), x, atol=1e-12)


def test_motor_initial_point_is_equilibrium():
    plant = make_bilinear_motor()
    x = np.array([5.2542, -19.2205])
    u = np.array([1.0])
    assert np.abs(plant.f(x, u, np.zeros(0), 0.0)).max() < 0.05
    out = discrete_map(plant, x, u, np.zeros(0), 0.0, 0.01, n_sub=4)
    np.testing.assert_allclose(out, x, atol=1e-3)


def test_substep_halving_converges():
    plant = make_van_der_pol()
    rng = np.random.default_rng(3)
    for _ in range(5):
        x = rng.uniform(-1.0, 1.0, 2)
        u = rng.uniform(-1.0, 1.0, 1)
        d = np.array([1.0])
        a = discrete_map(plant, x, u, d, 0.0, 0.2, n_sub=4)
        b = discrete_map(plant, x, u, d, 0.0, 0.2, n_sub=8)
        np.testing.assert_allclose(a, b, atol=1e-6)


def test_all_benchmarks_substep_convergence():
    cases = [
        (make_two_tank(), np.array([1.0, 1.0]), np.array([1.0]), np.zeros(0), 0.2),
        (make_bilinear_motor(), np.array([5.2542, -19.2205]), np.array([1.0]), np.zeros(0), 0.01),
        (make_cstr(), np.array([8.57, 311.0]), np.array([297.9]), np.array([298.15]), 0.5),
        (make_van_der_pol(), np.array([0.0, 0.0]), np.array([0.0]), np.array([1.0]), 0.2),
    ]
    for plant, x, u, d, t_s in cases:
        a = discrete_map(plant, x, u, d, 0.0, t_s, n_sub=4)
        b = discrete_map(plant, x, u, d, 0.0, t_s, n_sub=8)
        np.testing.assert_allclose(a, b, atol=1e-6)


def test_fd_jacobian_linear_plant():
    A_c = np.array([[0.0, 1.0], [0.0, 0.0]])
    plant = PlantModel(name="stub", n_x=2, n_u=1, n_d=0, n_y=1,
                       f=lambda x, u, d, t: A_c @ x,
                       g=lambda x, d: x[:1])
    lam, lam_d = fd_jacobians(plant, np.array([0.3, -0.2]), np.zeros(1),
                              np.zeros(0), 0.0, 0.1, n_sub=8)
    np.testing.assert_allclose(lam, np.array([[1.0, 0.1], [0.0, 1.0]]), atol=1e-6)
    assert lam_d.shape == (2, 0)


def test_fd_jacobian_ignores_unused_disturbance():
    plant = PlantModel(name="stub", n_x=2, n_u=1, n_d=1, n_y=1,
                       f=lambda x, u, d, t: -x,
                       g=lambda x, d: x[:1])
    _, lam_d = fd_jacobians(plant, np.array([0.5, 0.5]), np.zeros(1),
                            np.array([2.0]), 0.0, 0.1, n_sub=4)
    assert np.abs(lam_d).max() < 1e-8


def test_two_tank_jacobian_near_euler():
    plant = make_two_tank()
    A_c = np.array([[-0.25, 0.0], [0.25, -0.25]])
    lam, _ = fd_jacobians(plant, np.array([1.0, 1.0]), np.array([1.0]),
                          np.zeros(0), 0.0, 0.2, n_sub=4)
    # the discrete map is RK4-exact, so the gap to the Euler transition
    # matrix is the second-order term (t_s*A_c)^2/2 ~ 2.4e-3
    np.testing.assert_allclose(lam, np.eye(2) + 0.2 * A_c, atol=3e-3)


def test_two_tank_sqrt_guard():
    plant = make_two_tank()
    x = np.array([0.0, 0.0])
    for _ in range(50):
        x = discrete_map(plant, x, np.zeros(1), np.zeros(0), 0.0, 0.2, n_sub=4)
        assert np.all(np.isfinite(x))
        assert np.all(x >= 1e-9)


def test_cstr_reaction_rate_value():
    plant = make_cstr()
    xdot = plant.f(np.array([8.57, 311.0]), np.array([297.92]),
                   np.array([298.15]), 0.0)
    rate = 34930800.0 * np.exp(-5963.6 / 311.0) * 8.57
    assert abs(rate - 1.405) < 5e-3
    # consumption term appears with full weight in the concentration balance
    assert abs(xdot[0] - (10.0 - 8.57 - rate)) < 1e-9


def test_cstr_inlet_temperature_schedule():
    plant = make_cstr()
    for t in (0.0, 31.4, 75.0):
        np.testing.assert_allclose(plant.d_true(t),
                                   [298.15 + 5.0 * np.sin(0.05 * t)], atol=1e-12)


def test_van_der_pol_parameter_switch():
    plant = make_van_der_pol()
    assert plant.d_true(50.0)[0] == 1.0
    assert plant.d_true(50.0001)[0] == 3.0


def test_plant_dimensions():
    dims = {
        "two_tank": (2, 1, 0, 1),
        "bilinear_motor": (2, 1, 0, 1),
        "cstr": (2, 1, 1, 1),
        "van_der_pol": (2, 1, 1, 1),
    }
    for name, (n_x, n_u, n_d, n_y) in dims.items():
        plant = make_plant(name)
        assert (plant.n_x, plant.n_u, plant.n_d, plant.n_y) == (n_x, n_u, n_d, n_y)
    assert set(plant_names()) == set(dims)


def test_unknown_plant_rejected():
    with pytest.raises(ValueError):
        make_plant("pendulum")


def test_integration_failure_reports_state_index():
    plant = PlantModel(name="stub", n_x=2, n_u=1, n_d=0, n_y=1,
                       f=lambda x, u, d, t: np.array([x[0] ** 3, 0.0]),
                       g=lambda x, d: x[:1])
    with pytest.raises(IntegrationFailureError) as err:
        discrete_map(plant, np.array([1e200, 0.0]), np.zeros(1), np.zeros(0),
                     0.0, 1.0, n_sub=1)
    assert "x[0]" in str(err.value)
