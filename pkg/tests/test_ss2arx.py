"""Observer pole placement and state-space to ARX conversion."""

import numpy as np
import pytest

from iampc.dynamics import make_plant
from iampc.errors import ObservabilityError, UnsupportedDimensionError
from iampc.linearization import LinearSsModel, linearized_model, simulate_ss
from iampc.ss2arx import (
    ArxModel,
    arx_predict,
    build_regressor,
    flatten_theta,
    observability_matrix,
    place_observer_gain,
    Regressor,
    simulate_arx,
    ss_to_arx,
    ss_to_arx_cayley,
    theta_matrix,
    unflatten_theta,
)

from oracles import random_observable_ss


def _two_tank_model():
    return linearized_model(
        make_plant("two_tank"), np.array([1.0, 1.0]), np.array([1.0]), np.zeros(0), 0.0, 0.2
    )


def _scalar_model(a, b, e=0.0, h=0.0):
    return LinearSsModel(A=[[a]], B=[[b]], e=[e], C=[[1.0]], h=[h], t_s=1.0)


def test_ackermann_double_integrator():
    A = np.array([[1.0, 1.0], [0.0, 1.0]])
    C = np.array([[1.0, 0.0]])
    design = place_observer_gain(A, C, [0.0, 0.0])
    np.testing.assert_allclose(design.L, [[2.0], [1.0]], atol=1e-12)
    m = A - design.L @ C
    np.testing.assert_allclose(m @ m, np.zeros((2, 2)), atol=1e-12)
    assert design.residual_norm < 1e-12
    assert design.poles == (0.0, 0.0)


def test_scalar_gain_is_pole_shift():
    design = place_observer_gain([[0.9]], [[1.0]], [0.3])
    np.testing.assert_allclose(design.L, [[0.6]], atol=1e-12)


def test_two_tank_closed_loop_poles():
    model = _two_tank_model()
    design = place_observer_gain(model.A, model.C, [0.01, 0.02])
    eig = np.sort(np.linalg.eigvals(model.A - design.L @ model.C).real)
    np.testing.assert_allclose(eig, [0.01, 0.02], atol=1e-9)


def test_unobservable_pair_rejected():
    with pytest.raises(ObservabilityError) as exc:
        place_observer_gain(np.eye(2), [[1.0, 0.0]], [0.0, 0.0])
    assert exc.value.rank == 1


def test_multi_output_rejected():
    with pytest.raises(UnsupportedDimensionError):
        place_observer_gain(np.eye(2), np.eye(2), [0.0, 0.0])


def test_observability_matrix_rows():
    A = np.array([[1.0, 1.0], [0.0, 1.0]])
    C = np.array([[1.0, 0.0]])
    np.testing.assert_allclose(observability_matrix(A, C), [[1.0, 0.0], [1.0, 1.0]])


def test_scalar_deadbeat_coefficients():
    model = _scalar_model(0.8, 0.3)
    arx = ss_to_arx(model, L=[[0.8]], p=3)
    np.testing.assert_allclose(arx.Psi.ravel(), [0.8, 0.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(arx.Omega.ravel(), [0.3, 0.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(arx.zeta, [0.0], atol=1e-14)


def test_affine_terms_enter_zeta():
    model = _scalar_model(0.8, 0.3, e=0.5, h=0.2)
    arx = ss_to_arx(model, L=[[0.8]], p=2)
    # zeta = h + C(e - L h) + C M (e - L h), with M = 0 here
    np.testing.assert_allclose(arx.zeta, [0.2 + (0.5 - 0.8 * 0.2)], atol=1e-14)


def test_deadbeat_arx_reproduces_io_exactly():
    rng = np.random.default_rng(3)
    for _ in range(20):
        model = random_observable_ss(rng)
        design = place_observer_gain(model.A, model.C, [0.0, 0.0])
        arx = ss_to_arx(model, design.L, p=2)
        x0 = rng.normal(0.0, 1.0, 2)
        u_seq = rng.normal(0.0, 1.0, (30, 1))
        _, y_traj = simulate_ss(model, x0, u_seq)
        y0 = model.C @ x0 + model.h
        ys = np.vstack([y0, y_traj])  # outputs at steps 0..30
        for k in range(2, 30):
            reg = build_regressor(ys[[k, k - 1]], u_seq[[k, k - 1]])
            np.testing.assert_allclose(arx_predict(arx, reg), ys[k + 1], atol=1e-10)


def test_near_deadbeat_remainder_small():
    model = _two_tank_model()
    design = place_observer_gain(model.A, model.C, [0.01, 0.02])
    m = model.A - design.L @ model.C
    # M is strongly non-normal here (the gain is ~17), so ||M^2|| is O(0.5)
    # even with poles at 0.01/0.02; the ARX remainder only sees C M^p
    assert design.residual_norm < 1.0
    assert np.linalg.norm(model.C @ np.linalg.matrix_power(m, 3)) < 1e-3
    arx = ss_to_arx(model, design.L, p=3)
    rng = np.random.default_rng(5)
    x0 = np.array([1.0, 1.0]) + rng.normal(0.0, 0.1, 2)
    u_seq = 1.0 + 0.3 * rng.standard_normal((100, 1))
    _, y_traj = simulate_ss(model, x0, u_seq)
    ys = np.vstack([model.C @ x0 + model.h, y_traj])
    worst = 0.0
    for k in range(3, 100):
        reg = build_regressor(ys[[k, k - 1, k - 2]], u_seq[[k, k - 1, k - 2]])
        worst = max(worst, float(np.abs(arx_predict(arx, reg) - ys[k + 1]).max()))
    assert worst < 1e-3


def test_cayley_two_tank_alphas():
    arx = ss_to_arx_cayley(_two_tank_model())
    assert arx.p == 2
    np.testing.assert_allclose(arx.Psi[0], [[1.9]], atol=1e-12)
    np.testing.assert_allclose(arx.Psi[1], [[-0.9025]], atol=1e-12)


def test_cayley_recursion_holds_on_trajectories():
    rng = np.random.default_rng(9)
    for _ in range(10):
        model = random_observable_ss(rng)
        arx = ss_to_arx_cayley(model)
        x0 = rng.normal(0.0, 1.0, 2)
        u_seq = rng.normal(0.0, 1.0, (20, 1))
        _, y_traj = simulate_ss(model, x0, u_seq)
        ys = np.vstack([model.C @ x0 + model.h, y_traj])
        for k in range(2, 20):
            reg = build_regressor(ys[[k, k - 1]], u_seq[[k, k - 1]])
            np.testing.assert_allclose(arx_predict(arx, reg), ys[k + 1], atol=1e-10)


def test_cayley_zero_dynamics():
    model = LinearSsModel(A=np.zeros((2, 2)), B=[[1.0], [0.0]], e=[0.0, 0.0],
                          C=[[1.0, 0.0]], h=[0.0], t_s=1.0)
    arx = ss_to_arx_cayley(model)
    np.testing.assert_allclose(arx.Psi, np.zeros((2, 1, 1)), atol=1e-12)


def test_cayley_matches_observer_route():
    rng = np.random.default_rng(21)
    for _ in range(5):
        model = random_observable_ss(rng)
        model.e = np.zeros(2)
        model.h = np.zeros(1)
        design = place_observer_gain(model.A, model.C, [0.0, 0.0])
        arx_obs = ss_to_arx(model, design.L, p=2)
        arx_cay = ss_to_arx_cayley(model)
        x0 = rng.normal(0.0, 1.0, 2)
        u_seq = rng.normal(0.0, 1.0, (15, 1))
        _, y_traj = simulate_ss(model, x0, u_seq)
        ys = np.vstack([model.C @ x0 + model.h, y_traj])
        # both routes are exact on model data, so they agree on any regressor
        # drawn from a trajectory
        for k in range(2, 15):
            reg = build_regressor(ys[[k, k - 1]], u_seq[[k, k - 1]])
            np.testing.assert_allclose(
                arx_predict(arx_obs, reg), arx_predict(arx_cay, reg), atol=1e-8
            )


def test_predict_constant_model():
    arx = ArxModel(p=2, Psi=np.zeros((2, 1, 1)), Omega=np.zeros((2, 1, 1)), zeta=[0.7])
    reg = build_regressor(np.array([[3.0], [-1.0]]), np.array([[2.0], [5.0]]))
    np.testing.assert_allclose(arx_predict(arx, reg), [0.7], atol=1e-15)


def test_predict_scalar_example():
    arx = ArxModel(p=1, Psi=[[[0.5]]], Omega=[[[0.25]]], zeta=[0.1])
    reg = build_regressor(np.array([[2.0]]), np.array([[4.0]]))
    np.testing.assert_allclose(arx_predict(arx, reg), [0.5 * 2.0 + 0.25 * 4.0 + 0.1])


def test_predict_matches_dot_oracle():
    rng = np.random.default_rng(13)
    arx = ArxModel(p=3, Psi=rng.standard_normal((3, 1, 1)),
                   Omega=rng.standard_normal((3, 1, 2)), zeta=rng.standard_normal(1))
    phi = rng.standard_normal(arx.theta_length)
    phi[-1] = 1.0
    manual = arx.zeta.copy()
    for i in range(3):
        manual = manual + arx.Psi[i] @ phi[i : i + 1]
        manual = manual + arx.Omega[i] @ phi[3 + 2 * i : 3 + 2 * i + 2]
    np.testing.assert_allclose(arx_predict(arx, Regressor(phi)), manual, atol=1e-14)


def test_predict_rejects_wrong_length():
    arx = ArxModel(p=1, Psi=[[[0.5]]], Omega=[[[0.25]]], zeta=[0.1])
    with pytest.raises(ValueError):
        arx_predict(arx, Regressor(np.zeros(4)))


def test_regressor_layout():
    reg = build_regressor(np.array([[1.5], [2.5]]), np.array([[0.5], [0.25]]))
    np.testing.assert_allclose(reg.phi, [1.5, 2.5, 0.5, 0.25, 1.0])
    assert reg.phi[-1] == 1.0


def test_flatten_round_trip():
    rng = np.random.default_rng(17)
    arx = ArxModel(p=3, Psi=rng.standard_normal((3, 1, 1)),
                   Omega=rng.standard_normal((3, 1, 1)), zeta=rng.standard_normal(1))
    assert arx.theta_length == 7
    theta = flatten_theta(arx)
    assert theta.shape == (1, 7)
    back = unflatten_theta(theta, p=3, n_u=1)
    np.testing.assert_allclose(back.Psi, arx.Psi, atol=1e-15)
    np.testing.assert_allclose(back.Omega, arx.Omega, atol=1e-15)
    np.testing.assert_allclose(back.zeta, arx.zeta, atol=1e-15)


def test_flatten_known_row():
    arx = ArxModel(p=1, Psi=[[[0.5]]], Omega=[[[2.0]]], zeta=[0.1])
    np.testing.assert_allclose(flatten_theta(arx), [[0.5, 2.0, 0.1]])
    np.testing.assert_allclose(theta_matrix(arx), [[0.5, 2.0, 0.1]])


def test_simulate_arx_matches_stepwise_prediction():
    rng = np.random.default_rng(23)
    arx = ArxModel(p=2, Psi=0.3 * rng.standard_normal((2, 1, 1)),
                   Omega=rng.standard_normal((2, 1, 1)), zeta=rng.standard_normal(1))
    y_hist = rng.standard_normal((2, 1))
    u_hist = rng.standard_normal((2, 1))
    u_seq = rng.standard_normal((10, 1))
    out = simulate_arx(arx, y_hist, u_hist, u_seq)
    yh, uh = y_hist.copy(), u_hist.copy()
    for k in range(10):
        uh = np.vstack([u_seq[k], uh[:-1]])
        y = arx_predict(arx, build_regressor(yh, uh))
        np.testing.assert_allclose(out[k], y, atol=1e-13)
        yh = np.vstack([y, yh[:-1]])


def test_observer_error_contracts_at_placed_poles():
    model = _two_tank_model()
    design = place_observer_gain(model.A, model.C, [0.01, 0.02])
    m = model.A - design.L @ model.C
    rng = np.random.default_rng(29)
    x = np.array([1.0, 1.0])
    xhat = x + np.array([0.5, -0.3])
    err0 = xhat - x
    u_seq = 1.0 + 0.2 * rng.standard_normal((10, 1))
    for k in range(10):
        y = model.C @ x + model.h
        xhat = model.A @ xhat + model.B @ u_seq[k] + model.e + design.L @ (y - model.C @ xhat - model.h)
        x = model.A @ x + model.B @ u_seq[k] + model.e
        np.testing.assert_allclose(xhat - x, np.linalg.matrix_power(m, k + 1) @ err0, atol=1e-12)
    assert np.linalg.norm(xhat - x) < 1e-9 * np.linalg.norm(err0)
