"""Benchmark plants and fixed-step integration utilities.

Every plant is a set of continuous-time equations ``xdot = f(x, u, d, t)``
with an output map ``y = g(x, d)``. Time-varying exogenous signals (inlet
temperature, damping coefficient) enter through the disturbance vector ``d``;
plants that have a true disturbance trajectory expose it as ``d_true(t)`` so
a simulation harness can inject it sample by sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import IntegrationFailureError

Array = np.ndarray


@dataclass
class PlantModel:
    """Continuous-time plant with dimensions and optional state guards.

    Attributes
    ----------
    name : str
        Identifier used by the harness and CLI.
    n_x, n_u, n_d, n_y : int
        State, input, disturbance and output dimensions. ``n_d`` may be 0.
    f : callable
        Right-hand side ``f(x, u, d, t) -> xdot`` of shape ``(n_x,)``.
    g : callable
        Output map ``g(x, d) -> y`` of shape ``(n_y,)``.
    state_lower_guard : ndarray or None
        Per-state lower clamp applied after every integration step. Entries
        of ``-inf`` leave the corresponding state unguarded.
    d_true : callable or None
        True disturbance trajectory ``d_true(t) -> d`` for plants whose
        exogenous signal is known to the simulation (not to the controller).
    """

    name: str
    n_x: int
    n_u: int
    n_d: int
    n_y: int
    f: Callable[[Array, Array, Array, float], Array]
    g: Callable[[Array, Array], Array]
    state_lower_guard: Array | None = None
    d_true: Callable[[float], Array] | None = None

    def __post_init__(self):
        if self.n_x < 1 or self.n_u < 1 or self.n_y < 1 or self.n_d < 0:
            raise ValueError("plant dimensions must satisfy n_x,n_u,n_y >= 1 and n_d >= 0")
        if self.state_lower_guard is not None:
            guard = np.asarray(self.state_lower_guard, dtype=float)
            if guard.shape != (self.n_x,):
                raise ValueError("state_lower_guard must have shape (n_x,)")
            self.state_lower_guard = guard


@dataclass
class SimState:
    """Truth-simulation state: the plant state and the current time."""

    x: Array
    t: float


def rk4_step(plant: PlantModel, x: Array, u: Array, d: Array, t: float, h: float) -> Array:
    """Advance the plant one classical Runge-Kutta step of size ``h``.

    The result is clamped element-wise to ``plant.state_lower_guard`` where
    a guard is defined. A non-finite result raises
    :class:`IntegrationFailureError` naming the offending state index.
    """
    if h <= 0.0:
        raise ValueError("step size h must be positive")
    f = plant.f
    k1 = f(x, u, d, t)
    k2 = f(x + 0.5 * h * k1, u, d, t + 0.5 * h)
    k3 = f(x + 0.5 * h * k2, u, d, t + 0.5 * h)
    k4 = f(x + h * k3, u, d, t + h)
    out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if plant.state_lower_guard is not None:
        out = np.maximum(out, plant.state_lower_guard)
    if not np.all(np.isfinite(out)):
        idx = int(np.flatnonzero(~np.isfinite(out))[0])
        raise IntegrationFailureError(
            f"non-finite state x[{idx}] after RK4 step at t={t}", state_index=idx
        )
    return out


def discrete_map(
    plant: PlantModel,
    x: Array,
    u: Array,
    d: Array,
    t: float,
    t_s: float,
    n_sub: int = 4,
) -> Array:
    """Sample-to-sample transition: ``n_sub`` RK4 substeps spanning ``t_s``.

    Input and disturbance are held constant over the sample interval.
    """
    if n_sub < 1:
        raise ValueError("n_sub must be at least 1")
    h = t_s / n_sub
    out = x
    for i in range(n_sub):
        out = rk4_step(plant, out, u, d, t + i * h, h)
    return out


def central_difference_jacobian(fun: Callable[[Array], Array], z: Array) -> Array:
    """Central-difference Jacobian of ``fun`` at ``z``.

    The per-component step is ``1e-6 * max(1, |z_i|)`` so that tiny and huge
    operating points get a sensibly scaled perturbation.
    """
    z = np.asarray(z, dtype=float)
    f0 = np.asarray(fun(z), dtype=float)
    jac = np.empty((f0.size, z.size))
    for i in range(z.size):
        step = 1e-6 * max(1.0, abs(z[i]))
        zp = z.copy()
        zm = z.copy()
        zp[i] += step
        zm[i] -= step
        jac[:, i] = (np.asarray(fun(zp), dtype=float) - np.asarray(fun(zm), dtype=float)) / (
            2.0 * step
        )
    return jac


def fd_jacobians(
    plant: PlantModel,
    x: Array,
    u: Array,
    d: Array,
    t: float,
    t_s: float,
    n_sub: int = 4,
) -> tuple[Array, Array]:
    """Jacobians of the discrete transition map w.r.t. state and disturbance.

    Returns
    -------
    lam : ndarray, shape (n_x, n_x)
        Sensitivity of the one-sample map to the state.
    lam_d : ndarray, shape (n_x, n_d)
        Sensitivity to the disturbance (empty second axis when ``n_d == 0``).
    """
    lam = central_difference_jacobian(
        lambda xx: discrete_map(plant, xx, u, d, t, t_s, n_sub), x
    )
    if plant.n_d > 0:
        lam_d = central_difference_jacobian(
            lambda dd: discrete_map(plant, x, u, dd, t, t_s, n_sub), d
        )
    else:
        lam_d = np.zeros((plant.n_x, 0))
    return lam, lam_d


# ---------------------------------------------------------------------------
# Benchmark plants
# ---------------------------------------------------------------------------


def make_two_tank() -> PlantModel:
    """Gravity-drained two-tank cascade.

    States are the tank levels (m), input is the inflow command, output is
    the lower-tank level. Levels are clamped at 1e-9 so the square-root
    outflow law stays real under process noise.
    """
    k1 = k2 = k3 = 0.5
    guard = np.array([1e-9, 1e-9])

    def f(x, u, d, t):
        lv = np.maximum(x, guard)  # sqrt needs nonnegative levels
        return np.array(
            [
                -k1 * math.sqrt(lv[0]) + k2 * u[0],
                k1 * math.sqrt(lv[0]) - k3 * math.sqrt(lv[1]),
            ]
        )

    def g(x, d):
        return np.array([x[1]])

    return PlantModel("two_tank", 2, 1, 0, 1, f, g, state_lower_guard=guard)


def make_bilinear_motor() -> PlantModel:
    """Field-controlled DC motor with a bilinear current/speed coupling.

    x1 is armature current (A), x2 is angular velocity (rad/s), the input is
    the field current command and the output is the angular velocity.
    """
    la = 0.314  # armature inductance
    ra = 12.345  # armature resistance
    km = 0.253  # motor constant
    jm = 0.00441  # rotor inertia
    bm = 0.00732  # viscous friction
    tau_l = 1.47  # constant load torque
    ua = 60.0  # fixed armature voltage

    def f(x, u, d, t):
        return np.array(
            [
                -(ra / la) * x[0] - (km / la) * x[1] * u[0] + ua / la,
                -(bm / jm) * x[1] + (km / jm) * x[0] * u[0] - tau_l / jm,
            ]
        )

    def g(x, d):
        return np.array([x[1]])

    return PlantModel("bilinear_motor", 2, 1, 0, 1, f, g)


def make_cstr() -> PlantModel:
    """Exothermic continuous stirred-tank reactor.

    x1 is reactant concentration (kmol/m^3), x2 is reactor temperature (K).
    The coolant temperature is the input, the inlet temperature is the
    disturbance, the reactor temperature is the output. The Arrhenius factor
    uses a positive activation ratio so the rate decays for small T; the
    temperature is clamped at 1e-9 to keep the exponential bounded.
    """
    ca_in = 10.0  # inlet concentration
    k0 = 34930800.0  # pre-exponential factor
    act = 5963.6  # activation energy over gas constant (K)
    guard = np.array([-np.inf, 1e-9])

    def f(x, u, d, t):
        ca = x[0]
        temp = max(x[1], 1e-9)
        rate = k0 * math.exp(-act / temp) * ca
        return np.array(
            [
                ca_in - ca - rate,
                d[0] + 0.3 * u[0] - 1.3 * temp + 11.92 * rate,
            ]
        )

    def g(x, d):
        return np.array([x[1]])

    def d_true(t):
        return np.array([298.15 + 5.0 * math.sin(0.05 * t)])

    return PlantModel("cstr", 2, 1, 1, 1, f, g, state_lower_guard=guard, d_true=d_true)


def make_van_der_pol() -> PlantModel:
    """Forced Van der Pol oscillator with a switching damping coefficient.

    x1 is position, x2 is velocity, the forcing is the input and the damping
    coefficient mu is the disturbance. The output is the position. The true
    mu steps from 1 to 3 at t = 50.
    """

    def f(x, u, d, t):
        return np.array(
            [
                x[1],
                d[0] * (1.0 - x[0] ** 2) * x[1] - x[0] + u[0],
            ]
        )

    def g(x, d):
        return np.array([x[0]])

    def d_true(t):
        return np.array([1.0 if t <= 50.0 else 3.0])

    return PlantModel("van_der_pol", 2, 1, 1, 1, f, g, d_true=d_true)


_PLANT_FACTORIES = {
    "two_tank": make_two_tank,
    "bilinear_motor": make_bilinear_motor,
    "cstr": make_cstr,
    "van_der_pol": make_van_der_pol,
}


def make_plant(name: str) -> PlantModel:
    """Build a benchmark plant by name."""
    try:
        factory = _PLANT_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(_PLANT_FACTORIES))
        raise ValueError(f"unknown plant '{name}' (known: {known})") from None
    return factory()


def plant_names() -> tuple[str, ...]:
    return tuple(sorted(_PLANT_FACTORIES))
