"""Pointwise linearization and forward-Euler discretization.

The discrete model is affine because the plant is linearized away from an
equilibrium: ``x+ = A x + B u + e`` and ``y = C x + h``. The constants ``e``
and ``h`` absorb the operating point so the model lives in absolute
coordinates, not deviation coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import PlantModel, central_difference_jacobian
from .errors import LinearizationFailureError

Array = np.ndarray


class ContinuousLinearization(NamedTuple):
    A_c: Array
    B_c: Array
    e_c: Array
    C: Array
    h_c: Array


@dataclass
class LinearSsModel:
    """Discrete affine state-space model at a fixed sample time."""

    A: Array
    B: Array
    e: Array
    C: Array
    h: Array
    t_s: float

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.C = np.atleast_2d(np.asarray(self.C, dtype=float))
        self.e = np.asarray(self.e, dtype=float).ravel()
        self.h = np.asarray(self.h, dtype=float).ravel()
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.B.shape[0] != n or self.C.shape[1] != n:
            raise ValueError("inconsistent state-space dimensions")
        if self.e.shape != (n,) or self.h.shape != (self.C.shape[0],):
            raise ValueError("inconsistent affine-term dimensions")
        for name in ("A", "B", "e", "C", "h"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite entries in {name}")
        if self.t_s <= 0.0:
            raise ValueError("t_s must be positive")

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B.shape[1]

    @property
    def n_y(self) -> int:
        return self.C.shape[0]


def linearize_continuous(
    plant: PlantModel, x_op: Array, u_prev: Array, d_op: Array, t: float = 0.0
) -> ContinuousLinearization:
    """Finite-difference linearization of ``f`` and ``g`` at an operating point.

    Returns the continuous-time Jacobians together with the drift
    ``e_c = f(x_op, u_prev, d_op, t)`` and output offset ``h_c = g(x_op, d_op)``.
    """
    x_op = np.asarray(x_op, dtype=float)
    u_prev = np.asarray(u_prev, dtype=float)
    d_op = np.asarray(d_op, dtype=float)
    a_c = central_difference_jacobian(lambda xx: plant.f(xx, u_prev, d_op, t), x_op)
    b_c = central_difference_jacobian(lambda uu: plant.f(x_op, uu, d_op, t), u_prev)
    e_c = np.asarray(plant.f(x_op, u_prev, d_op, t), dtype=float)
    c = central_difference_jacobian(lambda xx: plant.g(xx, d_op), x_op)
    h_c = np.asarray(plant.g(x_op, d_op), dtype=float)
    for name, arr in (("A_c", a_c), ("B_c", b_c), ("e_c", e_c), ("C", c), ("h_c", h_c)):
        if not np.all(np.isfinite(arr)):
            raise LinearizationFailureError(f"non-finite entries in {name} at x={x_op}")
    return ContinuousLinearization(a_c, b_c, e_c, c, h_c)


def euler_discretize(
    lin: ContinuousLinearization, x_op: Array, u_prev: Array, t_s: float
) -> LinearSsModel:
    """Forward-Euler discretization of a continuous linearization.

    The affine terms recentre the model so that plugging the operating point
    back in reproduces ``x_op + t_s * e_c`` and ``h_c`` exactly:

    ``A = I + t_s A_c``, ``B = t_s B_c``,
    ``e = t_s (e_c - A_c x_op - B_c u_prev)``, ``h = h_c - C x_op``.
    """
    x_op = np.asarray(x_op, dtype=float)
    u_prev = np.asarray(u_prev, dtype=float)
    a_c, b_c, e_c, c, h_c = lin
    n = a_c.shape[0]
    a = np.eye(n) + t_s * a_c
    b = t_s * b_c
    e = t_s * (e_c - a_c @ x_op - b_c @ u_prev)
    h = h_c - c @ x_op
    return LinearSsModel(a, b, e, c, h, t_s)


def linearized_model(
    plant: PlantModel,
    x_op: Array,
    u_prev: Array,
    d_op: Array,
    t: float,
    t_s: float,
) -> LinearSsModel:
    """Linearize and discretize in one call."""
    return euler_discretize(linearize_continuous(plant, x_op, u_prev, d_op, t), x_op, u_prev, t_s)


def simulate_ss(model: LinearSsModel, x0: Array, u_seq: Array) -> tuple[Array, Array]:
    """Roll the affine model forward under an input sequence.

    Parameters
    ----------
    x0 : ndarray, shape (n_x,)
        State at step 0.
    u_seq : ndarray, shape (N, n_u)
        Inputs applied at steps 0..N-1.

    Returns
    -------
    x_traj : ndarray, shape (N, n_x)
        States at steps 1..N.
    y_traj : ndarray, shape (N, n_y)
        Outputs at steps 1..N.
    """
    u_seq = np.atleast_2d(np.asarray(u_seq, dtype=float))
    n = u_seq.shape[0]
    x_traj = np.empty((n, model.n_x))
    y_traj = np.empty((n, model.n_y))
    x = np.asarray(x0, dtype=float)
    for k in range(n):
        x = model.A @ x + model.B @ u_seq[k] + model.e
        x_traj[k] = x
        y_traj[k] = model.C @ x + model.h
    return x_traj, y_traj
