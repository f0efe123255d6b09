"""State and parameter estimation.

Two filters live here. The joint extended Kalman filter augments the plant
state with a random-walk disturbance and relinearizes the transition map by
finite differences every sample. The ARX parameter filter runs one scalar
Kalman recursion per output channel; because every channel shares the same
regressor and the measurement is scalar per channel, its gain needs a single
scalar division and no matrix inversion. A module-level audit object counts
both so tests can prove the decoupled path never inverts a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PlantModel, central_difference_jacobian, discrete_map, fd_jacobians
from .errors import CovarianceCorruptionError, EstimatorFailureError
from .ss2arx import ArxModel, Regressor, flatten_theta

Array = np.ndarray


@dataclass
class EstimationAudit:
    """Counters proving which linear-algebra primitives each path used."""

    scalar_divisions: int = 0
    matrix_solves: int = 0

    def reset(self) -> None:
        self.scalar_divisions = 0
        self.matrix_solves = 0


AUDIT = EstimationAudit()


@dataclass
class JointEkfState:
    """Augmented state estimate ``[x; d]`` with its covariance and noise terms."""

    xhat: Array
    dhat: Array
    P: Array
    Q: Array
    R: Array


def init_joint_ekf(
    x0: Array,
    d0: Array,
    n_y: int,
    p0_scale: float = 10.0,
    q: float = 0.01,
    r: float = 0.01,
) -> JointEkfState:
    """Diagonal initialization of the joint filter."""
    x0 = np.asarray(x0, dtype=float).ravel()
    d0 = np.asarray(d0, dtype=float).ravel()
    na = x0.size + d0.size
    return JointEkfState(
        xhat=x0.copy(),
        dhat=d0.copy(),
        P=p0_scale * np.eye(na),
        Q=q * np.eye(na),
        R=r * np.eye(n_y),
    )


def joint_ekf_step(
    state: JointEkfState,
    plant: PlantModel,
    u_prev: Array,
    y_meas: Array,
    t: float,
    t_s: float,
    n_sub: int = 4,
) -> JointEkfState:
    """One predict-correct cycle of the joint state/disturbance filter.

    The transition Jacobians come from finite differences of the discrete
    map at the previous estimate; the disturbance block is a random walk.
    Output Jacobians are evaluated at the predicted estimate. The innovation
    covariance is rejected as numerically singular when its condition number
    exceeds 1e12.
    """
    nx = plant.n_x
    nd = plant.n_d
    na = nx + nd
    ny = plant.n_y
    u_prev = np.asarray(u_prev, dtype=float).ravel()
    y_meas = np.asarray(y_meas, dtype=float).ravel()

    lam, lam_d = fd_jacobians(plant, state.xhat, u_prev, state.dhat, t, t_s, n_sub)
    x_pred = discrete_map(plant, state.xhat, u_prev, state.dhat, t, t_s, n_sub)
    d_pred = state.dhat.copy()

    phi = np.zeros((na, na))
    phi[:nx, :nx] = lam
    phi[:nx, nx:] = lam_d
    phi[nx:, nx:] = np.eye(nd)
    p_pred = phi @ state.P @ phi.T + state.Q

    h_x = central_difference_jacobian(lambda xx: plant.g(xx, d_pred), x_pred)
    if nd > 0:
        h_d = central_difference_jacobian(lambda dd: plant.g(x_pred, dd), d_pred)
    else:
        h_d = np.zeros((ny, 0))
    theta = np.hstack([h_x, h_d])

    s = theta @ p_pred @ theta.T + state.R
    if np.linalg.cond(s) > 1e12:
        raise EstimatorFailureError(
            f"innovation covariance is numerically singular (cond > 1e12) at t={t}"
        )
    gain = np.linalg.solve(s.T, (p_pred @ theta.T).T).T
    AUDIT.matrix_solves += 1

    innovation = y_meas - plant.g(x_pred, d_pred)
    z = np.concatenate([x_pred, d_pred]) + gain @ innovation
    p_new = (np.eye(na) - gain @ theta) @ p_pred
    p_new = 0.5 * (p_new + p_new.T)
    return JointEkfState(
        xhat=z[:nx], dhat=z[nx:], P=p_new, Q=state.Q, R=state.R
    )


@dataclass
class ArxEkfState:
    """Per-channel ARX parameter filter.

    ``theta`` has shape (n_y, L) with L = p*(n_y+n_u)+1; ``P`` stacks the
    per-channel covariances as (n_y, L, L); ``Q`` stacks the per-channel
    process noise the same way; ``r`` is the scalar measurement variance.
    """

    theta: Array
    P: Array
    Q: Array
    r: float
    p: int
    n_u: int

    @property
    def n_y(self) -> int:
        return self.theta.shape[0]


def init_arx_ekf(
    arx: ArxModel,
    p0_scale: float = 10.0,
    q: float | Array = 0.01,
    r: float = 0.01,
) -> ArxEkfState:
    """Seed the parameter filter from an ARX model.

    ``q`` may be a scalar (shared diagonal process noise), a length-``n_y``
    vector (per-channel scalar) or a full (L, L) matrix shared by all
    channels.
    """
    theta = flatten_theta(arx)
    ny, length = theta.shape
    q_arr = np.asarray(q, dtype=float)
    if q_arr.ndim == 0:
        q_stack = np.tile(float(q_arr) * np.eye(length), (ny, 1, 1))
    elif q_arr.ndim == 1:
        if q_arr.shape != (ny,):
            raise ValueError("per-channel q must have length n_y")
        q_stack = np.stack([qi * np.eye(length) for qi in q_arr])
    else:
        if q_arr.shape != (length, length):
            raise ValueError("matrix q must have shape (L, L)")
        q_stack = np.tile(q_arr, (ny, 1, 1))
    p_stack = np.tile(p0_scale * np.eye(length), (ny, 1, 1))
    return ArxEkfState(theta=theta, P=p_stack, Q=q_stack, r=float(r), p=arx.p, n_u=arx.n_u)


def arx_ekf_update(state: ArxEkfState, reg: Regressor, y_meas: Array) -> ArxEkfState:
    """Decoupled parameter update, one scalar recursion per output channel.

    For channel j: ``P- = P_j + Q_j``, ``K = P- phi / (phi' P- phi + r)``,
    ``theta_j += K (y_j - phi' theta_j)``, ``P_j = (I - K phi') P-``. The
    denominator is the only division; it must stay positive or the
    covariance is declared corrupt.
    """
    phi = reg.phi if isinstance(reg, Regressor) else np.asarray(reg, dtype=float)
    y_meas = np.asarray(y_meas, dtype=float).ravel()
    ny, length = state.theta.shape
    if phi.shape != (length,):
        raise ValueError(f"regressor length {phi.shape} does not match L={length}")
    if y_meas.shape != (ny,):
        raise ValueError("measurement dimension does not match theta rows")
    theta_new = state.theta.copy()
    p_new = np.empty_like(state.P)
    for j in range(ny):  # channels in fixed order for determinism
        p_pred = state.P[j] + state.Q[j]
        p_phi = p_pred @ phi
        denom = float(phi @ p_phi) + state.r
        if denom <= 0.0 or not np.isfinite(denom):
            raise CovarianceCorruptionError(
                f"channel {j} innovation variance {denom} is not positive"
            )
        gain = p_phi / denom
        AUDIT.scalar_divisions += 1
        innovation = y_meas[j] - float(phi @ state.theta[j])
        theta_new[j] = state.theta[j] + gain * innovation
        pj = p_pred - np.outer(gain, p_phi)  # (I - K phi') P-, P- symmetric
        p_new[j] = 0.5 * (pj + pj.T)
    return ArxEkfState(
        theta=theta_new, P=p_new, Q=state.Q, r=state.r, p=state.p, n_u=state.n_u
    )
