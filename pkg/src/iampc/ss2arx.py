"""State-space to ARX conversion through an observer recursion.

Injecting an output-error term with gain ``L`` turns the affine model into
``x+ = M x + B u + L y + (e - L h)`` with ``M = A - L C``.  Unrolling that
recursion ``p`` steps and applying the output map gives an ARX form whose
coefficients are

``Psi_i = C M^(i-1) L``, ``Omega_i = C M^(i-1) B``,
``zeta = sum_i C M^(i-1) (e - L h) + h``,

plus a remainder ``C M^p x`` that vanishes when the observer poles are at
zero (deadbeat) and is small when they are near zero.  A characteristic
polynomial construction of the same ARX order as the state dimension is
provided as an independent cross-check route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ObservabilityError, UnsupportedDimensionError
from .linearization import LinearSsModel

Array = np.ndarray


@dataclass
class ArxModel:
    """ARX model of order ``p`` with an affine offset.

    ``Psi`` has shape (p, n_y, n_y), ``Omega`` has shape (p, n_y, n_u) and
    ``zeta`` has shape (n_y,). Prediction:
    ``y_k = sum_i Psi_i y_{k-i} + sum_i Omega_i u_{k-i} + zeta``.
    """

    p: int
    Psi: Array
    Omega: Array
    zeta: Array

    def __post_init__(self):
        self.Psi = np.asarray(self.Psi, dtype=float)
        self.Omega = np.asarray(self.Omega, dtype=float)
        self.zeta = np.asarray(self.zeta, dtype=float).ravel()
        ny = self.zeta.shape[0]
        if self.p < 1:
            raise ValueError("ARX order p must be at least 1")
        if self.Psi.shape != (self.p, ny, ny):
            raise ValueError("Psi must have shape (p, n_y, n_y)")
        if self.Omega.shape[:2] != (self.p, ny):
            raise ValueError("Omega must have shape (p, n_y, n_u)")

    @property
    def n_y(self) -> int:
        return self.zeta.shape[0]

    @property
    def n_u(self) -> int:
        return self.Omega.shape[2]

    @property
    def theta_length(self) -> int:
        return self.p * (self.n_y + self.n_u) + 1


@dataclass
class ObserverDesign:
    """Observer gain with the requested poles and the contraction residual.

    ``residual_norm`` is the spectral norm of ``(A - L C)^n`` where ``n`` is
    the state dimension; for deadbeat poles it is zero up to roundoff.
    """

    L: Array
    poles: tuple[float, ...]
    residual_norm: float


@dataclass
class Regressor:
    """Stacked ARX regressor ``[y_{k-1}.. y_{k-p}, u_{k-1}.. u_{k-p}, 1]``."""

    phi: Array


def build_regressor(y_hist: Array, u_hist: Array) -> Regressor:
    """Assemble the regressor from most-recent-first history stacks.

    ``y_hist`` has shape (p, n_y) with row 0 holding ``y_{k-1}``; ``u_hist``
    has shape (p, n_u) with row 0 holding ``u_{k-1}``. The trailing 1 carries
    the affine offset.
    """
    y_hist = np.atleast_2d(np.asarray(y_hist, dtype=float))
    u_hist = np.atleast_2d(np.asarray(u_hist, dtype=float))
    phi = np.concatenate([y_hist.ravel(), u_hist.ravel(), [1.0]])
    return Regressor(phi)


def observability_matrix(A: Array, C: Array) -> Array:
    n = A.shape[0]
    rows = [C]
    for _ in range(n - 1):
        rows.append(rows[-1] @ A)
    return np.vstack(rows)


def place_observer_gain(A: Array, C: Array, poles) -> ObserverDesign:
    """Single-output observer pole placement via the Ackermann formula.

    The gain is ``L = q(A) O^-1 e_n`` where ``q`` is the desired
    characteristic polynomial (evaluated in product form for accuracy),
    ``O`` the observability matrix and ``e_n`` the last unit vector.

    Raises
    ------
    ObservabilityError
        If ``rank(O) < n_x``; the computed rank is attached.
    UnsupportedDimensionError
        If the model has more than one output.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    n = A.shape[0]
    if C.shape[0] != 1:
        raise UnsupportedDimensionError(
            "observer pole placement is implemented for single-output models only"
        )
    poles = tuple(float(r) for r in np.asarray(poles, dtype=float).ravel())
    if len(poles) != n:
        raise ValueError(f"need exactly {n} poles, got {len(poles)}")
    obs = observability_matrix(A, C)
    rank = int(np.linalg.matrix_rank(obs))
    if rank < n:
        raise ObservabilityError(
            f"(A, C) pair is unobservable: rank {rank} < {n}", rank=rank
        )
    q = np.eye(n)
    for root in poles:
        q = q @ (A - root * np.eye(n))
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    gain = (q @ np.linalg.solve(obs, e_n)).reshape(n, 1)
    m = A - gain @ C
    residual = float(np.linalg.norm(np.linalg.matrix_power(m, n), 2))
    return ObserverDesign(L=gain, poles=poles, residual_norm=residual)


def ss_to_arx(model: LinearSsModel, L: Array, p: int) -> ArxModel:
    """Observer-based ARX coefficients of order ``p``.

    ``p >= n_x`` is recommended so the remainder term ``C M^p x`` can be made
    small by pole choice, but any ``p >= 1`` is accepted.
    """
    if p < 1:
        raise ValueError("ARX order p must be at least 1")
    L = np.asarray(L, dtype=float).reshape(model.n_x, model.n_y)
    m = model.A - L @ model.C
    ny, nu, nx = model.n_y, model.n_u, model.n_x
    psi = np.empty((p, ny, ny))
    omega = np.empty((p, ny, nu))
    forced = model.e - L @ model.h  # affine term of the recentred recursion
    zeta = model.h.copy()
    m_pow = np.eye(nx)
    for i in range(p):
        cm = model.C @ m_pow
        psi[i] = cm @ L
        omega[i] = cm @ model.B
        zeta = zeta + cm @ forced
        m_pow = m_pow @ m
    return ArxModel(p, psi, omega, zeta)


def _char_poly_alphas(A: Array) -> Array:
    """Coefficients ``alpha_i`` with ``z^n = sum_i alpha_i z^(n-i)`` for A.

    Computed by the Faddeev-LeVerrier recursion, which stays in real
    arithmetic (no eigenvalue roundtrip).
    """
    n = A.shape[0]
    mk = np.eye(n)
    cs = np.empty(n)
    for k in range(1, n + 1):
        am = A @ mk
        cs[k - 1] = -np.trace(am) / k
        mk = am + cs[k - 1] * np.eye(n)
    return -cs


def ss_to_arx_cayley(model: LinearSsModel) -> ArxModel:
    """ARX of order ``n_x`` from the characteristic polynomial of ``A``.

    With ``A^n = sum_i alpha_i A^(n-i)`` the output autoregression uses
    ``Psi_i = alpha_i I`` and the input coefficients are the matching
    Markov-parameter combinations. Exact for the affine model itself; used
    as an independent validation route for the observer-based construction.
    """
    nx, ny, nu = model.n_x, model.n_y, model.n_u
    alphas = _char_poly_alphas(model.A)
    psi = np.zeros((nx, ny, ny))
    for i in range(nx):
        psi[i] = alphas[i] * np.eye(ny)
    # Markov parameters C A^j B and drift partial sums C (sum_j A^j) e
    a_pow = [np.eye(nx)]
    for _ in range(nx - 1):
        a_pow.append(a_pow[-1] @ model.A)
    markov = [model.C @ a_pow[j] @ model.B for j in range(nx)]
    drift = []
    acc = np.zeros((ny,))
    for j in range(nx):
        acc = acc + model.C @ a_pow[j] @ model.e
        drift.append(acc.copy())  # C (I + A + .. + A^j) e
    omega = np.zeros((nx, ny, nu))
    for mth in range(1, nx + 1):
        om = markov[mth - 1].copy()
        for i in range(1, mth):
            om = om - alphas[i - 1] * markov[mth - 1 - i]
        omega[mth - 1] = om
    zeta = drift[nx - 1] + model.h
    for i in range(1, nx + 1):
        tail = drift[nx - i - 1] if nx - i - 1 >= 0 else np.zeros(ny)
        zeta = zeta - alphas[i - 1] * (tail + model.h)
    return ArxModel(nx, psi, omega, zeta)


def theta_matrix(arx: ArxModel) -> Array:
    """Stacked coefficient matrix so that ``y = theta_matrix(arx) @ phi``."""
    ny, p = arx.n_y, arx.p
    psi_block = arx.Psi.transpose(1, 0, 2).reshape(ny, p * ny)
    omega_block = arx.Omega.transpose(1, 0, 2).reshape(ny, p * arx.n_u)
    return np.concatenate([psi_block, omega_block, arx.zeta[:, None]], axis=1)


def arx_predict(arx: ArxModel, reg: Regressor) -> Array:
    """One-step output prediction ``theta @ phi``."""
    phi = reg.phi if isinstance(reg, Regressor) else np.asarray(reg, dtype=float)
    expected = arx.theta_length
    if phi.shape != (expected,):
        raise ValueError(f"regressor length {phi.shape} does not match {expected}")
    return theta_matrix(arx) @ phi


def flatten_theta(arx: ArxModel) -> Array:
    """Per-channel parameter rows, shape (n_y, p*(n_y+n_u)+1).

    Row ``j`` is ``[Psi_1(j,:), .., Psi_p(j,:), Omega_1(j,:), .., Omega_p(j,:), zeta_j]``.
    """
    return theta_matrix(arx).copy()


def unflatten_theta(theta: Array, p: int, n_u: int) -> ArxModel:
    """Inverse of :func:`flatten_theta`."""
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    ny = theta.shape[0]
    expected = p * (ny + n_u) + 1
    if theta.shape[1] != expected:
        raise ValueError(f"theta has {theta.shape[1]} columns, expected {expected}")
    psi = theta[:, : p * ny].reshape(ny, p, ny).transpose(1, 0, 2).copy()
    omega = theta[:, p * ny : p * (ny + n_u)].reshape(ny, p, n_u).transpose(1, 0, 2).copy()
    zeta = theta[:, -1].copy()
    return ArxModel(p, psi, omega, zeta)


def simulate_arx(arx: ArxModel, y_init: Array, u_init: Array, u_seq: Array) -> Array:
    """Free-run the ARX model under an input sequence.

    ``y_init``/``u_init`` are most-recent-first history stacks of length
    ``p`` (same convention as :func:`build_regressor`). ``u_seq[k]`` is the
    input applied at step k; the returned row k is the output at step k+1.
    """
    u_seq = np.atleast_2d(np.asarray(u_seq, dtype=float))
    n = u_seq.shape[0]
    y_hist = np.atleast_2d(np.asarray(y_init, dtype=float)).copy()
    u_hist = np.atleast_2d(np.asarray(u_init, dtype=float)).copy()
    out = np.empty((n, arx.n_y))
    for k in range(n):
        u_hist = np.vstack([u_seq[k], u_hist[:-1]])
        y_next = arx.zeta.copy()
        for i in range(arx.p):
            y_next = y_next + arx.Psi[i] @ y_hist[i] + arx.Omega[i] @ u_hist[i]
        out[k] = y_next
        y_hist = np.vstack([y_next, y_hist[:-1]])
    return out
