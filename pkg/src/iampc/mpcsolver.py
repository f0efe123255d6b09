"""Reference-tracking MPC solved by augmented Lagrangian coordinate descent.

Both the ARX-driven and the state-space problem keep the predicted outputs
(and states) as decision variables coupled through equality constraints, so
no condensed prediction matrices are ever formed: per-step memory and work
stay linear in the horizon. The inner loop is a Gauss-Seidel sweep of exact
scalar minimizations with box clipping; the outer loop is dual ascent with
Nesterov extrapolation that restarts whenever the dual residual grows.

Every array the solver allocates is routed through a module-level audit so
tests can verify nothing quadratic in the horizon is ever materialized.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverFailureError
from .linearization import LinearSsModel, simulate_ss
from .ss2arx import ArxModel, simulate_arx

try:  # pragma: no cover - exercised implicitly by either environment
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


Array = np.ndarray


@dataclass
class SolverAudit:
    """Records the largest single allocation made by the solver."""

    max_alloc_elements: int = 0
    alloc_count: int = 0

    def record(self, shape) -> None:
        n = 1
        for s in shape:
            n *= int(s)
        self.alloc_count += 1
        if n > self.max_alloc_elements:
            self.max_alloc_elements = n

    def reset(self) -> None:
        self.max_alloc_elements = 0
        self.alloc_count = 0


AUDIT = SolverAudit()


def _alloc(*shape) -> Array:
    AUDIT.record(shape)
    return np.zeros(shape)


def _tracked_copy(a: Array) -> Array:
    AUDIT.record(a.shape)
    return a.copy()


@dataclass
class MpcConfig:
    """Horizon, weights, boxes and solver knobs.

    Weights may be scalars (expanded to scaled identities at solve time) or
    full matrices. ``W_y`` must be positive semidefinite and ``W_du``
    positive semidefinite as well; strict definiteness of ``W_du`` is what
    guarantees a unique minimizer, so leaving it at zero is allowed but then
    uniqueness rests on the tracking term alone. Box entries may be scalars,
    vectors or None (unbounded).
    """

    T: int = 10
    W_y: float | Array = 10.0
    W_du: float | Array = 0.1
    u_min: float | Array | None = None
    u_max: float | Array | None = None
    du_min: float | Array | None = None
    du_max: float | Array | None = None
    y_min: float | Array | None = None
    y_max: float | Array | None = None
    rho: float = 10.0
    tol_primal: float = 1e-6
    tol_dual: float = 1e-6
    max_outer: int = 200
    max_inner: int = 50

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("horizon T must be at least 1")
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")
        if self.tol_primal <= 0.0 or self.tol_dual <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be at least 1")


@dataclass
class MpcProblem:
    """One receding-horizon instance.

    ARX problems carry most-recent-first history stacks ``y_history`` and
    ``u_history`` of length ``p``; state-space problems carry the current
    state estimate ``x0`` instead.
    """

    config: MpcConfig
    model: ArxModel | LinearSsModel
    r: Array
    u_prev: Array
    y_history: Array | None = None
    u_history: Array | None = None
    x0: Array | None = None

    def __post_init__(self):
        self.r = np.atleast_2d(np.asarray(self.r, dtype=float))
        self.u_prev = np.asarray(self.u_prev, dtype=float).ravel()
        if isinstance(self.model, ArxModel):
            if self.y_history is None or self.u_history is None:
                raise ValueError("ARX problems need y_history and u_history")
            self.y_history = np.atleast_2d(np.asarray(self.y_history, dtype=float))
            self.u_history = np.atleast_2d(np.asarray(self.u_history, dtype=float))
            p = self.model.p
            if self.y_history.shape != (p, self.model.n_y):
                raise ValueError("y_history must have shape (p, n_y)")
            if self.u_history.shape != (p, self.model.n_u):
                raise ValueError("u_history must have shape (p, n_u)")
            ny, nu = self.model.n_y, self.model.n_u
        else:
            if self.x0 is None:
                raise ValueError("state-space problems need x0")
            self.x0 = np.asarray(self.x0, dtype=float).ravel()
            if self.x0.shape != (self.model.n_x,):
                raise ValueError("x0 must have shape (n_x,)")
            ny, nu = self.model.n_y, self.model.n_u
        if self.r.shape != (self.config.T, ny):
            raise ValueError(f"reference must have shape (T, n_y) = ({self.config.T}, {ny})")
        if self.u_prev.shape != (nu,):
            raise ValueError("u_prev must have shape (n_u,)")
        for name in ("r", "u_prev"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite entries in {name}")


@dataclass
class WarmStart:
    """Shifted primal iterates and multipliers carried between solves."""

    du: Array
    u: Array
    y: Array
    lam_g: Array | None = None  # ARX dynamics multiplier
    mu_d: Array | None = None
    x: Array | None = None  # state-space extras
    lam_x: Array | None = None
    lam_y: Array | None = None
    s: Array | None = None  # output-box slack
    nu_s: Array | None = None


@dataclass
class MpcSolution:
    """Solver output. ``u_seq``/``du_seq`` satisfy their boxes and the rate
    coupling exactly; ``y_pred`` is the exact model rollout of ``u_seq``."""

    u_seq: Array
    du_seq: Array
    y_pred: Array
    status: str
    outer_iters: int
    inner_iters: int
    primal_residual: float
    dual_residual: float
    solve_seconds: float
    objective: float
    warm: WarmStart | None = None


def _shift(a: Array) -> Array:
    return np.concatenate([a[1:], a[-1:]], axis=0)


def shift_warm_start(prev: MpcSolution | None) -> WarmStart | None:
    """Shift a previous solution one step forward, repeating the last entry.

    Multipliers shift the same way. ``None`` (no previous solution) maps to
    ``None``, which the solvers treat as an all-zeros cold start.
    """
    if prev is None or prev.warm is None:
        return None
    w = prev.warm
    shifted = {}
    for name in (
        "du", "u", "y", "lam_g", "mu_d", "x", "lam_x", "lam_y", "s", "nu_s"
    ):
        v = getattr(w, name)
        shifted[name] = _shift(v) if v is not None else None
    return WarmStart(**shifted)


def _expand_weight(w, n: int, name: str) -> Array:
    arr = np.asarray(w, dtype=float)
    if arr.ndim == 0:
        out = float(arr) * np.eye(n)
    else:
        out = np.atleast_2d(arr)
        if out.shape != (n, n):
            raise ValueError(f"{name} must be scalar or ({n}, {n})")
    eigs = np.linalg.eigvalsh(0.5 * (out + out.T))
    if eigs.min() < -1e-10:
        raise ValueError(f"{name} must be positive semidefinite")
    return out


def _expand_bound(b, n: int, default: float) -> Array:
    if b is None:
        return np.full(n, default)
    arr = np.asarray(b, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"bound must be scalar or length {n}")
    return arr.copy()


# ---------------------------------------------------------------------------
# Coordinate-descent sweep kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _arx_sweep(du, u, y, s, lam_g, mu_d, nu_s, G, D, S,
               Psi, Omega, Wy, Wdu, r_ref, rho,
               du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox):
    # one forward then one backward pass; symmetric sweeps move boundary
    # information through the time chain twice as fast as forward-only
    T = du.shape[0]
    nu = du.shape[1]
    ny = y.shape[1]
    p = Psi.shape[0]
    maxd = 0.0
    for kk in range(2 * T):
        k = kk if kk < T else 2 * T - 1 - kk
        for i in range(nu):
            grad = -(mu_d[k, i] + rho * D[k, i])
            for c in range(nu):
                grad += Wdu[i, c] * du[k, c]
            curv = Wdu[i, i] + rho
            new = du[k, i] - grad / curv
            if new < du_lo[i]:
                new = du_lo[i]
            elif new > du_hi[i]:
                new = du_hi[i]
            delta = new - du[k, i]
            if delta != 0.0:
                du[k, i] = new
                D[k, i] -= delta
                if abs(delta) > maxd:
                    maxd = abs(delta)
        jmax = p
        if T - k < p:
            jmax = T - k
        for i in range(nu):
            grad = mu_d[k, i] + rho * D[k, i]
            curv = rho
            if k + 1 < T:
                grad -= mu_d[k + 1, i] + rho * D[k + 1, i]
                curv += rho
            for j in range(1, jmax + 1):
                m = k + j - 1
                for c in range(ny):
                    w = Omega[j - 1, c, i]
                    if w != 0.0:
                        grad -= w * (lam_g[m, c] + rho * G[m, c])
                        curv += rho * w * w
            new = u[k, i] - grad / curv
            if new < u_lo[i]:
                new = u_lo[i]
            elif new > u_hi[i]:
                new = u_hi[i]
            delta = new - u[k, i]
            if delta != 0.0:
                u[k, i] = new
                D[k, i] += delta
                if k + 1 < T:
                    D[k + 1, i] -= delta
                for j in range(1, jmax + 1):
                    m = k + j - 1
                    for c in range(ny):
                        G[m, c] -= Omega[j - 1, c, i] * delta
                if abs(delta) > maxd:
                    maxd = abs(delta)
        m = k
        jm = p
        if T - 1 - m < p:
            jm = T - 1 - m
        for c in range(ny):
            grad = lam_g[m, c] + rho * G[m, c]
            curv = Wy[c, c] + rho
            for cc in range(ny):
                grad += Wy[c, cc] * (y[m, cc] - r_ref[m, cc])
            for j in range(1, jm + 1):
                for cc in range(ny):
                    w = Psi[j - 1, cc, c]
                    if w != 0.0:
                        grad -= w * (lam_g[m + j, cc] + rho * G[m + j, cc])
                        curv += rho * w * w
            if has_ybox:
                grad += nu_s[m, c] + rho * S[m, c]
                curv += rho
            new = y[m, c] - grad / curv
            delta = new - y[m, c]
            if delta != 0.0:
                y[m, c] = new
                G[m, c] += delta
                for j in range(1, jm + 1):
                    for cc in range(ny):
                        G[m + j, cc] -= Psi[j - 1, cc, c] * delta
                if has_ybox:
                    S[m, c] += delta
                if abs(delta) > maxd:
                    maxd = abs(delta)
        if has_ybox:
            for c in range(ny):
                new = y[m, c] + nu_s[m, c] / rho
                if new < y_lo[c]:
                    new = y_lo[c]
                elif new > y_hi[c]:
                    new = y_hi[c]
                delta = new - s[m, c]
                if delta != 0.0:
                    s[m, c] = new
                    S[m, c] -= delta
                    if abs(delta) > maxd:
                        maxd = abs(delta)
    return maxd


@njit(cache=True)
def _ss_sweep(du, u, x, y, s, lam_x, lam_y, mu_d, nu_s, X, Y, D, S,
              A, B, C, Wy, Wdu, r_ref, rho,
              du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox):
    T = du.shape[0]
    nu = du.shape[1]
    nx = x.shape[1]
    ny = y.shape[1]
    maxd = 0.0
    for kk in range(2 * T):
        k = kk if kk < T else 2 * T - 1 - kk
        for i in range(nu):
            grad = -(mu_d[k, i] + rho * D[k, i])
            for c in range(nu):
                grad += Wdu[i, c] * du[k, c]
            curv = Wdu[i, i] + rho
            new = du[k, i] - grad / curv
            if new < du_lo[i]:
                new = du_lo[i]
            elif new > du_hi[i]:
                new = du_hi[i]
            delta = new - du[k, i]
            if delta != 0.0:
                du[k, i] = new
                D[k, i] -= delta
                if abs(delta) > maxd:
                    maxd = abs(delta)
        for i in range(nu):
            grad = mu_d[k, i] + rho * D[k, i]
            curv = rho
            if k + 1 < T:
                grad -= mu_d[k + 1, i] + rho * D[k + 1, i]
                curv += rho
            for c in range(nx):
                w = B[c, i]
                if w != 0.0:
                    grad -= w * (lam_x[k, c] + rho * X[k, c])
                    curv += rho * w * w
            new = u[k, i] - grad / curv
            if new < u_lo[i]:
                new = u_lo[i]
            elif new > u_hi[i]:
                new = u_hi[i]
            delta = new - u[k, i]
            if delta != 0.0:
                u[k, i] = new
                D[k, i] += delta
                if k + 1 < T:
                    D[k + 1, i] -= delta
                for c in range(nx):
                    X[k, c] -= B[c, i] * delta
                if abs(delta) > maxd:
                    maxd = abs(delta)
        for i in range(nx):
            grad = lam_x[k, i] + rho * X[k, i]
            curv = rho
            if k + 1 < T:
                for c in range(nx):
                    w = A[c, i]
                    if w != 0.0:
                        grad -= w * (lam_x[k + 1, c] + rho * X[k + 1, c])
                        curv += rho * w * w
            for c in range(ny):
                w = C[c, i]
                if w != 0.0:
                    grad -= w * (lam_y[k, c] + rho * Y[k, c])
                    curv += rho * w * w
            new = x[k, i] - grad / curv
            delta = new - x[k, i]
            if delta != 0.0:
                x[k, i] = new
                X[k, i] += delta
                if k + 1 < T:
                    for c in range(nx):
                        X[k + 1, c] -= A[c, i] * delta
                for c in range(ny):
                    Y[k, c] -= C[c, i] * delta
                if abs(delta) > maxd:
                    maxd = abs(delta)
        for c in range(ny):
            grad = lam_y[k, c] + rho * Y[k, c]
            curv = Wy[c, c] + rho
            for cc in range(ny):
                grad += Wy[c, cc] * (y[k, cc] - r_ref[k, cc])
            if has_ybox:
                grad += nu_s[k, c] + rho * S[k, c]
                curv += rho
            new = y[k, c] - grad / curv
            delta = new - y[k, c]
            if delta != 0.0:
                y[k, c] = new
                Y[k, c] += delta
                if has_ybox:
                    S[k, c] += delta
                if abs(delta) > maxd:
                    maxd = abs(delta)
        if has_ybox:
            for c in range(ny):
                new = y[k, c] + nu_s[k, c] / rho
                if new < y_lo[c]:
                    new = y_lo[c]
                elif new > y_hi[c]:
                    new = y_hi[c]
                delta = new - s[k, c]
                if delta != 0.0:
                    s[k, c] = new
                    S[k, c] -= delta
                    if abs(delta) > maxd:
                        maxd = abs(delta)
    return maxd


@njit(cache=True)
def _arx_inner(du, u, y, s, lam_g, mu_d, nu_s, G, D, S,
               Psi, Omega, Wy, Wdu, r_ref, rho,
               du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox,
               max_sweeps, tol):
    maxd = 0.0
    used = 0
    for _ in range(max_sweeps):
        maxd = _arx_sweep(du, u, y, s, lam_g, mu_d, nu_s, G, D, S,
                          Psi, Omega, Wy, Wdu, r_ref, rho,
                          du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox)
        used += 1
        if maxd <= tol:
            break
    return maxd, used


@njit(cache=True)
def _ss_inner(du, u, x, y, s, lam_x, lam_y, mu_d, nu_s, X, Y, D, S,
              A, B, C, Wy, Wdu, r_ref, rho,
              du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox,
              max_sweeps, tol):
    maxd = 0.0
    used = 0
    for _ in range(max_sweeps):
        maxd = _ss_sweep(du, u, x, y, s, lam_x, lam_y, mu_d, nu_s, X, Y, D, S,
                         A, B, C, Wy, Wdu, r_ref, rho,
                         du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox)
        used += 1
        if maxd <= tol:
            break
    return maxd, used


# ---------------------------------------------------------------------------
# Residuals, objective, post-processing
# ---------------------------------------------------------------------------


@njit(cache=True)
def _arx_refresh(psi, omega, zeta, hy, hu, u_prev, du, u, y, s, G, D, S, has_ybox):
    T = du.shape[0]
    p = psi.shape[0]
    for m in range(T):
        pred = zeta.copy()
        for i in range(1, p + 1):
            j = m + 1 - i
            yv = y[j - 1] if j >= 1 else hy[-j]
            uv = u[j] if j >= 0 else hu[-j - 1]
            pred = pred + np.dot(psi[i - 1], yv) + np.dot(omega[i - 1], uv)
        G[m] = y[m] - pred
    D[0] = u[0] - u_prev - du[0]
    for k in range(1, T):
        D[k] = u[k] - u[k - 1] - du[k]
    if has_ybox:
        for m in range(T):
            S[m] = y[m] - s[m]


@njit(cache=True)
def _ss_refresh(a, b, c, e, h, x0, u_prev, du, u, x, y, s, X, Y, D, S, has_ybox):
    T = du.shape[0]
    xp = x0
    for m in range(T):
        X[m] = x[m] - np.dot(a, xp) - np.dot(b, u[m]) - e
        Y[m] = y[m] - np.dot(c, x[m]) - h
        xp = x[m]
    D[0] = u[0] - u_prev - du[0]
    for k in range(1, T):
        D[k] = u[k] - u[k - 1] - du[k]
    if has_ybox:
        for m in range(T):
            S[m] = y[m] - s[m]


def _objective_arrays(y: Array, r: Array, wy: Array, du: Array, wdu: Array) -> float:
    ey = y - r
    return 0.5 * (
        float(np.einsum("ti,ij,tj->", ey, wy, ey))
        + float(np.einsum("ti,ij,tj->", du, wdu, du))
    )


def _al_value(y, r, wy, du, wdu, rho, families) -> float:
    val = _objective_arrays(y, r, wy, du, wdu)
    for resid, lam_hat in families:
        val += float(np.sum(lam_hat * resid)) + 0.5 * rho * float(np.sum(resid * resid))
    return val


def _compose_feasible(du_raw, u_prev, du_lo, du_hi, u_lo, u_hi):
    """Clip the rate sequence, then accumulate it through the input box.

    The result satisfies the input box and the rate coupling exactly; the
    rate box is exact as well whenever it contains zero (a clipped input can
    only shrink the step toward zero).
    """
    T, nu = du_raw.shape
    du = np.clip(du_raw, du_lo, du_hi)
    u = np.empty_like(du)
    prev = u_prev.astype(float)
    for k in range(T):
        uk = np.clip(prev + du[k], u_lo, u_hi)
        du[k] = uk - prev
        u[k] = uk
        prev = uk
    return du, u


def objective_value(problem: MpcProblem, u_seq: Array) -> float:
    """Tracking cost of an input sequence under the problem's model.

    Predicted outputs come from the exact model rollout, rates from the
    difference against ``u_prev``; both weight blocks use the configured
    weights. Handy for comparing solvers on equal footing.
    """
    u_seq = np.atleast_2d(np.asarray(u_seq, dtype=float))
    cfg = problem.config
    if isinstance(problem.model, ArxModel):
        ny, nu = problem.model.n_y, problem.model.n_u
        y = simulate_arx(problem.model, problem.y_history, problem.u_history, u_seq)
    else:
        ny, nu = problem.model.n_y, problem.model.n_u
        _, y = simulate_ss(problem.model, problem.x0, u_seq)
    wy = _expand_weight(cfg.W_y, ny, "W_y")
    wdu = _expand_weight(cfg.W_du, nu, "W_du")
    du = np.diff(np.vstack([problem.u_prev, u_seq]), axis=0)
    return _objective_arrays(y, problem.r, wy, du, wdu)


# ---------------------------------------------------------------------------
# Main solve loop
# ---------------------------------------------------------------------------


def _solve_al(problem: MpcProblem, warm, al_trace=None) -> MpcSolution:
    t_start = time.perf_counter()
    cfg = problem.config
    model = problem.model
    is_arx = isinstance(model, ArxModel)
    T = cfg.T
    rho = float(cfg.rho)

    if is_arx:
        ny, nu = model.n_y, model.n_u
        psi, omega, zeta = model.Psi, model.Omega, model.zeta
        for name, arr in (("Psi", psi), ("Omega", omega), ("zeta", zeta)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in model {name}")
        if not np.all(np.isfinite(problem.y_history)) or not np.all(
            np.isfinite(problem.u_history)
        ):
            raise ValueError("non-finite entries in history")
    else:
        ny, nu, nx = model.n_y, model.n_u, model.n_x
        if not np.all(np.isfinite(problem.x0)):
            raise ValueError("non-finite entries in x0")

    wy = _expand_weight(cfg.W_y, ny, "W_y")
    wdu = _expand_weight(cfg.W_du, nu, "W_du")
    du_lo = _expand_bound(cfg.du_min, nu, -np.inf)
    du_hi = _expand_bound(cfg.du_max, nu, np.inf)
    u_lo = _expand_bound(cfg.u_min, nu, -np.inf)
    u_hi = _expand_bound(cfg.u_max, nu, np.inf)
    y_lo = _expand_bound(cfg.y_min, ny, -np.inf)
    y_hi = _expand_bound(cfg.y_max, ny, np.inf)
    for lo, hi, name in ((du_lo, du_hi, "du"), (u_lo, u_hi, "u"), (y_lo, y_hi, "y")):
        if np.any(lo > hi):
            raise ValueError(f"{name} box has min > max")
    has_ybox = bool(np.any(np.isfinite(y_lo)) or np.any(np.isfinite(y_hi)))

    if isinstance(warm, MpcSolution):
        warm = shift_warm_start(warm)
    cold = warm is None
    if warm is not None:
        if warm.du.shape != (T, nu) or warm.y.shape != (T, ny):
            raise ValueError("warm start shape does not match the problem")
        if not is_arx and (warm.x is None or warm.x.shape != (T, nx)):
            raise ValueError("warm start lacks a compatible state trajectory")
        du = _tracked_copy(warm.du)
        u = _tracked_copy(warm.u)
        y = _tracked_copy(warm.y)
        x = _tracked_copy(warm.x) if (not is_arx and warm.x is not None) else None
        s = _tracked_copy(warm.s) if (has_ybox and warm.s is not None) else None
        warm_g = warm.lam_g if is_arx else None
        warm_mu = warm.mu_d
        warm_lx = warm.lam_x if not is_arx else None
        warm_ly = warm.lam_y if not is_arx else None
        warm_nu = warm.nu_s if has_ybox else None
    else:
        du = u = y = x = s = None
        warm_g = warm_mu = warm_lx = warm_ly = warm_nu = None
    if du is None:
        du, u, y = _alloc(T, nu), _alloc(T, nu), _alloc(T, ny)
    if not is_arx and x is None:
        x = _alloc(T, nx)
    if has_ybox and s is None:
        s = _alloc(T, ny)
    if not has_ybox:
        # dummies keep the kernel signature uniform
        s = _alloc(1, ny)
        nu_dummy = _alloc(1, ny)

    np.clip(du, du_lo, du_hi, out=du)
    np.clip(u, u_lo, u_hi, out=u)
    if has_ybox:
        np.clip(s, y_lo, y_hi, out=s)

    if cold:
        # start dynamics-feasible: free-run the model under the clipped inputs
        if is_arx:
            for m in range(T):
                acc = zeta.copy()
                for i in range(1, model.p + 1):
                    j = m + 1 - i
                    yv = y[j - 1] if j >= 1 else problem.y_history[-j]
                    uv = u[j] if j >= 0 else problem.u_history[-j - 1]
                    acc = acc + psi[i - 1] @ yv + omega[i - 1] @ uv
                y[m] = acc
        else:
            xp = problem.x0
            for m in range(T):
                x[m] = model.A @ xp + model.B @ u[m] + model.e
                y[m] = model.C @ x[m] + model.h
                xp = x[m]
        if has_ybox:
            np.clip(y, y_lo, y_hi, out=s)

    # residual and multiplier families live in flat buffers; the per-family
    # arrays handed to the kernels are contiguous views into them, so the
    # outer-loop dual algebra runs as whole-vector operations
    if is_arx:
        fam_shapes = [(T, ny), (T, nu)]
        warm_lams = [warm_g, warm_mu]
    else:
        fam_shapes = [(T, nx), (T, ny), (T, nu)]
        warm_lams = [warm_lx, warm_ly, warm_mu]
    if has_ybox:
        fam_shapes.append((T, ny))
        warm_lams.append(warm_nu)
    n_c = sum(rows * cols for rows, cols in fam_shapes)

    def carve(flat):
        out = []
        offset = 0
        for shape in fam_shapes:
            m = shape[0] * shape[1]
            out.append(flat[offset : offset + m].reshape(shape))
            offset += m
        return out

    resid_flat = _alloc(n_c)
    lam_flat = _alloc(n_c)
    lam_hat_flat = _alloc(n_c)
    lam_old_flat = _alloc(n_c)
    lam_new_flat = _alloc(n_c)
    lam_tmp = _alloc(n_c)
    resid_list = carve(resid_flat)
    lam_list = carve(lam_flat)
    lam_hat = carve(lam_hat_flat)
    for view, w in zip(lam_list, warm_lams):
        if w is not None:
            w = np.asarray(w, dtype=float)
            if w.shape != view.shape:
                raise ValueError("warm start multiplier shape does not match")
            view[:] = w
    lam_hat_flat[:] = lam_flat
    lam_old_flat[:] = lam_flat

    if is_arx:
        G, D = resid_list[0], resid_list[1]
    else:
        X, Y, D = resid_list[0], resid_list[1], resid_list[2]
    S = resid_list[-1] if has_ybox else _alloc(1, ny)

    def refresh():
        if is_arx:
            _arx_refresh(
                psi, omega, zeta, problem.y_history, problem.u_history,
                problem.u_prev, du, u, y, s, G, D, S, has_ybox,
            )
        else:
            _ss_refresh(
                model.A, model.B, model.C, model.e, model.h, problem.x0,
                problem.u_prev, du, u, x, y, s, X, Y, D, S, has_ybox,
            )

    nu_kernel = lam_hat[-1] if has_ybox else nu_dummy

    def sweep():
        if is_arx:
            return _arx_sweep(
                du, u, y, s, lam_hat[0], lam_hat[1], nu_kernel, G, D, S,
                psi, omega, wy, wdu, problem.r, rho,
                du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox,
            )
        return _ss_sweep(
            du, u, x, y, s, lam_hat[0], lam_hat[1], lam_hat[2],
            nu_kernel, X, Y, D, S,
            model.A, model.B, model.C, wy, wdu, problem.r, rho,
            du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox,
        )

    def inner(tol):
        if is_arx:
            return _arx_inner(
                du, u, y, s, lam_hat[0], lam_hat[1], nu_kernel, G, D, S,
                psi, omega, wy, wdu, problem.r, rho,
                du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox,
                cfg.max_inner, tol,
            )
        return _ss_inner(
            du, u, x, y, s, lam_hat[0], lam_hat[1], lam_hat[2],
            nu_kernel, X, Y, D, S,
            model.A, model.B, model.C, wy, wdu, problem.r, rho,
            du_lo, du_hi, u_lo, u_hi, y_lo, y_hi, has_ybox,
            cfg.max_inner, tol,
        )

    z_fields = [du, u, y]
    if not is_arx:
        z_fields.append(x)
    if has_ybox:
        z_fields.append(s)
    z_len = sum(a.size for a in z_fields)
    z = _alloc(z_len)
    z_prev = _alloc(z_len)
    z_diff = _alloc(z_len)

    def snapshot_into(buf):
        o = 0
        for arr in z_fields:
            m = arr.size
            buf[o : o + m] = arr.ravel()
            o += m

    inner_floor = 0.1 * min(cfg.tol_primal, cfg.tol_dual)
    refresh()
    primal = max(float(np.max(np.abs(res))) for res in resid_list)
    # inexact inner solves: the tolerance tracks the constraint residual down,
    # so early outers exit after a few sweeps and late outers polish
    inner_tol = max(inner_floor, 0.05 * primal)
    snapshot_into(z_prev)
    t_acc = 1.0
    inner_total = 0
    outer_done = 0
    status = "iteration-limit"
    dual = np.inf

    for outer in range(1, cfg.max_outer + 1):
        if al_trace is None:
            maxd, used = inner(inner_tol)
            inner_total += used
        else:
            for _ in range(cfg.max_inner):
                maxd = sweep()
                inner_total += 1
                al_trace.append(
                    (outer, _al_value(y, problem.r, wy, du, wdu, rho,
                                      list(zip(resid_list, lam_hat))))
                )
                if maxd <= inner_tol:
                    break
        refresh()  # recompute exactly, killing incremental drift
        np.abs(resid_flat, out=lam_tmp)
        primal = float(lam_tmp.max())
        inner_tol = max(inner_floor, 0.05 * primal)
        snapshot_into(z)
        np.subtract(z, z_prev, out=z_diff)
        np.abs(z_diff, out=z_diff)
        dual = float(z_diff.max())
        z, z_prev = z_prev, z
        np.multiply(resid_flat, rho, out=lam_new_flat)
        lam_new_flat += lam_hat_flat
        outer_done = outer
        if primal <= cfg.tol_primal and dual <= cfg.tol_dual:
            status = "converged"
            lam_flat[:] = lam_new_flat
            break
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_acc * t_acc))
        beta = (t_acc - 1.0) / t_next
        # gradient-based adaptive restart: drop momentum when the ascent
        # direction turns against the latest multiplier step
        np.subtract(lam_new_flat, lam_old_flat, out=lam_tmp)
        gr = float(np.dot(lam_hat_flat, lam_tmp) - np.dot(lam_new_flat, lam_tmp))
        if gr > 0.0:
            t_next = 1.0
            beta = 0.0
        np.multiply(lam_tmp, beta, out=lam_hat_flat)
        lam_hat_flat += lam_new_flat
        lam_old_flat[:] = lam_new_flat
        lam_flat[:] = lam_new_flat
        t_acc = t_next

    for arr in [du, u, y] + ([x] if not is_arx else []):
        if not np.all(np.isfinite(arr)):
            raise SolverFailureError("solver produced a non-finite iterate")

    du_out, u_out = _compose_feasible(du, problem.u_prev, du_lo, du_hi, u_lo, u_hi)
    if is_arx:
        y_pred = simulate_arx(model, problem.y_history, problem.u_history, u_out)
    else:
        _, y_pred = simulate_ss(model, problem.x0, u_out)
    objective = _objective_arrays(y_pred, problem.r, wy, du_out, wdu)

    warm_out = WarmStart(
        du=du, u=u, y=y,
        lam_g=lam_list[0] if is_arx else None,
        mu_d=lam_list[1] if is_arx else lam_list[2],
        x=None if is_arx else x,
        lam_x=None if is_arx else lam_list[0],
        lam_y=None if is_arx else lam_list[1],
        s=s if has_ybox else None,
        nu_s=lam_list[-1] if has_ybox else None,
    )
    return MpcSolution(
        u_seq=u_out,
        du_seq=du_out,
        y_pred=y_pred,
        status=status,
        outer_iters=outer_done,
        inner_iters=inner_total,
        primal_residual=primal,
        dual_residual=dual,
        solve_seconds=time.perf_counter() - t_start,
        objective=objective,
        warm=warm_out,
    )


def solve_arx_mpc(problem: MpcProblem, warm: MpcSolution | WarmStart | None = None,
                  al_trace: list | None = None) -> MpcSolution:
    """Solve the ARX-model tracking problem.

    Decision variables are the rate sequence, input sequence and predicted
    outputs over the horizon, tied together by the ARX recursion and the
    rate coupling as equality constraints. A previous :class:`MpcSolution`
    passed as ``warm`` is shifted one step (last entry repeated) before use.
    """
    if not isinstance(problem.model, ArxModel):
        raise ValueError("solve_arx_mpc needs an ArxModel problem")
    return _solve_al(problem, warm, al_trace)


def solve_ss_mpc(problem: MpcProblem, warm: MpcSolution | WarmStart | None = None,
                 al_trace: list | None = None) -> MpcSolution:
    """Solve the state-space tracking problem (same structure, SS dynamics)."""
    if not isinstance(problem.model, LinearSsModel):
        raise ValueError("solve_ss_mpc needs a LinearSsModel problem")
    return _solve_al(problem, warm, al_trace)
