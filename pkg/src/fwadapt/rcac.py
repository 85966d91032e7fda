"""Retrospective-cost gain adaptation for one SISO control loop.

The control is u_k = phi_k @ theta_k, where phi_k stacks the loop error
history (proportional, integral, difference and feedforward entries) and
theta_k is re-optimized at every step by recursive least squares over a
cumulative retrospective cost.  ``batch_argmin`` solves the same cost
directly from recorded data and is used to cross-check the recursion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

GAIN_GUARD = 1e9  # any |theta| or |P| entry beyond this is treated as divergence


class DivergenceError(RuntimeError):
    """Adaptation produced non-finite or unbounded quantities."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (step {step})")
        self.step = step


class Parameterization(enum.Enum):
    """Active regressor entries: error, integrated error, differenced error, feedforward."""

    P = "P"
    PI = "PI"
    PID = "PID"
    PID_FF = "PID+FF"

    @property
    def n_gains(self) -> int:
        return _N_GAINS[self]


_N_GAINS = {
    Parameterization.P: 1,
    Parameterization.PI: 2,
    Parameterization.PID: 3,
    Parameterization.PID_FF: 4,
}


@dataclass
class RcacHyperparams:
    """Fixed hyperparameters of one adaptive loop.

    Attributes:
        p0: initial covariance scale (> 0).
        r_u: control weight (>= 0).
        r_z: performance weight (> 0).
        sigma: sign/direction of the control-to-error path (nonzero; the
            update adapts in the wrong direction if this sign is wrong).
        parameterization: which regressor entries are active.
        theta0: initial gain vector, zeros if omitted.
        integrator_clamp: symmetric bound on the integrator state; 0 disables.
        sample_time: controller period in seconds, scales the integrator.
    """

    p0: float
    r_u: float
    r_z: float = 1.0
    sigma: float = -1.0
    parameterization: Parameterization = Parameterization.PI
    theta0: np.ndarray | None = None
    integrator_clamp: float = 0.0
    sample_time: float = 0.004

    def __post_init__(self):
        if self.p0 <= 0.0:
            raise ValueError(f"p0 must be positive, got {self.p0}")
        if self.r_z <= 0.0:
            raise ValueError(f"r_z must be positive, got {self.r_z}")
        if self.r_u < 0.0:
            raise ValueError(f"r_u must be nonnegative, got {self.r_u}")
        if self.sigma == 0.0:
            raise ValueError("sigma must be nonzero")
        if self.integrator_clamp < 0.0:
            raise ValueError("integrator_clamp must be nonnegative")
        if self.sample_time <= 0.0:
            raise ValueError("sample_time must be positive")
        n = self.parameterization.n_gains
        if self.theta0 is None:
            self.theta0 = np.zeros(n)
        else:
            self.theta0 = np.asarray(self.theta0, dtype=float).reshape(-1)
            if self.theta0.size != n:
                raise ValueError(
                    f"theta0 has {self.theta0.size} entries, "
                    f"{self.parameterization.value} needs {n}"
                )

    @property
    def n_gains(self) -> int:
        return self.parameterization.n_gains


@dataclass
class RcacState:
    """Evolving state of one adaptive loop.

    theta and p_matrix are the RLS estimate and covariance; gamma is the
    clamped integrator; the remaining fields are the one- and two-step
    error/regressor/control history the retrospective update needs.
    """

    theta: np.ndarray
    p_matrix: np.ndarray
    gamma: float
    z_prev: float
    z_prev2: float
    phi_prev: np.ndarray
    u_prev: float
    step: int

    @classmethod
    def initial(cls, params: RcacHyperparams) -> "RcacState":
        n = params.n_gains
        return cls(
            theta=params.theta0.copy(),
            p_matrix=params.p0 * np.eye(n),
            gamma=0.0,
            z_prev=0.0,
            z_prev2=0.0,
            phi_prev=np.zeros(n),
            u_prev=0.0,
            step=0,
        )


@dataclass
class RcacHistory:
    """Recorded (error, regressor, applied control) triples for the batch solver."""

    z: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    u: list = field(default_factory=list)

    def append(self, z_k: float, phi_k: np.ndarray, u_k: float) -> None:
        self.z.append(float(z_k))
        self.phi.append(np.asarray(phi_k, dtype=float).copy())
        self.u.append(float(u_k))

    def __len__(self) -> int:
        return len(self.z)


def build_regressor(
    state: RcacState, z_prev: float, r_k: float, params: RcacHyperparams
) -> np.ndarray:
    """Assemble the regressor row for the current step.

    ``z_prev`` fills the proportional slot; the state supplies the deeper
    history: the integrator ``gamma`` and the error two steps back for the
    difference entry.
    """
    kind = params.parameterization
    if kind is Parameterization.P:
        return np.array([z_prev])
    if kind is Parameterization.PI:
        return np.array([z_prev, state.gamma])
    if kind is Parameterization.PID:
        return np.array([z_prev, state.gamma, z_prev - state.z_prev2])
    return np.array([z_prev, state.gamma, z_prev - state.z_prev2, r_k])


def retrospective_performance(
    z_k: float,
    phi_prev: np.ndarray,
    theta: np.ndarray,
    u_prev: float,
    sigma: float,
) -> float:
    """Error that would have resulted had ``theta`` generated the past control."""
    phi_prev = np.asarray(phi_prev, dtype=float).reshape(-1)
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if phi_prev.size != theta.size:
        raise ValueError(
            f"regressor/gain dimension mismatch: {phi_prev.size} vs {theta.size}"
        )
    return float(z_k + sigma * (phi_prev @ theta - u_prev))


def _inv_spd(m: np.ndarray) -> np.ndarray:
    """Invert a small symmetric positive-definite matrix."""
    n = m.shape[0]
    if n == 1:
        return np.array([[1.0 / m[0, 0]]])
    if n == 2:
        a, b, c = m[0, 0], m[0, 1], m[1, 1]
        det = a * c - b * b
        return np.array([[c, -b], [-b, a]]) / det
    return np.linalg.inv(m)


def _check_spd(m: np.ndarray) -> None:
    n = m.shape[0]
    scale = float(np.abs(m).max())
    if scale == 0.0 or not math.isfinite(scale):
        raise ValueError("covariance is zero or non-finite")
    if float(np.abs(m - m.T).max()) > 1e-9 * scale:
        raise ValueError("covariance is not symmetric")
    if n == 1:
        ok = m[0, 0] > 0.0
    elif n == 2:
        ok = m[0, 0] > 0.0 and m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] > 0.0
    else:
        try:
            np.linalg.cholesky(m)
            ok = True
        except np.linalg.LinAlgError:
            ok = False
    if not ok:
        raise ValueError("covariance is not positive definite")


def covariance_update(
    p: np.ndarray,
    phi_k: np.ndarray,
    phi_prev: np.ndarray,
    sigma: float,
    r_z: float,
    r_u: float,
) -> np.ndarray:
    """Contract the covariance with the new regressor pair.

    Runs in information form, P_next^-1 = P^-1 + sigma^2 R_z phi_prev^T
    phi_prev + R_u phi_k^T phi_k, which stays well defined for r_u = 0.
    The result is re-symmetrized before return.
    """
    p = np.asarray(p, dtype=float)
    _check_spd(p)
    phi_k = np.asarray(phi_k, dtype=float).reshape(-1)
    phi_prev = np.asarray(phi_prev, dtype=float).reshape(-1)
    info = _inv_spd(p)
    info = info + (sigma * sigma * r_z) * np.outer(phi_prev, phi_prev)
    if r_u > 0.0:
        info = info + r_u * np.outer(phi_k, phi_k)
    p_next = _inv_spd(0.5 * (info + info.T))
    return 0.5 * (p_next + p_next.T)


def _clamp(x: float, bound: float) -> float:
    if bound > 0.0:
        if x > bound:
            return bound
        if x < -bound:
            return -bound
    return x


def rcac_step(
    state: RcacState, z_k: float, r_k: float, params: RcacHyperparams
) -> tuple[float, RcacState]:
    """One adaptation step: fold in the error sample, return the next control.

    Returns ``(u_next, new_state)`` where ``u_next`` is the control for the
    following tick, computed from the shifted history and the updated gains.
    ``new_state.u_prev`` holds the control consistent with this step's
    regressor (u_k = phi_k @ theta_k), which the next step's retrospective
    term references.

    Raises:
        ValueError: non-finite error or feedforward input.
        DivergenceError: gains or covariance left the trust region.
    """
    if not (math.isfinite(z_k) and math.isfinite(r_k)):
        raise ValueError(f"non-finite rcac input: z={z_k}, r={r_k}")
    if params.parameterization is Parameterization.PI:
        return _rcac_step_pi(state, z_k, params)

    sigma, r_z, r_u = params.sigma, params.r_z, params.r_u
    phi_k = build_regressor(state, state.z_prev, r_k, params)
    p_next = covariance_update(
        state.p_matrix, phi_k, state.phi_prev, sigma, r_z, r_u
    )

    zhat = z_k + sigma * (state.phi_prev @ state.theta - state.u_prev)
    theta_next = (
        state.theta
        - sigma * (p_next @ state.phi_prev) * (r_z * zhat)
        - (p_next @ phi_k) * (r_u * float(phi_k @ state.theta))
    )

    if not (np.isfinite(theta_next).all() and np.isfinite(p_next).all()):
        raise DivergenceError("non-finite gains or covariance", state.step)
    if np.abs(theta_next).max() > GAIN_GUARD or np.abs(p_next).max() > GAIN_GUARD:
        raise DivergenceError("gains or covariance exceeded guard bound", state.step)

    u_k = float(phi_k @ state.theta)
    new_state = RcacState(
        theta=theta_next,
        p_matrix=p_next,
        gamma=_clamp(
            state.gamma + params.sample_time * state.z_prev, params.integrator_clamp
        ),
        z_prev=z_k,
        z_prev2=state.z_prev,
        phi_prev=phi_k,
        u_prev=u_k,
        step=state.step + 1,
    )
    phi_next = build_regressor(new_state, z_k, r_k, params)
    u_next = float(phi_next @ theta_next)
    return u_next, new_state


def _rcac_step_pi(
    state: RcacState, z_k: float, params: RcacHyperparams
) -> tuple[float, RcacState]:
    """Scalarized PI-parameterization step, the control-path hot case.

    Same formulas as the general path (information-form covariance, gain
    update, shifted history) written in plain floats; five of these run per
    inner tick.
    """
    sigma, r_z, r_u = params.sigma, params.r_z, params.r_u
    p00, p01, p10, p11 = state.p_matrix.ravel().tolist()
    scale = max(abs(p00), abs(p01), abs(p10), abs(p11))
    if not math.isfinite(scale) or scale == 0.0:
        raise ValueError("covariance is zero or non-finite")
    if abs(p01 - p10) > 1e-9 * scale:
        raise ValueError("covariance is not symmetric")
    det = p00 * p11 - p01 * p10
    if p00 <= 0.0 or det <= 0.0:
        raise ValueError("covariance is not positive definite")

    z_prev = state.z_prev
    gamma = state.gamma
    fp0, fp1 = state.phi_prev.tolist()
    t0, t1 = state.theta.tolist()
    phi0, phi1 = z_prev, gamma

    # information-form covariance contraction
    w = sigma * sigma * r_z
    i00 = p11 / det + w * fp0 * fp0 + r_u * phi0 * phi0
    i01 = -p01 / det + w * fp0 * fp1 + r_u * phi0 * phi1
    i11 = p00 / det + w * fp1 * fp1 + r_u * phi1 * phi1
    det_i = i00 * i11 - i01 * i01
    q00 = i11 / det_i
    q01 = -i01 / det_i
    q11 = i00 / det_i

    zhat = z_k + sigma * (fp0 * t0 + fp1 * t1 - state.u_prev)
    c_z = sigma * r_z * zhat
    c_u = r_u * (phi0 * t0 + phi1 * t1)
    t0n = t0 - (q00 * fp0 + q01 * fp1) * c_z - (q00 * phi0 + q01 * phi1) * c_u
    t1n = t1 - (q01 * fp0 + q11 * fp1) * c_z - (q01 * phi0 + q11 * phi1) * c_u

    if not (
        math.isfinite(t0n) and math.isfinite(t1n)
        and math.isfinite(q00) and math.isfinite(q01) and math.isfinite(q11)
    ):
        raise DivergenceError("non-finite gains or covariance", state.step)
    if max(abs(t0n), abs(t1n), abs(q00), abs(q01), abs(q11)) > GAIN_GUARD:
        raise DivergenceError("gains or covariance exceeded guard bound", state.step)

    u_k = phi0 * t0 + phi1 * t1
    gamma_next = _clamp(gamma + params.sample_time * z_prev, params.integrator_clamp)
    new_state = RcacState(
        theta=np.array([t0n, t1n]),
        p_matrix=np.array([[q00, q01], [q01, q11]]),
        gamma=gamma_next,
        z_prev=z_k,
        z_prev2=z_prev,
        phi_prev=np.array([phi0, phi1]),
        u_prev=u_k,
        step=state.step + 1,
    )
    u_next = z_k * t0n + gamma_next * t1n
    return u_next, new_state


def batch_argmin(history: RcacHistory, params: RcacHyperparams) -> np.ndarray:
    """Directly minimize the cumulative retrospective cost over recorded data.

    Assembles the regularized normal equations and solves them with a dense
    factorization.  Intended for verification, not for the control path.
    """
    if len(history) == 0:
        return params.theta0.copy()
    n = params.n_gains
    sigma, r_z, r_u = params.sigma, params.r_z, params.r_u
    z = np.asarray(history.z)
    phi = np.asarray(history.phi).reshape(len(history), n)
    u = np.asarray(history.u)
    # step i pairs z_i with the previous step's regressor and control
    phi_lag = np.vstack([np.zeros(n), phi[:-1]])
    u_lag = np.concatenate([[0.0], u[:-1]])
    a = (
        np.eye(n) / params.p0
        + (sigma * sigma * r_z) * (phi_lag.T @ phi_lag)
        + r_u * (phi.T @ phi)
    )
    b = params.theta0 / params.p0 + (sigma * r_z) * (phi_lag.T @ (sigma * u_lag - z))
    try:
        theta = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DivergenceError(f"batch solve failed: {exc}", len(history)) from exc
    if not np.isfinite(theta).all():
        raise DivergenceError("batch solve produced non-finite gains", len(history))
    return theta


class RcacLoop:
    """Stateful wrapper pairing hyperparameters with the evolving state.

    ``advance`` implements the one-tick-delayed control emission: it returns
    the control computed at the previous tick, then folds in the new error
    sample.  With ``pin_gains_zero`` the update still runs but the gains are
    forced to zero afterwards, so the loop contributes exactly nothing.
    """

    def __init__(self, params: RcacHyperparams, pin_gains_zero: bool = False):
        self.params = params
        self.state = RcacState.initial(params)
        self.pin_gains_zero = pin_gains_zero
        self._u_next = 0.0

    def advance(self, z_k: float, r_k: float = 0.0) -> float:
        u_apply = self._u_next
        self._u_next, self.state = rcac_step(self.state, z_k, r_k, self.params)
        if self.pin_gains_zero:
            self.state.theta = np.zeros(self.params.n_gains)
            self._u_next = 0.0
        return u_apply

    @property
    def theta(self) -> np.ndarray:
        return self.state.theta
