"""ODE integration for the Lorenz flow and its tangent (variational) flow.

The default scheme is fixed-step RK4 (reproducible, bit-stable runs); an
embedded Dormand-Prince 5(4) pair with adaptive substeps is available for
accuracy studies.  The tangent frame is advanced jointly with the state as one
12-dimensional system so the two never desynchronize.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import NonFiniteState
from .model import SystemParams, as_state, jacobian, vector_field

METHODS = ("RK4", "DOPRI45")

_LIMIT = 1.0e6


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, scheme, and (for DOPRI45) local error tolerances."""

    step: float = 1e-3
    method: str = "RK4"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8

    def __post_init__(self):
        if not (np.isfinite(self.step) and self.step > 0.0):
            raise ValueError(f"step must be positive, got {self.step!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")


# Dormand-Prince 5(4) tableau.  The last A row equals B5, so stage 7 is the
# FSAL evaluation at the 5th-order solution.
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_DP_ERR = _DP_B5 - _DP_B4


def _check_finite(y, t):
    head = y[:3]
    if not np.all(np.isfinite(y)) or np.max(np.abs(head)) > _LIMIT:
        raise NonFiniteState(
            f"state left the bounded region near t={t:.6g}", state=head.copy(), t=t
        )


def _dp54_advance(f, y, duration, cfg):
    """Adaptive DP5(4) integration of y' = f(y) over [0, duration]."""
    t = 0.0
    h = min(cfg.step, duration)
    k = np.empty((7,) + y.shape)
    while t < duration * (1.0 - 1e-14):
        h = min(h, duration - t)
        k[0] = f(y)
        for i in range(1, 7):
            yi = y + h * np.tensordot(np.asarray(_DP_A[i]), k[:i], axes=1)
            k[i] = f(yi)
        y5 = y + h * np.tensordot(_DP_B5, k, axes=1)
        err = h * np.tensordot(_DP_ERR, k, axes=1)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y5))
        enorm = np.sqrt(np.mean((err / scale) ** 2))
        if enorm <= 1.0:
            t += h
            y = y5
            _check_finite(y, t)
        factor = 5.0 if enorm == 0.0 else min(5.0, max(0.2, 0.9 * enorm**-0.2))
        h *= factor
        if h < 1e-13:
            raise NonFiniteState(
                f"adaptive step collapsed near t={t:.6g}", state=y[:3].copy(), t=t
            )
    return y


def _f_state(p):
    def f(y):
        return vector_field(p, y)

    return f


def _f_augmented(p):
    def f(y):
        s = y[:3]
        frame = y[3:].reshape(3, 3)
        return np.concatenate([vector_field(p, s), (jacobian(p, s) @ frame).ravel()])

    return f


def advance_state(p: SystemParams, s, duration: float, cfg: IntegratorConfig) -> np.ndarray:
    """State after integrating for `duration` time units from s.

    RK4 realizes round(duration/step) fixed steps; DOPRI45 hits the duration
    exactly with adaptive substeps.
    """
    out = as_state(s).copy()
    if duration == 0.0:
        return out
    if cfg.method == "RK4":
        nsteps = int(round(duration / cfg.step))
        status = _backend.rk4_state(p.sigma, p.r, p.b, out, cfg.step, nsteps)
        if status != 0:
            raise NonFiniteState("state left the bounded region", state=out.copy())
        return out
    return _dp54_advance(_f_state(p), out, duration, cfg)


def step_state(p: SystemParams, s, cfg: IntegratorConfig) -> np.ndarray:
    """Advance s by exactly one step (cfg.step time units) of the configured scheme."""
    if cfg.method == "RK4":
        out = as_state(s).copy()
        status = _backend.rk4_state(p.sigma, p.r, p.b, out, cfg.step, 1)
        if status != 0:
            raise NonFiniteState("state left the bounded region", state=out.copy())
        return out
    return _dp54_advance(_f_state(p), as_state(s).copy(), cfg.step, cfg)


def advance_augmented(
    p: SystemParams, s, frame, duration: float, cfg: IntegratorConfig
) -> tuple[np.ndarray, np.ndarray]:
    """(state, frame) after jointly integrating the 12-dim system for `duration`."""
    st = as_state(s).copy()
    fr = np.array(frame, dtype=float)
    if fr.shape != (3, 3):
        raise ValueError(f"frame must be 3x3, got shape {fr.shape}")
    if duration == 0.0:
        return st, fr
    if cfg.method == "RK4":
        nsteps = int(round(duration / cfg.step))
        fr = np.ascontiguousarray(fr)
        status = _backend.rk4_aug(p.sigma, p.r, p.b, st, fr, cfg.step, nsteps)
        if status != 0:
            raise NonFiniteState("state left the bounded region", state=st.copy())
        return st, fr
    y = _dp54_advance(_f_augmented(p), np.concatenate([st, fr.ravel()]), duration, cfg)
    return y[:3], y[3:].reshape(3, 3)


def step_augmented(
    p: SystemParams, s, frame, cfg: IntegratorConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Advance state and tangent frame by one synchronized step."""
    return advance_augmented(p, s, frame, cfg.step, cfg)


def trajectory(
    p: SystemParams,
    s,
    horizon: float,
    cfg: IntegratorConfig,
    n_samples: int = 10_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate for `horizon` and return (times, states) at n_samples points.

    Sample times are the multiples of horizon/n_samples (the seed itself is not
    included; the last row is the endpoint).
    """
    start = as_state(s).copy()
    n_samples = max(1, int(n_samples))
    if cfg.method == "RK4":
        stride = max(1, int(round(horizon / n_samples / cfg.step)))
        nsteps = stride * n_samples
        out = np.empty((n_samples, 3))
        status = _backend.rk4_state_record(
            p.sigma, p.r, p.b, start, cfg.step, nsteps, stride, out
        )
        if status != 0:
            raise NonFiniteState("state left the bounded region", state=start.copy())
        times = (np.arange(n_samples) + 1) * (stride * cfg.step)
        return times, out
    dt = horizon / n_samples
    out = np.empty((n_samples, 3))
    y = start
    for i in range(n_samples):
        y = _dp54_advance(_f_state(p), y, dt, cfg)
        out[i] = y
    return (np.arange(n_samples) + 1) * dt, out
