"""Pure-numpy fallback kernels.

Same contracts as the compiled module `_kernels`: fixed-step RK4 for the Lorenz
state, the coupled 12-dimensional state+tangent system, and the Benettin
log-norm accumulation loop.  Expressions mirror the compiled code line by line
so the two backends agree to rounding.

All kernels mutate their array arguments in place and return a status code:
0 = ok, 1 = non-finite or runaway state (|component| > 1e6).
"""

import numpy as np

BACKEND_NAME = "python"

_LIMIT = 1.0e6


def _state_ok(x, y, z):
    return (
        np.isfinite(x)
        and np.isfinite(y)
        and np.isfinite(z)
        and abs(x) <= _LIMIT
        and abs(y) <= _LIMIT
        and abs(z) <= _LIMIT
    )


def _rk4_once(sigma, r, b, x, y, z, h):
    k1x = sigma * (y - x)
    k1y = r * x - y - x * z
    k1z = -b * z + x * y
    h2 = 0.5 * h
    x2 = x + h2 * k1x
    y2 = y + h2 * k1y
    z2 = z + h2 * k1z
    k2x = sigma * (y2 - x2)
    k2y = r * x2 - y2 - x2 * z2
    k2z = -b * z2 + x2 * y2
    x3 = x + h2 * k2x
    y3 = y + h2 * k2y
    z3 = z + h2 * k2z
    k3x = sigma * (y3 - x3)
    k3y = r * x3 - y3 - x3 * z3
    k3z = -b * z3 + x3 * y3
    x4 = x + h * k3x
    y4 = y + h * k3y
    z4 = z + h * k3z
    k4x = sigma * (y4 - x4)
    k4y = r * x4 - y4 - x4 * z4
    k4z = -b * z4 + x4 * y4
    h6 = h / 6.0
    return (
        x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        z + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
    )


def rk4_state(sigma, r, b, state, h, nsteps):
    x, y, z = state[0], state[1], state[2]
    for _ in range(nsteps):
        x, y, z = _rk4_once(sigma, r, b, x, y, z, h)
        if not _state_ok(x, y, z):
            state[0], state[1], state[2] = x, y, z
            return 1
    state[0], state[1], state[2] = x, y, z
    return 0


def rk4_state_record(sigma, r, b, state, h, nsteps, stride, out):
    x, y, z = state[0], state[1], state[2]
    row = 0
    for i in range(nsteps):
        x, y, z = _rk4_once(sigma, r, b, x, y, z, h)
        if not _state_ok(x, y, z):
            state[0], state[1], state[2] = x, y, z
            return 1
        if (i + 1) % stride == 0 and row < out.shape[0]:
            out[row, 0] = x
            out[row, 1] = y
            out[row, 2] = z
            row += 1
    state[0], state[1], state[2] = x, y, z
    return 0


def _aug_deriv(sigma, r, b, x, y, z, F):
    dx = sigma * (y - x)
    dy = r * x - y - x * z
    dz = -b * z + x * y
    dF = np.empty((3, 3))
    dF[0] = sigma * (F[1] - F[0])
    dF[1] = (r - z) * F[0] - F[1] - x * F[2]
    dF[2] = y * F[0] + x * F[1] - b * F[2]
    return dx, dy, dz, dF


def _rk4_aug_once(sigma, r, b, x, y, z, F, h):
    k1x, k1y, k1z, K1 = _aug_deriv(sigma, r, b, x, y, z, F)
    h2 = 0.5 * h
    k2x, k2y, k2z, K2 = _aug_deriv(
        sigma, r, b, x + h2 * k1x, y + h2 * k1y, z + h2 * k1z, F + h2 * K1
    )
    k3x, k3y, k3z, K3 = _aug_deriv(
        sigma, r, b, x + h2 * k2x, y + h2 * k2y, z + h2 * k2z, F + h2 * K2
    )
    k4x, k4y, k4z, K4 = _aug_deriv(
        sigma, r, b, x + h * k3x, y + h * k3y, z + h * k3z, F + h * K3
    )
    h6 = h / 6.0
    return (
        x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        z + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
        F + h6 * (K1 + 2.0 * K2 + 2.0 * K3 + K4),
    )


def rk4_aug(sigma, r, b, state, frame, h, nsteps):
    x, y, z = state[0], state[1], state[2]
    F = np.array(frame, dtype=float)
    for _ in range(nsteps):
        x, y, z, F = _rk4_aug_once(sigma, r, b, x, y, z, F, h)
        if not _state_ok(x, y, z):
            state[0], state[1], state[2] = x, y, z
            frame[:, :] = F
            return 1
    state[0], state[1], state[2] = x, y, z
    frame[:, :] = F
    return 0


def _gram_schmidt(frame, logsums):
    """Modified Gram-Schmidt on frame columns; accumulate log norms. 0 ok / 1 bad."""
    for j in range(3):
        v = frame[:, j].copy()
        for k in range(j):
            v -= (frame[:, k] @ v) * frame[:, k]
        n = np.sqrt(v @ v)
        if not np.isfinite(n) or n <= 0.0:
            return 1
        logsums[j] += np.log(n)
        frame[:, j] = v / n
    return 0


def benettin(sigma, r, b, state, frame, h, steps_per_chunk, nchunks, logsums):
    for _ in range(nchunks):
        status = rk4_aug(sigma, r, b, state, frame, h, steps_per_chunk)
        if status != 0:
            return status
        status = _gram_schmidt(frame, logsums)
        if status != 0:
            return status
    return 0
