# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels.

Fixed-step RK4 for the Lorenz state, the coupled 12-dimensional state+tangent
system, and the Benettin log-norm accumulation loop.  The pure-Python module
`_kernels_py` mirrors these contracts; `_backend` picks one at import time.

All kernels mutate their array arguments in place and return a status code:
0 = ok, 1 = non-finite or runaway state (|component| > 1e6).
"""

from libc.math cimport fabs, isfinite, log, sqrt

BACKEND_NAME = "compiled"

cdef double _LIMIT = 1.0e6


cdef inline bint _state_ok(double x, double y, double z) nogil:
    return (
        isfinite(x) and isfinite(y) and isfinite(z)
        and fabs(x) <= _LIMIT and fabs(y) <= _LIMIT and fabs(z) <= _LIMIT
    )


cdef inline void _rk4_once(double sigma, double r, double b,
                           double* x, double* y, double* z, double h) nogil:
    cdef double k1x, k1y, k1z, k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z
    cdef double x2, y2, z2, x3, y3, z3, x4, y4, z4, h2, h6
    k1x = sigma * (y[0] - x[0])
    k1y = r * x[0] - y[0] - x[0] * z[0]
    k1z = -b * z[0] + x[0] * y[0]
    h2 = 0.5 * h
    x2 = x[0] + h2 * k1x
    y2 = y[0] + h2 * k1y
    z2 = z[0] + h2 * k1z
    k2x = sigma * (y2 - x2)
    k2y = r * x2 - y2 - x2 * z2
    k2z = -b * z2 + x2 * y2
    x3 = x[0] + h2 * k2x
    y3 = y[0] + h2 * k2y
    z3 = z[0] + h2 * k2z
    k3x = sigma * (y3 - x3)
    k3y = r * x3 - y3 - x3 * z3
    k3z = -b * z3 + x3 * y3
    x4 = x[0] + h * k3x
    y4 = y[0] + h * k3y
    z4 = z[0] + h * k3z
    k4x = sigma * (y4 - x4)
    k4y = r * x4 - y4 - x4 * z4
    k4z = -b * z4 + x4 * y4
    h6 = h / 6.0
    x[0] = x[0] + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y[0] = y[0] + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    z[0] = z[0] + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)


def rk4_state(double sigma, double r, double b, double[::1] state,
              double h, long nsteps):
    cdef double x = state[0], y = state[1], z = state[2]
    cdef long i
    cdef int status = 0
    with nogil:
        for i in range(nsteps):
            _rk4_once(sigma, r, b, &x, &y, &z, h)
            if not _state_ok(x, y, z):
                status = 1
                break
    state[0] = x
    state[1] = y
    state[2] = z
    return status


def rk4_state_record(double sigma, double r, double b, double[::1] state,
                     double h, long nsteps, long stride, double[:, ::1] out):
    cdef double x = state[0], y = state[1], z = state[2]
    cdef long i, row = 0, nrows = out.shape[0]
    cdef int status = 0
    with nogil:
        for i in range(nsteps):
            _rk4_once(sigma, r, b, &x, &y, &z, h)
            if not _state_ok(x, y, z):
                status = 1
                break
            if (i + 1) % stride == 0 and row < nrows:
                out[row, 0] = x
                out[row, 1] = y
                out[row, 2] = z
                row += 1
    state[0] = x
    state[1] = y
    state[2] = z
    return status


cdef inline void _aug_deriv(double sigma, double r, double b,
                            double x, double y, double z, double* F,
                            double* dx, double* dy, double* dz, double* dF) nogil:
    cdef long j
    dx[0] = sigma * (y - x)
    dy[0] = r * x - y - x * z
    dz[0] = -b * z + x * y
    for j in range(3):
        dF[0 * 3 + j] = sigma * (F[1 * 3 + j] - F[0 * 3 + j])
        dF[1 * 3 + j] = (r - z) * F[0 * 3 + j] - F[1 * 3 + j] - x * F[2 * 3 + j]
        dF[2 * 3 + j] = y * F[0 * 3 + j] + x * F[1 * 3 + j] - b * F[2 * 3 + j]


cdef inline void _rk4_aug_once(double sigma, double r, double b,
                               double* x, double* y, double* z, double* F,
                               double h) nogil:
    cdef double k1x, k1y, k1z, k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z
    cdef double K1[9]
    cdef double K2[9]
    cdef double K3[9]
    cdef double K4[9]
    cdef double Ftmp[9]
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    cdef long m
    _aug_deriv(sigma, r, b, x[0], y[0], z[0], F, &k1x, &k1y, &k1z, K1)
    for m in range(9):
        Ftmp[m] = F[m] + h2 * K1[m]
    _aug_deriv(sigma, r, b, x[0] + h2 * k1x, y[0] + h2 * k1y, z[0] + h2 * k1z,
               Ftmp, &k2x, &k2y, &k2z, K2)
    for m in range(9):
        Ftmp[m] = F[m] + h2 * K2[m]
    _aug_deriv(sigma, r, b, x[0] + h2 * k2x, y[0] + h2 * k2y, z[0] + h2 * k2z,
               Ftmp, &k3x, &k3y, &k3z, K3)
    for m in range(9):
        Ftmp[m] = F[m] + h * K3[m]
    _aug_deriv(sigma, r, b, x[0] + h * k3x, y[0] + h * k3y, z[0] + h * k3z,
               Ftmp, &k4x, &k4y, &k4z, K4)
    x[0] = x[0] + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y[0] = y[0] + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    z[0] = z[0] + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    for m in range(9):
        F[m] = F[m] + h6 * (K1[m] + 2.0 * K2[m] + 2.0 * K3[m] + K4[m])


cdef int _rk4_aug_run(double sigma, double r, double b,
                      double* x, double* y, double* z, double* F,
                      double h, long nsteps) nogil:
    cdef long i
    for i in range(nsteps):
        _rk4_aug_once(sigma, r, b, x, y, z, F, h)
        if not _state_ok(x[0], y[0], z[0]):
            return 1
    return 0


def rk4_aug(double sigma, double r, double b, double[::1] state,
            double[:, ::1] frame, double h, long nsteps):
    cdef double x = state[0], y = state[1], z = state[2]
    cdef double F[9]
    cdef long i, j
    cdef int status
    for i in range(3):
        for j in range(3):
            F[i * 3 + j] = frame[i, j]
    with nogil:
        status = _rk4_aug_run(sigma, r, b, &x, &y, &z, F, h, nsteps)
    state[0] = x
    state[1] = y
    state[2] = z
    for i in range(3):
        for j in range(3):
            frame[i, j] = F[i * 3 + j]
    return status


cdef int _gram_schmidt(double* F, double* logsums) nogil:
    """Modified Gram-Schmidt on the columns of F; accumulate log norms."""
    cdef long i, j, k
    cdef double c, n
    cdef double v[3]
    for j in range(3):
        for i in range(3):
            v[i] = F[i * 3 + j]
        for k in range(j):
            c = F[0 * 3 + k] * v[0] + F[1 * 3 + k] * v[1] + F[2 * 3 + k] * v[2]
            for i in range(3):
                v[i] = v[i] - c * F[i * 3 + k]
        n = sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
        if not isfinite(n) or n <= 0.0:
            return 1
        logsums[j] += log(n)
        for i in range(3):
            F[i * 3 + j] = v[i] / n
    return 0


def benettin(double sigma, double r, double b, double[::1] state,
             double[:, ::1] frame, double h, long steps_per_chunk,
             long nchunks, double[::1] logsums):
    cdef double x = state[0], y = state[1], z = state[2]
    cdef double F[9]
    cdef double S[3]
    cdef long i, j, c
    cdef int status = 0
    for i in range(3):
        S[i] = logsums[i]
        for j in range(3):
            F[i * 3 + j] = frame[i, j]
    with nogil:
        for c in range(nchunks):
            status = _rk4_aug_run(sigma, r, b, &x, &y, &z, F, h, steps_per_chunk)
            if status != 0:
                break
            status = _gram_schmidt(F, S)
            if status != 0:
                break
    state[0] = x
    state[1] = y
    state[2] = z
    for i in range(3):
        logsums[i] = S[i]
        for j in range(3):
            frame[i, j] = F[i * 3 + j]
    return status
