# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) kernel; mirrors ``_rk_py.integrate``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt, fabs, isfinite

cnp.import_array()

cdef enum:
    MAXDIM = 64

cdef int DONE = 0
cdef int CROSSED = 1
cdef int BLOWUP = 2
cdef int UNDERFLOW = 3
cdef int MAXSTEPS = 4

cdef int POW_PLAIN = 0
cdef int POW_ODD = 1

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176
cdef double A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784
cdef double A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double SAFETY = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0
cdef double BETA = 0.04
cdef double EXPO = 0.2 - 0.75 * 0.04


cdef inline bint _rhs(double r, double* y, double* out, int m, double nm1, double sign,
                      double alpha, int mode) nogil:
    cdef double u = y[0]
    cdef double f, inv_r, d, nxt
    cdef int i
    if mode == POW_PLAIN:
        f = pow(u, alpha) if alpha != 0.0 else 1.0
    elif mode == POW_ODD:
        f = pow(u, alpha) if u >= 0.0 else -pow(-u, alpha)
    else:
        if u <= 0.0:
            return False
        f = pow(u, alpha)
    inv_r = nm1 / r
    for i in range(m):
        d = y[2 * i + 1]
        nxt = y[2 * i + 2] if i < m - 1 else sign * f
        out[2 * i] = d
        out[2 * i + 1] = nxt - inv_r * d
    return True


def integrate(int n, int m, double sign, double alpha, int mode, y0, double r0,
              double r_end, double rtol, double atol, double h0, double blowup,
              double underflow, long max_steps):
    cdef int dim = 2 * m
    if dim > MAXDIM:
        raise ValueError("m too large for the compiled kernel")
    cdef double nm1 = n - 1
    cdef double y[MAXDIM]
    cdef double y_prev[MAXDIM]
    cdef double k1[MAXDIM]
    cdef double k2[MAXDIM]
    cdef double k3[MAXDIM]
    cdef double k4[MAXDIM]
    cdef double k5[MAXDIM]
    cdef double k6[MAXDIM]
    cdef double k7[MAXDIM]
    cdef double yt[MAXDIM]
    cdef double ynew[MAXDIM]
    cdef int i
    cdef double r = r0, h = h0, err, e, sc, fac, r_prev = r0, h_used = 0.0
    cdef double err_old = 1e-4
    cdef bint rejected = False, last_invalid = False, ok
    cdef long n_accept = 0, n_reject = 0, n_fev = 1
    cdef int status = DONE
    cdef long cap = 1024, count = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rs = np.empty(cap)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ys = np.empty((cap, dim))

    for i in range(dim):
        y[i] = y0[i]
        y_prev[i] = y[i]
    rs[0] = r
    for i in range(dim):
        ys[0, i] = y[i]
    count = 1
    if not _rhs(r, y, k1, m, nm1, sign, alpha, mode):
        raise ValueError("initial state outside the domain of u**alpha")

    while True:
        if r >= r_end:
            status = DONE
            break
        if n_accept + n_reject >= max_steps:
            status = MAXSTEPS
            break
        if r + h >= r_end:
            h = r_end - r
        if h < underflow * r:
            status = UNDERFLOW
            break
        for i in range(dim):
            yt[i] = y[i] + h * (A21 * k1[i])
        ok = _rhs(r + C2 * h, yt, k2, m, nm1, sign, alpha, mode)
        if ok:
            for i in range(dim):
                yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
            ok = _rhs(r + C3 * h, yt, k3, m, nm1, sign, alpha, mode)
        if ok:
            for i in range(dim):
                yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            ok = _rhs(r + C4 * h, yt, k4, m, nm1, sign, alpha, mode)
        if ok:
            for i in range(dim):
                yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            ok = _rhs(r + C5 * h, yt, k5, m, nm1, sign, alpha, mode)
        if ok:
            for i in range(dim):
                yt[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                                    + A65 * k5[i])
            ok = _rhs(r + h, yt, k6, m, nm1, sign, alpha, mode)
        if ok:
            for i in range(dim):
                ynew[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i]
                                      + A76 * k6[i])
            ok = _rhs(r + h, ynew, k7, m, nm1, sign, alpha, mode)
        n_fev += 6
        err = 0.0
        if ok:
            for i in range(dim):
                sc = atol + rtol * max(fabs(y[i]), fabs(ynew[i]))
                e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                         + E7 * k7[i]) / sc
                err += e * e
            err = sqrt(err / dim)
            if not isfinite(err):
                ok = False
        if not ok:
            last_invalid = True
            n_reject += 1
            rejected = True
            h *= 0.25
            continue
        if err <= 1.0:
            last_invalid = False
            if err > 0.0:
                fac = SAFETY * pow(err, -EXPO) * pow(err_old, BETA)
            else:
                fac = FAC_MAX
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            if rejected:
                fac = min(fac, 1.0)
            err_old = max(err, 1e-4)
            r_prev = r
            for i in range(dim):
                y_prev[i] = y[i]
            r = r + h
            h_used = h
            for i in range(dim):
                y[i] = ynew[i]
            if count == cap:
                cap *= 2
                rs = np.resize(rs, cap)
                ys = np.resize(ys, (cap, dim))
            rs[count] = r
            for i in range(dim):
                ys[count, i] = y[i]
            count += 1
            n_accept += 1
            rejected = False
            h = h * fac
            if y[0] <= 0.0 < y_prev[0]:
                status = CROSSED
            elif fabs(y[0]) >= blowup:
                status = BLOWUP
            if status != DONE:
                return _result(rs, ys, count, dim, status, n_accept, n_reject, n_fev, r_prev,
                               y_prev, h_used, k1, k2, k3, k4, k5, k6, k7, last_invalid, h)
            for i in range(dim):
                k1[i] = k7[i]
        else:
            last_invalid = False
            n_reject += 1
            rejected = True
            h *= max(FAC_MIN, SAFETY * pow(err, -0.2))
    for i in range(dim):
        y_prev[i] = y[i]
    return _result(rs, ys, count, dim, status, n_accept, n_reject, n_fev, r, y_prev, h,
                   k1, k2, k3, k4, k5, k6, k7, last_invalid, h)


cdef object _result(cnp.ndarray rs, cnp.ndarray ys, long count, int dim, int status,
                    long n_accept, long n_reject, long n_fev, double r_last, double* y_last,
                    double h_last, double* k1, double* k2, double* k3, double* k4,
                    double* k5, double* k6, double* k7, bint last_invalid, double h_next):
    cdef int i
    K = np.empty((7, dim))
    yl = np.empty(dim)
    for i in range(dim):
        yl[i] = y_last[i]
        K[0, i] = k1[i]
        K[1, i] = k2[i]
        K[2, i] = k3[i]
        K[3, i] = k4[i]
        K[4, i] = k5[i]
        K[5, i] = k6[i]
        K[6, i] = k7[i]
    return {
        "r": rs[:count].copy(),
        "y": ys[:count].copy(),
        "status": status,
        "n_accept": n_accept,
        "n_reject": n_reject,
        "n_fev": n_fev,
        "r_last": r_last,
        "y_last": yl,
        "h_last": h_last,
        "K": K,
        "last_invalid": bool(last_invalid),
        "h_next": h_next,
    }
