"""Pure-Python Dormand-Prince 5(4) kernel for the radial polyharmonic system.

State layout: ``y = (v_0, v_0', v_1, v_1', ..., v_{m-1}, v_{m-1}')`` with
``v_i'' = v_{i+1} - (n-1)/r v_i'`` and ``v_m = sign * f(v_0)``.

This module and ``_rk_ext.pyx`` implement the same algorithm operation for
operation; keep them in sync.
"""
import math

import numpy as np

# status codes shared with the compiled kernel
DONE = 0
CROSSED = 1
BLOWUP = 2
UNDERFLOW = 3
MAXSTEPS = 4

# power modes
POW_PLAIN = 0     # integer exponent: libm pow, defined for negative bases
POW_ODD = 1       # non-integer alpha > 0: odd extension sign(u)|u|^alpha
POW_POSITIVE = 2  # alpha < 0: stage with u <= 0 is invalid

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

# dense output: y(r + θh) = y + h Σ_j K_j (P[j] · (θ, θ², θ³, θ⁴))
DENSE_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
BETA = 0.04
EXPO = 0.2 - 0.75 * BETA


def _rhs(r, y, out, m, nm1, sign, alpha, mode):
    """Fill ``out`` with dy/dr; return False if the stage is outside the domain."""
    u = y[0]
    if mode == POW_PLAIN:
        f = math.pow(u, alpha) if alpha != 0.0 else 1.0
    elif mode == POW_ODD:
        f = math.pow(u, alpha) if u >= 0.0 else -math.pow(-u, alpha)
    else:
        if u <= 0.0:
            return False
        f = math.pow(u, alpha)
    inv_r = nm1 / r
    for i in range(m):
        d = y[2 * i + 1]
        nxt = y[2 * i + 2] if i < m - 1 else sign * f
        out[2 * i] = d
        out[2 * i + 1] = nxt - inv_r * d
    return True


def integrate(n, m, sign, alpha, mode, y0, r0, r_end, rtol, atol, h0,
              blowup, underflow, max_steps):
    """Integrate from ``(r0, y0)`` towards ``r_end``.

    Returns a dict with accepted nodes ``r``/``y``, the final ``status``,
    counters, and for the last attempted step its start ``r_last``/``y_last``,
    size ``h_last`` and stages ``K`` (7 x dim) for dense output.
    """
    dim = 2 * m
    nm1 = float(n - 1)
    sign = float(sign)
    alpha = float(alpha)
    y = [float(v) for v in y0]
    r = float(r0)
    rs = [r]
    ys = [list(y)]
    k1 = [0.0] * dim
    k2 = [0.0] * dim
    k3 = [0.0] * dim
    k4 = [0.0] * dim
    k5 = [0.0] * dim
    k6 = [0.0] * dim
    k7 = [0.0] * dim
    yt = [0.0] * dim
    ynew = [0.0] * dim
    h = float(h0)
    err_old = 1e-4
    rejected = False
    last_invalid = False
    n_accept = n_reject = 0
    n_fev = 1
    status = DONE
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
                sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
                e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                         + E7 * k7[i]) / sc
                err += e * e
            err = math.sqrt(err / dim)
            if not math.isfinite(err):
                ok = False
        if not ok:
            # stage left the domain or overflowed: shrink hard, never grow after
            last_invalid = True
            n_reject += 1
            rejected = True
            h *= 0.25
            continue
        if err <= 1.0:
            last_invalid = False
            fac = SAFETY * err ** (-EXPO) * err_old ** BETA if err > 0.0 else FAC_MAX
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            if rejected:
                fac = min(fac, 1.0)
            err_old = max(err, 1e-4)
            r_prev = r
            y_prev = list(y)
            r = r + h
            h_used = h
            for i in range(dim):
                y[i] = ynew[i]
            rs.append(r)
            ys.append(list(y))
            n_accept += 1
            rejected = False
            h = h * fac
            if y[0] <= 0.0 < y_prev[0]:
                status = CROSSED
            elif abs(y[0]) >= blowup:
                status = BLOWUP
            if status != DONE:
                K = np.array([k1, k2, k3, k4, k5, k6, k7])
                return _result(rs, ys, status, n_accept, n_reject, n_fev, r_prev, y_prev,
                               h_used, K, last_invalid, h)
            for i in range(dim):
                k1[i] = k7[i]
        else:
            last_invalid = False
            n_reject += 1
            rejected = True
            h *= max(FAC_MIN, SAFETY * err ** (-0.2))
    K = np.array([k1, k2, k3, k4, k5, k6, k7])
    return _result(rs, ys, status, n_accept, n_reject, n_fev, r, list(y), h, K,
                   last_invalid, h)


def _result(rs, ys, status, n_accept, n_reject, n_fev, r_last, y_last, h_last, K,
            last_invalid, h_next):
    return {
        "r": np.array(rs),
        "y": np.array(ys),
        "status": status,
        "n_accept": n_accept,
        "n_reject": n_reject,
        "n_fev": n_fev,
        "r_last": r_last,
        "y_last": np.array(y_last),
        "h_last": h_last,
        "K": K,
        "last_invalid": last_invalid,
        "h_next": h_next,
    }
