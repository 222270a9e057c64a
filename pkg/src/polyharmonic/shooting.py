"""Shooting for the radial initial-value problem of ``Δ^m u = sign·u^α``.

A run starts at the origin from ``(Δ^i u)(0) = a_i``, ``i < m`` (all radial
slopes vanish there), steps across ``[0, r_0]`` with the Taylor series of the
radial Laplacian, and then hands over to an adaptive Dormand-Prince 5(4)
kernel. Zero touches and blow-up are located by bisection on the kernel's
dense output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernel, _rk_py
from .core import ProblemSpec
from .profile import OutcomeKind, RadialProfile, ShootOutcome
from .radial_calculus import pizzetti_coeff, pizzetti_majorant

__all__ = [
    "ShootOptions",
    "solve_ivp",
    "extend",
    "SearchResult",
    "shoot_search",
    "CompareReport",
    "compare_check",
    "CascadeReport",
    "sign_cascade_check",
    "PizzettiReport",
    "pizzetti_check",
    "growth_series",
    "unit_ball_volume",
    "sphere_area",
]


@dataclass(frozen=True)
class ShootOptions:
    """Integrator settings.

    ``tol`` is used as both relative and absolute tolerance. ``blowup`` is
    the threshold on ``|u|``; steps below ``underflow * r`` count as an
    underflow. ``continue_past_zero`` lets integer exponents integrate
    through ``u = 0`` (the profile is then flagged ``left_positivity``).
    """

    tol: float = 1e-9
    r0: float = 1e-4
    blowup: float = 1e8
    underflow: float = 1e-13
    max_steps: int = 2_000_000
    max_nodes: int = 20_000
    continue_past_zero: bool = False
    backend: str | None = None


def _power_mode(spec):
    a = spec.alpha_value
    if a < 0:
        return _rk_py.POW_POSITIVE
    if a == int(a):
        return _rk_py.POW_PLAIN
    return _rk_py.POW_ODD


def _forcing(spec, u0):
    if spec.alpha == 0.0:
        return float(spec.sign)
    return spec.sign * math.pow(u0, spec.alpha)


def _series_state(spec, init, r):
    """State at radius ``r`` from the Taylor expansion at the origin.

    ``v_i(r) = Σ_k v_{i+k}(0) r^{2k} / ∏_{j<=k} 2j(n+2j-2)``, truncated at
    ``v_m(0) = sign·a_0^α``.
    """
    n, m = spec.n, spec.m
    levels = list(init) + [_forcing(spec, init[0])]
    y = np.empty(2 * m)
    for i in range(m):
        val = 0.0
        der = 0.0
        for k in range(0, m - i + 1):
            c = levels[i + k] / pizzetti_coeff(k, n)
            val += c * r ** (2 * k)
            if k:
                der += c * 2 * k * r ** (2 * k - 1)
        y[2 * i] = val
        y[2 * i + 1] = der
    return y


def _dense(res, theta):
    """Dense-output state at fraction ``theta`` of the last step."""
    powers = np.array([theta, theta ** 2, theta ** 3, theta ** 4])
    weights = _rk_py.DENSE_P @ powers
    return res["y_last"] + res["h_last"] * (weights @ res["K"])


def _bisect_dense(res, predicate, iters=200):
    """Smallest theta in (0,1] where ``predicate`` turns true on the dense output."""
    lo, hi = 0.0, 1.0
    h = res["h_last"]
    r_old = res["r_last"]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if predicate(_dense(res, mid)):
            hi = mid
        else:
            lo = mid
        if (hi - lo) * h <= 1e-15 * max(1.0, r_old):
            break
    return lo, hi


def _thin(r, y, cap):
    if r.size <= cap:
        return r, y
    idx = np.unique(np.round(np.linspace(0, r.size - 1, cap)).astype(int))
    return r[idx], y[idx]


def _run(spec, r_start, y_start, r_max, options, h0):
    integrate = _kernel.get_integrator(options.backend)
    return integrate(spec.n, spec.m, float(spec.sign), float(spec.alpha), _power_mode(spec),
                     y_start, float(r_start), float(r_max), options.tol, options.tol,
                     float(h0), options.blowup, options.underflow, options.max_steps)


def _integrate_from(spec, r_start, y_start, r_max, options, h0, nodes_r, nodes_y, stats):
    """Drive the kernel from ``(r_start, y_start)``; returns the outcome."""
    left_positivity = False
    while True:
        res = _run(spec, r_start, y_start, r_max, options, h0)
        for key in ("n_accept", "n_reject", "n_fev"):
            stats[key] += res[key]
        nodes_r.append(res["r"][1:])
        nodes_y.append(res["y"][1:])
        status = res["status"]
        if status == _rk_py.DONE:
            return ShootOutcome(OutcomeKind.SURVIVED, float(res["r"][-1])), left_positivity
        if status == _rk_py.CROSSED:
            lo, hi = _bisect_dense(res, lambda y: y[0] <= 0.0)
            r_old, h = res["r_last"], res["h_last"]
            r_lo, r_hi = r_old + lo * h, r_old + hi * h
            r_star = 0.5 * (r_lo + r_hi)
            if options.continue_past_zero and _power_mode(spec) == _rk_py.POW_PLAIN:
                if not left_positivity:
                    stats["first_zero"] = r_star
                left_positivity = True
                r_start = float(res["r"][-1])
                y_start = res["y"][-1]
                h0 = res["h_next"]
                continue
            # drop the node past the zero, append the located touch
            nodes_r[-1] = np.append(res["r"][1:-1], r_star)
            nodes_y[-1] = np.vstack([res["y"][1:-1], _dense(res, 0.5 * (lo + hi))])
            return (ShootOutcome(OutcomeKind.ZERO_TOUCH, r_star, (r_lo, r_hi),
                                 "u reached 0"), left_positivity)
        if status == _rk_py.BLOWUP:
            thr = options.blowup
            lo, hi = _bisect_dense(res, lambda y: abs(y[0]) >= thr)
            r_old, h = res["r_last"], res["h_last"]
            r_lo, r_hi = r_old + lo * h, r_old + hi * h
            r_star = 0.5 * (r_lo + r_hi)
            nodes_r[-1] = np.append(res["r"][1:-1], r_star)
            nodes_y[-1] = np.vstack([res["y"][1:-1], _dense(res, 0.5 * (lo + hi))])
            return (ShootOutcome(OutcomeKind.BLOW_UP, r_star, (r_lo, r_hi),
                                 f"|u| exceeded {thr:g}"), left_positivity)
        # underflow or step budget exhausted
        r_last = float(res["r"][-1])
        y_last = res["y"][-1]
        u, du = y_last[0], y_last[1]
        bracket = (r_last, r_last + res["h_next"])
        if _power_mode(spec) == _rk_py.POW_POSITIVE and du < 0:
            return (ShootOutcome(OutcomeKind.ZERO_TOUCH, r_last, bracket,
                                 "u^alpha singular as u -> 0+"), left_positivity)
        if u * du > 0:
            return (ShootOutcome(OutcomeKind.BLOW_UP, r_last, bracket,
                                 "step size underflow with |u| increasing"), left_positivity)
        detail = "step budget exhausted" if status == _rk_py.MAXSTEPS else "step size underflow"
        return ShootOutcome(OutcomeKind.STEP_UNDERFLOW, r_last, bracket, detail), left_positivity


def _assemble(spec, nodes_r, nodes_y, options, meta):
    r = np.concatenate(nodes_r)
    y = np.vstack(nodes_y)
    r, y = _thin(r, y, options.max_nodes)
    return RadialProfile(spec, r, y[:, 0::2], y[:, 1::2], meta)


def solve_ivp(spec: ProblemSpec, init, r_max: float, tol: float | None = None,
              options: ShootOptions | None = None):
    """Integrate the radial problem from ``(Δ^i u)(0) = init[i]``.

    Returns ``(profile, outcome)``. The profile starts at ``r = 0``; a run
    ending at a zero touch or blow-up is truncated at the located event.
    """
    options = options or ShootOptions()
    if tol is not None:
        options = replace(options, tol=tol)
    init = tuple(float(a) for a in init)
    if len(init) != spec.m:
        raise ValueError(f"need {spec.m} initial values, got {len(init)}")
    if not all(math.isfinite(a) for a in init):
        raise ValueError("initial values must be finite")
    if options.tol <= 0:
        raise ValueError("tol must be positive")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    mode = _power_mode(spec)
    if mode != _rk_py.POW_PLAIN and init[0] <= 0:
        raise ValueError("u(0) must be positive for negative or non-integer alpha")

    r0 = min(options.r0, 0.5 * r_max)
    y_origin = np.zeros(2 * spec.m)
    y_origin[0::2] = init
    y0 = _series_state(spec, init, r0)
    stats = {"n_accept": 0, "n_reject": 0, "n_fev": 0}
    nodes_r = [np.array([0.0, r0])]
    nodes_y = [np.vstack([y_origin, y0])]
    start_outcome = None
    if mode != _rk_py.POW_PLAIN and y0[0] <= 0:
        start_outcome = ShootOutcome(OutcomeKind.ZERO_TOUCH, r0, (0.0, r0), "u reached 0 in series start")
    if start_outcome is None:
        outcome, left = _integrate_from(spec, r0, y0, r_max, options, 0.1 * r0,
                                        nodes_r, nodes_y, stats)
    else:
        outcome, left = start_outcome, False
    meta = {
        "init": list(init),
        "tol": options.tol,
        "r0": r0,
        "blowup": options.blowup,
        "backend": options.backend or _kernel.BACKEND,
        "left_positivity": left,
        "outcome": outcome.to_json(),
        **stats,
    }
    return _assemble(spec, nodes_r, nodes_y, options, meta), outcome


def extend(profile: RadialProfile, r_max: float, options: ShootOptions | None = None):
    """Continue a run from its last node to ``r_max``; returns ``(profile, outcome)``."""
    options = options or ShootOptions(tol=profile.meta.get("tol", 1e-9))
    spec = profile.spec
    y_last = np.empty(2 * spec.m)
    y_last[0::2] = profile.values[-1]
    y_last[1::2] = profile.slopes[-1]
    r_last = profile.r_max
    stats = {"n_accept": 0, "n_reject": 0, "n_fev": 0}
    y_all = np.empty((profile.r.size, 2 * spec.m))
    y_all[:, 0::2] = profile.values
    y_all[:, 1::2] = profile.slopes
    nodes_r = [profile.r]
    nodes_y = [y_all]
    h0 = max(1e-6 * r_last, (profile.r[-1] - profile.r[-2]) if profile.r.size > 1 else 1e-4)
    outcome, left = _integrate_from(spec, r_last, y_last, r_max, options, h0, nodes_r,
                                    nodes_y, stats)
    meta = dict(profile.meta)
    meta.update(outcome=outcome.to_json(), extended_from=r_last,
                left_positivity=bool(meta.get("left_positivity")) or left)
    return _assemble(spec, nodes_r, nodes_y, options, meta), outcome


# ---------------------------------------------------------------------------
# search


@dataclass
class SearchResult:
    bracket: tuple[float, float]
    outcome_lo: ShootOutcome
    outcome_hi: ShootOutcome
    profile_lo: RadialProfile
    profile_hi: RadialProfile
    iterations: int

    def to_json(self):
        return {
            "bracket": list(self.bracket),
            "outcome_lo": self.outcome_lo.to_json(),
            "outcome_hi": self.outcome_hi.to_json(),
            "iterations": self.iterations,
        }


def shoot_search(spec: ProblemSpec, init_template, vary_index: int, bracket, r_target: float,
                 resolution: float = 1e-10, tol: float = 1e-10, max_iter: int = 200,
                 options: ShootOptions | None = None) -> SearchResult:
    """Bisect ``init[vary_index]`` between outcomes of different kinds.

    Raises ``ValueError`` when the bracket is degenerate or both ends end the
    same way -- which, for a bracket spanning all plausible data, is itself
    evidence that no entire solution is reachable.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"degenerate bracket [{lo}, {hi}]")
    options = replace(options or ShootOptions(), tol=tol)
    template = list(init_template)

    def run(value):
        init = list(template)
        init[vary_index] = value
        return solve_ivp(spec, init, r_target, options=options)

    p_lo, o_lo = run(lo)
    p_hi, o_hi = run(hi)
    if o_lo.kind == o_hi.kind:
        raise ValueError(
            f"identical outcomes at both ends of the bracket: {o_lo.kind} at "
            f"{lo!r} and {hi!r}"
        )
    it = 0
    while hi - lo > resolution * max(1.0, abs(lo), abs(hi)) and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        p_mid, o_mid = run(mid)
        if o_mid.kind == o_lo.kind:
            lo, p_lo, o_lo = mid, p_mid, o_mid
        else:
            hi, p_hi, o_hi = mid, p_mid, o_mid
        it += 1
    return SearchResult((lo, hi), o_lo, o_hi, p_lo, p_hi, it)


# ---------------------------------------------------------------------------
# profile checkers


@dataclass
class CompareReport:
    holds: bool
    min_gap: float
    r_at_min: float
    tolerance: float
    r_common: float
    initial_ordered: bool

    def __bool__(self):
        return self.holds


def _profile_tol(profile):
    return float(profile.meta.get("tol", 1e-12))


def compare_check(p1: RadialProfile, p2: RadialProfile, rtol: float | None = None) -> CompareReport:
    """Check ``v1 >= v2`` on the common radial range.

    ``p1`` is the super-profile, ``p2`` the sub-profile. Nodes of both grids
    inside the common range are used, interpolating each profile with its
    own Hermite data. The slack is ``rtol * max(1, |v|)`` with ``rtol``
    defaulting to 100 times the larger integrator tolerance.
    """
    if p1.n != p2.n or p1.m != p2.m:
        raise ValueError("profiles have different (n, m)")
    lo = max(p1.r[0], p2.r[0])
    hi = min(p1.r[-1], p2.r[-1])
    if hi < lo:
        raise ValueError("profiles share no radial range")
    if rtol is None:
        rtol = 100 * max(_profile_tol(p1), _profile_tol(p2))
    x = np.union1d(p1.r, p2.r)
    x = x[(x >= lo) & (x <= hi)]
    v1 = p1.interpolate(x)
    v2 = p2.interpolate(x)
    gap = v1 - v2
    slack = rtol * np.maximum(1.0, np.maximum(np.abs(v1), np.abs(v2)))
    k = int(np.argmin(gap + slack))
    ordered = True
    if p1.r[0] == 0 and p2.r[0] == 0:
        ordered = bool(np.all(p1.values[0] >= p2.values[0]))
    return CompareReport(bool(np.all(gap >= -slack)), float(gap.min()), float(x[k]),
                         rtol, float(hi), ordered)


@dataclass
class CascadeReport:
    """Sign report per level; ``violation`` only when the lemma's hypothesis holds."""

    applicable: bool
    level_min: list
    top_positive: bool
    first_nonpositive_r: float | None
    resolution: str
    violation: bool

    def to_json(self):
        return dict(self.__dict__)


def sign_cascade_check(p: RadialProfile, continuation: float = 64.0,
                       options: ShootOptions | None = None) -> CascadeReport:
    """Check that ``Δ^{m-1}u > 0`` wherever ``u > 0`` and ``Δ^m u < 0``.

    For a radial run with ``Δ^m u < 0``, a non-positive top level forces
    ``u`` to leave the positive cone at a finite radius, so that situation is
    only a violation if ``u`` stays positive. When the run itself survived
    the check continues it up to ``continuation * r_max`` looking for the
    zero; ``resolution`` records how the case was settled.
    """
    m = p.m
    level_min = [float(np.min(p.level(i))) for i in range(m)]
    forcing = p.forcing
    applicable = p.spec.sign < 0
    if not applicable:
        return CascadeReport(False, level_min, bool(np.all(p.level(m - 1) > 0)), None,
                             "inapplicable: sign=+1", False)
    top = p.level(m - 1)
    mask = (p.u > 0) & (forcing < 0)
    bad = mask & (top <= 0)
    if m == 1 or not np.any(bad):
        return CascadeReport(True, level_min, True, None, "top level positive", False)
    r_bad = float(p.r[np.argmax(bad)])
    outcome = p.meta.get("outcome", {}).get("kind")
    if outcome == str(OutcomeKind.ZERO_TOUCH):
        return CascadeReport(True, level_min, False, r_bad, "run touched zero", False)
    if continuation and continuation > 1:
        _, out = extend(p, continuation * p.r_max, options)
        if out.kind == OutcomeKind.ZERO_TOUCH:
            return CascadeReport(True, level_min, False, r_bad,
                                 f"continued run touched zero at r={out.r_star:.6g}", False)
        return CascadeReport(True, level_min, False, r_bad,
                             f"continued run ended {out}", out.kind == OutcomeKind.SURVIVED)
    return CascadeReport(True, level_min, False, r_bad, "survived with top level <= 0", True)


@dataclass
class PizzettiReport:
    applicable: bool
    holds: bool
    min_slack: float
    r_at_min: float | None
    detail: str = ""

    def __bool__(self):
        return self.holds


def pizzetti_check(p: RadialProfile, tolerance: float = 1e-9) -> PizzettiReport:
    """Check ``u <= Φ`` with ``Φ`` the polyharmonic majorant of the origin data.

    Applies while ``Δ^m u <= 0``; slack is ``(Φ - u) / max(1, |Φ|)`` and
    must stay above ``-tolerance``.
    """
    forcing = p.forcing
    # roundoff at a located zero touch must not void the hypothesis
    floor = -tolerance * max(1.0, float(np.max(np.abs(p.u))))
    nonpositive = (p.spec.sign < 0 and p.u.min() >= floor) or bool(np.all(forcing <= 0))
    if not nonpositive:
        return PizzettiReport(False, False, float("nan"), None,
                              "inapplicable: Delta^m u changes sign along the run")
    phi = pizzetti_majorant(p.initial_data(), p.n)
    bound = phi(p.r)
    slack = (bound - p.u) / np.maximum(1.0, np.abs(bound))
    k = int(np.argmin(slack))
    return PizzettiReport(True, bool(slack[k] >= -tolerance), float(slack[k]), float(p.r[k]))


# ---------------------------------------------------------------------------
# growth


def sphere_area(n):
    """``|S^{n-1}| = 2 π^{n/2} / Γ(n/2)``."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def unit_ball_volume(n):
    return sphere_area(n) / n


def _hermite_partial(sigma):
    """Integrals over ``[0, σ]`` of the four cubic Hermite basis functions."""
    s2, s3, s4 = sigma ** 2, sigma ** 3, sigma ** 4
    return (sigma - s3 + s4 / 2, s2 / 2 - 2 * s3 / 3 + s4 / 4, s3 - s4 / 2, -s3 / 3 + s4 / 4)


def growth_series(p: RadialProfile, radii=None):
    """``(R, F(R)/R^n)`` with ``F(R) = ∫_{B_R} u dx``.

    ``R`` runs over powers of two inside the grid unless ``radii`` is given.
    The integral uses the Hermite (derivative-corrected) rule on the
    profile's nodes, fourth order in the node spacing.
    """
    n = p.n
    r = p.r
    g = p.u * r ** (n - 1)
    dg = p.slope(0) * r ** (n - 1)
    if n > 1:
        dg = dg + (n - 1) * p.u * r ** (n - 2)
    h = np.diff(r)
    seg = h / 2 * (g[:-1] + g[1:]) + h * h / 12 * (dg[:-1] - dg[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if radii is None:
        lo = r[1] if r.size > 1 else r[0]
        k0 = math.ceil(math.log2(lo)) if lo > 0 else 0
        k1 = math.floor(math.log2(r[-1]))
        radii = [2.0 ** k for k in range(k0, k1 + 1)]
    out = []
    area = sphere_area(n)
    for R in radii:
        if R <= r[0] or R > r[-1]:
            raise ValueError(f"R={R} outside the profile grid")
        i = min(int(np.searchsorted(r, R, side="right")) - 1, r.size - 2)
        hh = r[i + 1] - r[i]
        sigma = (R - r[i]) / hh
        b00, b10, b01, b11 = _hermite_partial(sigma)
        part = hh * (b00 * g[i] + b10 * hh * dg[i] + b01 * g[i + 1] + b11 * hh * dg[i + 1])
        F = area * (cum[i] + part)
        out.append((float(R), float(F / R ** n)))
    return out
