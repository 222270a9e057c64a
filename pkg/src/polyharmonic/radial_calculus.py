"""Exact calculus for radial functions.

Radial functions are handled as functions of ``t = r^2``, for which the
n-dimensional Laplacian reads ``Δ g(t) = 4 t g''(t) + 2 n g'(t)``. Every closed
form used here is a finite sum of terms ``c t^j (1 + μt)^e e^{κt}``, a family
closed under that operator, so iterated Laplacians are computed term by term
with whatever number type the parameters carry (``Fraction`` stays exact).
Sampled profiles fall back to high-order finite differences.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .core import ProblemSpec
from .profile import RadialProfile, rhs_power

__all__ = [
    "RadialPolynomial",
    "radial_laplacian_poly",
    "supersolution_poly",
    "pizzetti_coeff",
    "pizzetti_coeff_gamma",
    "PizzettiMajorant",
    "pizzetti_majorant",
    "FormKind",
    "ClosedForm",
    "power_family",
    "bubble_family",
    "exp_gaussian",
    "constant_form",
    "polynomial_form",
    "bubble_eigenvalue",
    "ResidualReport",
    "residual",
    "EigenRatio",
    "eigen_ratio",
    "sample_profile",
    "fornberg_weights",
    "radial_derivative",
    "profile_consistency",
]


# ---------------------------------------------------------------------------
# even polynomials


class RadialPolynomial:
    """Even polynomial ``Σ c_j r^{2j}`` with exact coefficients.

    ``coeffs`` maps the degree ``2j`` to its coefficient; zero coefficients
    are dropped.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        clean = {}
        for deg, c in dict(coeffs or {}).items():
            deg = int(deg)
            if deg < 0 or deg % 2:
                raise ValueError(f"radial polynomials have even degrees only, got {deg}")
            c = Fraction(c)
            if c:
                clean[deg] = clean.get(deg, 0) + c
        self.coeffs = {d: c for d, c in sorted(clean.items()) if c}

    @classmethod
    def monomial(cls, degree, coeff=1):
        return cls({degree: coeff})

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    @property
    def degree(self):
        return max(self.coeffs, default=0)

    def coeff(self, degree):
        return self.coeffs.get(degree, Fraction(0))

    def __eq__(self, other):
        if isinstance(other, RadialPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RadialPolynomial.constant(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RadialPolynomial.constant(other)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, 0) + c
        return RadialPolynomial(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, RadialPolynomial):
            out = {}
            for d1, c1 in self.coeffs.items():
                for d2, c2 in other.coeffs.items():
                    out[d1 + d2] = out.get(d1 + d2, 0) + c1 * c2
            return RadialPolynomial(out)
        other = Fraction(other)
        return RadialPolynomial({d: c * other for d, c in self.coeffs.items()})

    __rmul__ = __mul__

    def r_dr(self):
        """``r p'(r)``, which maps ``r^{2j}`` to ``2j r^{2j}``."""
        return RadialPolynomial({d: d * c for d, c in self.coeffs.items()})

    def second_derivative_at_zero(self):
        return 2 * self.coeff(2)

    def __call__(self, r):
        """Evaluate; exact for ``int``/``Fraction`` input, float otherwise."""
        if isinstance(r, (int, Fraction)):
            return sum((c * Fraction(r) ** d for d, c in self.coeffs.items()), Fraction(0))
        r = np.asarray(r, dtype=float)
        t = r * r
        # Horner in t
        dense = [float(self.coeff(2 * j)) for j in range(self.degree // 2 + 1)]
        acc = np.full_like(t, dense[-1])
        for c in reversed(dense[:-1]):
            acc = acc * t + c
        return acc if acc.ndim else float(acc)

    def __repr__(self):
        if not self.coeffs:
            return "RadialPolynomial(0)"
        parts = []
        for d, c in sorted(self.coeffs.items(), reverse=True):
            parts.append(f"{c}" if d == 0 else f"{c}*r^{d}")
        return "RadialPolynomial(" + " + ".join(parts) + ")"


def radial_laplacian_poly(p: RadialPolynomial, n: int) -> RadialPolynomial:
    """Exact ``Δ p(|x|)`` in ``R^n`` using ``Δ r^{2j} = 2j(2j+n-2) r^{2j-2}``."""
    if n < 1:
        raise ValueError("n must be positive")
    out = {}
    for d, c in p.coeffs.items():
        if d:
            out[d - 2] = c * d * (d + n - 2)
    return RadialPolynomial(out)


def supersolution_poly(k: int, n: int) -> RadialPolynomial:
    """``P_k`` with ``Δ^k e^{r²/2} = P_k(r) e^{r²/2}``.

    Built from ``P_0 = 1`` and ``P_{j+1} = (r² + n) P_j + 2 r P_j' + Δ P_j``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    r2_plus_n = RadialPolynomial({2: 1, 0: n})
    p = RadialPolynomial.constant(1)
    for _ in range(k):
        p = r2_plus_n * p + 2 * p.r_dr() + radial_laplacian_poly(p, n)
    return p


# ---------------------------------------------------------------------------
# Pizzetti coefficients


def pizzetti_coeff(p: int, n: int) -> int:
    """``∏_{k=1}^{p} 2k(n+2k-2)``, the denominator of the r^{2p} term."""
    if p < 0 or n < 1:
        raise ValueError("need p >= 0 and n >= 1")
    out = 1
    for k in range(1, p + 1):
        out *= 2 * k * (n + 2 * k - 2)
    return out


def pizzetti_coeff_gamma(p: int, n: int) -> float:
    """``2^{2p} p! Γ(p+n/2)/Γ(n/2)`` evaluated in log space."""
    log_value = (2 * p * math.log(2.0) + math.lgamma(p + 1)
                 + math.lgamma(p + n / 2) - math.lgamma(n / 2))
    return math.exp(log_value)


@dataclass(frozen=True)
class PizzettiMajorant:
    n: int
    m: int
    derivs: tuple
    poly: RadialPolynomial

    def __call__(self, r):
        return self.poly(r)


def pizzetti_majorant(derivs, n: int) -> PizzettiMajorant:
    """Polyharmonic ``Φ`` matching ``Δ^i u(0)`` for ``i < m = len(derivs)``.

    When ``Δ^m u <= 0`` the spherical mean of ``u`` stays below ``Φ``.
    Float initial data are converted exactly.
    """
    derivs = tuple(derivs)
    if not derivs:
        raise ValueError("need at least u(0)")
    coeffs = {}
    for i, d in enumerate(derivs):
        coeffs[2 * i] = Fraction(d) / pizzetti_coeff(i, n)
    return PizzettiMajorant(n, len(derivs), derivs, RadialPolynomial(coeffs))


# ---------------------------------------------------------------------------
# term algebra in t = r^2


class _Terms:
    """``e^{κt} Σ c_{j,e} t^j (1+μt)^e`` with exact-or-float coefficients."""

    __slots__ = ("terms", "mu", "kappa")

    def __init__(self, terms, mu=0, kappa=0):
        self.terms = {k: c for k, c in terms.items() if c != 0}
        self.mu = mu
        self.kappa = kappa

    def _new(self, terms):
        return _Terms(terms, self.mu, self.kappa)

    def d_dt(self):
        out = {}
        mu, kappa = self.mu, self.kappa
        for (j, e), c in self.terms.items():
            if j != 0:
                key = (j - 1, e)
                out[key] = out.get(key, 0) + c * j
            if e != 0 and mu != 0:
                key = (j, e - 1)
                out[key] = out.get(key, 0) + c * e * mu
            if kappa != 0:
                key = (j, e)
                out[key] = out.get(key, 0) + c * kappa
        return self._new(out)

    def times_t(self):
        return self._new({(j + 1, e): c for (j, e), c in self.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self._new(out)

    def scaled(self, s):
        return self._new({k: c * s for k, c in self.terms.items()})

    def laplacian(self, n):
        g1 = self.d_dt()
        return g1.d_dt().times_t().scaled(4) + g1.scaled(2 * n)

    def singular_at_origin(self):
        return any(j < 0 for (j, _e) in self.terms)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        t = r * r
        acc = np.zeros_like(t)
        mu = float(self.mu)
        base = 1.0 + mu * t
        for (j, e), c in self.terms.items():
            term = float(c) * np.ones_like(t)
            if j != 0:
                term = term * np.power(t, float(j))
            if e != 0:
                term = term * np.power(base, float(e))
            acc = acc + term
        if self.kappa != 0:
            acc = acc * np.exp(float(self.kappa) * t)
        return acc


class FormKind(str, enum.Enum):
    POWER = "Power"
    BUBBLE = "Bubble"
    EXP_GAUSSIAN = "ExpGaussian"
    CONSTANT = "Constant"
    POLYNOMIAL = "Polynomial"

    def __str__(self):
        return self.value


@dataclass(eq=False)
class ClosedForm:
    """Radial closed form ``amplitude · g(r²)`` with exact Laplacian recursion.

    ``level(k, r)`` evaluates ``Δ^k u`` and ``level_slope(k, r)`` its radial
    derivative; ``params`` records the family parameters.
    """

    kind: FormKind
    n: int
    params: dict
    amplitude: float
    base: _Terms = field(repr=False)
    _levels: list = field(default_factory=list, repr=False)

    def level_terms(self, k):
        if not self._levels:
            self._levels.append(self.base)
        while len(self._levels) <= k:
            self._levels.append(self._levels[-1].laplacian(self.n))
        return self._levels[k]

    def _check_grid(self, r, k):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("radii must be non-negative")
        if np.any(r == 0):
            for i in range(k + 1):
                if self.level_terms(i).singular_at_origin():
                    raise ValueError(
                        f"{self.kind} form has a singular Δ^{i} at r=0; grid must avoid the origin"
                    )
        return r

    def level(self, k, r):
        r = self._check_grid(r, k)
        return self.amplitude * self.level_terms(k)(r)

    def level_slope(self, k, r):
        """``d/dr Δ^k u = 2r · d/dt``."""
        r = self._check_grid(r, k + 1)
        return self.amplitude * 2.0 * r * self.level_terms(k).d_dt()(r)

    def __call__(self, r):
        return self.level(0, r)

    def laplacian_power_coefficient(self, k):
        """For single-term forms ``c t^j (1+μt)^e``, the exact coefficient map of Δ^k."""
        return dict(self.level_terms(k).terms)


def power_family(n: int, m: int, alpha) -> ClosedForm:
    """``u = C r^β`` with ``β = 2m/(1-α)``, solving ``Δ^m u = u^α`` for ``0 <= α < 1``.

    ``K = ∏_{j<m} (β-2j)(β-2j+n-2)`` is exact when α is rational and
    ``C = K^{-1/(1-α)}``; ``params["C_exact"]`` is set when that power is
    itself rational.
    """
    spec = ProblemSpec(n, m, alpha, 1)
    a = spec.alpha_value
    if not (0 <= a < 1):
        raise ValueError(f"power family needs 0 <= alpha < 1, got {spec.alpha_display()}")
    one = Fraction(1) if spec.is_exact else 1.0
    beta = 2 * m * one / (1 - a)
    K = one
    for j in range(m):
        K *= (beta - 2 * j) * (beta - 2 * j + n - 2)
    c_exponent = -one / (1 - a)
    c_exact = None
    if spec.is_exact and c_exponent.denominator == 1:
        c_exact = Fraction(K) ** int(c_exponent)
    C = float(c_exact) if c_exact is not None else float(K) ** float(c_exponent)
    base = _Terms({(beta / 2, 0): one})
    params = {"C": C, "beta": beta, "K": K, "C_exponent": c_exponent, "C_exact": c_exact,
              "m": m, "alpha": a}
    return ClosedForm(FormKind.POWER, n, params, C, base)


def bubble_family(n: int, m: int, lam=1) -> ClosedForm:
    """``u = (2λ/(1+λ²r²))^{(n-2m)/2}`` centred at the origin (needs ``n > 2m``)."""
    if n <= 2 * m:
        raise ValueError(f"bubble needs n > 2m, got n={n}, m={m}")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    exponent = Fraction(n - 2 * m, 2)
    mu = Fraction(lam) ** 2 if isinstance(lam, (int, Fraction)) else float(lam) ** 2
    amplitude = float(2 * lam) ** float(exponent)
    base = _Terms({(0, -exponent): Fraction(1)}, mu=mu)
    params = {"lambda": lam, "m": m, "decay": exponent,
              "critical_exponent": Fraction(n + 2 * m, n - 2 * m)}
    return ClosedForm(FormKind.BUBBLE, n, params, amplitude, base)


def exp_gaussian(n: int, lam=1) -> ClosedForm:
    """``u = λ e^{r²/2}``; ``Δ^k u = λ P_k(r) e^{r²/2}``."""
    base = _Terms({(0, 0): Fraction(1)}, kappa=Fraction(1, 2))
    return ClosedForm(FormKind.EXP_GAUSSIAN, n, {"lambda": lam}, float(lam), base)


def constant_form(n: int, c=1) -> ClosedForm:
    return ClosedForm(FormKind.CONSTANT, n, {"c": c}, float(c), _Terms({(0, 0): Fraction(1)}))


def polynomial_form(p: RadialPolynomial, n: int) -> ClosedForm:
    terms = {(d // 2, 0): c for d, c in p.coeffs.items()}
    return ClosedForm(FormKind.POLYNOMIAL, n, {"poly": p}, 1.0, _Terms(terms))


def bubble_eigenvalue(n: int, m: int) -> Fraction:
    """Constant ``c`` in ``(-Δ)^m u = c u^{(n+2m)/(n-2m)}`` for the bubble: ``∏_{i=-m}^{m-1}(n/2+i)``."""
    out = Fraction(1)
    for i in range(-m, m):
        out *= Fraction(n, 2) + i
    return out


# ---------------------------------------------------------------------------
# finite differences for sampled data


def fornberg_weights(z, x, k):
    """Weights of the ``k``-th derivative at ``z`` from nodes ``x`` (Fornberg 1988)."""
    x = np.asarray(x, dtype=float)
    npts = x.size
    c = np.zeros((npts, k + 1))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, npts):
        mn = min(i, k)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, k]


def _stencil(i, size, width):
    lo = max(0, min(i - width // 2, size - width))
    return slice(lo, lo + width)


def radial_derivative(r, f, width=9):
    """``df/dr`` at every node from a ``width``-point local stencil.

    Returns ``(derivative, error_estimate)`` where the estimate is the
    difference to the ``width-2`` stencil.
    """
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    if r.size < width:
        raise ValueError(f"need at least {width} nodes for the stencil")
    d = np.empty_like(f)
    err = np.empty_like(f)
    for i in range(r.size):
        sl = _stencil(i, r.size, width)
        d[i] = fornberg_weights(r[i], r[sl], 1) @ f[sl]
        sl2 = _stencil(i, r.size, width - 2)
        err[i] = abs(d[i] - fornberg_weights(r[i], r[sl2], 1) @ f[sl2])
    return d, err


def _profile_laplacian(profile, level, width=9):
    """``v'' + (n-1)/r v'`` from the stored slope of ``v_level``; origin excluded."""
    r = profile.r
    d2, err = radial_derivative(r, profile.slope(level), width)
    mask = r > 0
    lap = np.full_like(r, np.nan)
    lap[mask] = d2[mask] + (profile.n - 1) / r[mask] * profile.slope(level)[mask]
    return lap, err


def profile_consistency(profile: RadialProfile, width=9):
    """Max ``|Δv_i - v_{i+1}|`` per level over interior nodes, with stencil errors."""
    out = []
    for i in range(profile.m - 1):
        lap, err = _profile_laplacian(profile, i, width)
        mask = profile.r > 0
        out.append((float(np.max(np.abs(lap[mask] - profile.level(i + 1)[mask]))),
                    float(np.max(err[mask]))))
    return out


# ---------------------------------------------------------------------------
# residuals


class ResidualReport(NamedTuple):
    max_residual: float
    r_at_max: float
    method: str
    stencil_error: float
    npoints: int

    def to_json(self):
        return dict(self._asdict())


def _as_form(form, n):
    if isinstance(form, RadialPolynomial):
        return polynomial_form(form, n)
    return form


def residual(form, spec: ProblemSpec, grid=None) -> ResidualReport:
    """Max over ``grid`` of ``|Δ^m u - sign·u^α| / max(1, |u^α|)``.

    ``form`` is a :class:`ClosedForm`, a :class:`RadialPolynomial` or a
    :class:`RadialProfile`. Closed forms use the exact recursion; profiles
    use 9-point finite differences on their own nodes inside
    ``[min(grid), max(grid)]`` (all interior nodes when ``grid`` is omitted).
    """
    if isinstance(form, RadialProfile):
        if form.n != spec.n or form.m != spec.m:
            raise ValueError("profile and spec disagree on (n, m)")
        r = form.r
        if grid is not None:
            g = np.asarray(grid, dtype=float)
            if np.any(g <= 0):
                raise ValueError("finite-difference residual needs a grid away from r=0")
            sel = (r >= g.min()) & (r <= g.max())
        else:
            sel = r > 0
        lap, err = _profile_laplacian(form, spec.m - 1)
        rhs = spec.sign * rhs_power(form.u, spec.alpha)
        res = np.abs(lap - rhs) / np.maximum(1.0, np.abs(rhs))
        res, rr, err = res[sel], r[sel], err[sel]
        if res.size == 0:
            raise ValueError("no profile nodes inside the requested grid")
        k = int(np.nanargmax(res))
        return ResidualReport(float(res[k]), float(rr[k]), "finite-difference",
                              float(np.max(err)), int(res.size))
    form = _as_form(form, spec.n)
    if form.n != spec.n:
        raise ValueError("closed form and spec disagree on n")
    if grid is None:
        raise ValueError("closed-form residual needs a grid")
    r = np.asarray(grid, dtype=float)
    lap = form.level(spec.m, r)
    u = form.level(0, r)
    rhs = spec.sign * rhs_power(u, spec.alpha)
    res = np.abs(lap - rhs) / np.maximum(1.0, np.abs(rhs))
    k = int(np.nanargmax(res))
    return ResidualReport(float(res[k]), float(r[k]), "exact-recursion", 0.0, int(r.size))


class EigenRatio(NamedTuple):
    mean: float
    spread: float
    ratios: np.ndarray


def eigen_ratio(n: int, m: int, lam, grid) -> EigenRatio:
    """``(-Δ)^m u / u^{(n+2m)/(n-2m)}`` for the bubble on ``grid``.

    ``spread`` is the largest deviation from the mean relative to the mean.
    """
    form = bubble_family(n, m, lam)
    r = np.asarray(grid, dtype=float)
    lap = (-1) ** m * form.level(m, r)
    u = form.level(0, r)
    ratios = lap / np.power(u, (n + 2 * m) / (n - 2 * m))
    mean = float(np.mean(ratios))
    spread = float(np.max(np.abs(ratios - mean)) / abs(mean))
    return EigenRatio(mean, spread, ratios)


def sample_profile(form, spec: ProblemSpec, grid) -> RadialProfile:
    """Tabulate ``Δ^i u`` and slopes of a closed form as a :class:`RadialProfile`."""
    form = _as_form(form, spec.n)
    r = np.asarray(grid, dtype=float)
    values = np.column_stack([form.level(i, r) for i in range(spec.m)])
    slopes = np.column_stack([form.level_slope(i, r) for i in range(spec.m)])
    return RadialProfile(spec, r, values, slopes,
                         {"source": f"closed form {form.kind}", "params": _jsonable(form.params)})


def _jsonable(params):
    out = {}
    for k, v in params.items():
        if isinstance(v, Fraction):
            out[k] = str(v)
        elif isinstance(v, (int, float, str)) or v is None:
            out[k] = v
        else:
            out[k] = repr(v)
    return out
