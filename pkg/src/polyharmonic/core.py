"""Parameter algebra for ``Δ^m u = sign · u^α`` in ``R^n``.

Thresholds are exact: finite ones are :class:`fractions.Fraction`, infinite
ones are explicit :data:`INF` / :data:`NEG_INF` values rather than sentinel
floats. Comparisons between an exponent and a threshold go through
:func:`compare`, which is exact for ``Fraction`` and for ``float`` alike (a
binary float is itself a rational number), so only the *input* can be
inexact -- boundary exponents such as ``1/3`` must be supplied as ``"1/3"``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real

__all__ = [
    "ExtendedRational",
    "INF",
    "NEG_INF",
    "ProblemSpec",
    "parse_alpha",
    "sobolev_exponent",
    "singular_threshold",
    "kns_converges",
]


@functools.total_ordering
class ExtendedRational:
    """A rational number or one of ``±∞``, totally ordered.

    ``value`` is a ``Fraction`` for finite numbers; ``inf`` is ``+1``/``-1``
    for the infinities and ``0`` otherwise.
    """

    __slots__ = ("value", "inf")

    def __init__(self, value=None, inf=0):
        if inf not in (-1, 0, 1):
            raise ValueError("inf must be -1, 0 or +1")
        if inf == 0:
            if value is None:
                raise ValueError("finite ExtendedRational needs a value")
            value = Fraction(value)
        else:
            value = None
        self.value = value
        self.inf = inf

    @property
    def is_finite(self):
        return self.inf == 0

    def _key(self, other):
        # returns (self_rank, other_rank) comparable tuples
        if isinstance(other, ExtendedRational):
            o_inf, o_val = other.inf, other.value
        elif isinstance(other, (Rational, float, int)):
            if isinstance(other, float) and math.isinf(other):
                o_inf, o_val = (1 if other > 0 else -1), None
            elif isinstance(other, float) and math.isnan(other):
                return NotImplemented
            else:
                o_inf, o_val = 0, other
        else:
            return NotImplemented
        return o_inf, o_val

    def __eq__(self, other):
        key = self._key(other)
        if key is NotImplemented:
            return NotImplemented
        o_inf, o_val = key
        if self.inf or o_inf:
            return self.inf == o_inf
        return self.value == o_val

    def __lt__(self, other):
        key = self._key(other)
        if key is NotImplemented:
            return NotImplemented
        o_inf, o_val = key
        if self.inf or o_inf:
            return self.inf < o_inf
        return self.value < o_val

    def __hash__(self):
        return hash((self.inf, self.value))

    def __float__(self):
        if self.inf:
            return math.inf * self.inf
        return float(self.value)

    def __repr__(self):
        if self.inf:
            return "ExtendedRational(+inf)" if self.inf > 0 else "ExtendedRational(-inf)"
        return f"ExtendedRational({self.value})"

    def __str__(self):
        if self.inf:
            return "inf" if self.inf > 0 else "-inf"
        return str(self.value)

    def to_json(self):
        """JSON-friendly form: ``"inf"``, ``"-inf"`` or ``"p/q"``."""
        return str(self)


INF = ExtendedRational(inf=1)
NEG_INF = ExtendedRational(inf=-1)


def parse_alpha(alpha):
    """Split an exponent into ``(float_value, exact_or_None)``.

    Strings ``"p/q"`` and integer-like strings parse exactly; decimal strings
    such as ``"0.5"`` and floats are kept inexact.
    """
    if isinstance(alpha, bool):
        raise TypeError("alpha must be a number")
    if isinstance(alpha, str):
        text = alpha.strip()
        if "/" in text:
            exact = Fraction(text)
            return float(exact), exact
        try:
            exact = Fraction(int(text))
            return float(exact), exact
        except ValueError:
            pass
        value = float(text)
        if not math.isfinite(value):
            raise ValueError(f"alpha must be finite, got {alpha!r}")
        return value, None
    if isinstance(alpha, Rational):
        exact = Fraction(alpha)
        return float(exact), exact
    if isinstance(alpha, Real):
        value = float(alpha)
        if not math.isfinite(value):
            raise ValueError(f"alpha must be finite, got {alpha!r}")
        return value, None
    raise TypeError(f"cannot interpret alpha={alpha!r}")


@dataclass(frozen=True)
class ProblemSpec:
    """The problem ``Δ^m u = sign · u^α`` in ``R^n``.

    ``alpha`` may be given as an int, ``Fraction``, float or string
    (``"p/q"`` is exact). After construction ``alpha`` is a float and
    ``alpha_exact`` holds the rational value when one was supplied.
    """

    n: int
    m: int
    alpha: float
    sign: int = -1
    alpha_exact: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        if self.alpha_exact is not None:
            exact = Fraction(self.alpha_exact)
            value = float(exact)
        else:
            value, exact = parse_alpha(self.alpha)
        object.__setattr__(self, "alpha", value)
        object.__setattr__(self, "alpha_exact", exact)

    @property
    def is_exact(self):
        return self.alpha_exact is not None

    @property
    def alpha_value(self):
        """The exponent in its most exact available form."""
        return self.alpha_exact if self.alpha_exact is not None else self.alpha

    @property
    def alpha_is_integer(self):
        a = self.alpha_value
        return a == int(a)

    @property
    def m_is_odd(self):
        return self.m % 2 == 1

    def with_sign(self, sign):
        return ProblemSpec(self.n, self.m, self.alpha_value, sign)

    def describe(self):
        op = "-" if self.sign < 0 else "+"
        return f"Delta^{self.m} u = {op}u^{self.alpha_display()} in R^{self.n}"

    def alpha_display(self):
        return str(self.alpha_exact) if self.alpha_exact is not None else repr(self.alpha)

    def to_json(self):
        return {
            "n": self.n,
            "m": self.m,
            "alpha": self.alpha_display(),
            "alpha_float": self.alpha,
            "alpha_exact": self.is_exact,
            "sign": self.sign,
        }


def compare(a, b):
    """Exact three-way comparison; returns -1, 0 or +1.

    Either side may be an ``ExtendedRational``, ``Fraction``, int or float.
    """
    if not isinstance(a, ExtendedRational):
        a = _as_extended(a)
    if a < b:
        return -1
    if a == b:
        return 0
    return 1


def _as_extended(x):
    if isinstance(x, ExtendedRational):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return INF if x > 0 else NEG_INF
        return ExtendedRational(Fraction(x))
    return ExtendedRational(Fraction(x))


def sobolev_exponent(n, m):
    """Critical exponent ``(n+2m)/(n-2m)`` for ``n >= 2m+1``, else ``+∞``."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if n >= 2 * m + 1:
        return ExtendedRational(Fraction(n + 2 * m, n - 2 * m))
    return INF


def singular_threshold(m):
    """``-1/(m-1)`` for ``m >= 2``; ``-∞`` for ``m = 1``."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return NEG_INF
    return ExtendedRational(Fraction(-1, m - 1))


def kns_converges(m, alpha):
    """Whether ``∫_0^∞ t (1 + t^{2m-2})^α dt`` is finite.

    For ``m = 1`` the integrand is ``2^α t``; for ``m >= 2`` the tail behaves
    like ``t^{1 + (2m-2)α}``, integrable iff ``α < -1/(m-1)``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return False
    return compare(alpha, singular_threshold(m)) < 0
