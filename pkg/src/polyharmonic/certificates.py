"""Exponent bookkeeping behind the non-existence arguments.

Two pieces are reproduced: the Moser-type schedule of integrability
exponents used for ``0 < α < 1``, and the test-function decay exponent used
for ``α > 1``. Rational exponents are handled in exact arithmetic; float
exponents fall back to floating point and flag sign decisions that land
within ``INDETERMINATE_BAND`` of zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import parse_alpha

__all__ = [
    "INDETERMINATE_BAND",
    "MoserSchedule",
    "moser_schedule",
    "inv_q_closed_form",
    "inv_q_recursion",
    "DecayCertificate",
    "decay_certificate",
    "AbsorptionReport",
    "sublinear_absorption_check",
]

INDETERMINATE_BAND = 1e-12

# schedules never need this many steps for admissible input; guards float loops
_MAX_STEPS = 100_000


def _alpha(alpha):
    value, exact = parse_alpha(alpha)
    return exact if exact is not None else value


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


def inv_q_closed_form(n, m, alpha, h):
    """``1/q_h = α^h − 2m(1−α^h) / (n(1−α))``."""
    ah = alpha ** h
    return ah - 2 * m * (1 - ah) / (n * (1 - alpha))


def inv_q_recursion(n, m, alpha, h_max):
    """``[1/q_0, …, 1/q_{h_max}]`` from ``1/q_0 = 1``, ``1/q_h = α/q_{h−1} − 2m/n``."""
    one = Fraction(1) if isinstance(alpha, Fraction) else 1.0
    shift = Fraction(2 * m, n) if isinstance(alpha, Fraction) else 2 * m / n
    seq = [one]
    for _ in range(h_max):
        seq.append(alpha * seq[-1] - shift)
    return seq


@dataclass(frozen=True)
class MoserSchedule:
    """Exponent schedule for ``0 < α < 1``.

    Attributes
    ----------
    inv_q : list
        ``1/q_0, …, 1/q_{j*+1}``; Fractions when ``alpha`` is rational.
    j_star : int
        Index with ``1/q_{j*+1} <= 0 < 1/q_{j*}``.
    closing_coefficient
        ``(2mα/(1−α) + 2) α^{j*+1}``.
    q_min : int
        Smallest integer ``q > 1`` with ``E(q) < 0``.
    indeterminate : bool
        A float sign decision fell inside the indeterminate band.
    """

    n: int
    m: int
    alpha: object
    inv_q: list
    j_star: int
    closing_coefficient: object
    q_min: int
    exact: bool
    indeterminate: bool = False

    def closing_exponent(self, q):
        """``E(q) = 2m/(1−α) + n − closing_coefficient · q``."""
        return 2 * self.m / (1 - self.alpha) + self.n - self.closing_coefficient * q

    @property
    def q_seq(self):
        """The exponents ``q_h`` themselves (``inf`` where ``1/q_h = 0``)."""
        return [math.inf if x == 0 else 1 / x for x in self.inv_q]

    def to_json(self):
        return {
            "kind": "MoserSchedule",
            "n": self.n,
            "m": self.m,
            "alpha": _jsonable(self.alpha),
            "exact": self.exact,
            "inv_q": [_jsonable(x) for x in self.inv_q],
            "j_star": self.j_star,
            "closing_coefficient": _jsonable(self.closing_coefficient),
            "closing_exponent_at_q_min": _jsonable(self.closing_exponent(self.q_min)),
            "q_min": self.q_min,
            "indeterminate": self.indeterminate,
        }


def moser_schedule(n: int, m: int, alpha) -> MoserSchedule:
    """Build the schedule for ``0 < alpha < 1``.

    The recursion is run until the first non-positive ``1/q_h``; it always
    terminates because ``1/q_h → −2m/(n(1−α)) < 0``.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    a = _alpha(alpha)
    if a == 0:
        raise ValueError("alpha = 0 is handled by the Pizzetti bound, not by a schedule")
    if not 0 < a < 1:
        raise ValueError(f"schedule needs 0 < alpha < 1, got {alpha}")
    exact = isinstance(a, Fraction)
    one = Fraction(1) if exact else 1.0
    shift = Fraction(2 * m, n) if exact else 2 * m / n
    inv_q = [one]
    indeterminate = False
    while inv_q[-1] > 0:
        if len(inv_q) > _MAX_STEPS:
            raise RuntimeError("schedule did not terminate")
        inv_q.append(a * inv_q[-1] - shift)
    j_star = len(inv_q) - 2
    if not exact and (abs(inv_q[-1]) < INDETERMINATE_BAND or inv_q[-2] < INDETERMINATE_BAND):
        indeterminate = True
    coef = (2 * m * a / (1 - a) + 2) * a ** (j_star + 1)
    total = 2 * m / (1 - a) + n
    # E(q) < 0  <=>  q > total / coef
    q_min = max(2, math.floor(total / coef) + 1)
    if not exact and abs(total - coef * q_min) < INDETERMINATE_BAND * max(1.0, total):
        indeterminate = True
    return MoserSchedule(n, m, a, inv_q, j_star, coef, q_min, exact, indeterminate)


@dataclass(frozen=True)
class DecayCertificate:
    """Test-function exponents for ``α > 1``.

    ``cutoff_power = 2mα/(α−1)`` and ``∫_{B_R} u ≤ C R^{decay_exponent}``
    with ``decay_exponent = n − 2m/(α−1)``.
    """

    n: int
    m: int
    alpha: object
    cutoff_power: object
    decay_exponent: object
    liouville_applicable: bool
    exact: bool

    def to_json(self):
        return {
            "kind": "DecayCertificate",
            "n": self.n,
            "m": self.m,
            "alpha": _jsonable(self.alpha),
            "exact": self.exact,
            "cutoff_power": _jsonable(self.cutoff_power),
            "decay_exponent": _jsonable(self.decay_exponent),
            "liouville_applicable": self.liouville_applicable,
        }


def decay_certificate(n: int, m: int, alpha) -> DecayCertificate:
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    a = _alpha(alpha)
    if not a > 1:
        raise ValueError(f"decay certificate needs alpha > 1, got {alpha}")
    p = 2 * m * a / (a - 1)
    decay = n - 2 * m / (a - 1)
    return DecayCertificate(n, m, a, p, decay, bool(decay < n), isinstance(a, Fraction))


@dataclass(frozen=True)
class AbsorptionReport:
    """Result of the absorption identity check at step ``h``.

    ``lhs = (n+2m−2)α^h − (n/q_h + 2m−2)`` and
    ``rhs = (1−α^h)(2m/(1−α) − 2(m−1))``.
    """

    holds: bool
    identity: bool
    lhs: object
    rhs: object
    equality_at_zero: bool
    within_schedule: bool
    h: int

    def __bool__(self):
        return self.holds

    def to_json(self):
        return {k: _jsonable(v) for k, v in self.__dict__.items()}


def sublinear_absorption_check(n: int, m: int, alpha, h: int) -> AbsorptionReport:
    """Check the absorption identity and ``lhs >= 0`` (strict for ``h >= 1``).

    ``h`` may exceed ``j*``; ``within_schedule`` says whether it did not.
    """
    if int(h) != h or h < 0:
        raise ValueError(f"h must be a non-negative integer, got {h!r}")
    h = int(h)
    sched = moser_schedule(n, m, alpha)
    a = sched.alpha
    inv_qh = inv_q_closed_form(n, m, a, h)
    ah = a ** h
    lhs = (n + 2 * m - 2) * ah - (n * inv_qh + 2 * m - 2)
    rhs = (1 - ah) * (2 * m / (1 - a) - 2 * (m - 1))
    if sched.exact:
        identity = lhs == rhs
    else:
        identity = math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=INDETERMINATE_BAND)
    positive = lhs > 0 if h > 0 else lhs == 0 or abs(lhs) < INDETERMINATE_BAND
    return AbsorptionReport(bool(identity and positive), bool(identity), lhs, rhs, h == 0,
                            h <= sched.j_star, h)
