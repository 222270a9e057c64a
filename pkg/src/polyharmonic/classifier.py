"""Existence / non-existence decision procedure for ``Δ^m u = ±u^α``.

Every verdict names the result that settles its cell of the existence
tables. ``α`` is compared exactly against the thresholds ``-1/(m-1)``, ``0``,
``1`` and the Sobolev exponent, honouring closed and open ends as stated:
``α < -1/(m-1)`` open, ``[-1/(m-1), 0)`` closed-open, ``[0, 1]`` closed and
``α >= p_s`` closed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .core import INF, NEG_INF, ExtendedRational, ProblemSpec, compare, singular_threshold, sobolev_exponent

__all__ = [
    "Citation",
    "ExistenceVerdict",
    "exists_positive",
    "exists_nonneg_nontrivial",
    "nonneg_positivity_gap",
    "positivity_gap_verdict",
    "region_label",
    "CITATION_POLARITY",
    "TableCell",
    "existence_table",
]


class Citation(str, enum.Enum):
    THEOREM1_I = "Theorem1-i"
    THEOREM1_II = "Theorem1-ii"
    THEOREM2_I = "Theorem2-i"
    THEOREM2_II = "Theorem2-ii"
    PROP_A = "PropA"
    PROP_B_I = "PropB-i"
    PROP_B_II = "PropB-ii"
    PROP_N12 = "Prop-n12"
    PROP_NEG = "Prop-neg"
    PROP_SUB = "Prop-sub"
    PROP_SUPER = "Prop-super"
    PROP_COMPARE_MINUS = "Prop-CompareMinus"
    PROP_COMPARE_PLUS = "Prop-ComparePlus"

    def __str__(self):
        return self.value


# Polarity each tag carries when it justifies an existence verdict. The
# comparison tags justify positivity-gap verdicts and carry both polarities.
CITATION_POLARITY = {
    Citation.THEOREM1_I: True,
    Citation.THEOREM1_II: True,
    Citation.THEOREM2_I: True,
    Citation.THEOREM2_II: True,
    Citation.PROP_A: True,
    Citation.PROP_B_II: True,
    Citation.PROP_B_I: False,
    Citation.PROP_N12: False,
    Citation.PROP_NEG: False,
    Citation.PROP_SUB: False,
    Citation.PROP_SUPER: False,
}


@dataclass(frozen=True)
class ExistenceVerdict:
    exists: bool
    citation: Citation
    condition_text: str

    def __post_init__(self):
        polarity = CITATION_POLARITY.get(self.citation)
        if polarity is not None and polarity != self.exists:
            raise ValueError(f"{self.citation} cannot justify exists={self.exists}")

    def __bool__(self):
        return self.exists

    def to_json(self):
        return {
            "exists": self.exists,
            "citation": str(self.citation),
            "condition": self.condition_text,
        }


def _above_sobolev(spec):
    return compare(spec.alpha_value, sobolev_exponent(spec.n, spec.m)) >= 0


def _superlinear_verdict(spec, theorem):
    """Shared α > 1 column: solutions iff the parity matches and α >= p_s.

    ``Δ^m u = -u^α`` with m odd and ``Δ^m u = u^α`` with m even are both
    ``(-Δ)^m u = u^α``; the other two combinations are ``(-Δ)^m u = -u^α``.
    """
    m, ps = spec.m, sobolev_exponent(spec.n, spec.m)
    lane_emden = (spec.sign < 0) == spec.m_is_odd
    parity = "odd" if spec.sign < 0 else "even"
    if not lane_emden:
        return ExistenceVerdict(
            False,
            Citation.PROP_SUPER,
            f"alpha > 1 and m={m} is not {parity}: (-Delta)^m u = -u^alpha "
            f"has no non-trivial non-negative solution",
        )
    if _above_sobolev(spec):
        return ExistenceVerdict(
            True,
            theorem,
            f"m={m} is {parity} and alpha >= p_s(m) = {ps} "
            f"(existence of radial solutions above the critical exponent)",
        )
    return ExistenceVerdict(
        False,
        Citation.PROP_B_I,
        f"m={m} is {parity} and 1 < alpha < p_s(m) = {ps} (subcritical Liouville)",
    )


def exists_positive(spec: ProblemSpec) -> ExistenceVerdict:
    """Does ``Δ^m u = sign·u^α`` have a positive entire classical solution?"""
    a, n, m = spec.alpha_value, spec.n, spec.m
    if spec.sign < 0:
        if n <= 2:
            return ExistenceVerdict(
                False, Citation.PROP_N12,
                f"n={n} <= 2: non-negative Delta^m u <= 0 forces Delta^m u == 0",
            )
        thr = singular_threshold(m)
        if compare(a, thr) < 0:
            return ExistenceVerdict(
                True, Citation.PROP_A,
                f"n >= 3 and alpha < -1/(m-1) = {thr} (integral condition holds)",
            )
        if compare(a, 0) < 0:
            return ExistenceVerdict(
                False, Citation.PROP_NEG,
                f"n >= 3 and -1/(m-1) = {thr} <= alpha < 0",
            )
        if compare(a, 1) <= 0:
            return ExistenceVerdict(
                False, Citation.PROP_SUB,
                "0 <= alpha <= 1: no non-trivial non-negative solution",
            )
        return _superlinear_verdict(spec, Citation.THEOREM1_I)
    if compare(a, 1) <= 0:
        return ExistenceVerdict(
            True, Citation.THEOREM2_I,
            "alpha <= 1: radial solutions from u(0)=1, Delta^i u(0)>0 are global",
        )
    return _superlinear_verdict(spec, Citation.THEOREM2_I)


def _require_nonneg_alpha(spec):
    if compare(spec.alpha_value, 0) < 0:
        raise ValueError(
            "non-negative (not necessarily positive) solutions are only "
            f"considered for alpha >= 0, got alpha={spec.alpha_display()}"
        )


def exists_nonneg_nontrivial(spec: ProblemSpec) -> ExistenceVerdict:
    """Does a non-trivial, non-negative entire solution exist? Needs ``α >= 0``."""
    _require_nonneg_alpha(spec)
    a, n = spec.alpha_value, spec.n
    if spec.sign < 0:
        if n <= 2:
            return ExistenceVerdict(
                False, Citation.PROP_N12,
                f"n={n} <= 2: non-negative Delta^m u <= 0 forces Delta^m u == 0",
            )
        if compare(a, 1) <= 0:
            return ExistenceVerdict(
                False, Citation.PROP_SUB,
                "0 <= alpha <= 1: no non-trivial non-negative solution",
            )
        return _superlinear_verdict(spec, Citation.THEOREM1_II)
    if compare(a, 1) <= 0:
        return ExistenceVerdict(
            True, Citation.THEOREM2_II,
            "0 <= alpha <= 1: positive radial solutions exist",
        )
    return _superlinear_verdict(spec, Citation.THEOREM2_II)


def nonneg_positivity_gap(spec: ProblemSpec) -> bool:
    """Is there a non-trivial non-negative solution that vanishes somewhere?"""
    return positivity_gap_verdict(spec).exists


def positivity_gap_verdict(spec: ProblemSpec) -> ExistenceVerdict:
    _require_nonneg_alpha(spec)
    a, m = spec.alpha_value, spec.m
    if spec.sign < 0:
        return ExistenceVerdict(
            False, Citation.PROP_COMPARE_MINUS,
            "every non-trivial non-negative solution of Delta^m u = -u^alpha is "
            "positive (alpha > 1), or none exists (alpha <= 1)",
        )
    if compare(a, 1) <= 0 and not (compare(a, 1) == 0 and m == 1):
        return ExistenceVerdict(
            True, Citation.PROP_COMPARE_PLUS,
            "alpha in [0,1] and (alpha, m) != (1, 1): solutions vanishing at a point exist",
        )
    return ExistenceVerdict(
        False, Citation.PROP_COMPARE_PLUS,
        "alpha > 1 or (alpha, m) = (1, 1): non-trivial non-negative solutions are positive",
    )


def region_label(spec: ProblemSpec) -> str:
    """Column of the existence table that ``spec.alpha`` falls in."""
    a = spec.alpha_value
    if spec.sign < 0:
        thr = singular_threshold(spec.m)
        if compare(a, thr) < 0:
            return "alpha < -1/(m-1)"
        if compare(a, 0) < 0:
            return "-1/(m-1) <= alpha < 0"
    elif compare(a, 0) < 0:
        return "alpha < 0"
    if compare(a, 1) <= 0:
        return "0 <= alpha <= 1"
    return "alpha > 1"


@dataclass(frozen=True)
class TableCell:
    """One interval of the α axis with the verdicts that hold throughout it.

    ``nonneg`` and ``gap`` are ``None`` on intervals with ``α < 0``.
    """

    lo: ExtendedRational
    hi: ExtendedRational
    lo_closed: bool
    hi_closed: bool
    sample: Fraction
    positive: ExistenceVerdict
    nonneg: ExistenceVerdict | None
    gap: bool | None

    def interval(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"

    def to_json(self):
        return {
            "interval": self.interval(),
            "lo": self.lo.to_json(),
            "hi": self.hi.to_json(),
            "sample_alpha": str(self.sample),
            "exists_positive": self.positive.exists,
            "citation_positive": str(self.positive.citation),
            "exists_nonneg": None if self.nonneg is None else self.nonneg.exists,
            "citation_nonneg": None if self.nonneg is None else str(self.nonneg.citation),
            "positivity_gap": self.gap,
        }


def _sample(lo, hi):
    if not lo.is_finite:
        return hi.value - 1
    if not hi.is_finite:
        return lo.value + 1
    return (lo.value + hi.value) / 2


def existence_table(m: int, n: int, sign: int) -> list:
    """Cells of the α axis for fixed ``(m, n, sign)``, in increasing order.

    Breakpoints are ``-1/(m-1)`` (minus sign, ``m >= 2``), ``0``, ``1`` and
    ``p_s`` when finite; the verdicts are evaluated at an interior sample.
    """
    zero, one = ExtendedRational(Fraction(0)), ExtendedRational(Fraction(1))
    ps = sobolev_exponent(n, m)
    cuts = []  # (point, belongs to the right-hand interval)
    if sign < 0 and m >= 2:
        cuts.append((singular_threshold(m), True))
    cuts += [(zero, True), (one, False)]
    if ps.is_finite:
        cuts.append((ps, True))
    cells = []
    lo, lo_closed = NEG_INF, False
    for point, right in cuts + [(INF, False)]:
        hi_closed = point.is_finite and not right
        sample = _sample(lo, point)
        spec = ProblemSpec(n, m, sample, sign)
        positive = exists_positive(spec)
        nonneg = gap = None
        if compare(sample, 0) >= 0:
            nonneg = exists_nonneg_nontrivial(spec)
            gap = nonneg_positivity_gap(spec)
        cells.append(TableCell(lo, point, lo_closed, hi_closed, Fraction(sample), positive,
                               nonneg, gap))
        lo, lo_closed = point, right
    return cells
