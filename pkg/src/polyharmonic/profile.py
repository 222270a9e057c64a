"""Sampled radial profiles and shooting outcomes."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import ProblemSpec

__all__ = ["OutcomeKind", "ShootOutcome", "RadialProfile", "rhs_power"]


class OutcomeKind(str, enum.Enum):
    SURVIVED = "Survived"
    ZERO_TOUCH = "ZeroTouch"
    BLOW_UP = "BlowUp"
    STEP_UNDERFLOW = "StepUnderflow"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ShootOutcome:
    """How a radial run ended.

    ``r_star`` is the event radius (``r_max`` for ``Survived``); ``bracket``
    encloses the event when it was located by bisection.
    """

    kind: OutcomeKind
    r_star: float
    bracket: tuple[float, float] | None = None
    detail: str = ""

    def __str__(self):
        return f"{self.kind}({self.r_star:.10g})"

    def to_json(self):
        return {
            "kind": str(self.kind),
            "r_star": self.r_star,
            "bracket": list(self.bracket) if self.bracket is not None else None,
            "detail": self.detail,
        }


def rhs_power(u, alpha):
    """``u**alpha`` elementwise with ``0**0 = 1``; real powers of negatives are nan."""
    u = np.asarray(u, dtype=float)
    a = float(alpha)
    if a == 0.0:
        return np.ones_like(u)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.power(u, a)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial levels ``v_i = Δ^i u`` (``i < m``) and their r-derivatives.

    ``values`` and ``slopes`` have shape ``(len(r), m)``; column ``i`` holds
    ``v_i`` and ``v_i'`` respectively.
    """

    spec: ProblemSpec
    r: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        r = np.ascontiguousarray(self.r, dtype=float)
        values = np.ascontiguousarray(self.values, dtype=float)
        slopes = np.ascontiguousarray(self.slopes, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if slopes.ndim == 1:
            slopes = slopes[:, None]
        m = self.spec.m
        if r.ndim != 1 or values.shape != (r.size, m) or slopes.shape != (r.size, m):
            raise ValueError(
                f"profile arrays disagree: r{r.shape}, values{values.shape}, "
                f"slopes{slopes.shape}, m={m}"
            )
        if r.size == 0:
            raise ValueError("empty profile")
        if np.any(np.diff(r) <= 0):
            raise ValueError("profile radii must be strictly increasing")
        if r[0] < 0:
            raise ValueError("profile radii must be non-negative")
        for name, arr in (("r", r), ("values", values), ("slopes", slopes)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        return self.spec.n

    @property
    def m(self):
        return self.spec.m

    @property
    def u(self):
        return self.values[:, 0]

    def level(self, i):
        return self.values[:, i]

    def slope(self, i):
        return self.slopes[:, i]

    @property
    def r_max(self):
        return float(self.r[-1])

    @property
    def forcing(self):
        """``Δ^m u = sign · u^α`` evaluated on the nodes."""
        return self.spec.sign * rhs_power(self.u, self.spec.alpha)

    def initial_data(self):
        """``(u(0), Δu(0), ..., Δ^{m-1}u(0))``; requires the grid to start at 0."""
        if self.r[0] != 0.0:
            raise ValueError("profile does not include the origin")
        return tuple(float(v) for v in self.values[0])

    def interpolate(self, radii, level=0):
        """Cubic Hermite interpolation of ``v_level`` at ``radii``."""
        x = np.asarray(radii, dtype=float)
        r = self.r
        if np.any(x < r[0]) or np.any(x > r[-1]):
            raise ValueError("interpolation radius outside the profile grid")
        f = self.values[:, level]
        df = self.slopes[:, level]
        if r.size == 1:
            return np.full_like(x, f[0])
        idx = np.clip(np.searchsorted(r, x, side="right") - 1, 0, r.size - 2)
        a, b = r[idx], r[idx + 1]
        h = b - a
        s = (x - a) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * f[idx] + h10 * h * df[idx] + h01 * f[idx + 1] + h11 * h * df[idx + 1]

    def truncated(self, r_end):
        """Copy restricted to nodes with ``r <= r_end``."""
        keep = self.r <= r_end
        return RadialProfile(self.spec, self.r[keep], self.values[keep], self.slopes[keep],
                             dict(self.meta))
