"""Integrator backend selection.

The compiled kernel is used when it imports; setting
``POLYHARMONIC_PURE_PYTHON=1`` forces the pure-Python kernel.
"""
import os

from . import _rk_py

BACKENDS = {"python": _rk_py.integrate}

try:
    from ._rk_ext import integrate as _compiled
except ImportError:  # extension not built
    _compiled = None
else:
    BACKENDS["compiled"] = _compiled

if _compiled is not None and os.environ.get("POLYHARMONIC_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "compiled"
else:
    BACKEND = "python"

integrate = BACKENDS[BACKEND]


def get_integrator(name=None):
    """Return the kernel called ``name`` (default: the selected backend)."""
    if name is None:
        return integrate
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
