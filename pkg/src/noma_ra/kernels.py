"""Backend selection for the allocation kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module is used.  Set ``NOMA_RA_PURE_PYTHON=1`` to
force the fallback.  ``BACKEND`` names the active implementation.
"""

import os

from . import _pykernels

if os.environ.get("NOMA_RA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

TOL = _pykernels.TOL
SCHEMES = _pykernels.SCHEMES
E_NOMA, C_NOMA, E_OMA, C_OMA = 0, 1, 2, 3

water_fill_levels = _impl.water_fill_levels
allocate = _impl.allocate
sweep = _impl.sweep


def available_backends():
    """Return ``{name: module}`` for every backend importable here."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
