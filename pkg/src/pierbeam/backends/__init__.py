"""Backend selection: compiled core when available, numpy otherwise.

Set PIERBEAM_BACKEND=python or =c to force a choice; by default the
compiled extension is used if it imported cleanly.
"""

import importlib
import os

from . import fallback

_requested = os.environ.get("PIERBEAM_BACKEND", "").strip().lower()

_core = None
if _requested != "python":
    try:
        _core = importlib.import_module("._core", __name__)
    except ImportError:
        if _requested == "c":
            raise ImportError(
                "PIERBEAM_BACKEND=c requested but the compiled core is not built"
            )

BACKEND = "c" if _core is not None else "python"
_impl = _core if _core is not None else fallback


def integrate(system, dpar, ipar, tab, y0, ts, rtol=1e-10, atol=1e-12):
    """Propagate one of the documented systems to every sample time.

    See fallback.py for the system catalogue and the stepping contract.
    """
    return _impl.integrate(system, dpar, ipar, tab, y0, ts, rtol=rtol, atol=atol)
