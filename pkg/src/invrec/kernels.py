"""Backend selection for the grid kernels.

The compiled extension is used when it imports; set ``INVREC_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("INVREC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

mode_fields = _impl.mode_fields
plane_mean = _impl.plane_mean
plane_means = _impl.plane_means
fused_invariants = _impl.fused_invariants
square_mean = _impl.square_mean


def backends():
    """Available implementations keyed by name, for benchmarks and tests."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
