"""Backend selection for the stepping kernels.

The compiled extension is preferred; the numpy implementation is the
fallback.  Set STEFAN_KERNELS=py (or =c) to force a backend, e.g. for the
backend-equivalence tests and the benchmark.
"""

from __future__ import annotations

import os

_forced = os.environ.get("STEFAN_KERNELS", "").strip().lower()

if _forced in ("py", "python"):
    from . import _kernels_py as _impl

    BACKEND = "python"
elif _forced in ("c", "cython", "compiled"):
    from . import _kernels as _impl  # type: ignore[attr-defined]

    BACKEND = "compiled"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

STATUS_OK = 0
STATUS_MAXSTEPS = 1
STATUS_DOMAIN = 2
STATUS_NUMERICAL = 3

advance_one_phase = _impl.advance_one_phase
advance_two_phase = _impl.advance_two_phase


def backend_name() -> str:
    return BACKEND


def get_backend(name: str):
    """Return the kernel module for an explicit backend name (benchmark use)."""
    if name in ("py", "python"):
        from . import _kernels_py

        return _kernels_py
    if name in ("c", "cython", "compiled"):
        from . import _kernels  # type: ignore[attr-defined]

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")
