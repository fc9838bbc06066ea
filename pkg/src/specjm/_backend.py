"""Eigensolver backend selection.

The package ships two interchangeable implementations of the deterministic
Jacobi eigensolver: a compiled Cython core (``specjm._jacobi_cy``) and a
vectorized NumPy fallback (``specjm._jacobi_py``).  The compiled core is
preferred when present; set ``SPECJM_BACKEND=python`` or
``SPECJM_BACKEND=compiled`` to force a choice.  Both run the same fixed sweep
schedule, so each backend is bitwise deterministic for a given input and the
two agree to roundoff.
"""

from __future__ import annotations

import os
import warnings

from . import _jacobi_py

_requested = os.environ.get("SPECJM_BACKEND", "").strip().lower()

if _requested in ("", "compiled"):
    try:
        from . import _jacobi_cy as _impl
    except ImportError:
        if _requested == "compiled":
            warnings.warn(
                "SPECJM_BACKEND=compiled requested but the compiled core is "
                "not built; falling back to the NumPy implementation",
                RuntimeWarning,
                stacklevel=2,
            )
        _impl = _jacobi_py
elif _requested == "python":
    _impl = _jacobi_py
else:
    warnings.warn(
        f"unknown SPECJM_BACKEND={_requested!r}; using the default",
        RuntimeWarning,
        stacklevel=2,
    )
    try:
        from . import _jacobi_cy as _impl
    except ImportError:
        _impl = _jacobi_py

BACKEND: str = _impl.BACKEND_NAME
jacobi_eigh = _impl.jacobi_eigh
