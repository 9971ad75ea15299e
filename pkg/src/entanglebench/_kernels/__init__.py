"""Statevector gate kernels with a compiled core and a pure-numpy fallback.

The backend is chosen once at import time. By default the compiled Cython
extension is used when present and numpy otherwise; set the environment
variable ENTANGLEBENCH_KERNEL to "cython" or "python" to force a backend
("cython" raises if the extension was not built).
"""

from __future__ import annotations

import os

from . import _pykernels

_choice = os.environ.get("ENTANGLEBENCH_KERNEL", "auto").lower()
if _choice not in {"auto", "cython", "python"}:
    raise ImportError(
        f"ENTANGLEBENCH_KERNEL must be auto, cython or python, got {_choice!r}"
    )

if _choice == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _cykernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        _impl = _pykernels
        BACKEND = "python"

apply_1q = _impl.apply_1q
apply_2q = _impl.apply_2q
apply_cnot = _impl.apply_cnot
apply_swap = _impl.apply_swap

__all__ = ["BACKEND", "apply_1q", "apply_2q", "apply_cnot", "apply_swap"]
