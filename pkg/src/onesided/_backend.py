"""Kernel lane selection: compiled extension when available, NumPy otherwise.

Set ONESIDED_PURE=1 to force the NumPy lane (used by the parity tests and
the benchmark). The selected lane is fixed at import time.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("ONESIDED_PURE", "") == "1":
    _impl = _fallback
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        _impl = _fallback
        COMPILED = False

compile_plus = _impl.compile_plus
integrate_power_cells = _impl.integrate_power_cells
form_max = _impl.form_max


def lane() -> str:
    return "compiled" if COMPILED else "fallback"
