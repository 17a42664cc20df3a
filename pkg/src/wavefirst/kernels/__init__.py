"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when present; set ``WAVEFIRST_KERNEL``
to ``python`` or ``native`` to force a backend (``native`` raises if the
extension was not built).  Both backends implement the identical iteration,
so results agree to floating-point roundoff; the benchmark in
``benchmarks/bench_bcls.py`` compares their speed.
"""

from __future__ import annotations

import os

from . import pure

_choice = os.environ.get("WAVEFIRST_KERNEL", "auto").lower()

if _choice == "python":
    _impl = pure
elif _choice == "native":
    from . import _native as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

bcls_minimize = _impl.bcls_minimize
power_bound = _impl.power_bound
BACKEND = _impl.BACKEND


def backend_name() -> str:
    """Which kernel implementation was selected at import time."""
    return BACKEND
