"""Window-counting kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when importable; set
``LEXICHRON_KERNELS=py`` or ``=c`` to force a backend (``c`` raises if the
extension was not built).
"""

from __future__ import annotations

import os

_forced = os.environ.get("LEXICHRON_KERNELS", "").strip().lower()

if _forced == "py":
    from . import _py as _impl

    BACKEND = "python"
elif _forced == "c":
    from . import _ckern as _impl  # type: ignore[no-redef]

    BACKEND = "c"
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from . import _py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

count_window_hits = _impl.count_window_hits
window_pair_ids = _impl.window_pair_ids

__all__ = ["BACKEND", "count_window_hits", "window_pair_ids"]
