"""Select compiled kernels when available, else the pure-Python twins.

Set ``GDFORGE_PURE=1`` to force the pure-Python implementations.
"""

import os

from . import _elim_py, _triple_py

_forced_pure = os.environ.get("GDFORGE_PURE", "").strip() not in ("", "0")

if _forced_pure:
    elim = _elim_py
    triple = _triple_py
    BACKEND = "python"
else:
    try:
        from . import _elim_c as elim  # type: ignore[no-redef]
        from . import _triple_c as triple  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        elim = _elim_py
        triple = _triple_py
        BACKEND = "python"

__all__ = ["BACKEND", "elim", "triple"]
