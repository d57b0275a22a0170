"""Backend selection for the table kernel.

The compiled extension is used when it imports; otherwise the pure-Python
fallback is used.  Set ``INTCPX_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from intcomplexity import _pykernel

BACKEND = "python"
fill_values = _pykernel.fill_values

if os.environ.get("INTCPX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from intcomplexity import _ckernel
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        fill_values = _ckernel.fill_values

BACKENDS = {"python": _pykernel.fill_values}
try:
    from intcomplexity import _ckernel as _ck

    BACKENDS["cython"] = _ck.fill_values
except ImportError:
    pass
