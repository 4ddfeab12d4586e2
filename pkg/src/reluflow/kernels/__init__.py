"""Hot-loop kernels: compiled extension with a pure-numpy fallback.

The Cython extension is preferred when built; set RELUFLOW_PURE_PYTHON=1
to force the fallback (used by the benchmark and for debugging).
"""

from __future__ import annotations

import os

from . import _pyloops

STATUS_CONVERGED = _pyloops.STATUS_CONVERGED
STATUS_BUDGET = _pyloops.STATUS_BUDGET
STATUS_DIVERGED = _pyloops.STATUS_DIVERGED
DIVERGENCE_NORM = _pyloops.DIVERGENCE_NORM

if os.environ.get("RELUFLOW_PURE_PYTHON"):
    _impl = _pyloops
else:
    try:
        from . import _fastloops as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pyloops

BACKEND = _impl.BACKEND

gd_single = _impl.gd_single
gd_hidden = _impl.gd_hidden
rk4_single = _impl.rk4_single
rk4_hidden = _impl.rk4_hidden
