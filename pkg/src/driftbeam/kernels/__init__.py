"""Hot-loop kernels with a compiled core and a pure-NumPy fallback.

The backend is picked once at import time: the Cython extension ``_core``
when it built, otherwise the NumPy implementation in ``_numpy``.  Setting
the environment variable ``DRIFTBEAM_PURE_PYTHON=1`` forces the fallback
(useful for benchmarking; see ``python -m driftbeam.kernels.bench``).
"""

import os

from . import _numpy

if os.environ.get("DRIFTBEAM_PURE_PYTHON"):
    _backend = _numpy
else:
    try:
        from . import _core as _backend  # type: ignore[attr-defined]
    except ImportError:
        _backend = _numpy

BACKEND = _backend.NAME

herm_toeplitz_means = _backend.herm_toeplitz_means
toeplitz_build = _backend.toeplitz_build
htilde_project = _backend.htilde_project
bt_generator_means = _backend.bt_generator_means
bt_build = _backend.bt_build

__all__ = [
    "BACKEND",
    "herm_toeplitz_means",
    "toeplitz_build",
    "htilde_project",
    "bt_generator_means",
    "bt_build",
]
