"""Dense state-vector kernels.

The numba path is used when numba imports and ``FERMICLUSTER_NUMBA`` is not set
to ``0``; otherwise the vectorized numpy path is used. Both modules stay
importable so tests and the benchmark can compare them directly.
"""

import os

from . import _numpy as numpy_kernels

KERNEL_NAMES = (
    "apply_1q",
    "apply_cz",
    "project_zparity",
    "project_xparity",
    "measure_x_reduce",
    "pauli_expectation",
    "norm2",
)

try:
    from . import _numba as numba_kernels
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_kernels = None

_want_numba = os.environ.get("FERMICLUSTER_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

if _want_numba and numba_kernels is not None:
    BACKEND = "numba"
    _active = numba_kernels
else:
    BACKEND = "numpy"
    _active = numpy_kernels

apply_1q = _active.apply_1q
apply_cz = _active.apply_cz
project_zparity = _active.project_zparity
project_xparity = _active.project_xparity
measure_x_reduce = _active.measure_x_reduce
pauli_expectation = _active.pauli_expectation
norm2 = _active.norm2

__all__ = ["BACKEND", "KERNEL_NAMES", "numpy_kernels", "numba_kernels", *KERNEL_NAMES]
