"""Kernel selection.

The compiled kernels are used when they were built and the instance fits
their integer range; otherwise the pure-Python kernels run.  Set
``PAMSAC_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    if os.environ.get("PAMSAC_PURE_PYTHON"):
        raise ImportError("pure Python kernel requested")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"

coapproval = _kernel_py.coapproval


def settle(k, rn, rd, unit, frags, max_points, backend=None):
    """Run single-approval greedy reduction; see :func:`pamsac._kernel_py.settle`."""
    use = backend or BACKEND
    if use == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel not available")
        a_max = 0
        for b, s, cnt in frags:
            a_max += cnt * unit[b] * max(s, default=0)
        if _ckernel.fits(k, rn, rd, max_points, a_max):
            return _ckernel.settle(k, rn, rd, list(unit), frags, max_points)
    return _kernel_py.settle(k, rn, rd, unit, frags, max_points)


def descend(k, rn, rd, unit, frags, policy=0, full=None, backend=None):
    """Run unit-reassignment descent; see :func:`pamsac._kernel_py.descend`."""
    use = backend or BACKEND
    if use == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel not available")
        a_max = 0
        for b, s, cnt in frags:
            a_max += cnt * unit[b]
        if _ckernel.descent_fits(k, rn, rd, a_max):
            return _ckernel.descend(k, rn, rd, list(unit), frags, policy, full)
    return _kernel_py.descend(k, rn, rd, unit, frags, policy, full)
