"""Kernel dispatch: the compiled extension when it was built, numpy otherwise.

Set UNITARYLAB_PURE_PYTHON=1 to force the numpy versions.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("UNITARYLAB_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

lhv_pm1 = _impl.lhv_pm1
lhv_qary = _impl.lhv_qary
optimal_pm1 = _impl.optimal_pm1
unbiased_pm1 = _impl.unbiased_pm1
