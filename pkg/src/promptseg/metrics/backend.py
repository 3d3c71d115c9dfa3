"""Select the confusion-accumulation kernel at import time.

The compiled Cython kernel is preferred; the NumPy kernel is the fallback.
Force a backend with PROMPTSEG_ACCUM_BACKEND={cython,numpy}.
"""

import os

import numpy as np

from ..errors import ConfigurationError
from . import _accum_np

_requested = os.environ.get("PROMPTSEG_ACCUM_BACKEND", "").lower()

if _requested == "numpy":
    _impl = _accum_np
    ACCUM_BACKEND = "numpy"
else:
    try:
        from . import _accum_cy as _impl  # type: ignore[no-redef]

        ACCUM_BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise ConfigurationError(
                "PROMPTSEG_ACCUM_BACKEND=cython but the compiled kernel is "
                "not available; reinstall with a C compiler present"
            ) from None
        _impl = _accum_np
        ACCUM_BACKEND = "numpy"


def bin_counts(probabilities, gt, thresholds):
    """Dispatch to the selected kernel with normalized dtypes."""
    p = np.ascontiguousarray(probabilities, dtype=np.float64).ravel()
    g = np.ascontiguousarray(gt).ravel()
    g = (g != 0).astype(np.uint8)
    t = np.ascontiguousarray(thresholds, dtype=np.float64)
    return _impl.bin_counts(p, g, t)
