"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``PARABOLIC_MAX_PURE=1`` forces the numpy fallback.
"""

import os

from . import _pykernels

pure = _pykernels

if os.environ.get("PARABOLIC_MAX_PURE", "") not in ("", "0"):
    kernels = _pykernels
    COMPILED = False
else:
    try:
        from . import _kernels as kernels

        COMPILED = True
    except ImportError:  # extension not built
        kernels = _pykernels
        COMPILED = False

NAME = "compiled" if COMPILED else "python"
