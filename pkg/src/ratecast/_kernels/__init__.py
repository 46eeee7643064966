"""Kernel backend selection.

Imports the compiled extension when it is installed and functional,
otherwise falls back to the numpy implementations.  Set
``RATECAST_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("RATECAST_PURE_PYTHON") == "1":
    from ratecast._kernels import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from ratecast._kernels import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from ratecast._kernels import _pykernels as _impl

        BACKEND = "python"

MAX_TERMS = _impl.MAX_TERMS
TAIL_TOL = _impl.TAIL_TOL
lilliefors_statistic = _impl.lilliefors_statistic
lilliefors_null_statistics = _impl.lilliefors_null_statistics
ks_statistic_from_cdf = _impl.ks_statistic_from_cdf
ncx2_cdf_standard = _impl.ncx2_cdf_standard

__all__ = [
    "BACKEND",
    "MAX_TERMS",
    "TAIL_TOL",
    "ks_statistic_from_cdf",
    "lilliefors_null_statistics",
    "lilliefors_statistic",
    "ncx2_cdf_standard",
]
