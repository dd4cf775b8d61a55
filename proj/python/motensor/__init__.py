"""Structured symmetric tensor family toolkit.

Construction of the min-structured tensor family, the critical shift
alpha*(m), and smallest H-eigenvalue estimation. The heavy lifting lives in
the compiled extension; this package re-exports it.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __doc__ as _core_doc  # noqa: F401
except ImportError:
    # Development tree: the extension sits in the CMake build directory,
    # pointed at by MOTENSOR_EXT_DIR.
    import os
    import sys

    _ext_dir = os.environ.get("MOTENSOR_EXT_DIR")
    if _ext_dir and _ext_dir not in sys.path:
        sys.path.insert(0, _ext_dir)
    from _core import *  # noqa: F401,F403

    del os, sys

__all__ = [
    "alpha_star",
    "fixed_point_beta",
    "inner_value",
    "g_value",
    "eval",
    "materialize",
    "sub_mo_witness_value",
    "lambda_min_curve",
    "moler_lambda_min",
    "psd_scan",
    "h_eigen_scan_2d",
    "verify",
    "InvalidInput",
    "BudgetExceeded",
    "ConvergenceFailure",
]
