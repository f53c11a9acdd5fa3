"""Backend selection for the relaxed-exploration kernels.

The compiled core (``incgr._kernels``) is used when it was built; otherwise
the pure-Python twin is loaded. Setting ``INCGR_PURE_PYTHON=1`` forces the
fallback.
"""

import os

BACKEND = "python"

if os.environ.get("INCGR_PURE_PYTHON", "") not in ("", "0"):
    from incgr._kernels_py import goal_reachable, prepare, relaxed_levels
else:
    try:
        from incgr._kernels import goal_reachable, prepare, relaxed_levels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from incgr._kernels_py import goal_reachable, prepare, relaxed_levels

__all__ = ["BACKEND", "goal_reachable", "prepare", "relaxed_levels"]
