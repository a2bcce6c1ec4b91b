"""Kernel backend selection.

The compiled extension is used when importable; set ``PROVDISTILL_PURE_PYTHON=1``
to force the pure-Python fallback.
"""
import os

if os.environ.get("PROVDISTILL_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _impl
        BACKEND = "python"

csr_build = _impl.csr_build
incident_merge = _impl.incident_merge
sgns_block = _impl.sgns_block

__all__ = ["BACKEND", "csr_build", "incident_merge", "sgns_block"]
