"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set STREAMEXTRACT_PURE_PYTHON=1 to force the fallback (used by the
kernel-parity tests and the benchmark).
"""

import os

if os.environ.get("STREAMEXTRACT_PURE_PYTHON"):
    from ._ri_kernel_py import ri_update
    KERNEL_IMPL = "python"
else:
    try:
        from ._ri_kernel import ri_update
        KERNEL_IMPL = "cython"
    except ImportError:
        from ._ri_kernel_py import ri_update
        KERNEL_IMPL = "python"

__all__ = ["ri_update", "KERNEL_IMPL"]
