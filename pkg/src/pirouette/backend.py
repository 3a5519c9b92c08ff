"""Kernel backend selection.

The compiled extension is used when it imported cleanly; set
PIROUETTE_BACKEND=python to force the numpy fallback (any other value, or
unset, prefers the extension).
"""
import os

from . import _kernels_py

_forced = os.environ.get("PIROUETTE_BACKEND", "").strip().lower()

if _forced == "python":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

BACKEND = kernels.BACKEND_NAME


def thread_count():
    """Worker count for seed sweeps, from PIROUETTE_THREADS (default 1)."""
    raw = os.environ.get("PIROUETTE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
