"""Numeric kernels: compiled extension when available, numpy fallback.

Set BPLIVE_PURE_KERNELS=1 to force the fallback (used by the kernel
benchmark and the cross-checking tests).
"""

import os

from . import pure

if os.environ.get("BPLIVE_PURE_KERNELS") == "1":
    _impl = pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

KERNEL_BACKEND: str = "compiled" if _impl is not pure else "pure"

scc_labels = _impl.scc_labels
vi_sweeps = _impl.vi_sweeps


def backends():
    """All importable kernel modules, keyed by name; for benchmarking."""
    out = {"pure": pure}
    try:
        from . import _speedups

        out["compiled"] = _speedups
    except ImportError:
        pass
    return out


class use_backend:
    """Temporarily route the kernel calls through one backend.

    Callers that should honor the swap must call through this module
    (_kernels.scc_labels) rather than binding the functions at import.
    """

    def __init__(self, name: str):
        if name not in backends():
            raise ValueError(f"no kernel backend named {name!r}")
        self.name = name

    def __enter__(self):
        global scc_labels, vi_sweeps, KERNEL_BACKEND
        mod = backends()[self.name]
        self._saved = (scc_labels, vi_sweeps, KERNEL_BACKEND)
        scc_labels, vi_sweeps, KERNEL_BACKEND = (
            mod.scc_labels,
            mod.vi_sweeps,
            self.name,
        )
        return self

    def __exit__(self, *exc):
        global scc_labels, vi_sweeps, KERNEL_BACKEND
        scc_labels, vi_sweeps, KERNEL_BACKEND = self._saved
        return False
