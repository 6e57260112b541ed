"""Backend selection for the hit-and-run hot loop.

The compiled Cython kernel is used when available; otherwise the NumPy
fallback. Set ``DISPLAB_KERNEL=python`` or ``DISPLAB_KERNEL=cython`` to
force a backend (forcing ``cython`` raises if the extension is missing).
"""
from __future__ import annotations

import os

from . import py_fallback

try:
    from . import _hitrun  # type: ignore[attr-defined]
except ImportError:
    _hitrun = None

_forced = os.environ.get("DISPLAB_KERNEL", "").strip().lower()
if _forced == "python":
    _impl = py_fallback
elif _forced == "cython":
    if _hitrun is None:
        raise ImportError(
            "DISPLAB_KERNEL=cython but the compiled kernel is unavailable; "
            "reinstall with a C compiler present"
        )
    _impl = _hitrun
else:
    _impl = _hitrun if _hitrun is not None else py_fallback

BACKEND = "cython" if _impl is _hitrun and _hitrun is not None else "python"


def advance_chains(normals_A, offsets_b, X, step_dirs, step_unifs) -> None:
    """Advance hit-and-run chains in place; see the backend modules."""
    _impl.advance_chains(normals_A, offsets_b, X, step_dirs, step_unifs)


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _hitrun is not None else ("python",)


def backend_module(name: str):
    """Explicit backend access, used by the benchmark and the tests."""
    if name == "python":
        return py_fallback
    if name == "cython":
        if _hitrun is None:
            raise ImportError("compiled kernel unavailable")
        return _hitrun
    raise ValueError(f"unknown backend {name!r}")
