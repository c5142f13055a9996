"""Kernel backend selection.

The compiled sweep (heliplan._sweep_cy, built from _sweep_cy.pyx) is used when
importable; otherwise the pure-Python implementation. Set HELIPLAN_KERNEL to
"python" or "compiled" to force a backend; forcing "compiled" raises if the
extension is missing.
"""

from __future__ import annotations

import os

from . import _sweep_py

_forced = os.environ.get("HELIPLAN_KERNEL", "").strip().lower()

if _forced == "python":
    _backend = _sweep_py
else:
    try:
        from . import _sweep_cy as _backend  # type: ignore[no-redef]
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "HELIPLAN_KERNEL=compiled but heliplan._sweep_cy is not built; "
                "reinstall with a C compiler available"
            )
        _backend = _sweep_py

BACKEND = _backend.BACKEND_NAME


def sweep(enc, loc):
    return _backend.sweep(enc, loc)


def sweep_python(enc, loc):
    """Always the pure-Python backend (reference semantics)."""
    return _sweep_py.sweep(enc, loc)
