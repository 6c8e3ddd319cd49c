"""Backend selection: compiled extension vs pure Python.

Set OFFSHELL_GF_BACKEND=py|compiled|auto (default auto).  `auto` prefers
the compiled extension and falls back silently; `compiled` raises if the
extension is missing.  All kernel functions take/return float64 arrays.
"""

from __future__ import annotations

import os

_choice = os.environ.get("OFFSHELL_GF_BACKEND", "auto").strip().lower()
if _choice not in ("py", "compiled", "auto"):
    raise RuntimeError(f"OFFSHELL_GF_BACKEND must be py|compiled|auto, got {_choice!r}")

if _choice == "py":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise RuntimeError(
                "OFFSHELL_GF_BACKEND=compiled but the compiled extension is not "
                "built; run pip install -e . --no-build-isolation"
            )
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND_NAME


def get_kernels():
    return kernels
