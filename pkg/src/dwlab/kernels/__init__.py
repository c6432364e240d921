"""Kernel backend selection.

The compiled Cython core is preferred when it imports; the pure-Python twin
is always available.  Set DWLAB_BACKEND=pure (or =compiled) to force one.
Both expose the same functions with bit-identical outputs; the compiled core
is limited to graphs with at most 64 vertices, which covers everything this
laboratory generates.
"""

import os

from . import pure

_forced = os.environ.get("DWLAB_BACKEND", "").strip().lower()

compiled = None
if _forced != "pure":
    try:
        from . import _core as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None
        if _forced == "compiled":
            raise

active = compiled if compiled is not None else pure

BACKEND_NAME = active.BACKEND_NAME


def backend(name=None):
    """Return a kernel module by name (None = the active default)."""
    if name is None:
        return active
    if name == "pure":
        return pure
    if name == "compiled":
        if compiled is None:
            raise ImportError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    out = ["pure"]
    if compiled is not None:
        out.append("compiled")
    return out
