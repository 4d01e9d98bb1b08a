"""Exact transportation-problem solver with a compiled core.

At import time the Cython extension is preferred; the pure-Python reference
implementation of the same algorithm is used when the extension is missing.
``get_backend`` exposes both for the backend-equivalence tests and the
benchmark script.
"""

from __future__ import annotations

from . import _pyref

try:
    from . import _core

    HAVE_EXTENSION = True
    solve_transport = _core.solve_transport
except ImportError:  # extension not built; fall back to the reference solver
    _core = None
    HAVE_EXTENSION = False
    solve_transport = _pyref.solve_transport

BACKEND = "c" if HAVE_EXTENSION else "python"


def get_backend(name: str):
    """Return the named solver backend ('c' or 'python')."""
    if name == "python":
        return _pyref.solve_transport
    if name == "c":
        if _core is None:
            raise RuntimeError("compiled transport extension is not available")
        return _core.solve_transport
    raise ValueError(f"unknown backend {name!r}")
