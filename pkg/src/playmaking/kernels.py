"""Kernel backend selection.

The compiled Cython module is preferred; set ``PLAYMAKING_PURE_PYTHON=1`` to
force the numpy fallback (results are identical, only speed differs).
"""
from __future__ import annotations

import os

from . import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if _ckernels is not None and not os.environ.get("PLAYMAKING_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_active = BACKENDS[BACKEND]


def use_backend(name: str) -> None:
    """Switch the process-wide kernel backend (``"cython"`` or ``"python"``)."""
    global BACKEND, _active
    if name not in BACKENDS:
        raise ValueError(f"kernel backend {name!r} is not available; have {sorted(BACKENDS)}")
    BACKEND = name
    _active = BACKENDS[name]


def sweep_membership(starts, ends, cols, n_cols, game_end):
    return _active.sweep_membership(starts, ends, cols, n_cols, game_end)


def cooccurrence(member, weights):
    return _active.cooccurrence(member, weights)
