"""Witness-kernel backend selection.

The compiled Cython kernel is preferred when its extension module imports;
otherwise the NumPy fallback is used.  Set GAUSSFADE_FORCE_FALLBACK=1 to
force the fallback (used by the equivalence tests and the benchmark).
"""

import os

from . import _fallback

if os.environ.get("GAUSSFADE_FORCE_FALLBACK") == "1":
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _fallback

BACKEND = _impl.NAME
witness_terms = _impl.witness_terms

__all__ = ["BACKEND", "witness_terms", "available_backends"]


def available_backends():
    """Names of the kernel implementations importable in this install."""
    names = [_fallback.NAME]
    try:
        from . import _core  # noqa: F401

        names.append(_core.NAME)
    except ImportError:
        pass
    return names
