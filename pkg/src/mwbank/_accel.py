"""Optional numba acceleration.

Hot kernels are written once as plain Python over scalars and numpy arrays,
then wrapped with :func:`jit`. Setting ``MWBANK_DISABLE_NUMBA=1`` (or running
without numba installed) leaves them as ordinary Python/numpy functions, which
is the reference path the benchmark compares against.
"""

import os

_DISABLED = os.environ.get("MWBANK_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    import numba as _numba
except ImportError:  # pragma: no cover - depends on environment
    _numba = None

HAVE_NUMBA = _numba is not None


def jit(func=None, *, inline=False):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""

    def wrap(f):
        if _numba is None:
            return f
        kwargs = {"cache": True}
        if inline:
            kwargs["inline"] = "always"
        return _numba.njit(**kwargs)(f)

    if func is None:
        return wrap
    return wrap(func)


def backend():
    """Name of the active kernel backend (``"numba"`` or ``"numpy"``)."""
    return "numba" if HAVE_NUMBA else "numpy"
