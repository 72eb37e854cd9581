"""Backend selection for the population-dynamics kernels.

The compiled extension is used when it imports; set ``TRM_PURE_PYTHON=1``
to force the NumPy fallback.
"""
import os

from . import _kernels_py

FLOOR = _kernels_py.FLOOR
BACKEND = "python"
_impl = _kernels_py

if os.environ.get("TRM_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def get_backend(name=None):
    """Return the kernel module named ``name`` ('cython' or 'python'), default the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def expected_payoffs(a, b, c, val, q):
    return _impl.expected_payoffs(a, b, c, val, q)


def run(a, b, c, val, q0, max_iter, eps):
    return _impl.run(a, b, c, val, q0, max_iter, eps)
