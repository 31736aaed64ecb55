"""Backend selection for the batched hot kernels.

The compiled extension (`selinet._kernels_c`, built from Cython) is
used when importable; otherwise the numpy fallback takes over.  Set
``SELINET_BACKEND=python`` or ``SELINET_BACKEND=cython`` to force a
choice (forcing cython raises if the extension is missing).

Both backends are deterministic run-to-run on one platform, but they
are not bitwise identical to each other: the compiled loops accumulate
in ascending index order while numpy delegates to BLAS.
"""

import os

from . import _kernels_py

_requested = os.environ.get("SELINET_BACKEND", "auto")

if _requested not in ("auto", "python", "cython"):
    raise ImportError(f"unknown SELINET_BACKEND value: {_requested!r}")

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_c as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _kernels_py
        BACKEND = "python"

affine_fwd = _impl.affine_fwd
affine_bwd = _impl.affine_bwd
attn_pool_fwd = _impl.attn_pool_fwd
attn_pool_bwd = _impl.attn_pool_bwd
mean_pool = _impl.mean_pool


def available_backends():
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        from . import _kernels_c  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the raw kernel module for an explicit backend name."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels_c

        return _kernels_c
    raise ValueError(f"unknown backend {name!r}")
