"""Select the compiled kernels when built, else the numpy fallback.

Set ``KACBPS_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("KACBPS_PURE"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

orbit_labels = _impl.orbit_labels
uf_union_perm = _impl.uf_union_perm
uf_labels = _impl.uf_labels
linear_images = _impl.linear_images

__all__ = ["BACKEND", "orbit_labels", "uf_union_perm", "uf_labels", "linear_images"]
