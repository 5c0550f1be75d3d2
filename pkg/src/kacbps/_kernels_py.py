"""Pure numpy versions of the enumeration kernels (fallback backend)."""

from __future__ import annotations

import numpy as np


def uf_union_perm(parent: np.ndarray, perm: np.ndarray) -> None:
    """Merge x with perm[x] for every x; parent is updated in place.

    Roots are always the smallest element of their class. Hooks are done in
    vectorised rounds followed by pointer jumping until no edge crosses.
    """
    perm = np.asarray(perm, dtype=np.int64)
    src = np.arange(parent.size, dtype=np.int64)
    while True:
        _compress(parent)
        ra = parent[src]
        rb = parent[perm]
        cross = ra != rb
        if not cross.any():
            return
        src, perm = src[cross], perm[cross]
        ra, rb = ra[cross], rb[cross]
        np.minimum.at(parent, np.maximum(ra, rb), np.minimum(ra, rb))


def _compress(parent: np.ndarray) -> None:
    while True:
        jumped = parent[parent]
        if np.array_equal(jumped, parent):
            return
        parent[:] = jumped


def uf_labels(parent: np.ndarray) -> np.ndarray:
    _compress(parent)
    return parent


def orbit_labels(n: int, perms) -> np.ndarray:
    """Label every point by the smallest point of its orbit."""
    parent = np.arange(n, dtype=np.int64)
    for perm in perms:
        uf_union_perm(parent, perm)
    return uf_labels(parent)


def linear_images(indices: np.ndarray, mat: np.ndarray, p: int) -> np.ndarray:
    """Encode(mat @ decode(x)) mod p for every base-p encoded x."""
    indices = np.asarray(indices, dtype=np.int64)
    mat = np.asarray(mat, dtype=np.int64) % p
    length = mat.shape[1]
    weights = p ** np.arange(length, dtype=np.int64)
    out = np.empty(indices.size, dtype=np.int64)
    chunk = 1 << 18
    for start in range(0, indices.size, chunk):
        idx = indices[start:start + chunk].copy()
        dig = np.empty((idx.size, length), dtype=np.int64)
        for k in range(length):
            dig[:, k] = idx % p
            idx //= p
        img = (dig @ mat.T) % p
        out[start:start + chunk] = img @ weights
    return out
