"""Linear algebra over prime fields on small int64 numpy arrays."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import PreconditionError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def check_prime(p: int) -> int:
    if not is_prime(int(p)):
        raise PreconditionError(f"{p} is not prime")
    return int(p)


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    order = p - 1
    factors = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]
    for g in range(2, p):
        if all(pow(g, order // f, p) != 1 for f in factors):
            return g
    raise AssertionError("no primitive root")


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    inv = inverse_table(p)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : m x = 0} as rows."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r, piv = rref(m, p)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for row, pc in enumerate(piv):
            basis[k, pc] = (-r[row, f]) % p
    return basis


def in_span(basis: np.ndarray, v: np.ndarray, p: int) -> bool:
    if basis.shape[0] == 0:
        return not np.any(np.asarray(v) % p)
    return rank(np.vstack([basis, v]), p) == rank(basis, p)


def batch_det_nonzero(mats: np.ndarray, p: int) -> np.ndarray:
    """For a stack (B, n, n) return a bool array: is each matrix invertible mod p."""
    a = np.array(mats, dtype=np.int64) % p
    b, n, _ = a.shape
    ok = np.ones(b, dtype=bool)
    if n == 0:
        return ok
    inv = inverse_table(p)
    idx = np.arange(b)
    for c in range(n):
        sub = a[:, c:, c] != 0
        has = sub.any(axis=1)
        ok &= has
        piv = c + np.argmax(sub, axis=1)
        rows_c = a[idx, c].copy()
        rows_p = a[idx, piv].copy()
        a[idx, c] = rows_p
        a[idx, piv] = rows_c
        pv = a[:, c, c]
        scale = inv[pv]
        a[:, c] = (a[:, c] * scale[:, None]) % p
        if c + 1 < n:
            f = a[:, c + 1:, c]
            a[:, c + 1:] = (a[:, c + 1:] - f[:, :, None] * a[:, c, None, :]) % p
    return ok


def mat_inv(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    aug = np.hstack([np.asarray(m, dtype=np.int64) % p, np.eye(n, dtype=np.int64)])
    r, piv = rref(aug, p)
    if piv[:n] != list(range(n)):
        raise PreconditionError("matrix is singular mod p")
    return r[:, n:] % p


def is_nilpotent(m: np.ndarray, p: int) -> bool:
    n = m.shape[0]
    if n == 0:
        return True
    acc = np.asarray(m, dtype=np.int64) % p
    power = acc
    for _ in range(n - 1):
        power = (power @ acc) % p
    return not np.any(power)


def digits(indices: np.ndarray, p: int, length: int) -> np.ndarray:
    """Little-endian base-p digits of each index; shape (len(indices), length)."""
    idx = np.asarray(indices, dtype=np.int64).copy()
    out = np.empty((idx.size, length), dtype=np.int64)
    for k in range(length):
        out[:, k] = idx % p
        idx //= p
    return out


def encode(vectors: np.ndarray, p: int) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=np.int64)
    length = vectors.shape[1]
    weights = p ** np.arange(length, dtype=np.int64)
    return (vectors % p) @ weights
