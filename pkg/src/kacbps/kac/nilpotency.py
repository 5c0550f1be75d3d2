"""Nilpotency classes of quiver representations over a prime field.

A representation is a list of integer matrices, one per arrow, with the
matrix of arrow a of shape (d[t(a)], d[s(a)]). Predicates work on the total
space V = sum of the V_i, where subspaces are stored by annihilators (rows c
with c.v = 0 for every v in the subspace); graded operations keep them graded.

Over Q itself (plain arrows only): SN is 1-nilpotency (loops at each vertex
jointly nilpotent), N and SSN are plain nilpotency. Over the double (a quiver
whose kinds mark reversed arrows) the flag conditions distinguish a from a*.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

import numpy as np

from ..errors import PreconditionError
from ..quiver import ARROW, OMEGA, STAR, Quiver
from .ffield import nullspace, rank, rref


class NilpotencyClass(str, Enum):
    ALL = "ALL"
    N = "N"
    SN = "SN"
    SSN = "SSN"

    @classmethod
    def parse(cls, value) -> "NilpotencyClass":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise PreconditionError(f"unknown nilpotency class {value!r}; expected ALL, N, SN or SSN")


def is_doubled(q: Quiver) -> bool:
    return STAR in q.kinds


def offsets(d: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for x in d:
        out.append(acc)
        acc += x
    return out


def total_operators(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Embed each arrow matrix as an N x N operator on the total space."""
    off = offsets(d)
    size = sum(d)
    ops = []
    for (s, t), m in zip(q.arrow_indices, mats):
        big = np.zeros((size, size), dtype=np.int64)
        big[off[t]:off[t] + d[t], off[s]:off[s] + d[s]] = m
        ops.append(big)
    return ops


def _dim_from_ann(ann: np.ndarray, size: int, p: int) -> int:
    return size - (rank(ann, p) if ann.shape[0] else 0)


def _reduce_ann(ann: np.ndarray, size: int, p: int) -> np.ndarray:
    if ann.shape[0] == 0:
        return ann.reshape(0, size)
    return rref(ann, p)[0]


def _preimage_ann(ann: np.ndarray, op: np.ndarray, p: int) -> np.ndarray:
    """Annihilator of {v : op v in W} given the annihilator of W."""
    return (ann @ op) % p


def _largest_stable(ann: np.ndarray, ops: Sequence[np.ndarray], size: int, p: int) -> np.ndarray:
    """Largest subspace inside W stable under every op (W given by annihilator)."""
    cur = _reduce_ann(ann, size, p)
    while True:
        extra = [(cur @ op) % p for op in ops]
        nxt = _reduce_ann(np.vstack([cur] + extra) if extra else cur, size, p)
        if nxt.shape[0] == cur.shape[0]:
            return nxt
        cur = nxt


def radical_nilpotent(ops: Sequence[np.ndarray], size: int, p: int) -> bool:
    """True iff the operators generate a nilpotent algebra (common strict flag).

    Iterates V_k = sum of op(V_{k-1}); the chain decreases and either dies or stalls.
    """
    if size == 0 or not ops:
        return True
    span = np.eye(size, dtype=np.int64)
    while True:
        images = np.vstack([(span @ op.T) % p for op in ops])
        nxt = rref(images, p)[0]
        if nxt.shape[0] == 0:
            return True
        if nxt.shape[0] == span.shape[0]:
            return False
        span = nxt


def is_nilpotent_rep(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray], p: int) -> bool:
    return radical_nilpotent(total_operators(q, d, mats), sum(d), p)


def is_one_nilpotent(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray], p: int) -> bool:
    """Loops at every vertex jointly nilpotent; other arrows unconstrained."""
    for i in range(q.n):
        loops = [np.asarray(m) % p for (s, t), m in zip(q.arrow_indices, mats) if s == t == i]
        if loops and not radical_nilpotent(loops, d[i], p):
            return False
    return True


def _strict_and_weak(q: Quiver, ops: Sequence[np.ndarray]):
    strict = [op for op, k in zip(ops, q.kinds) if k == ARROW]
    weak = [op for op, k in zip(ops, q.kinds) if k in (STAR, OMEGA)]
    return strict, weak


def is_sn_double(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray], p: int) -> bool:
    """Flag with a strictly lowering and a* preserving, built greedily."""
    size = sum(d)
    ops = total_operators(q, d, mats)
    strict, weak = _strict_and_weak(q, ops)
    ann = np.eye(size, dtype=np.int64)  # current L = 0
    dim = 0
    while dim < size:
        cand = np.vstack([_preimage_ann(ann, op, p) for op in strict]) if strict else np.zeros((0, size), np.int64)
        nxt = _largest_stable(cand, weak, size, p)
        new_dim = _dim_from_ann(nxt, size, p)
        if new_dim <= dim:
            return False
        ann, dim = nxt, new_dim
    return True


def is_ssn_double(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray], p: int) -> bool:
    """As SN, with every step of the flag supported at one vertex."""
    size = sum(d)
    off = offsets(d)
    ops = total_operators(q, d, mats)
    strict, weak = _strict_and_weak(q, ops)
    ann = np.eye(size, dtype=np.int64)
    dim = 0
    progress = True
    while dim < size and progress:
        progress = False
        for i in range(q.n):
            if d[i] == 0:
                continue
            # largest weak-stable U with L <= U <= L + V_i and strict(U) in L
            cand = [_sum_with_vertex(ann, off[i], d[i], size, p)]
            cand += [_preimage_ann(ann, op, p) for op in strict]
            nxt = _largest_stable(np.vstack(cand), weak, size, p)
            new_dim = _dim_from_ann(nxt, size, p)
            if new_dim > dim:
                ann, dim = nxt, new_dim
                progress = True
    return dim == size


def _span_from_ann(ann: np.ndarray, size: int, p: int) -> np.ndarray:
    if ann.shape[0] == 0:
        return np.eye(size, dtype=np.int64)
    return nullspace(ann, p)


def _ann_from_span(span: np.ndarray, size: int, p: int) -> np.ndarray:
    if span.shape[0] == 0:
        return np.eye(size, dtype=np.int64)
    return nullspace(span, p)


def _sum_with_vertex(ann: np.ndarray, start: int, width: int, size: int, p: int) -> np.ndarray:
    block = np.zeros((width, size), dtype=np.int64)
    block[np.arange(width), start + np.arange(width)] = 1
    span = np.vstack([_span_from_ann(ann, size, p), block])
    return _ann_from_span(span, size, p)


def satisfies(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray], p: int, cls: NilpotencyClass) -> bool:
    """Evaluate cls on a representation; the double is detected from the arrow kinds."""
    cls = NilpotencyClass.parse(cls)
    if cls is NilpotencyClass.ALL:
        return True
    if not is_doubled(q):
        if cls is NilpotencyClass.SN:
            return is_one_nilpotent(q, d, mats, p)
        return is_nilpotent_rep(q, d, mats, p)
    if cls is NilpotencyClass.N:
        return is_nilpotent_rep(q, d, mats, p)
    if cls is NilpotencyClass.SN:
        return is_sn_double(q, d, mats, p)
    return is_ssn_double(q, d, mats, p)


def requires_full_nilpotency(q: Quiver, cls: NilpotencyClass) -> bool:
    cls = NilpotencyClass.parse(cls)
    if cls is NilpotencyClass.ALL:
        return False
    if is_doubled(q):
        return cls is NilpotencyClass.N
    return cls in (NilpotencyClass.N, NilpotencyClass.SSN)


def arrow_must_be_nilpotent(q: Quiver, k: int, cls: NilpotencyClass) -> bool:
    """Whether a loop at position k must itself be nilpotent under cls."""
    s, t = q.arrow_indices[k]
    if s != t or NilpotencyClass.parse(cls) is NilpotencyClass.ALL:
        return False
    if not is_doubled(q):
        return True
    return cls is NilpotencyClass.N or q.kinds[k] == ARROW
