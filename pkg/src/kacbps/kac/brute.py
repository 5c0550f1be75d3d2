"""Counting isomorphism classes of representations over a prime field.

The representation space X is the product of the arrow matrix spaces, encoded
as little-endian base-p integers of the flattened matrices (row-major, in
arrow order). G = prod GL(d_i) acts by x_a -> g_t x_a g_s^{-1}.

Orbits are found in two stages. Pick the largest arrow a0 and split X as
X0 x Y. G-orbits on X0 come from union-find over generator permutations; for
each orbit representative x0 the G-orbits over it match the orbits of its
stabiliser S on Y, again by union-find. Only |X0| + sum |Y| points are ever
visited. For nilpotent classes on supports with an oriented cycle, Y is cut
down to the pieces that admit a common strict flag with x0.

Each representative is then classified through its endomorphism algebra E:
the radical is found with the test "x in J iff 1 - yx is a unit for all y",
and the representation is absolutely indecomposable iff dim E - dim J = 1.
"""

from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .. import kernels
from ..errors import PreconditionError, ResourceLimitError
from ..quiver import DimVector, Quiver, double
from .ffield import (
    batch_det_nonzero,
    check_prime,
    digits,
    encode,
    inverse_table,
    mat_inv,
    nullspace,
    primitive_root,
    rref,
)
from .nilpotency import (
    NilpotencyClass,
    arrow_must_be_nilpotent,
    is_doubled,
    is_nilpotent_rep,
    offsets,
    requires_full_nilpotency,
    satisfies,
    total_operators,
)

DEFAULT_CAP = 10**7
ENDO_GUARD = 2**20
UNIT_GROUP_GUARD = 2 * 10**6


@dataclass(frozen=True)
class FiniteFieldRep:
    """A representation over F_p: one integer matrix per arrow."""

    quiver: Quiver
    d: DimVector
    p: int
    mats: tuple

    def __post_init__(self):
        d = self.quiver.dim(self.d)
        p = check_prime(self.p)
        if len(self.mats) != len(self.quiver.arrows):
            raise PreconditionError("one matrix per arrow required")
        fixed = []
        for k, ((s, t), m) in enumerate(zip(self.quiver.arrow_indices, self.mats)):
            m = np.asarray(m, dtype=np.int64).reshape(d[t], d[s]) if np.size(m) == d[t] * d[s] else np.asarray(m)
            if m.shape != (d[t], d[s]):
                raise PreconditionError(f"arrow {k}: matrix shape {m.shape}, expected {(d[t], d[s])}")
            fixed.append(m % p)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "mats", tuple(fixed))

    def satisfies(self, cls) -> bool:
        return satisfies(self.quiver, self.d, self.mats, self.p, cls)

    def endomorphisms(self) -> np.ndarray:
        return endomorphism_basis(self.quiver, self.d, self.mats, self.p)

    def radical_data(self, guard: int = ENDO_GUARD) -> "EndoData":
        return endo_structure(self.quiver, self.d, self.mats, self.p, guard)

    def is_absolutely_indecomposable(self) -> bool:
        return self.radical_data().absolutely_indecomposable

    def is_indecomposable(self) -> bool:
        return self.radical_data().local


# -- endomorphism algebras ---------------------------------------------------

def endomorphism_basis(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray], p: int) -> np.ndarray:
    """Rows are (phi_i) flattened vertex by vertex with phi_t x_a = x_a phi_s."""
    uo = offsets([x * x for x in d])
    unknowns = sum(x * x for x in d)
    blocks = []
    for (s, t), x in zip(q.arrow_indices, mats):
        x = np.asarray(x, dtype=np.int64)
        rows = np.zeros((d[t] * d[s], unknowns), dtype=np.int64)
        rows[:, uo[t]:uo[t] + d[t] ** 2] += np.kron(np.eye(d[t], dtype=np.int64), x.T)
        rows[:, uo[s]:uo[s] + d[s] ** 2] -= np.kron(x, np.eye(d[s], dtype=np.int64))
        blocks.append(rows % p)
    system = np.vstack(blocks) if blocks else np.zeros((0, unknowns), dtype=np.int64)
    return nullspace(system, p)


def _to_block_diag(flat: np.ndarray, d: Sequence[int]) -> np.ndarray:
    """(B, sum d_i^2) vertex blocks -> (B, N, N) block diagonal matrices."""
    size = sum(d)
    out = np.zeros((flat.shape[0], size, size), dtype=np.int64)
    uo = offsets([x * x for x in d])
    vo = offsets(d)
    for i, n in enumerate(d):
        if n:
            out[:, vo[i]:vo[i] + n, vo[i]:vo[i] + n] = flat[:, uo[i]:uo[i] + n * n].reshape(-1, n, n)
    return out


def _batch_nilpotent(mats: np.ndarray, p: int) -> np.ndarray:
    n = mats.shape[1]
    power = mats % p
    steps = 1
    while steps < n:
        power = np.matmul(power, power) % p
        steps *= 2
    return ~power.reshape(power.shape[0], -1).any(axis=1)


@dataclass(frozen=True)
class EndoData:
    """Shape of an endomorphism algebra; dim_radical is None when never computed."""

    dim: int
    dim_radical: int | None
    local: bool

    @property
    def absolutely_indecomposable(self) -> bool:
        return self.dim_radical is not None and self.dim - self.dim_radical == 1


def _fitting_witness(elems: np.ndarray, p: int) -> bool:
    """True if some element is neither nilpotent nor a unit (so V splits)."""
    if elems.shape[0] == 0:
        return False
    nil = _batch_nilpotent(elems, p)
    unit = batch_det_nonzero(elems, p)
    return bool(np.any(~nil & ~unit))


def endo_structure(q: Quiver, d: Sequence[int], mats: Sequence[np.ndarray], p: int,
                   guard: int = ENDO_GUARD, seed: int = 0) -> EndoData:
    """Radical of End by the 1 - yx unit test over the full algebra.

    A representation with an endomorphism that is neither nilpotent nor
    invertible decomposes (Fitting), and is reported as such without
    enumerating End; this keeps large split algebras under the guard.
    """
    basis = endomorphism_basis(q, d, mats, p)
    e = basis.shape[0]
    if e == 1:
        return EndoData(1, 0, True)
    probe = _to_block_diag(basis, d)
    rng = np.random.default_rng(seed)
    mixes = _to_block_diag((rng.integers(0, p, (32, e)) @ basis) % p, d)
    if _fitting_witness(probe, p) or _fitting_witness(mixes, p):
        return EndoData(e, None, False)
    if p ** e > guard:
        raise ResourceLimitError(f"endomorphism algebra has {p}^{e} elements, above the guard {guard}")
    coeffs = digits(np.arange(p ** e, dtype=np.int64), p, e)
    elems = _to_block_diag((coeffs @ basis) % p, d)
    size = elems.shape[1]
    ident = np.eye(size, dtype=np.int64)
    nil = _batch_nilpotent(elems, p)
    in_j = np.zeros(p ** e, dtype=bool)
    in_j[0] = True
    for idx in np.nonzero(nil)[0]:
        if idx == 0:
            continue
        x = elems[idx]
        ok = True
        start, chunk = 0, 16
        # witnesses of x outside J tend to show up early, so grow the batch
        while ok and start < p ** e:
            prod = np.matmul(elems[start:start + chunk], x) % p
            ok = bool(batch_det_nonzero((ident - prod) % p, p).all())
            start += chunk
            chunk *= 4
        in_j[idx] = ok
    j_size = int(in_j.sum())
    dim_j = 0
    while p ** dim_j < j_size:
        dim_j += 1
    if p ** dim_j != j_size:
        raise AssertionError(f"radical has {j_size} elements, not a power of {p}")
    units = batch_det_nonzero(elems, p)
    local = int(units.sum()) == p ** e - j_size
    return EndoData(e, dim_j, local)


# -- group generators ----------------------------------------------------------

@lru_cache(maxsize=None)
def _gl_generators(n: int, p: int) -> tuple[np.ndarray, ...]:
    """diag(w, 1, ..., 1) and the transvections I + E_ij generate GL_n(F_p)."""
    gens = []
    w = primitive_root(p)
    if n >= 1 and w != 1:
        g = np.eye(n, dtype=np.int64)
        g[0, 0] = w
        gens.append(g)
    for i in range(n):
        for j in range(n):
            if i != j:
                g = np.eye(n, dtype=np.int64)
                g[i, j] = 1
                gens.append(g)
    return tuple(gens)


def _standard_generators(d: Sequence[int], p: int, vertices: Sequence[int]) -> list[tuple]:
    out = []
    for v in vertices:
        for g in _gl_generators(d[v], p):
            out.append(tuple(g if i == v else np.eye(d[i], dtype=np.int64) for i in range(len(d))))
    return out


def _action_matrix(q: Quiver, d: Sequence[int], positions: Sequence[int], g: tuple, p: int) -> np.ndarray:
    """Linear map of g on the concatenated row-major vec of the given arrows."""
    ginv_t = [mat_inv(m, p).T if m.size else m for m in g]
    blocks = []
    for k in positions:
        s, t = q.arrow_indices[k]
        blocks.append(np.kron(g[t], ginv_t[s]) % p)
    total = sum(b.shape[0] for b in blocks)
    out = np.zeros((total, total), dtype=np.int64)
    o = 0
    for b in blocks:
        out[o:o + b.shape[0], o:o + b.shape[0]] = b
        o += b.shape[0]
    return out


def _stabiliser_generators(q: Quiver, d: Sequence[int], a0: int, x0: np.ndarray, p: int,
                           seed: int = 0) -> list[tuple]:
    """Generators of {g in G : g_t x0 = x0 g_s} for the arrow a0."""
    n = q.n
    s0, t0 = q.arrow_indices[a0]
    touched = sorted({s0, t0})
    others = [v for v in range(n) if v not in touched]
    gens = _standard_generators(d, p, others)
    if not x0.any():
        return gens + _standard_generators(d, p, touched)
    sub = Quiver(tuple(str(v) for v in touched),
                 ((str(s0), str(t0)),))
    dd = tuple(d[v] for v in touched)
    basis = endomorphism_basis(sub, dd, [x0], p)
    full = sum(x * x for x in dd)
    if basis.shape[0] == full:
        return gens + _standard_generators(d, p, touched)
    if p ** basis.shape[0] > ENDO_GUARD:
        raise ResourceLimitError(f"stabiliser algebra has {p}^{basis.shape[0]} elements")
    coeffs = digits(np.arange(p ** basis.shape[0], dtype=np.int64), p, basis.shape[0])
    elems = _to_block_diag((coeffs @ basis) % p, dd)
    units = elems[batch_det_nonzero(elems, p)]
    if units.shape[0] > UNIT_GROUP_GUARD:
        raise ResourceLimitError(f"stabiliser of size {units.shape[0]} is too large to traverse")
    chosen = _generating_subset(units, p, seed)
    vo = offsets(dd)
    for u in chosen:
        g = [np.eye(d[i], dtype=np.int64) for i in range(n)]
        for k, v in enumerate(touched):
            g[v] = u[vo[k]:vo[k] + dd[k], vo[k]:vo[k] + dd[k]].copy()
        gens.append(tuple(g))
    return gens


def _generating_subset(units: np.ndarray, p: int, seed: int) -> list[np.ndarray]:
    """Add units in a seeded order until their closure is the whole group."""
    size = units.shape[1]
    codes = np.sort(encode(units.reshape(units.shape[0], -1), p))
    target = units.shape[0]
    order = np.random.default_rng(seed).permutation(target)
    chosen: list[np.ndarray] = []
    ident = np.eye(size, dtype=np.int64)
    known = encode(ident.reshape(1, -1), p)
    for idx in order:
        if known.size == target:
            break
        u = units[idx]
        c = encode(u.reshape(1, -1), p)
        if np.isin(c, known).all():
            continue
        chosen.append(u)
        known = _closure(chosen, p, size)
    if known.size != target or not np.array_equal(known, codes):
        raise AssertionError("generating set does not close up to the unit group")
    return chosen


def _closure(gens: list[np.ndarray], p: int, size: int) -> np.ndarray:
    frontier = np.eye(size, dtype=np.int64)[None]
    known = encode(frontier.reshape(1, -1), p)
    stack = np.stack(gens)
    while frontier.shape[0]:
        prods = (np.matmul(frontier[:, None], stack[None]) % p).reshape(-1, size, size)
        c = encode(prods.reshape(prods.shape[0], -1), p)
        c, first = np.unique(c, return_index=True)
        fresh = ~np.isin(c, known)
        frontier = prods[first[fresh]]
        known = np.union1d(known, c[fresh])
    return known


# -- restricted enumeration for nilpotent classes ----------------------------

def has_oriented_cycle(q: Quiver, d: Sequence[int]) -> bool:
    live = {i for i in range(q.n) if d[i]}
    adj = {i: set() for i in live}
    for s, t in q.arrow_indices:
        if s in live and t in live:
            if s == t:
                return True
            adj[s].add(t)
    state = dict.fromkeys(live, 0)

    def visit(v):
        state[v] = 1
        for w in adj[v]:
            if state[w] == 1 or (state[w] == 0 and visit(w)):
                return True
        state[v] = 2
        return False

    return any(state[v] == 0 and visit(v) for v in live)


def _reduce_rows(vs: np.ndarray, echelon: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Reduce each row modulo the span of a reduced echelon basis."""
    vs = vs % p
    for row, c in zip(echelon, pivots):
        vs = (vs - np.outer(vs[:, c], row)) % p
    return vs


def _normalise_rows(vs: np.ndarray, p: int) -> np.ndarray:
    """Scale each nonzero row so its first nonzero entry is 1."""
    lead = np.argmax(vs != 0, axis=1)
    scale = inverse_table(p)[vs[np.arange(vs.shape[0]), lead]]
    return (vs * scale[:, None]) % p


def compatible_flags(ops: Sequence[np.ndarray], d: Sequence[int], p: int) -> list[list[tuple[int, np.ndarray]]]:
    """Complete graded flags (as ordered (vertex, vector) lists) strictly lowered by ops."""
    size = sum(d)
    off = offsets(d)
    vertex_vectors = {}
    for i, n in enumerate(d):
        if n:
            local = digits(np.arange(1, p ** n, dtype=np.int64), p, n)
            full = np.zeros((local.shape[0], size), dtype=np.int64)
            full[:, off[i]:off[i] + n] = local
            vertex_vectors[i] = full
    out = []

    def extend(chosen, echelon, pivots, used):
        if len(chosen) == size:
            out.append(list(chosen))
            return
        for i, vecs in vertex_vectors.items():
            if used[i] == d[i]:
                continue
            ok = np.ones(vecs.shape[0], dtype=bool)
            for op in ops:
                ok &= ~_reduce_rows(vecs @ op.T, echelon, pivots, p).any(axis=1)
            red = _reduce_rows(vecs[ok], echelon, pivots, p)
            red = red[red.any(axis=1)]
            if red.shape[0] == 0:
                continue
            lines = np.unique(_normalise_rows(red, p), axis=0)
            for c in lines:
                ech, piv = rref(np.vstack([echelon, c]), p)
                used[i] += 1
                chosen.append((i, c))
                extend(chosen, ech, piv, used)
                chosen.pop()
                used[i] -= 1

    extend([], np.zeros((0, size), dtype=np.int64), [], [0] * len(d))
    return out


def restricted_codes(q: Quiver, d: Sequence[int], a0: int | None, x0: np.ndarray, positions: Sequence[int],
                     p: int, cap: int) -> np.ndarray:
    """Codes of y on the given arrows sharing a complete strict flag with x0."""
    mats = [np.zeros((d[t], d[s]), dtype=np.int64) for s, t in q.arrow_indices]
    if a0 is not None:
        mats[a0] = x0
    ops = [op for k, op in enumerate(total_operators(q, d, mats)) if k == a0]
    flags = compatible_flags(ops, d, p)
    widths = [d[q.arrow_indices[k][0]] * d[q.arrow_indices[k][1]] for k in positions]
    yo = offsets(widths)
    length = sum(widths)
    off = offsets(d)
    pieces = []
    total = 0
    for flag in flags:
        where = {i: [] for i in range(q.n)}
        for pos, (i, v) in enumerate(flag):
            where[i].append((pos, v[off[i]:off[i] + d[i]]))
        bases = {i: np.array([v for _, v in where[i]], dtype=np.int64).T if where[i] else None for i in where}
        inv = {i: mat_inv(b, p) for i, b in bases.items() if b is not None}
        rank_pos = {i: [pos for pos, _ in where[i]] for i in where}
        span = []
        for k, o in zip(positions, yo):
            s, t = q.arrow_indices[k]
            for r, pr in enumerate(rank_pos[t]):
                for c, pc in enumerate(rank_pos[s]):
                    if pr < pc:
                        m = np.outer(bases[t][:, r], inv[s][c, :]) % p
                        vec = np.zeros(length, dtype=np.int64)
                        vec[o:o + m.size] = m.reshape(-1)
                        span.append(vec)
        k = len(span)
        total += p ** k
        if total > cap:
            raise ResourceLimitError(f"restricted enumeration exceeds the cap {cap}")
        if k == 0:
            pieces.append(np.zeros(1, dtype=np.int64))
            continue
        coeffs = digits(np.arange(p ** k, dtype=np.int64), p, k)
        pieces.append(encode((coeffs @ np.array(span)) % p, p))
    if not pieces:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(pieces))


# -- the census --------------------------------------------------------------

@dataclass(frozen=True)
class Census:
    """Tallies over isomorphism classes satisfying a nilpotency class."""

    orbits: int
    abs_indecomposable: int
    indecomposable: int
    enumerated: int


def _leading_arrow(q: Quiver, d: Sequence[int]) -> int | None:
    best, size = None, 0
    for k, (s, t) in enumerate(q.arrow_indices):
        if d[s] * d[t] > size:
            best, size = k, d[s] * d[t]
    return best


def _check_code_range(p: int, length: int):
    if length and p ** length >= 2**62:
        raise ResourceLimitError(f"{p}^{length} points do not fit a 64-bit encoding")


def _slice_census(q: Quiver, d: DimVector, p: int, cls: NilpotencyClass, a0: int | None,
                  x0_code: int, restricted: bool, cap: int) -> Census:
    arrows = q.arrow_indices
    if a0 is None:
        x0 = np.zeros((0, 0), dtype=np.int64)
        positions = [k for k in range(len(arrows))]
        gens = _standard_generators(d, p, range(q.n))
    else:
        s0, t0 = arrows[a0]
        x0 = digits(np.array([x0_code]), p, d[s0] * d[t0]).reshape(d[t0], d[s0])
        positions = [k for k in range(len(arrows)) if k != a0]
        gens = _stabiliser_generators(q, d, a0, x0, p)
    widths = [d[arrows[k][0]] * d[arrows[k][1]] for k in positions]
    length = sum(widths)
    _check_code_range(p, length)
    if restricted:
        codes = restricted_codes(q, d, a0, x0, positions, p, cap)
        n = codes.size
    else:
        codes = None
        n = p ** length
    if length == 0:
        gens = []
    _, reps = orbit_representatives(q, d, positions, gens, p, codes)
    yo = offsets(widths)
    orbits = absolute = plain = 0
    for r in reps:
        y = digits(np.array([r]), p, length)[0] if length else np.zeros(0, dtype=np.int64)
        mats = [None] * len(arrows)
        if a0 is not None:
            mats[a0] = x0
        for k, o, w in zip(positions, yo, widths):
            s, t = arrows[k]
            mats[k] = y[o:o + w].reshape(d[t], d[s])
        if not satisfies(q, d, mats, p, cls):
            continue
        orbits += 1
        info = endo_structure(q, d, mats, p)
        absolute += info.absolutely_indecomposable
        plain += info.local
    return Census(orbits, absolute, plain, n)


def orbit_representatives(q: Quiver, d: Sequence[int], positions: Sequence[int], gens: Sequence[tuple],
                          p: int, codes: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Orbit representatives (smallest codes) of the group generated by gens.

    The domain is every point of the given arrows, or the sorted codes when a
    stable subset is supplied.
    """
    widths = [d[q.arrow_indices[k][0]] * d[q.arrow_indices[k][1]] for k in positions]
    domain = np.arange(p ** sum(widths), dtype=np.int64) if codes is None else codes
    n = domain.size
    parent = np.arange(n, dtype=np.int64)
    for g in gens:
        images = kernels.linear_images(domain, _action_matrix(q, d, positions, g, p), p)
        if codes is not None:
            perm = np.searchsorted(codes, images)
            if np.any(perm >= n) or not np.array_equal(codes[np.minimum(perm, n - 1)], images):
                raise AssertionError("restricted subset is not stable under the group")
        else:
            perm = images
        kernels.uf_union_perm(parent, perm)
    labels = kernels.uf_labels(parent)
    return domain, domain[np.unique(labels)]


def _slice_worker(args):
    return _slice_census(*args)


def census(q: Quiver, d: Sequence[int], p: int, cls=NilpotencyClass.ALL, over: str = "Q",
           cap: int = DEFAULT_CAP, jobs: int = 1) -> Census:
    """Walk all isomorphism classes of d-dimensional representations over F_p in cls."""
    p = check_prime(p)
    cls = NilpotencyClass.parse(cls)
    if over not in ("Q", "Qbar"):
        raise PreconditionError(f"over must be 'Q' or 'Qbar', got {over!r}")
    if over == "Qbar" and not is_doubled(q):
        q = double(q)
    d = q.dim(d)
    if not any(d):
        raise PreconditionError("dimension vector must be nonzero")
    a0 = _leading_arrow(q, d)
    restricted = requires_full_nilpotency(q, cls) and has_oriented_cycle(q, d)
    if a0 is None:
        tasks = [(q, d, p, cls, None, 0, False, cap)]
        enumerated = 0
    else:
        s0, t0 = q.arrow_indices[a0]
        m0 = d[s0] * d[t0]
        _check_code_range(p, m0)
        lead_codes = None
        if restricted:
            lead_codes = restricted_codes(q, d, None, None, [a0], p, cap)
            lead_size = lead_codes.size
        else:
            lead_size = p ** m0
        if lead_size > cap:
            raise ResourceLimitError(f"leading arrow space has {lead_size} points, above the cap {cap}")
        _, reps = orbit_representatives(q, d, [a0], _standard_generators(d, p, range(q.n)), p, lead_codes)
        if arrow_must_be_nilpotent(q, a0, cls):
            keep = []
            for r in reps:
                x0 = digits(np.array([r]), p, m0).reshape(d[t0], d[s0])
                sub = Quiver(q.vertices, (q.arrows[a0],), (q.kinds[a0],))
                if is_nilpotent_rep(sub, d, [x0], p):
                    keep.append(r)
            reps = np.array(keep, dtype=np.int64)
        if not restricted:
            rest = sum(d[s] * d[t] for k, (s, t) in enumerate(q.arrow_indices) if k != a0)
            _check_code_range(p, rest)
            planned = lead_size + len(reps) * p ** rest
            if planned > cap:
                raise ResourceLimitError(
                    f"enumeration needs {planned} points, above the cap {cap}"
                )
        tasks = [(q, d, p, cls, a0, int(r), restricted, cap) for r in reps]
        enumerated = lead_size
    if jobs > 1 and len(tasks) > 1:
        with cf.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_slice_worker, tasks))
    else:
        results = [_slice_census(*t) for t in tasks]
    total = enumerated + sum(r.enumerated for r in results)
    if restricted and total > cap:
        raise ResourceLimitError(f"enumeration needs {total} points, above the cap {cap}")
    return Census(
        orbits=sum(r.orbits for r in results),
        abs_indecomposable=sum(r.abs_indecomposable for r in results),
        indecomposable=sum(r.indecomposable for r in results),
        enumerated=total,
    )


def brute_count_abs_indec(q: Quiver, d: Sequence[int], p: int, cls=NilpotencyClass.ALL, over: str = "Q",
                          cap: int = DEFAULT_CAP, jobs: int = 1) -> int:
    """Isomorphism classes of absolutely indecomposable d-dimensional reps over F_p in cls."""
    return census(q, d, p, cls, over, cap, jobs).abs_indecomposable


def brute_count_indecomposable(q: Quiver, d: Sequence[int], p: int, cls=NilpotencyClass.ALL, over: str = "Q",
                               cap: int = DEFAULT_CAP, jobs: int = 1) -> int:
    return census(q, d, p, cls, over, cap, jobs).indecomposable
