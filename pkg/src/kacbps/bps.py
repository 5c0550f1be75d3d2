"""BPS, CoHA and zeroth-piece characters assembled from Kac polynomials.

Conventions: characters for the class ALL are written in q^(-1) (a Kac
polynomial a_d(q) is reported as a_d(q^-1)); nilpotent classes keep q.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .errors import ConfigurationError, PreconditionError
from .kac.cache import KacCache
from .kac.hua import DEFAULT_TUPLE_LIMIT, hua_kac_box
from .kac.interpolate import DEFAULT_PRIMES, interpolate_kac
from .kac.brute import DEFAULT_CAP
from .kac.nilpotency import NilpotencyClass
from .kac.polynomial import KacPolynomial
from .lie import (
    Generator,
    GradedDims,
    GradedGenerators,
    km_root_mult_recursion,
    serre_quotient_dims,
    uea_dims,
)
from .quiver import (
    DimVector,
    Quiver,
    box_vectors,
    cartan_matrix,
    euler_form,
    leq,
    real_subquiver,
    restrict_dim,
    symmetrized_form,
)
from .series import (
    DEFAULT_WINDOW,
    ONE,
    ZERO,
    GradedSeries,
    HalfLaurent,
    geometric,
    plethystic_exp,
    symmetric_power_character,
)

INVERTED = "t^{-1}"
PLAIN = "t"


def convention(cls) -> str:
    return INVERTED if NilpotencyClass.parse(cls) is NilpotencyClass.ALL else PLAIN


# -- Kac polynomials with an optional cache ------------------------------------

def kac_polynomials(q: Quiver, box: Sequence[int], cls=NilpotencyClass.ALL, *,
                    primes: Sequence[int] = DEFAULT_PRIMES, cap: int = DEFAULT_CAP, jobs: int = 1,
                    cache: KacCache | None = None,
                    tuple_limit: int = DEFAULT_TUPLE_LIMIT) -> dict[DimVector, KacPolynomial]:
    """a^cls_d for every nonzero d <= box.

    ALL goes through Hua's formula; nilpotent classes are interpolated from
    prime-field counts of the quiver itself.
    """
    cls = NilpotencyClass.parse(cls)
    box = q.dim(box)
    method = "hua" if cls is NilpotencyClass.ALL else "brute"
    key = cls.value if cls is NilpotencyClass.ALL else f"{cls.value}@Q"
    out: dict[DimVector, KacPolynomial] = {}
    missing = []
    for d in box_vectors(box):
        hit = cache.get(q, d, key, method) if cache else None
        if hit is None:
            missing.append(d)
        else:
            out[d] = hit
    if missing and cls is NilpotencyClass.ALL:
        fresh = hua_kac_box(q, box, tuple_limit)
        for d in missing:
            out[d] = fresh[d]
            if cache:
                cache.put(q, d, key, method, fresh[d])
    else:
        for d in missing:
            out[d] = interpolate_kac(q, d, cls, "Q", primes, cap, jobs)
            if cache:
                cache.put(q, d, key, method, out[d])
    return dict(sorted(out.items(), key=lambda kv: (sum(kv[0]), kv[0])))


# -- BPS characters --------------------------------------------------------------

@dataclass(frozen=True)
class BPSCharacter:
    quiver: Quiver
    cls: NilpotencyClass
    box: DimVector
    values: dict = field(default_factory=dict)

    def __getitem__(self, d) -> HalfLaurent:
        return self.values.get(tuple(d), ZERO)

    def keys(self):
        return list(self.values)

    @property
    def convention(self) -> str:
        return convention(self.cls)

    def to_dims(self) -> GradedDims:
        return GradedDims(self.box, self.values)

    def to_series(self, window=DEFAULT_WINDOW) -> GradedSeries:
        return GradedSeries(self.box, self.values, window)

    def __eq__(self, other):
        if not isinstance(other, BPSCharacter):
            return NotImplemented
        return (self.quiver, self.cls, self.box) == (other.quiver, other.cls, other.box) and \
            self.to_dims() == other.to_dims()


def bps_character(q: Quiver, cls=NilpotencyClass.ALL, box: Sequence[int] = (), **engine) -> BPSCharacter:
    """Per d <= box: a_d(q^-1) for ALL, a^cls_d(q) for nilpotent classes."""
    cls = NilpotencyClass.parse(cls)
    box = q.dim(box)
    polys = kac_polynomials(q, box, cls, **engine)
    values = {}
    for d, poly in polys.items():
        values[d] = poly.polynomial.invert() if cls is NilpotencyClass.ALL else poly.polynomial
    return BPSCharacter(q, cls, box, values)


# -- CoHA characters ---------------------------------------------------------------

def _check_window(window) -> tuple[int, int]:
    lo, hi = (int(w) for w in window)
    if lo > 0 or hi < 0:
        raise ConfigurationError(f"window {window} must contain cohomological degree 0")
    return lo, hi


def _torus_inputs(q: Quiver, box: DimVector, chars: BPSCharacter, window, torus_factor: bool, twist: bool):
    """The Exp input in a window wide enough for exact output inside ``window``."""
    lo, hi = window
    neg = max((-(c.min_exp() or 0) for c in chars.values.values() if c), default=0)
    neg = max(neg, 0)
    n = max(sum(box), 1)
    shift = 0
    if twist:
        shift = max((2 * abs(euler_form(q, d, d)) for d in box_vectors(box)), default=0)
    inner = (min(lo, -n * neg) - shift, hi + n * neg + shift)
    factor = geometric(2, inner) if torus_factor else ONE
    terms = {d: c.mul(factor, inner) for d, c in chars.values.items()}
    return GradedSeries(box, terms, inner)


def _twist(q: Quiver, s: GradedSeries, window) -> GradedSeries:
    terms = {d: c.shift(-2 * euler_form(q, d, d)) for d, c in s.terms.items()}
    return GradedSeries(s.box, terms, window)


def coha_character(q: Quiver, box: Sequence[int], window=DEFAULT_WINDOW, *, twist: bool = False,
                   torus_factor: bool = True, bps: BPSCharacter | None = None, **engine) -> GradedSeries:
    """Exp(sum_d a_d(q^-1) (1-q)^-1 T^d), exact inside window.

    ``twist`` multiplies the coefficient of T^d by L^(-chi(d,d)) (L = q);
    ``torus_factor=False`` drops the (1-q)^-1 factor.
    """
    box = q.dim(box)
    window = _check_window(window)
    chars = bps if bps is not None else bps_character(q, NilpotencyClass.ALL, box, **engine)
    if chars.cls is not NilpotencyClass.ALL:
        raise PreconditionError("the CoHA character is built from the unrestricted BPS character")
    f = _torus_inputs(q, box, chars, window, torus_factor, twist)
    out = plethystic_exp(f)
    if twist:
        return _twist(q, out, window)
    return GradedSeries(box, out.terms, window)


def multiset_partitions(d: Sequence[int], parts: Sequence[DimVector]):
    """Ways to write d as sum n_e e over the given parts: dicts e -> n_e."""
    d = tuple(d)
    parts = [p for p in parts if any(p) and leq(p, d)]

    def rec(k, rest):
        if not any(rest):
            yield {}
            return
        if k == len(parts):
            return
        e = parts[k]
        n = 0
        cur = rest
        while True:
            for tail in rec(k + 1, cur):
                yield ({e: n, **tail} if n else dict(tail))
            n += 1
            cur = tuple(a - b for a, b in zip(cur, e))
            if any(x < 0 for x in cur):
                return

    yield from rec(0, d)


def coha_coefficient_by_symmetric_powers(q: Quiver, d: Sequence[int], window=DEFAULT_WINDOW, *,
                                         torus_factor: bool = True, bps: BPSCharacter | None = None,
                                         **engine) -> HalfLaurent:
    """The T^d coefficient of the CoHA character as a sum of tensor products of Sym powers.

    Independent of the exp/log route: sum over multisets {e^(n_e)} with
    sum n_e e = d of prod_e Sym^(n_e)(a_e(q^-1) (1-q)^-1).
    """
    d = q.dim(d)
    window = _check_window(window)
    chars = bps if bps is not None else bps_character(q, NilpotencyClass.ALL, d, **engine)
    f = _torus_inputs(q, d, chars, window, torus_factor, False)
    inner = f.window
    if not any(d):
        return ONE
    total = ZERO
    for multiset in multiset_partitions(d, list(f.terms)):
        term = ONE
        for e, n in multiset.items():
            term = term.mul(symmetric_power_character(f[e], n, signed=True), inner)
            if not term:
                break
        total = total + term
    return total.truncate(window)


# -- zeroth perverse piece ---------------------------------------------------------

def zeroth_piece_character(q: Quiver, box: Sequence[int]) -> GradedDims:
    """Graded dimensions of U(n^-) for the real subquiver, zero off its support.

    Includes d = 0 with value 1.
    """
    box = q.dim(box)
    sub = real_subquiver(q)
    values: dict[DimVector, HalfLaurent] = {q.zero(): ONE}
    if sub.n:
        sub_box = tuple(box[q.index(v)] for v in sub.vertices)
        if any(sub_box):
            env = uea_dims(km_root_mult_recursion(sub, sub_box), sub_box)
            for d in box_vectors(box):
                small = restrict_dim(q, sub, d)
                if small is not None and env[small]:
                    values[d] = env[small]
    return GradedDims(box, values)


# -- affine quivers -------------------------------------------------------------------

def _det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def _kernel(m: list[list[int]]) -> list[list[Fraction]]:
    rows = [[Fraction(x) for x in row] for row in m]
    n = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


def affine_data(q: Quiver) -> DimVector:
    """delta for an affine quiver, after validating the symmetrized form spectrally."""
    cm = cartan_matrix(q)
    n = q.n
    if n == 0:
        raise PreconditionError("not affine: the quiver has no vertices")
    for size in range(1, n + 1):
        for rows in itertools.combinations(range(n), size):
            minor = _det([[Fraction(cm[i][j]) for j in rows] for i in rows])
            if minor < 0:
                names = ",".join(q.vertices[i] for i in rows)
                raise PreconditionError(
                    f"not affine: positive semidefiniteness fails, principal minor on {{{names}}} is {minor}"
                )
    kernel = _kernel(cm)
    if len(kernel) != 1:
        raise PreconditionError(f"not affine: kernel of the symmetrized form has dimension {len(kernel)}, not 1")
    v = kernel[0]
    if all(x <= 0 for x in v):
        v = [-x for x in v]
    if any(x <= 0 for x in v):
        raise PreconditionError(f"not affine: kernel vector {v} is not strictly positive")
    scale = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in v), 1)
    ints = [int(x * scale) for x in v]
    g = reduce(math.gcd, ints)
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class AffineCharacter:
    character: BPSCharacter
    delta: DimVector
    real_roots: tuple[DimVector, ...]


def affine_bps_character(q: Quiver, box: Sequence[int]) -> AffineCharacter:
    """Closed form: 1 at positive real roots, q^-1 + |Q_0| - 1 at n delta, 0 elsewhere."""
    box = q.dim(box)
    delta = affine_data(q)
    imaginary = HalfLaurent.monomial(-2) + HalfLaurent.const(q.n - 1)
    values, real = {}, []
    for d in box_vectors(box):
        norm = symmetrized_form(q, d, d)
        if norm == 2:
            values[d] = ONE
            real.append(d)
        elif norm == 0:
            values[d] = imaginary
    return AffineCharacter(BPSCharacter(q, NilpotencyClass.ALL, box, values), delta, tuple(real))


# -- vanishing checks -------------------------------------------------------------------

def serre_vanishing_suite(q: Quiver, tuple_limit: int = DEFAULT_TUPLE_LIMIT) -> list[tuple[DimVector, bool]]:
    """a_d = 0 at d = (e+1) 1_i + 1_j for ordered pairs i != j with i loop-free."""
    from .kac.hua import hua_kac

    out = []
    for i in range(q.n):
        if q.loops_at(i):
            continue
        for j in range(q.n):
            if j == i:
                continue
            e = q.arrows_between(i, j)
            d = tuple((e + 1 if k == i else 0) + (1 if k == j else 0) for k in range(q.n))
            out.append((d, not hua_kac(q, d, tuple_limit).polynomial))
    return out


# -- cuspidal extraction -------------------------------------------------------------------

REAL_SIMPLE = "real-simple"
ISOTROPIC = "isotropic-line"
HYPERBOLIC = "hyperbolic-residual"


@dataclass(frozen=True)
class ExtractionEntry:
    d: DimVector
    residual: HalfLaurent
    tag: str
    nonnegative: bool

    def to_json(self) -> dict:
        return {"d": list(self.d), "residual": self.residual.to_json(), "tag": self.tag,
                "nonnegative": self.nonnegative}


@dataclass(frozen=True)
class ExtractionReport:
    quiver: Quiver
    box: DimVector
    character: BPSCharacter
    entries: tuple[ExtractionEntry, ...]
    generators: GradedGenerators

    @property
    def nonnegative(self) -> bool:
        return all(e.nonnegative for e in self.entries)

    def residual(self, d) -> HalfLaurent:
        d = tuple(d)
        return next((e.residual for e in self.entries if e.d == d), ZERO)

    def to_json(self) -> dict:
        return {
            "quiver": self.quiver.to_json(),
            "convention": self.character.convention,
            "characters": self.character.to_dims().to_json(),
            "extraction": [e.to_json() for e in self.entries],
        }


def _tag(q: Quiver, d: DimVector) -> str:
    if sum(d) == 1:
        i = d.index(1)
        if q.loops_at(i) == 0:
            return REAL_SIMPLE
    if symmetrized_form(q, d, d) == 0:
        return ISOTROPIC
    return HYPERBOLIC


def cuspidal_extract(q: Quiver, box: Sequence[int], window=DEFAULT_WINDOW, *, cls=NilpotencyClass.ALL,
                     **engine) -> ExtractionReport:
    """Peel the BPS character degree by degree into Borcherds generators.

    At each d, the residual is the target character minus the character of
    the Serre quotient on the generators found so far; a nonzero residual
    becomes new generators at d (one per unit of dimension and degree).
    """
    box = q.dim(box)
    _check_window(window)
    target = bps_character(q, cls, box, **engine)
    gens: list[Generator] = []
    real: list[bool] = []
    entries = []
    for d in box_vectors(box):
        if gens:
            current = GradedGenerators(tuple(gens))
            form = [[symmetrized_form(q, g.grading, h.grading) for h in gens] for g in gens]
            have = serre_quotient_dims(current, form, d, real)[d]
        else:
            have = ZERO
        residual = target[d] - have
        if not residual:
            continue
        dims = residual.dims()
        nonneg = all(v >= 0 for v in dims.values())
        tag = _tag(q, d)
        for degree, mult in sorted(dims.items()):
            if mult > 0:
                gens.append(Generator(d, degree, int(mult), f"c{list(d)}[{degree}]"))
                real.append(tag == REAL_SIMPLE and degree == 0)
        entries.append(ExtractionEntry(d, residual, tag, nonneg))
    return ExtractionReport(q, box, target, tuple(entries), GradedGenerators(tuple(gens)))
