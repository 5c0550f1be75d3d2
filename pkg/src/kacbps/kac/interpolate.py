"""Kac polynomials and their nilpotent variants from prime-field counts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

from ..errors import ConsistencyError, ResourceLimitError
from ..quiver import Quiver, double, euler_form
from ..series import divisors, mobius
from .brute import DEFAULT_CAP, brute_count_abs_indec, brute_count_indecomposable
from .hua import hua_kac
from .nilpotency import NilpotencyClass, is_doubled, requires_full_nilpotency
from .polynomial import KacPolynomial, evaluate, lagrange_coefficients

DEFAULT_PRIMES = (2, 3, 5, 7, 11, 13)


def compositions(d: Sequence[int]):
    """Ordered sequences of nonzero vectors summing to d."""
    d = tuple(d)
    if not any(d):
        yield ()
        return
    import itertools

    for first in itertools.product(*(range(x + 1) for x in d)):
        if any(first):
            rest = tuple(a - b for a, b in zip(d, first))
            for tail in compositions(rest):
                yield (first,) + tail


def nilpotent_degree_bound(q: Quiver, d: Sequence[int]) -> int:
    """Upper bound on deg a^N_{Q,d} from the radical-layer stratification.

    For layers l_0, ..., l_s (l_0 the top), the stratum of nilpotent
    representations with these layers, divided by the group, has dimension at
    most sum_{k<m} sum_a l_k[s(a)] l_m[t(a)] - sum_{k<=m} l_k.l_m + l_0.d; the
    count of absolutely indecomposables is bounded by the largest of these.
    """
    d = q.dim(d)
    arrows = q.arrow_indices
    best = None
    for layers in compositions(d):
        value = sum(a * b for a, b in zip(layers[0], d))
        for k, lk in enumerate(layers):
            for m in range(k, len(layers)):
                lm = layers[m]
                value -= sum(a * b for a, b in zip(lk, lm))
                if m > k:
                    value += sum(lk[s] * lm[t] for s, t in arrows)
        best = value if best is None else max(best, value)
    return best if best is not None else 0


def degree_bound(q: Quiver, d: Sequence[int], cls: NilpotencyClass) -> int:
    bound = 1 - euler_form(q, d, d)
    if requires_full_nilpotency(q, cls):
        bound = min(bound, nilpotent_degree_bound(q, d))
    return bound


@dataclass(frozen=True)
class Interpolation:
    polynomial: KacPolynomial
    samples: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    bound: int = 0


def interpolate_kac_detailed(q: Quiver, d: Sequence[int], cls=NilpotencyClass.ALL, over: str = "Q",
                             primes: Sequence[int] = DEFAULT_PRIMES, cap: int = DEFAULT_CAP,
                             jobs: int = 1, extra: int = 1, check_hua: bool = True) -> Interpolation:
    cls = NilpotencyClass.parse(cls)
    target = double(q) if over == "Qbar" and not is_doubled(q) else q
    d = target.dim(d)
    bound = degree_bound(target, d, cls)
    need = max(bound, 0) + 1
    samples: dict[int, int] = {}
    checks: dict[int, int] = {}
    for p in primes:
        if len(samples) < need:
            try:
                samples[p] = brute_count_abs_indec(target, d, p, cls, "Q", cap, jobs)
            except ResourceLimitError as exc:
                raise ResourceLimitError(
                    f"only {len(samples)} of {need} sample points fit under the cap (prime {p}: {exc})"
                )
        elif len(checks) < extra:
            try:
                checks[p] = brute_count_abs_indec(target, d, p, cls, "Q", cap, jobs)
            except ResourceLimitError:
                break
    if len(samples) < need:
        raise ResourceLimitError(f"{need} sample primes needed, {len(primes)} configured")
    xs = list(samples)
    coeffs = lagrange_coefficients(xs, [samples[x] for x in xs])
    if any(c.denominator != 1 for c in coeffs):
        raise ConsistencyError(f"interpolant through {samples} has non-integral coefficients {coeffs}")
    for p, value in checks.items():
        if evaluate(coeffs, p) != value:
            raise ConsistencyError(f"interpolant disagrees with the count {value} at p={p}")
    poly = KacPolynomial.from_coefficients(target, d, [int(c) for c in coeffs])
    if check_hua and cls is NilpotencyClass.ALL:
        reference = hua_kac(target, d)
        if reference != poly:
            raise ConsistencyError(f"interpolated {poly} differs from Hua's {reference}")
    return Interpolation(poly, samples, checks, bound)


def interpolate_kac(q: Quiver, d: Sequence[int], cls=NilpotencyClass.ALL, over: str = "Q",
                    primes: Sequence[int] = DEFAULT_PRIMES, cap: int = DEFAULT_CAP,
                    jobs: int = 1, extra: int = 1, check_hua: bool = True) -> KacPolynomial:
    """Interpolate counts of absolutely indecomposables in cls over primes."""
    return interpolate_kac_detailed(q, d, cls, over, primes, cap, jobs, extra, check_hua).polynomial


def galois_inversion_terms(q: Quiver, d: Sequence[int], p: int, cap: int = DEFAULT_CAP,
                           jobs: int = 1) -> tuple[int, Fraction]:
    """(counted indecomposables over F_p, value predicted from Kac polynomials)."""
    d = q.dim(d)
    lhs = brute_count_indecomposable(q, d, p, NilpotencyClass.ALL, "Q", cap, jobs)
    g = reduce(math.gcd, d)
    rhs = Fraction(0)
    for r in divisors(g):
        small = tuple(x // r for x in d)
        poly = hua_kac(q, small)
        inner = sum(mobius(r // s) * poly(p**s) for s in divisors(r))
        rhs += Fraction(inner, r)
    return lhs, rhs


def galois_inversion_check(q: Quiver, d: Sequence[int], p: int, cap: int = DEFAULT_CAP, jobs: int = 1) -> bool:
    lhs, rhs = galois_inversion_terms(q, d, p, cap, jobs)
    return lhs == rhs
