"""Kac polynomials from Hua's generating function.

With <l, m> = sum_k l'_k m'_k over conjugate partitions and
b_l(x) = prod_k prod_{j <= m_k(l)} (1 - x^j), Hua's identity reads

    sum over partition tuples  prod_a q^<l^s(a), l^t(a)>
                               / prod_i q^<l^i, l^i> b_{l^i}(q^-1)   T^|l|
        = Exp( sum_d a_d(q) T^d / (q - 1) ),

Exp being plethystic in q and T together. Rather than expanding in q, the
left side is summed exactly at integer points q = x. There the plethystic
log unwinds to

    a_d(x) = (x - 1) sum_{k | d} mu(k)/k [log F(x^k)]_{d/k},

and a_d is recovered by interpolation through more points than its degree
bound 1 - chi(d, d) requires, the spare points serving as a check.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

from ..errors import ConsistencyError, PreconditionError, ResourceLimitError
from ..quiver import DimVector, Quiver, box_vectors, euler_form, sub
from ..series import mobius
from .polynomial import KacPolynomial, evaluate, lagrange_coefficients

DEFAULT_TUPLE_LIMIT = 2_000_000
EXTRA_NODES = 2


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of n as weakly decreasing tuples."""
    if n == 0:
        return ((),)
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for part in range(min(rest, cap), 0, -1):
            acc.append(part)
            rec(rest - part, part, acc)
            acc.pop()

    rec(n, n, [])
    return tuple(out)


@lru_cache(maxsize=None)
def conjugate(lam: tuple[int, ...]) -> tuple[int, ...]:
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part > k) for k in range(lam[0]))


def pairing(lam: Sequence[int], mu: Sequence[int]) -> int:
    a, b = conjugate(tuple(lam)), conjugate(tuple(mu))
    return sum(x * y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _centraliser_size(lam: tuple[int, ...], x: int) -> Fraction:
    """x^<l,l> b_l(1/x); at a prime power it is the centraliser order of a nilpotent of type l."""
    value = Fraction(x) ** pairing(lam, lam)
    for part in set(lam):
        for j in range(1, lam.count(part) + 1):
            value *= 1 - Fraction(1, x**j)
    return value


def tuple_count(box: Sequence[int]) -> int:
    return sum(math.prod(len(partitions(k)) for k in e) for e in box_vectors(box, include_zero=True))


def _hua_terms(q: Quiver, box: DimVector) -> dict[DimVector, list[tuple[int, tuple]]]:
    """Per e <= box: (arrow exponent, partition tuple) over all tuples."""
    arrows = q.arrow_indices
    out = {}
    for e in box_vectors(box, include_zero=False):
        terms = []
        for lams in itertools.product(*(partitions(k) for k in e)):
            expo = sum(pairing(lams[s], lams[t]) for s, t in arrows)
            terms.append((expo, lams))
        out[e] = terms
    return out


def _log_series(coeffs: dict[DimVector, Fraction], box: DimVector) -> dict[DimVector, Fraction]:
    """log of 1 + sum coeffs[e] T^e, via |e| G_e = |e| F_e - sum_{0<f<e} |f| G_f F_{e-f}."""
    order = list(box_vectors(box, include_zero=False))
    log: dict[DimVector, Fraction] = {}
    for e in order:
        size = sum(e)
        acc = size * coeffs.get(e, Fraction(0))
        for f in order:
            if sum(f) >= size:
                break
            if f in log and all(a <= b for a, b in zip(f, e)):
                rest = sub(e, f)
                if rest in coeffs:
                    acc -= sum(f) * log[f] * coeffs[rest]
        log[e] = acc / size
    return log


class HuaEvaluator:
    """Exact values of every a_e(x), e <= box, at integer points x >= 2."""

    def __init__(self, q: Quiver, box: Sequence[int], tuple_limit: int = DEFAULT_TUPLE_LIMIT):
        self.quiver = q
        self.box = q.dim(box)
        estimate = tuple_count(self.box)
        if estimate > tuple_limit:
            raise ResourceLimitError(
                f"Hua sum over box {self.box} needs about {estimate} partition tuples per point, "
                f"above the limit {tuple_limit}"
            )
        self.terms = _hua_terms(q, self.box)
        self._logs: dict[tuple[int, DimVector], dict] = {}

    def _log_at(self, x: int, box: DimVector) -> dict[DimVector, Fraction]:
        key = (x, box)
        if key not in self._logs:
            coeffs = {}
            for e, terms in self.terms.items():
                if all(a <= b for a, b in zip(e, box)):
                    total = Fraction(0)
                    for expo, lams in terms:
                        denom = Fraction(1)
                        for lam in lams:
                            denom *= _centraliser_size(lam, x)
                        total += Fraction(x) ** expo / denom
                    coeffs[e] = total
            self._logs[key] = _log_series(coeffs, box)
        return self._logs[key]

    def value(self, e: Sequence[int], x: int) -> Fraction:
        e = tuple(e)
        g = reduce(math.gcd, e)
        total = Fraction(0)
        for k in range(1, g + 1):
            if g % k:
                continue
            mu = mobius(k)
            if mu == 0:
                continue
            small = tuple(b // k for b in self.box)
            total += Fraction(mu, k) * self._log_at(x**k, small)[tuple(a // k for a in e)]
        return (x - 1) * total


def _interpolate(q: Quiver, e: DimVector, ev: HuaEvaluator, nodes: Sequence[int]) -> KacPolynomial:
    bound = 1 - euler_form(q, e, e)
    need = max(bound, 0) + 1
    xs = list(nodes)[: need + EXTRA_NODES]
    if len(xs) < need + EXTRA_NODES:
        raise PreconditionError("not enough evaluation points")
    ys = [ev.value(e, x) for x in xs]
    coeffs = lagrange_coefficients(xs[:need], ys[:need])
    for x, y in zip(xs[need:], ys[need:]):
        if evaluate(coeffs, x) != y:
            raise ConsistencyError(f"Hua values for d={e} are not a polynomial of degree <= {bound}")
    if any(c.denominator != 1 for c in coeffs):
        raise ConsistencyError(f"non-integral Kac polynomial coefficients for d={e}: {coeffs}")
    ints = [int(c) for c in coeffs]
    if bound < 0 and any(ints):
        raise ConsistencyError(f"nonzero Kac polynomial at d={e} beyond the degree bound")
    return KacPolynomial.from_coefficients(q, e, ints)


def hua_kac_box(q: Quiver, box: Sequence[int], tuple_limit: int = DEFAULT_TUPLE_LIMIT) -> dict[DimVector, KacPolynomial]:
    """Kac polynomials for every nonzero e <= box."""
    ev = HuaEvaluator(q, box, tuple_limit)
    top = max((1 - euler_form(q, e, e) for e in box_vectors(ev.box)), default=0)
    nodes = list(range(2, max(top, 0) + 3 + EXTRA_NODES))
    return {e: _interpolate(q, e, ev, nodes) for e in box_vectors(ev.box)}


def hua_kac(q: Quiver, d: Sequence[int], tuple_limit: int = DEFAULT_TUPLE_LIMIT) -> KacPolynomial:
    """The Kac polynomial a_{Q,d}(q) from Hua's formula."""
    d = q.dim(d)
    if not any(d):
        raise PreconditionError("the Kac polynomial needs a nonzero dimension vector")
    ev = HuaEvaluator(q, d, tuple_limit)
    bound = max(1 - euler_form(q, d, d), 0)
    return _interpolate(q, d, ev, range(2, bound + 3 + EXTRA_NODES))
