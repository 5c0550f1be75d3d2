"""Exact Laurent polynomials in q^(1/2) and truncated multigraded series.

Exponents are stored doubled, so ``{-2: 1, 1: 3}`` is ``q^(-1) + 3*q^(1/2)``.
Coefficients are Fractions. A :class:`GradedSeries` keeps every term with
``d <= box`` componentwise and drops monomials whose doubled exponent falls
outside ``window``.

Signed characters follow the Koszul convention: a graded piece of
cohomological degree i and dimension n contributes ``(-1)^i * n * q^(i/2)``.
With that convention the plethystic exponential is the plain substitution
``exp(sum_k psi_k(f) / k)`` and odd pieces automatically produce exterior
powers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .errors import ConfigurationError, ConsistencyError, PreconditionError
from .quiver import box_vectors

DEFAULT_WINDOW = (-64, 64)

Window = tuple[int, int]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class HalfLaurent:
    """Immutable Laurent polynomial in q^(1/2) with exact coefficients."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = _frac(v)
                if v:
                    c[int(e)] = v
        self._c = c
        self._hash = None

    # -- constructors --------------------------------------------------------
    @classmethod
    def monomial(cls, doubled_exp: int, coeff=1) -> "HalfLaurent":
        return cls({doubled_exp: coeff})

    @classmethod
    def const(cls, value) -> "HalfLaurent":
        return cls({0: value})

    @classmethod
    def from_poly(cls, coeffs: Sequence, step: int = 2) -> "HalfLaurent":
        """``coeffs[k]`` is the coefficient of q^(k*step/2); step=-2 gives q^(-k)."""
        return cls({k * step: c for k, c in enumerate(coeffs)})

    # -- access --------------------------------------------------------------
    def items(self):
        return sorted(self._c.items())

    def coeff(self, doubled_exp: int) -> Fraction:
        return self._c.get(doubled_exp, Fraction(0))

    def __getitem__(self, doubled_exp: int) -> Fraction:
        return self.coeff(doubled_exp)

    def exponents(self) -> list[int]:
        return sorted(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def min_exp(self) -> int | None:
        return min(self._c) if self._c else None

    def max_exp(self) -> int | None:
        return max(self._c) if self._c else None

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self._c.values())

    def dims(self) -> dict[int, int]:
        """Read a signed character back as dimensions per cohomological degree."""
        out = {}
        for e, v in self._c.items():
            if v.denominator != 1:
                raise ConsistencyError(f"non-integral character coefficient {v} at q^({e}/2)")
            out[e] = int(v) * (-1 if e % 2 else 1)
        return out

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0) + v
        return HalfLaurent(c)

    __radd__ = __add__

    def __neg__(self):
        return HalfLaurent({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, HalfLaurent):
            k = _frac(other)
            return HalfLaurent({e: v * k for e, v in self._c.items()})
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: "HalfLaurent", window: Window | None = None) -> "HalfLaurent":
        c: dict[int, Fraction] = {}
        lo, hi = window if window else (None, None)
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                if window and (e < lo or e > hi):
                    continue
                c[e] = c.get(e, 0) + v1 * v2
        return HalfLaurent(c)

    def __truediv__(self, k):
        k = _frac(k)
        return HalfLaurent({e: v / k for e, v in self._c.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise PreconditionError("negative powers are not Laurent polynomials in general")
        out = HalfLaurent.const(1)
        for _ in range(n):
            out = out * self
        return out

    def truncate(self, window: Window) -> "HalfLaurent":
        lo, hi = window
        return HalfLaurent({e: v for e, v in self._c.items() if lo <= e <= hi})

    def psi(self, k: int) -> "HalfLaurent":
        """Adams operation q^(1/2) -> q^(k/2)."""
        return HalfLaurent({e * k: v for e, v in self._c.items()})

    def invert(self) -> "HalfLaurent":
        """Substitute q -> q^(-1)."""
        return HalfLaurent({-e: v for e, v in self._c.items()})

    def shift(self, doubled: int) -> "HalfLaurent":
        return HalfLaurent({e + doubled: v for e, v in self._c.items()})

    def evaluate(self, q) -> Fraction:
        """Evaluate at a value of q; only integral exponents are allowed."""
        if any(e % 2 for e in self._c):
            raise PreconditionError("cannot evaluate half-integral exponents at a rational point")
        q = _frac(q)
        return sum((v * q ** (e // 2) for e, v in self._c.items()), Fraction(0))

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, HalfLaurent):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == HalfLaurent.const(other)._c
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._c.items())))
        return self._hash

    # -- rendering -----------------------------------------------------------
    def render(self, compact: bool = False, descending: bool = False) -> str:
        if not self._c:
            return "0"
        parts = []
        for e, v in sorted(self._c.items(), reverse=descending):
            sign = "-" if v < 0 else "+"
            a = -v if v < 0 else v
            mono = _render_monomial(e)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        sep = "" if compact else " "
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f"{sep}{sign}{sep}{body}"
        return out

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"HalfLaurent({self.render()!r})"

    def to_json(self) -> list[list[int]]:
        return [[e, v.numerator, v.denominator] for e, v in sorted(self._c.items())]

    @classmethod
    def from_json(cls, data) -> "HalfLaurent":
        return cls({int(e): Fraction(int(n), int(d)) for e, n, d in data})


def _render_monomial(e: int) -> str:
    if e == 0:
        return "1"
    if e == 2:
        return "q"
    if e % 2 == 0:
        return f"q^({e // 2})"
    return f"q^({e}/2)"


def _coerce(x) -> HalfLaurent:
    return x if isinstance(x, HalfLaurent) else HalfLaurent.const(x)


ZERO = HalfLaurent()
ONE = HalfLaurent.const(1)
Q_HALF = HalfLaurent.monomial(1)
Q = HalfLaurent.monomial(2)


def geometric(doubled_step: int, window: Window) -> HalfLaurent:
    """sum_{k>=0} q^(k*step/2) truncated to the window (the (1-q)^(-1) factor for step 2)."""
    if doubled_step <= 0:
        raise PreconditionError("geometric series needs a positive step")
    lo, hi = window
    return HalfLaurent({e: 1 for e in range(0, hi + 1, doubled_step) if e >= lo})


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined for positive integers")
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


# -- multigraded series ------------------------------------------------------------

def _leq(a, b):
    return all(x <= y for x, y in zip(a, b))


class GradedSeries:
    """Truncated series sum_d c_d T^d with HalfLaurent coefficients, d <= box."""

    __slots__ = ("box", "window", "terms")

    def __init__(self, box: Sequence[int], terms: Mapping | None = None, window: Window = DEFAULT_WINDOW):
        box = tuple(int(b) for b in box)
        if any(b < 0 for b in box):
            raise ConfigurationError("box entries must be nonnegative")
        lo, hi = window
        if lo > hi:
            raise ConfigurationError(f"empty cohomological window {window}")
        self.box = box
        self.window = (int(lo), int(hi))
        self.terms: dict[tuple[int, ...], HalfLaurent] = {}
        for d, c in (terms or {}).items():
            d = tuple(d)
            if len(d) != len(box):
                raise ConfigurationError(f"key {d} does not match box {box}")
            if not _leq(d, box):
                continue
            c = _coerce(c).truncate(self.window)
            if c:
                self.terms[d] = c

    # -- constructors --------------------------------------------------------
    @classmethod
    def one(cls, box, window=DEFAULT_WINDOW):
        return cls(box, {(0,) * len(box): ONE}, window)

    @classmethod
    def zero(cls, box, window=DEFAULT_WINDOW):
        return cls(box, {}, window)

    def like(self, terms) -> "GradedSeries":
        return GradedSeries(self.box, terms, self.window)

    # -- access --------------------------------------------------------------
    def __getitem__(self, d) -> HalfLaurent:
        return self.terms.get(tuple(d), ZERO)

    def keys(self):
        return sorted(self.terms, key=lambda d: (sum(d), d))

    def constant_term(self) -> HalfLaurent:
        return self[(0,) * len(self.box)]

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.box == other.box and self.window == other.window and self.terms == other.terms

    def __repr__(self):
        body = ", ".join(f"{d}: {c}" for d, c in ((d, self.terms[d]) for d in self.keys()))
        return f"GradedSeries(box={self.box}, {{{body}}})"

    def _check_compatible(self, other: "GradedSeries"):
        if self.box != other.box or self.window != other.window:
            raise ConfigurationError(
                f"series truncations differ: box {self.box} vs {other.box}, "
                f"window {self.window} vs {other.window}"
            )

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        self._check_compatible(other)
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms.get(d, ZERO) + c
        return self.like(terms)

    def __neg__(self):
        return self.like({d: -c for d, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "GradedSeries":
        return self.like({d: c * k for d, c in self.terms.items()})

    def map_coefficients(self, fn: Callable[[tuple, HalfLaurent], HalfLaurent]) -> "GradedSeries":
        return self.like({d: fn(d, c) for d, c in self.terms.items()})

    def psi(self, k: int) -> "GradedSeries":
        """Adams operation: q^(1/2) -> q^(k/2), T^d -> T^(kd); terms past the box are dropped."""
        terms = {}
        for d, c in self.terms.items():
            kd = tuple(k * x for x in d)
            if _leq(kd, self.box):
                terms[kd] = c.psi(k)
        return self.like(terms)

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.terms.values())


def series_mul(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    """Cauchy product truncated to the common box and window."""
    a._check_compatible(b)
    box, window = a.box, a.window
    terms: dict[tuple, HalfLaurent] = {}
    for d1, c1 in a.terms.items():
        for d2, c2 in b.terms.items():
            d = tuple(x + y for x, y in zip(d1, d2))
            if not _leq(d, box):
                continue
            prod = c1.mul(c2, window)
            if prod:
                terms[d] = terms.get(d, ZERO) + prod
    return a.like(terms)


def series_exp(f: GradedSeries) -> GradedSeries:
    """Ordinary exponential; f must have zero constant term."""
    zero = (0,) * len(f.box)
    if f[zero]:
        raise PreconditionError("exp needs a series with zero constant term")
    window = f.window
    # E(G) = E(F) G with E multiplying T^d by |d|
    g: dict[tuple, HalfLaurent] = {zero: ONE}
    fterms = [(e, c * sum(e)) for e, c in f.terms.items()]
    for d in box_vectors(f.box):
        acc = ZERO
        for e, ce in fterms:
            rest = tuple(x - y for x, y in zip(d, e))
            if min(rest) < 0:
                continue
            gr = g.get(rest)
            if gr:
                acc = acc + ce.mul(gr, window)
        if acc:
            g[d] = acc / sum(d)
    return f.like(g)


def series_log(g: GradedSeries) -> GradedSeries:
    """Ordinary logarithm; g must have constant term 1."""
    zero = (0,) * len(g.box)
    if g[zero] != ONE:
        raise PreconditionError("log needs a series with constant term 1")
    window = g.window
    f: dict[tuple, HalfLaurent] = {}
    for d in box_vectors(g.box):
        acc = g[d] * sum(d)
        for e, ce in f.items():
            rest = tuple(x - y for x, y in zip(d, e))
            if min(rest) < 0 or not any(rest):
                continue
            gr = g.terms.get(rest)
            if gr:
                acc = acc - (ce * sum(e)).mul(gr, window)
        if acc:
            f[d] = acc / sum(d)
    return g.like(f)


def _max_adams(box) -> int:
    return max(box) if box else 0


def plethystic_exp(f: GradedSeries, check_integral: bool = False) -> GradedSeries:
    """Exp(f) = exp(sum_k psi_k(f)/k) within the box and window."""
    zero = (0,) * len(f.box)
    if f[zero]:
        raise PreconditionError("plethystic exponential needs zero constant term")
    total = GradedSeries.zero(f.box, f.window)
    for k in range(1, _max_adams(f.box) + 1):
        total = total + f.psi(k).scale(Fraction(1, k))
    out = series_exp(total)
    if check_integral and not out.is_integral():
        raise ConsistencyError("plethystic exponential of an integral character is not integral")
    return out


def plethystic_log(g: GradedSeries) -> GradedSeries:
    """Two-sided inverse of plethystic_exp: sum_k mu(k)/k psi_k(log g)."""
    zero = (0,) * len(g.box)
    if g[zero] != ONE:
        raise PreconditionError("plethystic logarithm needs constant term 1")
    lg = series_log(g)
    total = GradedSeries.zero(g.box, g.window)
    for k in range(1, _max_adams(g.box) + 1):
        mu = mobius(k)
        if mu:
            total = total + lg.psi(k).scale(Fraction(mu, k))
    return total


def signed_to_dims(f: HalfLaurent) -> HalfLaurent:
    """Flip the Koszul sign: signed character <-> Poincare polynomial."""
    return HalfLaurent({e: -v if e % 2 else v for e, v in f.items()})


dims_to_signed = signed_to_dims


def symmetric_power_character(f: HalfLaurent, n: int, signed: bool = False) -> HalfLaurent:
    """Character of the n-th graded-symmetric power of a graded vector space.

    By default ``f`` is a Poincare polynomial (nonnegative dimensions, odd
    exponents are odd pieces) and so is the result; ``signed=True`` reads
    and returns Koszul-signed characters instead. Computed from
    sum_n Sym^n u^n = prod_e (1 - q^(e/2) u)^(-c_e) on the signed character,
    which makes odd pieces contribute truncating exterior factors.
    """
    if n < 0:
        raise PreconditionError("symmetric power index must be nonnegative")
    sf = f if signed else dims_to_signed(f)
    poly = [ONE] + [ZERO] * n
    for e, c in sf.items():
        if c.denominator != 1:
            raise PreconditionError(f"character coefficient {c} is not an integer")
        c = int(c)
        factor = [ONE]
        binom = Fraction(1)
        for k in range(1, n + 1):
            binom = binom * (c + k - 1) / k
            factor.append(HalfLaurent.monomial(e * k, binom))
        new = [ZERO] * (n + 1)
        for i, a in enumerate(poly):
            if not a:
                continue
            for j in range(0, n + 1 - i):
                if factor[j]:
                    new[i + j] = new[i + j] + a * factor[j]
        poly = new
    return poly[n] if signed else signed_to_dims(poly[n])


def exp_window_margin(f: GradedSeries) -> Window:
    """A working window wide enough that Exp(f) is exact inside f.window.

    Products of at most |box| factors can push contributions from outside
    the window back in; widening by that much removes the effect.
    """
    lo, hi = f.window
    mins = [c.min_exp() for c in f.terms.values() if c]
    if not mins:
        return f.window
    n = max(sum(f.box), 1)
    neg = -min(0, min(mins))
    return (min(lo, -n * neg), hi + n * neg)
