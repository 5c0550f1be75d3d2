"""Graded free Lie (super)algebras, Serre quotients and root multiplicities.

Characters are Koszul-signed: a basis vector of cohomological degree c in
lattice degree d contributes (-1)^c q^(c/2) T^d, stored as a HalfLaurent at
doubled exponent c. A generator is odd when its cohomological degree is odd.
"""

from __future__ import annotations

import json
from collections import Counter
from functools import reduce
from math import gcd
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError, ResourceLimitError
from .quiver import DimVector, GeneratorIndex, Quiver, box_vectors, cartan_matrix, generator_index, leq
from .series import (
    ONE,
    ZERO,
    GradedSeries,
    HalfLaurent,
    divisors,
    plethystic_exp,
    plethystic_log,
    signed_to_dims,
)

WORD_LIMIT = 200_000


# -- generators --------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    grading: DimVector
    degree: int = 0
    multiplicity: int = 1
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "grading", tuple(int(x) for x in self.grading))
        if not any(self.grading) or any(x < 0 for x in self.grading):
            raise PreconditionError(f"generator grading {self.grading} must be nonzero and nonnegative")
        if self.multiplicity < 0:
            raise PreconditionError("generator multiplicity must be nonnegative")

    @property
    def parity(self) -> int:
        return self.degree % 2


@dataclass(frozen=True)
class Letter:
    """One concrete generator (a copy of a Generator)."""

    index: int
    source: int
    grading: DimVector
    degree: int

    @property
    def parity(self) -> int:
        return self.degree % 2


def _order_key(g: Generator):
    first = next(i for i, x in enumerate(g.grading) if x)
    return (first, sum(g.grading), g.grading, g.degree, g.label)


@dataclass(frozen=True)
class GradedGenerators:
    generators: tuple[Generator, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if gens and len({len(g.grading) for g in gens}) != 1:
            raise PreconditionError("generator gradings have different lengths")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, items: Iterable) -> "GradedGenerators":
        gens = []
        for it in items:
            if isinstance(it, Generator):
                gens.append(it)
            else:
                gens.append(Generator(*it))
        return cls(tuple(gens))

    def letters(self, box: Sequence[int] | None = None) -> list[Letter]:
        """Concrete alphabet in its fixed order, restricted to gradings within box."""
        order = sorted(range(len(self.generators)), key=lambda k: _order_key(self.generators[k]))
        out = []
        for k in order:
            g = self.generators[k]
            if box is not None and not leq(g.grading, box):
                continue
            for _ in range(g.multiplicity):
                out.append(Letter(len(out), k, g.grading, g.degree))
        return out

    def character(self, box: Sequence[int], window) -> GradedSeries:
        terms: dict = {}
        for g in self.generators:
            if leq(g.grading, box) and g.multiplicity:
                mono = HalfLaurent.monomial(g.degree, (-1) ** g.parity * g.multiplicity)
                terms[g.grading] = terms.get(g.grading, ZERO) + mono
        return GradedSeries(box, terms, window)

    def to_json(self) -> list:
        return [[list(g.grading), g.degree, g.multiplicity] for g in self.generators]


# -- graded dimensions ---------------------------------------------------------

@dataclass(frozen=True)
class GradedDims:
    """Signed characters per lattice degree within a box."""

    box: DimVector
    terms: Mapping[DimVector, HalfLaurent] = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(d): c for d, c in self.terms.items() if c and leq(d, self.box)}
        object.__setattr__(self, "box", tuple(self.box))
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def from_series(cls, s: GradedSeries) -> "GradedDims":
        zero = (0,) * len(s.box)
        return cls(s.box, {d: c for d, c in s.terms.items() if d != zero})

    def to_series(self, window) -> GradedSeries:
        return GradedSeries(self.box, self.terms, window)

    def __getitem__(self, d) -> HalfLaurent:
        return self.terms.get(tuple(d), ZERO)

    def dims(self, d) -> dict[int, int]:
        """Cohomological degree -> dimension at lattice degree d."""
        return {e: int(v) for e, v in signed_to_dims(self[d]).items()}

    def total(self, d) -> int:
        return sum(self.dims(d).values())

    def degree0(self, d) -> int:
        return int(self[d].coeff(0))

    def keys(self):
        return list(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GradedDims):
            return NotImplemented
        return self.box == other.box and self.terms == other.terms

    def to_json(self) -> list:
        return [[list(d), [[e, int(v) if v.denominator == 1 else str(v)] for e, v in c.items()]]
                for d, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, box, data) -> "GradedDims":
        return cls(tuple(box), {tuple(d): HalfLaurent({int(e): Fraction(v) for e, v in pairs})
                                for d, pairs in data})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def _window_for(letters: Sequence[Letter], box: Sequence[int]) -> tuple[int, int]:
    length = max(sum(box), 1)
    lo = min([0] + [l.degree for l in letters])
    hi = max([0] + [l.degree for l in letters])
    return (length * lo, length * hi)


def _bucket(counts: Mapping[tuple[DimVector, int], int], box) -> GradedDims:
    terms: dict = {}
    for (d, c), n in counts.items():
        if n:
            terms[d] = terms.get(d, ZERO) + HalfLaurent.monomial(c, (-1) ** (c % 2) * n)
    return GradedDims(tuple(box), terms)


# -- Lyndon words --------------------------------------------------------------

def _fits(g: Sequence[int], box: Sequence[int], max_total: int | None) -> bool:
    return leq(g, box) and (max_total is None or sum(g) <= max_total)


def lyndon_words(letters: Sequence[Letter], box: Sequence[int], limit: int = WORD_LIMIT,
                 max_total: int | None = None) -> list[tuple[int, ...]]:
    """All Lyndon words over the ordered alphabet with total grading <= box.

    Words of each length come from the Fredricksen-Kessler-Maiorana
    prenecklace recursion, pruned as soon as a prefix leaves the box.
    """
    box = tuple(box)
    k = len(letters)
    grads = [l.grading for l in letters]
    out: list[tuple[int, ...]] = []
    max_len = sum(box) if max_total is None else min(sum(box), max_total)
    for n in range(1, max_len + 1):
        a = [0] * (n + 1)
        acc = [(0,) * len(box)] * (n + 2)

        def rec(t: int, p: int):
            if t > n:
                if p == n:
                    out.append(tuple(a[1:]))
                    if len(out) > limit:
                        raise ResourceLimitError(f"more than {limit} Lyndon words in box {box}")
                return
            prev = a[t - p] if t - p >= 1 else 0
            choices = [(prev, p)] + [(j, t) for j in range(prev + 1, k)] if t > 1 else [(j, t) for j in range(k)]
            for j, period in choices:
                g = tuple(x + y for x, y in zip(acc[t - 1], grads[j]))
                if not _fits(g, box, max_total):
                    continue
                a[t] = j
                acc[t] = g
                rec(t + 1, period)

        if k:
            rec(1, 1)
    return out


def _word_data(word: Sequence[int], letters: Sequence[Letter], dim: int) -> tuple[DimVector, int, int]:
    g = [0] * dim
    deg = 0
    for w in word:
        for i, x in enumerate(letters[w].grading):
            g[i] += x
        deg += letters[w].degree
    return tuple(g), deg, deg % 2


def lyndon_basis_counts(letters: Sequence[Letter], box: Sequence[int]) -> Counter:
    """(grading, degree) -> basis size, adding w w for odd Lyndon w (super correction)."""
    dim = len(box)
    counts: Counter = Counter()
    for w in lyndon_words(letters, box):
        g, deg, par = _word_data(w, letters, dim)
        counts[(g, deg)] += 1
        if par:
            g2 = tuple(2 * x for x in g)
            if leq(g2, box):
                counts[(g2, 2 * deg)] += 1
    return counts


def free_lie_dims_lyndon(gens: GradedGenerators, box: Sequence[int]) -> GradedDims:
    letters = gens.letters(box)
    return _bucket(lyndon_basis_counts(letters, box), box)


def free_lie_dims_witt(gens: GradedGenerators, box: Sequence[int]) -> GradedDims:
    """Log of the tensor algebra character 1/(1 - chi_V)."""
    box = tuple(box)
    window = _window_for(gens.letters(box), box)
    chi = gens.character(box, window)
    zero = (0,) * len(box)
    tensor = {zero: ONE}
    for d in box_vectors(box):
        acc = ZERO
        for e, c in chi.terms.items():
            rest = tuple(x - y for x, y in zip(d, e))
            if min(rest) >= 0 and rest in tensor:
                acc = acc + c * tensor[rest]
        if acc:
            tensor[d] = acc
    return GradedDims.from_series(plethystic_log(GradedSeries(box, tensor, window)))


def free_lie_dims(gens: GradedGenerators, box: Sequence[int], method: str = "both") -> GradedDims:
    """Graded dimensions of the free Lie superalgebra on gens within box.

    ``method="both"`` computes the Lyndon count and the Witt-style plethystic
    log and insists that they agree.
    """
    box = tuple(box)
    if method == "lyndon":
        return free_lie_dims_lyndon(gens, box)
    if method == "witt":
        return free_lie_dims_witt(gens, box)
    a = free_lie_dims_lyndon(gens, box)
    b = free_lie_dims_witt(gens, box)
    if a != b:
        from .errors import ConsistencyError

        raise ConsistencyError(f"Lyndon and Witt counts differ: {a.to_json()} vs {b.to_json()}")
    return a


# -- Serre quotients -------------------------------------------------------------

Poly = dict  # word (tuple of letter indices) -> Fraction


def _bracket(u: Poly, pu: int, v: Poly, pv: int) -> Poly:
    """Super commutator uv - (-1)^{|u||v|} vu of homogeneous elements of T(V)."""
    sign = -1 if pu * pv % 2 else 1
    out: dict = {}
    for a, x in u.items():
        for b, y in v.items():
            w = a + b
            out[w] = out.get(w, 0) + x * y
            w2 = b + a
            out[w2] = out.get(w2, 0) - sign * x * y
    return {w: c for w, c in out.items() if c}


class _Echelon:
    """Incremental reduced row echelon basis over Q for sparse vectors."""

    def __init__(self):
        self.rows: list[tuple[tuple, dict]] = []  # (pivot word, row with pivot coeff 1)
        self.pivots: dict = {}

    def reduce(self, v: Poly) -> Poly:
        v = dict(v)
        for piv, row in self.rows:
            c = v.get(piv)
            if c:
                for w, x in row.items():
                    nv = v.get(w, 0) - c * x
                    if nv:
                        v[w] = nv
                    else:
                        v.pop(w, None)
        return v

    def add(self, v: Poly) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        piv = min(v)
        c = Fraction(v[piv])
        row = {w: Fraction(x) / c for w, x in v.items()}
        for k, (p2, r2) in enumerate(self.rows):
            e = r2.get(piv)
            if e:
                for w, x in row.items():
                    nv = r2.get(w, 0) - e * x
                    if nv:
                        r2[w] = nv
                    else:
                        r2.pop(w, None)
        self.rows.append((piv, row))
        self.pivots[piv] = len(self.rows) - 1
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list[Poly]:
        return [row for _, row in self.rows]


def _letter_poly(k: int) -> Poly:
    return {(k,): Fraction(1)}


def serre_relations(letters: Sequence[Letter], form: Sequence[Sequence[int]],
                    real: Sequence[bool]) -> list[tuple[Counter, Poly, int]]:
    """Defining relations as (content, element, parity).

    form and real are indexed by letter. For real g != h: ad(g)^(1-(g,h)) h
    when the exponent is positive; for every pair with (g,h) = 0: [g, h].
    """
    rels = []
    n = len(letters)
    for g in range(n):
        for h in range(n):
            if g == h:
                continue
            if real[g]:
                k = 1 - form[g][h]
                if k <= 0:
                    continue
                elem, par = _letter_poly(h), letters[h].parity
                for _ in range(k):
                    elem = _bracket(_letter_poly(g), 0, elem, par)
                content = Counter({g: k, h: 1})
                rels.append((content, elem, par))
    for g in range(n):
        for h in range(g, n):
            if form[g][h] == 0:
                pg, ph = letters[g].parity, letters[h].parity
                elem = _bracket(_letter_poly(g), pg, _letter_poly(h), ph)
                rels.append((Counter({g: 1}) + Counter({h: 1}), elem, (pg + ph) % 2))
    return rels


def _content_key(c: Counter, n: int) -> tuple[int, ...]:
    return tuple(c.get(k, 0) for k in range(n))


def _contents_in_box(letters: Sequence[Letter], box: Sequence[int],
                     max_total: int | None = None) -> list[tuple[int, ...]]:
    """Letter-count vectors with grading inside the box, by increasing length."""
    n = len(letters)
    out = [(0,) * n]
    frontier = [((0,) * n, (0,) * len(box))]
    seen = {(0,) * n}
    while frontier:
        nxt = []
        for c, g in frontier:
            for k, l in enumerate(letters):
                g2 = tuple(x + y for x, y in zip(g, l.grading))
                if not _fits(g2, box, max_total):
                    continue
                c2 = list(c)
                c2[k] += 1
                c2 = tuple(c2)
                if c2 not in seen:
                    seen.add(c2)
                    out.append(c2)
                    nxt.append((c2, g2))
        frontier = nxt
    return out[1:]


def default_real_flags(gens: GradedGenerators, form: Sequence[Sequence[int]]) -> list[bool]:
    """Real generators: even, self-pairing 2 and grading a unit vector."""
    return [
        form[k][k] == 2 and g.parity == 0 and sum(g.grading) == 1
        for k, g in enumerate(gens.generators)
    ]


def serre_quotient_dims(gens: GradedGenerators, form: Sequence[Sequence[int]], box: Sequence[int],
                        real: Sequence[bool] | None = None, max_total: int | None = None) -> GradedDims:
    """Free Lie algebra on gens modulo the Lie ideal generated by the Serre relations.

    ``form`` (and ``real``) are indexed by the entries of ``gens.generators``;
    copies share their generator's row. The ideal is closed content by
    content: I_c = R_c + sum_g [e_g, I_(c - g)], with exact ranks over Q.
    """
    box = tuple(box)
    letters = gens.letters(box)
    n = len(letters)
    if len(form) != len(gens.generators) or any(len(r) != len(form) for r in form):
        raise PreconditionError("form size does not match the generator list")
    if real is None:
        real = default_real_flags(gens, form)
    lform = [[form[a.source][b.source] for b in letters] for a in letters]
    lreal = [bool(real[a.source]) for a in letters]
    rels: dict[tuple, list[tuple[Poly, int]]] = {}
    for content, elem, par in serre_relations(letters, lform, lreal):
        rels.setdefault(_content_key(content, n), []).append((elem, par))
    lyndon = Counter()
    for w in lyndon_words(letters, box, max_total=max_total):
        lyndon[_content_key(Counter(w), n)] += 1
        if sum(letters[k].parity for k in w) % 2:
            doubled = _content_key(Counter(w + w), n)
            g2 = tuple(2 * x for x in _word_data(w, letters, len(box))[0])
            if _fits(g2, box, max_total):
                lyndon[doubled] += 1
    ideal: dict[tuple, tuple[list[Poly], int]] = {}
    counts: Counter = Counter()
    for c in _contents_in_box(letters, box, max_total):
        ech = _Echelon()
        par = sum(letters[k].parity * m for k, m in enumerate(c)) % 2
        for elem, _ in rels.get(c, []):
            ech.add(elem)
        for k in range(n):
            if c[k] == 0:
                continue
            lower = list(c)
            lower[k] -= 1
            lower = tuple(lower)
            if lower not in ideal:
                continue
            basis, lpar = ideal[lower]
            for v in basis:
                ech.add(_bracket(_letter_poly(k), letters[k].parity, v, lpar))
        if ech.rank:
            ideal[c] = (ech.basis(), par)
        quotient = lyndon.get(c, 0) - ech.rank
        if quotient < 0:
            raise AssertionError(f"ideal larger than the free Lie algebra at content {c}")
        if quotient:
            grading = tuple(sum(letters[k].grading[i] * m for k, m in enumerate(c)) for i in range(len(box)))
            degree = sum(letters[k].degree * m for k, m in enumerate(c))
            counts[(grading, degree)] += quotient
    return _bucket(counts, box)


# -- quivers ---------------------------------------------------------------------

def bozec_generators(q: Quiver, box: Sequence[int]) -> tuple[GradedGenerators, list[list[int]], GeneratorIndex]:
    idx = generator_index(q, box)
    gens = GradedGenerators(tuple(
        Generator(idx.degree(k), 0, 1, f"e({q.vertices[i]},{level})") for k, (i, level) in enumerate(idx.elements)
    ))
    return gens, [list(r) for r in idx.form], idx


def borcherds_bozec_dims(q: Quiver, box: Sequence[int]) -> GradedDims:
    """dim n+ of the Borcherds-Bozec algebra of q within box."""
    box = q.dim(box)
    gens, form, _ = bozec_generators(q, box)
    return serre_quotient_dims(gens, form, box)


def kac_moody_generators(q: Quiver) -> tuple[GradedGenerators, list[list[int]]]:
    cm = cartan_matrix(q)
    gens = GradedGenerators(tuple(Generator(q.unit(i), 0, 1, q.vertices[i]) for i in range(q.n)))
    return gens, cm


def km_root_mult_recursion(q: Quiver, box: Sequence[int], max_total: int | None = None) -> GradedDims:
    """Root multiplicities of the symmetric Kac-Moody algebra of a loop-free quiver.

    Peterson's recursion: with c_b = sum_{k | b} mult(b/k)/k and (b|rho) = ht(b),
    (b | b - 2 rho) c_b = sum_{b' + b'' = b} (b'|b'') c_b' c_b''.
    """
    if not q.is_loop_free():
        raise PreconditionError("the root multiplicity recursion needs a loop-free quiver")
    box = q.dim(box)
    cm = cartan_matrix(q)

    def pair(a, b):
        return sum(a[i] * cm[i][j] * b[j] for i in range(q.n) for j in range(q.n))

    order = [b for b in box_vectors(box) if max_total is None or sum(b) <= max_total]
    mult: dict[DimVector, Fraction] = {}
    c: dict[DimVector, Fraction] = {}
    for b in order:
        ht = sum(b)
        if ht == 1:
            mult[b] = Fraction(1)
            c[b] = Fraction(1)
            continue
        rhs = Fraction(0)
        for b1 in order:
            if sum(b1) >= ht:
                break
            if not leq(b1, b):
                continue
            b2 = tuple(x - y for x, y in zip(b, b1))
            if c.get(b1) and c.get(b2):
                rhs += pair(b1, b2) * c[b1] * c[b2]
        coeff = pair(b, b) - 2 * ht
        lower = sum((mult.get(tuple(x // k for x in b), Fraction(0)) / k
                     for k in divisors(_gcd(b)) if k > 1), Fraction(0))
        if coeff == 0:
            if rhs != 0:
                raise AssertionError(f"inconsistent recursion at {b}")
            mult[b] = Fraction(0)
            c[b] = lower
            continue
        c[b] = rhs / coeff
        mult[b] = c[b] - lower
        if mult[b].denominator != 1 or mult[b] < 0:
            raise AssertionError(f"non-integral multiplicity {mult[b]} at {b}")
    return GradedDims(box, {b: HalfLaurent.const(m) for b, m in mult.items() if m})


def _gcd(v: Sequence[int]) -> int:
    return reduce(gcd, v)


def uea_dims(dims: GradedDims, box: Sequence[int] | None = None, window=None) -> GradedDims:
    """Graded dimensions of the universal enveloping algebra (PBW): Exp of the character."""
    box = tuple(box) if box is not None else dims.box
    for d, c in dims.terms.items():
        if not c.is_integral():
            raise PreconditionError(f"character at {d} is not integral")
        if any(v < 0 for _, v in signed_to_dims(c).items()):
            raise PreconditionError(f"character at {d} has negative dimensions")
    if window is None:
        exps = [e for c in dims.terms.values() for e in c.exponents()] or [0]
        length = max(sum(box), 1)
        window = (length * min(0, min(exps)), length * max(0, max(exps)))
    series = GradedSeries(box, {d: c for d, c in dims.terms.items() if leq(d, box)}, window)
    out = plethystic_exp(series)
    zero = (0,) * len(box)
    return GradedDims(box, {d: c for d, c in out.terms.items() if d != zero})
