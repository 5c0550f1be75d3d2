"""Quivers, dimension vectors and the bilinear forms on them.

Vertices are strings; everything array-backed is indexed by declaration
order. Dimension vectors are plain tuples of nonnegative ints in that order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .errors import DimensionMismatchError, PreconditionError, QuiverParseError

DimVector = tuple[int, ...]

# arrow kinds: an arrow of Q, its reverse in the double, or a tripling loop
ARROW, STAR, OMEGA = "a", "a*", "omega"


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str], ...]
    kinds: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple((str(s), str(t)) for s, t in self.arrows))
        if not self.kinds:
            object.__setattr__(self, "kinds", (ARROW,) * len(self.arrows))
        else:
            object.__setattr__(self, "kinds", tuple(self.kinds))
        if len(set(self.vertices)) != len(self.vertices):
            raise PreconditionError(f"duplicate vertex identifiers in {self.vertices}")
        if len(self.kinds) != len(self.arrows):
            raise PreconditionError("one kind per arrow required")
        known = set(self.vertices)
        for pos, (s, t) in enumerate(self.arrows):
            if s not in known or t not in known:
                raise PreconditionError(f"arrow {pos} ({s}->{t}) has an undeclared endpoint")

    # -- indices ---------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        return self.vertices.index(v)

    @property
    def arrow_indices(self) -> tuple[tuple[int, int], ...]:
        pos = {v: k for k, v in enumerate(self.vertices)}
        return tuple((pos[s], pos[t]) for s, t in self.arrows)

    def loops_at(self, i: int) -> int:
        return sum(1 for s, t in self.arrow_indices if s == i and t == i)

    def arrows_between(self, i: int, j: int) -> int:
        """Edges of the underlying graph joining i and j (either direction)."""
        return sum(1 for s, t in self.arrow_indices if {s, t} == {i, j}) if i != j else self.loops_at(i)

    # -- classification ----------------------------------------------------
    def vertex_class(self, i: int) -> str:
        loops = self.loops_at(i)
        return "real" if loops == 0 else "isotropic" if loops == 1 else "hyperbolic"

    @property
    def real_vertices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.loops_at(i) == 0)

    @property
    def isotropic_vertices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.loops_at(i) == 1)

    @property
    def hyperbolic_vertices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.loops_at(i) >= 2)

    @property
    def imaginary_vertices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.loops_at(i) >= 1)

    def is_loop_free(self) -> bool:
        return all(s != t for s, t in self.arrow_indices)

    # -- dimension vectors -------------------------------------------------
    def dim(self, d: Iterable[int]) -> DimVector:
        d = tuple(int(x) for x in d)
        if len(d) != self.n:
            raise DimensionMismatchError(
                f"dimension vector {d} has {len(d)} entries, quiver has {self.n} vertices"
            )
        if any(x < 0 for x in d):
            raise DimensionMismatchError(f"dimension vector {d} has negative entries")
        return d

    def unit(self, i: int) -> DimVector:
        return tuple(1 if k == i else 0 for k in range(self.n))

    def zero(self) -> DimVector:
        return (0,) * self.n

    # -- serialisation -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"src": s, "tgt": t} for s, t in self.arrows],
        }

    def canonical_hash(self) -> str:
        payload = json.dumps(
            {"v": list(self.vertices), "a": [list(a) for a in self.arrows], "k": list(self.kinds)},
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def quiver_from_json(data: dict | str) -> Quiver:
    """Build a quiver from the JSON wire format; reject bad endpoints by position."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise QuiverParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict) or "vertices" not in data:
        raise QuiverParseError("quiver JSON needs a 'vertices' list")
    vertices = [str(v) for v in data["vertices"]]
    if len(set(vertices)) != len(vertices):
        raise QuiverParseError("duplicate vertex identifiers")
    known = set(vertices)
    arrows = []
    for pos, a in enumerate(data.get("arrows", [])):
        try:
            s, t = str(a["src"]), str(a["tgt"])
        except (KeyError, TypeError):
            raise QuiverParseError(f"arrows[{pos}]: expected an object with 'src' and 'tgt'")
        for role, v in (("src", s), ("tgt", t)):
            if v not in known:
                raise QuiverParseError(f"arrows[{pos}].{role}: unknown vertex {v!r}")
        arrows.append((s, t))
    return Quiver(tuple(vertices), tuple(arrows))


def load_quiver(path: str | Path) -> Quiver:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise QuiverParseError(f"cannot read quiver file {path}: {exc}")
    return quiver_from_json(text)


# -- forms -----------------------------------------------------------------

def _check(q: Quiver, *ds: Sequence[int]) -> list[DimVector]:
    return [q.dim(d) for d in ds]


def euler_form(q: Quiver, d1: Sequence[int], d2: Sequence[int]) -> int:
    d1, d2 = _check(q, d1, d2)
    value = sum(a * b for a, b in zip(d1, d2))
    for s, t in q.arrow_indices:
        value -= d1[s] * d2[t]
    return value


def symmetrized_form(q: Quiver, d1: Sequence[int], d2: Sequence[int]) -> int:
    return euler_form(q, d1, d2) + euler_form(q, d2, d1)


def cartan_matrix(q: Quiver) -> list[list[int]]:
    """The symmetrized form on unit vectors: 2 - 2*loops on the diagonal."""
    return [[symmetrized_form(q, q.unit(i), q.unit(j)) for j in range(q.n)] for i in range(q.n)]


def double(q: Quiver) -> Quiver:
    """Append a reversed arrow a* for every arrow a; a* sits at position k + |Q_1|."""
    rev = tuple((t, s) for s, t in q.arrows)
    return Quiver(q.vertices, q.arrows + rev, (ARROW,) * len(q.arrows) + (STAR,) * len(rev))


def triple(q: Quiver) -> Quiver:
    qb = double(q)
    loops = tuple((v, v) for v in q.vertices)
    return Quiver(q.vertices, qb.arrows + loops, qb.kinds + (OMEGA,) * len(loops))


def reorient(q: Quiver, flip: Iterable[int]) -> Quiver:
    """Reverse the arrows at the given positions."""
    flip = set(flip)
    arrows = tuple((t, s) if k in flip else (s, t) for k, (s, t) in enumerate(q.arrows))
    return Quiver(q.vertices, arrows, q.kinds)


def real_subquiver(q: Quiver) -> Quiver:
    keep = [q.vertices[i] for i in q.real_vertices]
    ks = set(keep)
    arrows = tuple((s, t) for s, t in q.arrows if s in ks and t in ks)
    return Quiver(tuple(keep), arrows)


def restrict_dim(q: Quiver, sub: Quiver, d: Sequence[int]) -> DimVector | None:
    """Restrict d to a full subquiver; None if d is supported off it."""
    d = q.dim(d)
    keep = set(sub.vertices)
    if any(x and q.vertices[i] not in keep for i, x in enumerate(d)):
        return None
    return tuple(d[q.index(v)] for v in sub.vertices)


# -- slopes ------------------------------------------------------------------

def slope(zeta: Sequence, d: Sequence[int]) -> Fraction:
    d = tuple(d)
    if len(zeta) != len(d):
        raise DimensionMismatchError("stability condition and dimension vector differ in length")
    total = sum(d)
    if total == 0:
        raise PreconditionError("slope of the zero dimension vector is undefined")
    return sum((Fraction(z) * x for z, x in zip(zeta, d)), Fraction(0)) / total


def slope_sublattice(zeta: Sequence, theta) -> Callable[[Sequence[int]], bool]:
    theta = Fraction(theta)

    def accepts(d: Sequence[int]) -> bool:
        return sum(d) == 0 or slope(zeta, d) == theta

    return accepts


# -- Nakajima varieties ------------------------------------------------------

def nakajima_dim(q: Quiver, f: Sequence[int], d: Sequence[int]) -> int:
    f, d = _check(q, f, d)
    return 2 * sum(a * b for a, b in zip(f, d)) - 2 * euler_form(q, d, d)


def lagrangian_half_dim(q: Quiver, f: Sequence[int], d: Sequence[int]) -> int:
    return nakajima_dim(q, f, d) // 2


# -- Borcherds-Bozec index set -----------------------------------------------

@dataclass(frozen=True)
class GeneratorIndex:
    """Truncated I_infinity: (vertex, level) pairs with level 1 at real vertices."""

    quiver: Quiver
    elements: tuple[tuple[int, int], ...]
    form: tuple[tuple[int, ...], ...]

    def degree(self, k: int) -> DimVector:
        i, level = self.elements[k]
        return tuple(level if j == i else 0 for j in range(self.quiver.n))

    def is_real(self, k: int) -> bool:
        return self.quiver.loops_at(self.elements[k][0]) == 0


def generator_index(q: Quiver, box: Sequence[int]) -> GeneratorIndex:
    box = q.dim(box)
    elems = []
    for i in range(q.n):
        if box[i] == 0:
            continue
        levels = [1] if q.loops_at(i) == 0 else range(1, box[i] + 1)
        elems.extend((i, n) for n in levels)
    cm = cartan_matrix(q)
    form = tuple(tuple(n * m * cm[i][j] for (j, m) in elems) for (i, n) in elems)
    return GeneratorIndex(q, tuple(elems), form)


# -- dimension-vector utilities ----------------------------------------------

def box_vectors(box: Sequence[int], include_zero: bool = False) -> Iterator[DimVector]:
    """All d <= box, ordered by total size then lexicographically."""
    import itertools

    box = tuple(box)
    allv = list(itertools.product(*(range(b + 1) for b in box)))
    allv.sort(key=lambda v: (sum(v), v))
    for v in allv:
        if include_zero or any(v):
            yield tuple(v)


def vectors_with_total(n_vertices: int, total: int) -> Iterator[DimVector]:
    import itertools

    for v in itertools.product(range(total + 1), repeat=n_vertices):
        if sum(v) == total:
            yield tuple(v)


def add(a: Sequence[int], b: Sequence[int]) -> DimVector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> DimVector:
    return tuple(x - y for x, y in zip(a, b))


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))
