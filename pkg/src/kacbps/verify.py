"""Named end-to-end checks binding the engines together.

Each check records what was expected, what was computed and how long it
took; a failing or crashing check never stops the others. Checks tied to
an acceptance criterion carry its number.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .bps import (
    REAL_SIMPLE,
    ISOTROPIC,
    BPSCharacter,
    affine_bps_character,
    bps_character,
    coha_character,
    coha_coefficient_by_symmetric_powers,
    cuspidal_extract,
    serre_vanishing_suite,
    zeroth_piece_character,
)
from .kac.brute import DEFAULT_CAP, brute_count_abs_indec, census
from .kac.hua import hua_kac_box
from .kac.interpolate import DEFAULT_PRIMES, galois_inversion_terms, interpolate_kac
from .kac.nilpotency import NilpotencyClass
from .lie import (
    Generator,
    GradedGenerators,
    borcherds_bozec_dims,
    free_lie_dims_lyndon,
    free_lie_dims_witt,
    kac_moody_generators,
    km_root_mult_recursion,
    serre_quotient_dims,
)
from .quiver import Quiver, box_vectors, euler_form, reorient, symmetrized_form
from .resources import CORPUS, corpus_quiver
from .series import GradedSeries, HalfLaurent, plethystic_exp, plethystic_log

SUITES = ("all", "kac", "lie", "bps")
LOOP_FREE = ("a2", "a3", "kronecker", "affine_a2")


@dataclass
class Check:
    name: str
    criterion: int | None
    passed: bool
    expected: str
    computed: str
    elapsed: float
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "criterion": self.criterion, "passed": self.passed,
                "expected": self.expected, "computed": self.computed,
                "elapsed": round(self.elapsed, 3), "detail": self.detail}


@dataclass
class VerificationOutcome:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def by_criterion(self) -> dict[int, bool]:
        out: dict[int, bool] = {}
        for c in self.checks:
            if c.criterion is not None:
                out[c.criterion] = out.get(c.criterion, True) and c.passed
        return dict(sorted(out.items()))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}

    def table(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  result  seconds  expected | computed"]
        for c in self.checks:
            verdict = "pass" if c.passed else "FAIL"
            line = f"{c.name:<{width}}  {verdict:<6}  {c.elapsed:7.2f}  {c.expected} | {c.computed}"
            if c.detail and not c.passed:
                line += f"  ({c.detail})"
            lines.append(line)
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


@dataclass
class Context:
    limit: int | None = None
    cap: int = DEFAULT_CAP
    jobs: int = 1
    primes: Sequence[int] = DEFAULT_PRIMES
    seed: int = 0

    def clip(self, box: Sequence[int]) -> tuple[int, ...]:
        if self.limit is None:
            return tuple(box)
        return tuple(min(b, self.limit) for b in box)

    def dims(self, n: int, total: int):
        """Nonzero d with |d| <= total, inside the per-vertex limit."""
        return [d for d in box_vectors(self.clip((total,) * n)) if sum(d) <= total]


Outcome = tuple[bool, object, object]


def _run(name: str, criterion: int | None, fn: Callable[[], Outcome]) -> Check:
    start = time.perf_counter()
    try:
        ok, expected, computed = fn()
        detail = ""
    except Exception as exc:  # a crashing check is a failed check
        ok, expected, computed = False, "", ""
        detail = f"{type(exc).__name__}: {exc}"
    return Check(name, criterion, bool(ok), str(expected), str(computed), time.perf_counter() - start, detail)


# -- kac checks ---------------------------------------------------------------

def _kac_oracle(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    dims = ctx.dims(q.n, 3)
    hua = hua_kac_box(q, ctx.clip((3,) * q.n))
    expected, computed = [], []
    for d in dims:
        for p in (2, 3):
            expected.append(hua[d](p))
            computed.append(brute_count_abs_indec(q, d, p, cap=ctx.cap, jobs=ctx.jobs))
    return expected == computed, expected, computed


def _serre_vanishing(name: str, d) -> Outcome:
    results = serre_vanishing_suite(corpus_quiver(name))
    hit = dict(results)
    return hit.get(tuple(d)) is True and all(ok for _, ok in results), f"{tuple(d)} vanishes", results


def _hausel(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    dims = ctx.dims(q.n, 6)
    hua = hua_kac_box(q, ctx.clip((6,) * q.n))
    km = km_root_mult_recursion(q, ctx.clip((6,) * q.n), max_total=6)
    expected = [km.degree0(d) for d in dims]
    computed = [hua[d].constant_term() for d in dims]
    return expected == computed, expected, computed


def _galois(name: str, d, p: int, ctx: Context) -> Outcome:
    lhs, rhs = galois_inversion_terms(corpus_quiver(name), d, p, ctx.cap, ctx.jobs)
    return lhs == rhs, rhs, lhs


def _orientation(ctx: Context) -> Outcome:
    q = corpus_quiver("a2")
    box = ctx.clip((3, 3))
    a = {d: str(p) for d, p in hua_kac_box(q, box).items()}
    b = {d: str(p) for d, p in hua_kac_box(reorient(q, [0]), box).items()}
    return a == b, a, b


def _jobs_determinism(ctx: Context) -> Outcome:
    cases = [("kronecker", (2, 2), 3), ("a2_loop", (1, 2), 3)]
    one, four = [], []
    for name, d, p in cases:
        q = corpus_quiver(name)
        d = ctx.clip(d)
        one.append(census(q, d, p, cap=ctx.cap, jobs=1))
        four.append(census(q, d, p, cap=ctx.cap, jobs=4))
    return one == four, one, four


# -- lie checks ------------------------------------------------------------------

def _presentation(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    box = ctx.clip((5,) * q.n)
    gens, cm = kac_moody_generators(q)
    a = serre_quotient_dims(gens, cm, box, max_total=5)
    b = km_root_mult_recursion(q, box, max_total=5)
    return a == b, b.to_json(), a.to_json()


def _random_series(rng: random.Random) -> GradedSeries:
    n = rng.randint(1, 2)
    box = tuple(rng.randint(1, 3) for _ in range(n))
    terms = {}
    for d in box_vectors(box):
        if rng.random() < 0.6:
            terms[d] = HalfLaurent({rng.randint(0, 6): rng.randint(-3, 3) for _ in range(rng.randint(1, 3))})
    return GradedSeries(box, terms, (-4, 16))


def _exp_log(ctx: Context, count: int = 100) -> Outcome:
    rng = random.Random(ctx.seed)
    bad = []
    for k in range(count):
        f = _random_series(rng)
        if plethystic_log(plethystic_exp(f)) != f:
            bad.append(k)
    return not bad, f"{count} round trips", f"failures at {bad}" if bad else f"{count} round trips"


def _random_generators(rng: random.Random) -> GradedGenerators:
    n = rng.randint(1, 2)
    gens = []
    for _ in range(rng.randint(1, 3)):
        grading = tuple(rng.randint(0, 1) for _ in range(n))
        if not any(grading):
            grading = (1,) + (0,) * (n - 1)
        gens.append(Generator(grading, rng.randint(-2, 2), rng.randint(1, 2)))
    return GradedGenerators(tuple(gens))


def _lyndon_witt(ctx: Context, count: int = 20) -> Outcome:
    rng = random.Random(ctx.seed + 1)
    bad = []
    for k in range(count):
        gens = _random_generators(rng)
        box = (3,) * len(gens.generators[0].grading)
        if free_lie_dims_lyndon(gens, box) != free_lie_dims_witt(gens, box):
            bad.append(k)
    return not bad, f"{count} agreements", f"mismatches at {bad}" if bad else f"{count} agreements"


def _forms(ctx: Context, count: int = 50) -> Outcome:
    rng = random.Random(ctx.seed + 2)
    bad = 0
    for _ in range(count):
        n = rng.randint(1, 4)
        verts = tuple(str(i) for i in range(n))
        arrows = tuple((rng.choice(verts), rng.choice(verts)) for _ in range(rng.randint(0, 5)))
        q = Quiver(verts, arrows)
        a, b, c = ([rng.randint(0, 4) for _ in range(n)] for _ in range(3))
        s, t = rng.randint(0, 3), rng.randint(0, 3)
        mix = [s * x + t * y for x, y in zip(a, b)]
        if euler_form(q, mix, c) != s * euler_form(q, a, c) + t * euler_form(q, b, c):
            bad += 1
        if euler_form(q, c, mix) != s * euler_form(q, c, a) + t * euler_form(q, c, b):
            bad += 1
        if symmetrized_form(q, a, a) % 2:
            bad += 1
    return bad == 0, "bilinear and even", f"{bad} violations"


# -- bps checks -------------------------------------------------------------------

def _affine(ctx: Context, name: str, box) -> Outcome:
    q = corpus_quiver(name)
    box = ctx.clip(box)
    closed = affine_bps_character(q, box).character
    direct = bps_character(q, NilpotencyClass.ALL, box)
    return closed == direct, closed.to_dims().to_json(), direct.to_dims().to_json()


def _restrict(chars: BPSCharacter, total: int) -> BPSCharacter:
    return BPSCharacter(chars.quiver, chars.cls, chars.box,
                        {d: c for d, c in chars.values.items() if sum(d) <= total})


def _pbw(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    window = (-10, 10)
    box = ctx.clip((3,) * q.n)
    chars = _restrict(bps_character(q, NilpotencyClass.ALL, box), 3)
    series = coha_character(q, box, window, bps=chars)
    expected, computed = [], []
    for d in ctx.dims(q.n, 3):
        sub = BPSCharacter(q, chars.cls, d, {e: c for e, c in chars.values.items() if all(x <= y for x, y in zip(e, d))})
        expected.append(str(series[d]))
        computed.append(str(coha_coefficient_by_symmetric_powers(q, d, window, bps=sub)))
    return expected == computed, expected, computed


def _bozec_vs_nilpotent(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    top = ctx.clip((3,))[0]
    bb = borcherds_bozec_dims(q, (top,))
    expected = [bb.degree0((n,)) for n in range(1, top + 1)]
    computed = [interpolate_kac(q, (n,), NilpotencyClass.SSN, "Q", ctx.primes, ctx.cap, ctx.jobs).constant_term()
                for n in range(1, top + 1)]
    return expected == computed, expected, computed


def _kronecker_extraction(ctx: Context) -> Outcome:
    q = corpus_quiver("kronecker")
    box = ctx.clip((4, 4))
    report = cuspidal_extract(q, box)
    line = HalfLaurent.monomial(-2)
    expected = [((0, 1), "1", REAL_SIMPLE), ((1, 0), "1", REAL_SIMPLE)]
    expected += [((n, n), str(line), ISOTROPIC) for n in range(1, min(box) + 1)]
    computed = [(e.d, str(e.residual), e.tag) for e in report.entries]
    return sorted(expected) == sorted(computed) and report.nonnegative, expected, computed


def _loop_free_extraction(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    report = cuspidal_extract(q, ctx.clip((3,) * q.n if q.n < 3 else (2,) * q.n))
    found = sorted(e.d for e in report.entries)
    simples = sorted(q.unit(i) for i in range(q.n))
    return found == simples, simples, found


def _zeroth(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    box = ctx.clip((3,) * q.n)
    chars = _restrict(bps_character(q, NilpotencyClass.ALL, box), 3)
    pbw = coha_character(q, box, (-20, 20), bps=chars, torus_factor=False)
    zeroth = zeroth_piece_character(q, box)
    dims = ctx.dims(q.n, 3)
    expected = [zeroth.degree0(d) for d in dims]
    computed = [int(pbw[d].coeff(0)) for d in dims]
    return expected == computed, expected, computed


def _purity(ctx: Context, name: str) -> Outcome:
    q = corpus_quiver(name)
    chars = bps_character(q, NilpotencyClass.ALL, ctx.clip((3,) * q.n))
    bad = [d for d, c in chars.values.items() if sum(d) <= 3 and any(e > 0 or v < 0 for e, v in c.items())]
    return not bad, "nonnegative, nonpositive exponents", f"violations at {bad}" if bad else "ok"


# -- suites ---------------------------------------------------------------------------

def _kac_checks(ctx: Context):
    for name in CORPUS:
        yield f"C1 kac-oracle {name}", 1, lambda name=name: _kac_oracle(ctx, name)
    yield "C3 serre-vanishing a2", 3, lambda: _serre_vanishing("a2", (2, 1))
    yield "C3 serre-vanishing kronecker", 3, lambda: _serre_vanishing("kronecker", (3, 1))
    for name in LOOP_FREE:
        yield f"C4 constant-term {name}", 4, lambda name=name: _hausel(ctx, name)
    for name, d, p in (("jordan", (2,), 2), ("a2", (2, 2), 2), ("kronecker", (2, 2), 2)):
        yield f"galois-inversion {name} {d} p={p}", None, lambda name=name, d=d, p=p: _galois(name, ctx.clip(d), p, ctx)
    yield "C9 orientation a2", 9, lambda: _orientation(ctx)
    yield "C9 jobs-determinism", 9, lambda: _jobs_determinism(ctx)


def _lie_checks(ctx: Context):
    for name in LOOP_FREE:
        yield f"C5 presentation {name}", 5, lambda name=name: _presentation(ctx, name)
    yield "C9 exp-log round trip", 9, lambda: _exp_log(ctx)
    yield "C9 lyndon-witt", 9, lambda: _lyndon_witt(ctx)
    yield "C9 forms", 9, lambda: _forms(ctx)


def _bps_checks(ctx: Context):
    yield "C2 affine kronecker", 2, lambda: _affine(ctx, "kronecker", (3, 3))
    yield "C2 affine affine_a2", 2, lambda: _affine(ctx, "affine_a2", (2, 2, 2))
    for name in CORPUS:
        yield f"C6 pbw {name}", 6, lambda name=name: _pbw(ctx, name)
    for name in ("jordan", "two_loop"):
        yield f"C7 bozec-vs-ssn {name}", 7, lambda name=name: _bozec_vs_nilpotent(ctx, name)
    yield "C8 extraction kronecker", 8, lambda: _kronecker_extraction(ctx)
    for name in ("a2", "a3"):
        yield f"extraction loop-free {name}", None, lambda name=name: _loop_free_extraction(ctx, name)
    for name in LOOP_FREE:
        yield f"zeroth-piece {name}", None, lambda name=name: _zeroth(ctx, name)
    for name in CORPUS:
        yield f"purity {name}", None, lambda name=name: _purity(ctx, name)


def checks_for(suite: str, ctx: Context):
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    groups = {"kac": _kac_checks, "lie": _lie_checks, "bps": _bps_checks}
    names = list(groups) if suite == "all" else [suite]
    return list(itertools.chain.from_iterable(groups[g](ctx) for g in names))


def run_verification(suite: str = "all", ctx: Context | None = None,
                     progress: Callable[[Check], None] | None = None) -> VerificationOutcome:
    ctx = ctx or Context()
    outcome = VerificationOutcome()
    for name, criterion, fn in checks_for(suite, ctx):
        check = _run(name, criterion, fn)
        outcome.checks.append(check)
        if progress:
            progress(check)
    return outcome
