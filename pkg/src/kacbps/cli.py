"""Command-line interface.

Exit codes: 0 success, 1 failed check, 2 usage or precondition error,
3 resource limit. Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from .bps import (
    INVERTED,
    PLAIN,
    bps_character,
    coha_character,
    cuspidal_extract,
    zeroth_piece_character,
)
from .errors import ConfigurationError, ConsistencyError, KacBPSError, PreconditionError, ResourceLimitError
from .kac.brute import DEFAULT_CAP
from .kac.cache import KacCache
from .kac.ffield import is_prime
from .kac.hua import hua_kac
from .kac.interpolate import DEFAULT_PRIMES, interpolate_kac
from .kac.nilpotency import NilpotencyClass
from .lie import GradedDims, borcherds_bozec_dims, kac_moody_generators, km_root_mult_recursion, serre_quotient_dims
from .quiver import DimVector, Quiver, box_vectors, nakajima_dim
from .resources import resolve_quiver
from .series import HalfLaurent
from .verify import SUITES, Context, run_verification

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
FORMATS = ("json", "csv", "table")


# -- configuration ----------------------------------------------------------------

def _ints(text: str | None, what: str) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ConfigurationError(f"{what} must be comma-separated integers, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    quiver_path: str | None
    box: tuple[int, ...] | None
    window: tuple[int, int]
    primes: tuple[int, ...]
    cap: int
    fmt: str
    cache_path: str | None
    jobs: int = 1

    def __post_init__(self):
        if self.box is not None and any(b < 0 for b in self.box):
            raise ConfigurationError("box entries must be nonnegative")
        if len(self.window) != 2 or self.window[0] > self.window[1]:
            raise ConfigurationError(f"window {self.window} is empty")
        if len(set(self.primes)) != len(self.primes):
            raise ConfigurationError("primes must be distinct")
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise ConfigurationError(f"not prime: {bad}")
        if self.cap <= 0:
            raise ConfigurationError("cap must be positive")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be at least 1")
        if self.fmt not in FORMATS:
            raise ConfigurationError(f"format must be one of {', '.join(FORMATS)}")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        window = _ints(args.window, "--window") or (-64, 64)
        return cls(
            quiver_path=args.quiver,
            box=_ints(args.box, "--box"),
            window=tuple(window),
            primes=_ints(args.primes, "--primes") or DEFAULT_PRIMES,
            cap=args.cap,
            fmt=args.format,
            cache_path=args.cache,
            jobs=args.jobs,
        )

    def load_quiver(self) -> Quiver:
        if not self.quiver_path:
            raise ConfigurationError("--quiver is required for this command")
        return resolve_quiver(self.quiver_path)

    def box_for(self, q: Quiver) -> DimVector:
        return q.dim(self.box) if self.box is not None else (2,) * q.n


# -- rendering ------------------------------------------------------------------------

def _render_char(c: HalfLaurent, conv: str) -> str:
    return c.render(compact=True, descending=conv == PLAIN)


def _dvec(d: Sequence[int]) -> str:
    return "(" + ",".join(map(str, d)) + ")"


def _rows(values: dict) -> list[list]:
    rows = []
    for d, c in values.items():
        for e, v in c.items():
            rows.append([",".join(map(str, d)), e, int(v) if v.denominator == 1 else str(v)])
    return rows


def _emit(cfg: RunConfig, q: Quiver, conv: str, kind: str, values: dict, extra: dict | None = None,
          table_lines: list[str] | None = None) -> str:
    """Render a map d -> character in the configured format."""
    if cfg.fmt == "json":
        payload = {"quiver": q.to_json(), "convention": conv, "kind": kind,
                   "characters": [[list(d), c.to_json()] for d, c in values.items()]}
        if extra:
            payload.update(extra)
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))
    if cfg.fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# convention: {conv}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["d", "doubled_exponent", "value"])
        writer.writerows(_rows(values))
        return buf.getvalue().rstrip("\n")
    lines = [f"# {kind}  convention: {conv}"]
    if table_lines is not None:
        lines.extend(table_lines)
    else:
        width = max([len(_dvec(d)) for d in values] + [1])
        lines.extend(f"{_dvec(d):<{width}}  {_render_char(c, conv)}" for d, c in values.items())
    return "\n".join(lines)


# -- commands ---------------------------------------------------------------------------

def _cache(cfg: RunConfig) -> KacCache | None:
    return KacCache(cfg.cache_path) if cfg.cache_path else None


def _kac_by(method: str, q: Quiver, d, cfg: RunConfig, cache: KacCache | None):
    hit = cache.get(q, d, "ALL", method) if cache else None
    if hit is not None:
        return hit
    if method == "hua":
        poly = hua_kac(q, d)
    else:
        poly = interpolate_kac(q, d, NilpotencyClass.ALL, "Q", cfg.primes, cfg.cap, cfg.jobs, check_hua=False)
    if cache:
        cache.put(q, d, "ALL", method, poly)
    return poly


def cmd_kac(cfg: RunConfig, args) -> tuple[str, int]:
    q = cfg.load_quiver()
    d = q.dim(_ints(args.dim, "--dim") or ())
    if not any(d):
        raise PreconditionError("--dim must be a nonzero dimension vector")
    cache = _cache(cfg)
    methods = ["hua", "brute"] if args.method == "both" else [args.method]
    polys = {m: _kac_by(m, q, d, cfg, cache) for m in methods}
    if cache:
        cache.save()
    results = list(polys.values())
    if any(p != results[0] for p in results[1:]):
        detail = {m: p.render() for m, p in polys.items()}
        raise ConsistencyError(f"engines disagree at d={list(d)}: {detail}")
    poly = results[0]
    return _single(cfg, q, PLAIN, "kac", d, poly.polynomial, {"method": args.method}), EXIT_OK


def cmd_nilpotent_kac(cfg: RunConfig, args) -> tuple[str, int]:
    q = cfg.load_quiver()
    d = q.dim(_ints(args.dim, "--dim") or ())
    if not any(d):
        raise PreconditionError("--dim must be a nonzero dimension vector")
    cls = NilpotencyClass.parse(args.cls)
    cache = _cache(cfg)
    key = f"{cls.value}@{args.over}"  # shared with kac_polynomials
    poly = cache.get(q, d, key, "brute") if cache else None
    if poly is None:
        poly = interpolate_kac(q, d, cls, args.over, cfg.primes, cfg.cap, cfg.jobs)
        if cache:
            cache.put(q, d, key, "brute", poly)
            cache.save()
    return _single(cfg, q, PLAIN, f"nilpotent-kac {cls.value} over {args.over}", d, poly.polynomial,
                   {"class": cls.value, "over": args.over}), EXIT_OK


def _single(cfg: RunConfig, q: Quiver, conv: str, kind: str, d, poly: HalfLaurent, extra: dict) -> str:
    if cfg.fmt == "table":
        return f"# {kind}  convention: {conv}\n{_render_char(poly, conv)}"
    return _emit(cfg, q, conv, kind, {tuple(d): poly}, dict(extra, d=list(d), rendered=_render_char(poly, conv)))


def cmd_char(cfg: RunConfig, args) -> tuple[str, int]:
    q = cfg.load_quiver()
    box = cfg.box_for(q)
    cache = _cache(cfg)
    engine = dict(primes=cfg.primes, cap=cfg.cap, jobs=cfg.jobs, cache=cache)
    if args.which == "bps":
        chars = bps_character(q, args.cls, box, **engine)
        values, conv = chars.values, chars.convention
    elif args.which == "coha":
        series = coha_character(q, box, cfg.window, twist=args.twist, torus_factor=not args.no_torus, **engine)
        values, conv = dict(series.terms), INVERTED
    else:
        values, conv = dict(zeroth_piece_character(q, box).terms), PLAIN
    if cache:
        cache.save()
    if args.which == "zeroth":
        full = {d: values.get(d, HalfLaurent()) for d in box_vectors(box, include_zero=True)}
    else:
        full = {d: values.get(d, HalfLaurent()) for d in box_vectors(box)}
    shown = full if cfg.fmt == "table" else {d: c for d, c in full.items() if c}
    return _emit(cfg, q, conv, f"char {args.which}", shown, {"box": list(box)}), EXIT_OK


def _dims_output(cfg: RunConfig, q: Quiver, kind: str, dims: GradedDims) -> str:
    return _emit(cfg, q, PLAIN, kind, dict(dims.terms), {"box": list(dims.box)})


def cmd_km_mult(cfg: RunConfig, args) -> tuple[str, int]:
    q = cfg.load_quiver()
    box = cfg.box_for(q)
    rec = km_root_mult_recursion(q, box) if args.method in ("recursion", "both") else None
    pres = None
    if args.method in ("presentation", "both"):
        gens, cm = kac_moody_generators(q)
        pres = serre_quotient_dims(gens, cm, box)
    if rec is not None and pres is not None and rec != pres:
        raise ConsistencyError(f"presentation {pres.to_json()} differs from the recursion {rec.to_json()}")
    return _dims_output(cfg, q, "km-mult", rec if rec is not None else pres), EXIT_OK


def cmd_bozec_dims(cfg: RunConfig, args) -> tuple[str, int]:
    q = cfg.load_quiver()
    return _dims_output(cfg, q, "bozec-dims", borcherds_bozec_dims(q, cfg.box_for(q))), EXIT_OK


def cmd_extract(cfg: RunConfig, args) -> tuple[str, int]:
    q = cfg.load_quiver()
    cache = _cache(cfg)
    report = cuspidal_extract(q, cfg.box_for(q), cfg.window, cls=args.cls, primes=cfg.primes, cap=cfg.cap,
                              jobs=cfg.jobs, cache=cache)
    if cache:
        cache.save()
    conv = report.character.convention
    if cfg.fmt == "json":
        return json.dumps(report.to_json(), sort_keys=True, separators=(",", ":")), EXIT_OK
    if cfg.fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# convention: {conv}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["d", "doubled_exponent", "value", "tag", "nonnegative"])
        for e in report.entries:
            for exp, v in e.residual.items():
                writer.writerow([",".join(map(str, e.d)), exp, int(v), e.tag, str(e.nonnegative).lower()])
        return buf.getvalue().rstrip("\n"), EXIT_OK
    width = max([len(_dvec(e.d)) for e in report.entries] + [1])
    lines = [f"{_dvec(e.d):<{width}}  {_render_char(e.residual, conv):<16}  {e.tag}"
             f"{'' if e.nonnegative else '  NEGATIVE'}" for e in report.entries]
    lines.append(f"all residuals nonnegative: {'yes' if report.nonnegative else 'no'}")
    return _emit(cfg, q, conv, "extract", {}, table_lines=lines), EXIT_OK


def cmd_nakajima_dim(cfg: RunConfig, args) -> tuple[str, int]:
    q = cfg.load_quiver()
    f = q.dim(_ints(args.framing, "--framing") or ())
    d = q.dim(_ints(args.dim, "--dim") or ())
    value = nakajima_dim(q, f, d)
    if cfg.fmt == "json":
        return json.dumps({"quiver": q.to_json(), "framing": list(f), "d": list(d), "dimension": value},
                          sort_keys=True, separators=(",", ":")), EXIT_OK
    if cfg.fmt == "csv":
        return f"framing,d,dimension\n\"{','.join(map(str, f))}\",\"{','.join(map(str, d))}\",{value}", EXIT_OK
    return str(value), EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> tuple[str, int]:
    limit = max(cfg.box) if cfg.box else None
    ctx = Context(limit=limit, cap=cfg.cap, jobs=cfg.jobs, primes=cfg.primes)
    outcome = run_verification(args.suite, ctx)
    code = EXIT_OK if outcome.passed else EXIT_CHECK
    if cfg.fmt == "json":
        return json.dumps(outcome.to_json(), sort_keys=True, separators=(",", ":")), code
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "criterion", "passed", "elapsed", "expected", "computed"])
        for c in outcome.checks:
            writer.writerow([c.name, c.criterion or "", str(c.passed).lower(), f"{c.elapsed:.3f}", c.expected, c.computed])
        return buf.getvalue().rstrip("\n"), code
    return outcome.table(), code


COMMANDS = {
    "kac": cmd_kac,
    "nilpotent-kac": cmd_nilpotent_kac,
    "char": cmd_char,
    "km-mult": cmd_km_mult,
    "bozec-dims": cmd_bozec_dims,
    "extract": cmd_extract,
    "nakajima-dim": cmd_nakajima_dim,
    "verify": cmd_verify,
}


# -- argument parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--quiver", help="quiver JSON file, or a bundled name such as kronecker")
    g.add_argument("--dim", help="dimension vector, e.g. 1,1")
    g.add_argument("--box", help="box of dimension vectors, e.g. 2,2")
    g.add_argument("--window", help="cohomological window LO,HI (doubled exponents)")
    g.add_argument("--primes", help="primes used for counting, e.g. 2,3,5,7")
    g.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap")
    g.add_argument("--format", default="table", choices=FORMATS)
    g.add_argument("--cache", help="JSON cache of Kac polynomials")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for enumeration")

    parser = argparse.ArgumentParser(prog="kacbps", description="Kac polynomials and BPS characters of quivers.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("kac", parents=[common], help="Kac polynomial a_d(q)")
    p.add_argument("--method", choices=("hua", "brute", "both"), default="hua")
    p = sub.add_parser("nilpotent-kac", parents=[common], help="nilpotent Kac polynomial")
    p.add_argument("--class", dest="cls", default="SSN", type=str.upper, choices=("N", "SN", "SSN"))
    p.add_argument("--over", choices=("Q", "Qbar"), default="Q")
    p = sub.add_parser("char", parents=[common], help="BPS, CoHA or zeroth-piece characters")
    p.add_argument("--which", choices=("bps", "coha", "zeroth"), default="bps")
    p.add_argument("--class", dest="cls", default="ALL", type=str.upper, choices=("ALL", "N", "SN", "SSN"))
    p.add_argument("--twist", action="store_true", help="apply the L^(-chi(d,d)) normalisation")
    p.add_argument("--no-torus", action="store_true", help="drop the (1-q)^(-1) factor")
    p = sub.add_parser("km-mult", parents=[common], help="Kac-Moody root multiplicities")
    p.add_argument("--method", choices=("recursion", "presentation", "both"), default="recursion")
    sub.add_parser("bozec-dims", parents=[common], help="dimensions of the Borcherds-Bozec algebra")
    p = sub.add_parser("extract", parents=[common], help="cuspidal generator extraction")
    p.add_argument("--class", dest="cls", default="ALL", type=str.upper, choices=("ALL", "N", "SN", "SSN"))
    p = sub.add_parser("nakajima-dim", parents=[common], help="dimension of a Nakajima quiver variety")
    p.add_argument("--framing", required=True, help="framing vector, e.g. 1,0")
    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    return parser


def _error(exc: BaseException, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _join_negative_values(argv: list[str]) -> list[str]:
    """Let "--window -4,6" through argparse, which would read -4,6 as an option."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--window", "--dim", "--box"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2].isdigit():
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = RunConfig.from_args(args)
        text, code = COMMANDS[args.command](cfg, args)
    except PreconditionError as exc:
        return _error(exc, EXIT_USAGE)
    except ResourceLimitError as exc:
        return _error(exc, EXIT_RESOURCE)
    except ConsistencyError as exc:
        return _error(exc, EXIT_CHECK)
    except KacBPSError as exc:
        return _error(exc, EXIT_CHECK)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
