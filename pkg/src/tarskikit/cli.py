"""Command-line front end.  Reports go to stdout as JSON, diagnostics to stderr.

Exit codes: 0 on pass, 1 on a failed check, 2 on usage or resource errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterator, Sequence

from .absorption import (
    AvoidanceError,
    CirclePoint,
    ball_minus_origin_cert,
    ball_origin_absorber,
    build_absorber,
    find_avoiding_rotation,
    pythagorean_rotations,
)
from .actions import StabilizerError
from .doubling import (
    DEFAULT_BASE,
    EXPORT_FORMATS,
    export_cloud,
    orbit_cloud,
    orbit_double,
    strong_form_plan,
    validate_plan,
)
from .equideco import bsb_combine, random_piecewise_cert, verify
from .freegroup import verify_group_doubling
from .report import MAX_WORDS_ENV, SCHEMA, ResourceLimitError, TarskiError, VerificationError
from .rotact import SphereTriple, certify_freeness

PASS, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _rational(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _triple(text: str) -> SphereTriple:
    try:
        t = SphereTriple.parse(text)
    except (ValueError, TarskiError):
        raise argparse.ArgumentTypeError(f"expected a,b,c,k integers, got {text!r}") from None
    if not t.on_sphere():
        raise argparse.ArgumentTypeError(f"{text} is not on the unit sphere (a^2 + 2b^2 + c^2 != 9^k)")
    return t


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tarskikit", description="Exact, depth-bounded certificates for paradoxical decompositions.")
    p.add_argument("--max-words", type=_positive, help=f"resource cap on enumerations (also ${MAX_WORDS_ENV})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("certify-freeness", help="check no short word in the two rotations is the identity")
    s.add_argument("--depth", type=_positive, required=True)

    s = sub.add_parser("double-group", help="verify the doubling certificates of the free group")
    s.add_argument("--depth", type=_nonneg, required=True)

    s = sub.add_parser("double-orbit", help="double the orbit of a point on the sphere")
    s.add_argument("--depth", type=_positive, required=True)
    s.add_argument("--base", type=_triple, default=DEFAULT_BASE, help="a,b,c,k for [a, b*sqrt2, c]/3^k")
    s.add_argument("--out", type=Path, help="write the orbit cloud here")
    s.add_argument("--format", choices=EXPORT_FORMATS, help="cloud format; without --out it goes to stdout")

    s = sub.add_parser("bsb-demo", help="combine two random finite injections")
    s.add_argument("--size", type=_positive, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pieces", type=_positive, default=6, help="max pieces per injection")

    s = sub.add_parser("absorb-circle", help="absorb a finite set of rational circle points")
    s.add_argument("--points", type=Path, required=True, help='JSON list of ["x", "y"] rationals')
    s.add_argument("--horizon", type=_positive, required=True, help="avoidance is checked for n <= horizon")
    s.add_argument("--absorber-depth", type=_nonneg, default=100, help="generations to materialize")
    s.add_argument("--pool", type=_positive, default=8, help="candidate rotations to try")

    s = sub.add_parser("absorb-ball", help="absorb the centre of the ball")
    s.add_argument("--horizon", type=_positive, required=True)

    s = sub.add_parser("plan-strong-form", help="derivation plan for two bounded bodies")
    s.add_argument("--rq", type=_rational, required=True, help="inner radius of Q")
    s.add_argument("--RQ", type=_rational, required=True, help="outer radius of Q")
    s.add_argument("--rt", type=_rational, required=True, help="inner radius of T")
    s.add_argument("--RT", type=_rational, required=True, help="outer radius of T")
    return p


def _emit(doc: dict[str, Any], stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    stream.write(json.dumps({"schema": SCHEMA, **doc}, sort_keys=True, indent=2) + "\n")


def _code(passed: bool) -> int:
    return PASS if passed else FAIL


def cmd_certify_freeness(a: argparse.Namespace) -> int:
    rep = certify_freeness(a.depth)
    _emit({"command": "certify-freeness", "report": rep.to_json()})
    return _code(rep.passed)


def cmd_double_group(a: argparse.Namespace) -> int:
    rep = verify_group_doubling(a.depth)
    _emit({"command": "double-group", "report": rep.to_json()})
    return _code(rep.passed)


def cmd_double_orbit(a: argparse.Namespace) -> int:
    _, _, rep = orbit_double(a.base, a.depth)
    doc = {"command": "double-orbit", "base": a.base.to_json(), "report": rep.to_json()}
    if a.format is None and a.out is not None:
        a.format = a.out.suffix.lstrip(".") if a.out.suffix.lstrip(".") in EXPORT_FORMATS else "json"
    if a.format is not None:
        text = export_cloud(orbit_cloud(a.base, a.depth), a.format)
        if a.out is None:
            sys.stdout.write(text)
            _emit(doc, sys.stderr)
            return _code(rep.passed)
        a.out.write_text(text)
        doc["export"] = {"path": str(a.out), "format": a.format}
    _emit(doc)
    return _code(rep.passed)


def cmd_bsb_demo(a: argparse.Namespace) -> int:
    rng = random.Random(a.seed)
    A = [f"a{i}" for i in range(a.size)]
    B = [f"b{i}" for i in range(a.size)]
    g = random_piecewise_cert(rng, A, B, a.pieces, "g")
    f = random_piecewise_cert(rng, B, A, a.pieces, "f")
    h = bsb_combine(g, f)
    rep = verify(h)
    ok = rep.passed and len(h) <= len(g) + len(f)
    _emit({
        "command": "bsb-demo",
        "size": a.size,
        "seed": a.seed,
        "pieces": {"g": len(g), "f": len(f), "combined": len(h)},
        "map": {x: h.induced(x) for x in A},
        "report": rep.to_json(),
    })
    return _code(ok)


def cmd_absorb_circle(a: argparse.Namespace) -> int:
    try:
        raw = json.loads(a.points.read_text())
        P = [CirclePoint.from_json(p) for p in raw]
    except (OSError, ValueError, TypeError, IndexError) as exc:
        raise UsageError(f"cannot read points from {a.points}: {exc}") from None
    doc: dict[str, Any] = {"command": "absorb-circle", "points": len(P), "horizon": a.horizon, "pool": a.pool}
    try:
        rot = find_avoiding_rotation(P, a.horizon, pythagorean_rotations(a.pool))
    except AvoidanceError as exc:
        _emit({**doc, "report": {"pass": False, "reason": str(exc), "failures": exc.failures}})
        return FAIL
    Q = build_absorber(P, rot, min(a.absorber_depth, a.horizon))
    ok = Q.shift_identity() and len(Q) == (Q.N + 1) * len(set(P))
    doc["rotation"] = rot.to_json()
    doc["report"] = {"pass": ok, "absorber": Q.to_json(), "shift_identity": Q.shift_identity()}
    _emit(doc)
    return _code(ok)


def cmd_absorb_ball(a: argparse.Namespace) -> int:
    r, N_trunc = ball_origin_absorber(a.horizon)
    rep = verify(ball_minus_origin_cert(a.horizon), a.horizon)
    ok = N_trunc.shift_identity() and rep.passed
    _emit({
        "command": "absorb-ball",
        "horizon": a.horizon,
        "isometry": r.to_json(),
        "absorber": {"N": N_trunc.N, "size": len(N_trunc), "shift_identity": N_trunc.shift_identity()},
        "report": {**rep.to_json(), "pass": ok},
    })
    return _code(ok)


def cmd_plan_strong_form(a: argparse.Namespace) -> int:
    plan = strong_form_plan(a.rq, a.RQ, a.rt, a.RT)
    rep = validate_plan(plan)
    _emit({"command": "plan-strong-form", "plan": plan.to_json(), "report": rep.to_json()})
    return _code(rep.passed)


COMMANDS = {
    "certify-freeness": cmd_certify_freeness,
    "double-group": cmd_double_group,
    "double-orbit": cmd_double_orbit,
    "bsb-demo": cmd_bsb_demo,
    "absorb-circle": cmd_absorb_circle,
    "absorb-ball": cmd_absorb_ball,
    "plan-strong-form": cmd_plan_strong_form,
}


@contextmanager
def _cap(max_words: int | None) -> Iterator[None]:
    if max_words is None:
        yield
        return
    old = os.environ.get(MAX_WORDS_ENV)
    os.environ[MAX_WORDS_ENV] = str(max_words)
    try:
        yield
    finally:
        if old is None:
            del os.environ[MAX_WORDS_ENV]
        else:
            os.environ[MAX_WORDS_ENV] = old


def _diagnose(kind: str, message: str, **extra: Any) -> None:
    _emit({"error": kind, "message": message, **extra}, sys.stderr)


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _diagnose("usage", str(exc))
        return USAGE
    try:
        with _cap(args.max_words):
            return COMMANDS[args.command](args)
    except UsageError as exc:
        _diagnose("usage", str(exc))
        return USAGE
    except ResourceLimitError as exc:
        _diagnose("resource", str(exc))
        return USAGE
    except (StabilizerError, AvoidanceError, VerificationError) as exc:
        _diagnose("verification", str(exc), witness=getattr(exc, "witness", None))
        return FAIL
    except TarskiError as exc:
        _diagnose("precondition", str(exc), witness=getattr(exc, "witness", None))
        return USAGE


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = PASS
    sys.exit(code)


if __name__ == "__main__":
    main()
