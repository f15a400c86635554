"""Absorbing a finite set by a rotation of infinite order.

If a rotation ``w`` moves ``P`` off itself forever, then ``Q = P u w(P) u
w^2(P) u ...`` satisfies ``w(Q) = Q - P``.  Moving ``Q`` by ``w`` and leaving
everything else fixed shows ``S ~ S - P``.  Here the generations are built out
to a finite horizon and every claim is checked exactly up to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Any, Callable, Hashable, Iterable, Sequence

from .equideco import (
    EquidecompositionCert,
    FiniteSet,
    IsometryMotion,
    LazySet,
    Motion,
    absorb,
    identity_cert,
)
from .exactring import (
    E_X,
    E_Y,
    E_Z,
    ORIGIN,
    IsometryE,
    Mat3E,
    RingScalar,
    Vec3E,
    axis_rotation,
)
from .report import PreconditionError, TarskiError


class AvoidanceError(TarskiError):
    """No candidate rotation kept ``P`` off itself; ``failures`` lists (candidate, n) pairs."""

    def __init__(self, message: str, failures: Sequence[Any] = ()) -> None:
        super().__init__(message)
        self.failures = list(failures)


class AxisSelectionError(AvoidanceError):
    pass


# the circle


def _frac(x: Fraction | int | str) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class CirclePoint:
    x: Fraction
    y: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _frac(self.x))
        object.__setattr__(self, "y", _frac(self.y))
        if self.x * self.x + self.y * self.y != 1:
            raise PreconditionError("point is not on the unit circle", self.to_json())

    def sort_key(self) -> tuple[Fraction, Fraction]:
        return (self.x, self.y)

    def to_json(self) -> list[str]:
        return [str(self.x), str(self.y)]

    @classmethod
    def from_json(cls, data: Sequence[str | int]) -> CirclePoint:
        return cls(Fraction(data[0]), Fraction(data[1]))


@dataclass(frozen=True)
class PlaneRotation:
    """``[[c, -s], [s, c]]``."""

    c: Fraction
    s: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", _frac(self.c))
        object.__setattr__(self, "s", _frac(self.s))
        if self.c * self.c + self.s * self.s != 1:
            raise PreconditionError("c^2 + s^2 != 1", self.to_json())

    def __call__(self, p: CirclePoint) -> CirclePoint:
        return CirclePoint(self.c * p.x - self.s * p.y, self.s * p.x + self.c * p.y)

    def __matmul__(self, other: PlaneRotation) -> PlaneRotation:
        return PlaneRotation(self.c * other.c - self.s * other.s, self.s * other.c + self.c * other.s)

    def inverse(self) -> PlaneRotation:
        return PlaneRotation(self.c, -self.s)

    def power(self, n: int) -> PlaneRotation:
        if n < 0:
            return self.inverse().power(-n)
        out, sq = PlaneRotation(1, 0), self
        while n:
            if n & 1:
                out = out @ sq
            sq = sq @ sq
            n >>= 1
        return out

    def to_json(self) -> list[str]:
        return [str(self.c), str(self.s)]


def pythagorean_rotations(count: int) -> list[PlaneRotation]:
    """The first ``count`` primitive Pythagorean rotations ``(a/h, b/h)``, ``a < b``, by hypotenuse."""
    if count < 0:
        raise PreconditionError("count must be nonnegative")
    found: list[tuple[int, int, int]] = []
    limit = 8
    while len(found) < count:
        found = []
        for m in range(2, limit):
            for n in range(1, m):
                if (m - n) % 2 and gcd(m, n) == 1:
                    a, b, h = m * m - n * n, 2 * m * n, m * m + n * n
                    found.append((h, min(a, b), max(a, b)))
        found = [t for t in sorted(found) if t[0] < limit * limit]
        limit *= 2
    return [PlaneRotation(Fraction(a, h), Fraction(b, h)) for h, a, b in found[:count]]


_MOD = (1 << 61) - 1


def _mod(q: Fraction) -> int | None:
    if q.denominator % _MOD == 0:
        return None
    return q.numerator * pow(q.denominator, -1, _MOD) % _MOD


def first_return(rot: PlaneRotation, P: Iterable[CirclePoint], N: int) -> tuple[int, CirclePoint, CirclePoint] | None:
    """Least ``1 <= n <= N`` with ``rot^n(p) = q`` for some ``p, q`` in ``P``, as ``(n, p, q)``.

    Since ``|p| = 1``, ``rot^n(p) = q`` iff ``z^n = q * conj(p)`` as complex numbers.
    Powers of ``z`` are tracked modulo a large prime; a residue match is only a
    candidate and is confirmed (or discarded) with exact arithmetic.
    """
    pts = sorted(set(P), key=CirclePoint.sort_key)
    if not pts:
        return None
    ratios: dict[tuple[int, int], list[tuple[CirclePoint, CirclePoint]]] = {}
    exact_only = False
    for p in pts:
        for q in pts:
            rx, ry = q.x * p.x + q.y * p.y, q.y * p.x - q.x * p.y
            key = (_mod(rx), _mod(ry))
            if None in key:
                exact_only = True
                break
            ratios.setdefault(key, []).append((p, q))  # type: ignore[arg-type]
    zc, zs = _mod(rot.c), _mod(rot.s)
    if exact_only or zc is None or zs is None:
        return _first_return_exact(rot, pts, N)
    x, y = 1, 0
    for n in range(1, N + 1):
        x, y = (x * zc - y * zs) % _MOD, (x * zs + y * zc) % _MOD
        hits = ratios.get((x, y))
        if hits:
            power = rot.power(n)
            for p, q in hits:
                if power(p) == q:
                    return n, p, q
    return None


def _first_return_exact(rot: PlaneRotation, pts: Sequence[CirclePoint], N: int) -> tuple[int, CirclePoint, CirclePoint] | None:
    members = set(pts)
    cur = list(pts)
    for n in range(1, N + 1):
        cur = [rot(p) for p in cur]
        for p, q in zip(pts, cur):
            if q in members:
                return n, p, q
    return None


def find_avoiding_rotation(
    P: Iterable[CirclePoint], N: int, candidates: Sequence[PlaneRotation] | None = None
) -> PlaneRotation:
    """First candidate rotation ``t`` with ``t^n(P)`` disjoint from ``P`` for ``1 <= n <= N``."""
    pts = list(P)
    pool = pythagorean_rotations(8) if candidates is None else list(candidates)
    failures = []
    for rot in pool:
        hit = first_return(rot, pts, N)
        if hit is None:
            return rot
        n, p, q = hit
        failures.append({"candidate": rot.to_json(), "n": n, "from": p.to_json(), "to": q.to_json()})
    raise AvoidanceError(f"none of {len(pool)} candidate rotations avoids P up to n = {N}", failures)


# the sphere

# Plane rotations with entries in the ring.  None has finite order: each
# angle is an irrational multiple of pi (arccos(1/3), its complement, its
# shift by pi/4, and its double).
_R = RingScalar
RING_ROTATIONS: tuple[tuple[RingScalar, RingScalar], ...] = (
    (_R(1, 0, 0, 1), _R(0, 2, 0, 1)),
    (_R(0, 2, 0, 1), _R(1, 0, 0, 1)),
    (_R(-4, 1, 1, 1), _R(4, 1, 1, 1)),
    (_R(-7, 0, 0, 2), _R(0, 4, 0, 2)),
)

_AXES = (2, 1, 0)
_POLES = {0: E_X, 1: E_Y, 2: E_Z}


def _as_vec(p: Any) -> Vec3E:
    if isinstance(p, Vec3E):
        return p
    to_vec = getattr(p, "to_vec", None)
    if to_vec is None:
        raise PreconditionError("expected a point with exact coordinates", repr(p))
    return to_vec()


def _sphere_points(P: Iterable[Any]) -> list[Vec3E]:
    pts = sorted({_as_vec(p) for p in P}, key=lambda v: str(v.to_json()))
    for v in pts:
        if v.norm_sq() != 1:
            raise PreconditionError("point is not on the unit sphere", v.to_json())
    return pts


def first_return_3d(M: Mat3E, P: Sequence[Vec3E], N: int) -> tuple[int, Vec3E, Vec3E] | None:
    members = set(P)
    cur = list(P)
    for n in range(1, N + 1):
        cur = [M.apply(v) for v in cur]
        for p, q in zip(P, cur):
            if q in members:
                return n, p, q
    return None


def find_avoiding_axis_rotation(
    P: Iterable[Any], N: int, candidates: Sequence[tuple[RingScalar, RingScalar]] | None = None
) -> Mat3E:
    """A rotation about a coordinate axis missing ``P`` that moves ``P`` off itself for ``n <= N``."""
    pts = _sphere_points(P)
    members = set(pts)
    axes = [a for a in _AXES if _POLES[a] not in members and -_POLES[a] not in members]
    if not axes:
        raise AxisSelectionError("every coordinate axis meets P")
    pool = RING_ROTATIONS if candidates is None else tuple(candidates)
    failures = []
    for axis in axes:
        for c, s in pool:
            M = axis_rotation(axis, c, s)
            hit = first_return_3d(M, pts, N)
            if hit is None:
                return M
            n, p, q = hit
            failures.append({"axis": "xyz"[axis], "candidate": [c.to_json(), s.to_json()], "n": n,
                             "from": p.to_json(), "to": q.to_json()})
    raise AvoidanceError(f"no axis rotation avoids P up to n = {N}", failures)


# absorbers


def _mover(motion: Any) -> Callable[[Any], Any]:
    if isinstance(motion, Mat3E):
        return motion.apply
    if callable(motion):
        return motion
    raise PreconditionError(f"cannot apply {motion!r}")


@dataclass(frozen=True)
class AbsorberTrunc:
    """Generations ``motion^n(P)`` for ``0 <= n <= N``."""

    P: frozenset
    motion: Any
    N: int
    generations: tuple[frozenset, ...]
    generation_of: dict = field(repr=False, compare=False, hash=False)

    def Q(self, n: int | None = None) -> frozenset:
        n = self.N if n is None else n
        out: set = set()
        for g in self.generations[: n + 1]:
            out |= g
        return frozenset(out)

    def __len__(self) -> int:
        return len(self.generation_of)

    def shift_identity(self) -> bool:
        """``motion(Q_{N-1}) == Q_N - P``, recomputed from scratch."""
        if self.N == 0:
            return True
        move = _mover(self.motion)
        return frozenset(move(x) for x in self.Q(self.N - 1)) == self.Q(self.N) - self.P

    def to_json(self) -> dict[str, Any]:
        motion = self.motion.to_json() if hasattr(self.motion, "to_json") else repr(self.motion)
        return {"N": self.N, "P": len(self.P), "size": len(self), "motion": motion}


def build_absorber(P: Iterable[Hashable], motion: Any, N: int) -> AbsorberTrunc:
    if N < 0:
        raise PreconditionError("horizon must be nonnegative")
    move = _mover(motion)
    start = frozenset(P)
    generation_of: dict = {x: 0 for x in start}
    gens = [start]
    for n in range(1, N + 1):
        nxt = frozenset(move(x) for x in gens[-1])
        for y in nxt:
            m = generation_of.setdefault(y, n)
            if m != n:
                raise AvoidanceError(f"generation {n} meets generation {m}", [{"n": n - m}])
        gens.append(nxt)
    return AbsorberTrunc(start, motion, N, tuple(gens), generation_of)


def ball_absorb_origin(Q: AbsorberTrunc, rho: Mat3E | None = None) -> tuple[IsometryE, AbsorberTrunc]:
    """From a sphere absorber of ``{u}``, ``u = e_x``, get one for ``{0}`` in the ball.

    ``N = Q/2 - u/2`` and ``r(x) = rho(x + u/2) - u/2``.  Returns ``r`` and the
    generations of ``N``, which start at the origin.
    """
    u = E_X
    if Q.P != frozenset({u}):
        raise PreconditionError("the sphere absorber must start from {e_x}")
    rho = Q.motion if rho is None else rho
    if not isinstance(rho, Mat3E):
        raise PreconditionError("rho must be an exact rotation matrix")
    if not Q.shift_identity() or any(rho.apply(x) not in Q.generation_of for x in Q.Q(Q.N - 1)):
        raise PreconditionError("rho does not shift the sphere absorber")
    half_u = u.half()
    r = IsometryE.translate(-half_u) @ IsometryE.rotation(rho) @ IsometryE.translate(half_u)
    gens = tuple(frozenset(x.half() - half_u for x in g) for g in Q.generations)
    generation_of = {y: n for n, g in enumerate(gens) for y in g}
    N_trunc = AbsorberTrunc(frozenset({ORIGIN}), r, Q.N, gens, generation_of)
    if ORIGIN not in gens[0] or not N_trunc.shift_identity():
        raise PreconditionError("origin absorber fails its shift identity")
    return r, N_trunc


def ball_origin_absorber(N: int) -> tuple[IsometryE, AbsorberTrunc]:
    rho = find_avoiding_axis_rotation([E_X], N)
    return ball_absorb_origin(build_absorber([E_X], rho, N), rho)


# certificates


def _absorber_cert(
    name: str,
    in_space: Callable[[Any], bool],
    sample: Iterable[Any],
    Q: AbsorberTrunc,
    motion: Motion,
    depth: int,
    removed: str = "P",
) -> EquidecompositionCert:
    """``S ~ S - P`` over a space ranked by absorber generation (other sample points rank 0)."""
    gen = Q.generation_of
    sample = frozenset(x for x in sample if in_space(x))
    outside = Q.N + 1

    def rank(x: Any) -> int:
        return gen.get(x, 0 if x in sample else outside)

    def upto(d: int) -> Iterable[Any]:
        yield from (x for x in sample if x not in gen)
        for g in Q.generations[: d + 1]:
            yield from g

    space = LazySet(name, in_space, upto, rank, {"sample": len(sample), "horizon": Q.N})
    Q_view = LazySet(f"absorber({name})", gen.__contains__,
                     lambda d: (x for g in Q.generations[: d + 1] for x in g), rank, {"horizon": Q.N})
    P_view = FiniteSet(Q.P, rank=rank, name="P")
    cert = absorb(P_view, Q_view, motion, space, depth)
    return EquidecompositionCert(cert.source, cert.target, cert.pieces, depth, f"{name} ~ {name} - {removed}")


def default_sphere_sample() -> list[Vec3E]:
    out = []
    for e in (E_X, E_Y, E_Z):
        out += [e, -e]
    third = RingScalar(1, 0, 0, 1)
    out.append(Vec3E(third * 2, third * 2, third))
    out.append(Vec3E(third, RingScalar(0, 2, 0, 1), RingScalar(0)))
    return out


def sphere_minus_countable_cert(
    P: Iterable[Any], depth: int, sample: Iterable[Vec3E] | None = None
) -> EquidecompositionCert:
    """``S^2 ~ S^2 - P``, checkable to ``depth`` generations.

    The sphere is represented by the absorber generations plus a finite sample
    of other sphere points, which the certificate leaves in place.
    """
    pts = _sphere_points(P)
    sample = default_sphere_sample() if sample is None else list(sample)
    on_sphere = lambda v: isinstance(v, Vec3E) and v.norm_sq() == 1
    if not pts:
        view = FiniteSet((v for v in sample if on_sphere(v)), rank=lambda v: 0, name="S2")
        c = identity_cert(view, "S2 ~ S2 - {}")
        return EquidecompositionCert(c.source, c.target, c.pieces, depth, c.name)
    N = depth + 1
    M = find_avoiding_axis_rotation(pts, N)
    Q = build_absorber(pts, M, N)
    return _absorber_cert("S2", on_sphere, sample, Q, IsometryMotion(IsometryE.rotation(M), 1, "omega"), depth)


def default_ball_sample() -> list[Vec3E]:
    out = []
    for e in (E_X, E_Y, E_Z):
        out += [e, -e, e.half(), -e.half()]
    return out


def ball_minus_origin_cert(depth: int, sample: Iterable[Vec3E] | None = None) -> EquidecompositionCert:
    """``B^3 ~ B^3 - {0}``, checkable to ``depth`` generations."""
    _, N_trunc = ball_origin_absorber(depth + 1)
    sample = default_ball_sample() if sample is None else list(sample)
    in_ball = lambda v: isinstance(v, Vec3E) and v.norm_sq() <= 1
    motion = IsometryMotion(N_trunc.motion, 1, "r")
    return _absorber_cert("B3", in_ball, sample, N_trunc, motion, depth, "{0}")


def rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None
