"""Exact arithmetic in Z[sqrt2][1/6].

Scalars are ``(p + q*sqrt2) / (2**a * 3**b)`` kept in a canonical form, so
structural equality is numeric equality.  Vectors, 3x3 matrices and affine
isometries are built on top of them.  Nothing in here touches floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Scalarish = Union["RingScalar", int]


def _canonical(p: int, q: int, a: int, b: int) -> tuple[int, int, int, int]:
    if p == 0 and q == 0:
        return 0, 0, 0, 0
    while a > 0 and p % 2 == 0 and q % 2 == 0:
        p //= 2
        q //= 2
        a -= 1
    while b > 0 and p % 3 == 0 and q % 3 == 0:
        p //= 3
        q //= 3
        b -= 1
    return p, q, a, b


def _split_denominator(d: int) -> tuple[int, int]:
    """Return (a, b) with d == 2**a * 3**b, or raise ValueError."""
    if d <= 0:
        raise ValueError(f"denominator must be positive, got {d}")
    a = b = 0
    while d % 2 == 0:
        d //= 2
        a += 1
    while d % 3 == 0:
        d //= 3
        b += 1
    if d != 1:
        raise ValueError("denominator has a prime factor other than 2 or 3")
    return a, b


class RingScalar:
    """An element ``(p + q*sqrt2) / (2**a * 3**b)`` in canonical form."""

    __slots__ = ("p", "q", "a", "b", "_hash")

    def __init__(self, p: int = 0, q: int = 0, a: int = 0, b: int = 0) -> None:
        if a < 0 or b < 0:
            raise ValueError("denominator exponents must be nonnegative")
        p, q, a, b = _canonical(int(p), int(q), int(a), int(b))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        # integers must hash like int since they compare equal to int
        object.__setattr__(self, "_hash", hash(p) if q == a == b == 0 else hash((p, q, a, b)))

    def __setattr__(self, name, value):
        raise AttributeError("RingScalar is immutable")

    @classmethod
    def of(cls, x: Scalarish | Fraction) -> RingScalar:
        if isinstance(x, RingScalar):
            return x
        if isinstance(x, Fraction):
            a, b = _split_denominator(x.denominator)
            return cls(x.numerator, 0, a, b)
        if isinstance(x, int):
            return cls(x)
        raise TypeError(f"cannot make a RingScalar from {type(x).__name__}")

    @classmethod
    def from_parts(cls, rational: Fraction | int, sqrt2_coeff: Fraction | int = 0) -> RingScalar:
        """Build ``rational + sqrt2_coeff * sqrt2``; both parts need 2^a 3^b denominators."""
        r, s = Fraction(rational), Fraction(sqrt2_coeff)
        d = math.lcm(r.denominator, s.denominator)
        a, b = _split_denominator(d)
        return cls(r.numerator * (d // r.denominator), s.numerator * (d // s.denominator), a, b)

    @property
    def denominator(self) -> int:
        return 2**self.a * 3**self.b

    def parts(self) -> tuple[Fraction, Fraction]:
        """The rational and sqrt2 coefficients as fractions."""
        d = self.denominator
        return Fraction(self.p, d), Fraction(self.q, d)

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def is_rational(self) -> bool:
        return self.q == 0

    # arithmetic

    def _align(self, other: RingScalar) -> tuple[int, int, int, int, int, int]:
        a, b = max(self.a, other.a), max(self.b, other.b)
        s = 2 ** (a - self.a) * 3 ** (b - self.b)
        t = 2 ** (a - other.a) * 3 ** (b - other.b)
        return self.p * s, self.q * s, other.p * t, other.q * t, a, b

    def __add__(self, other: Scalarish) -> RingScalar:
        if isinstance(other, int):
            other = RingScalar(other)
        elif not isinstance(other, RingScalar):
            return NotImplemented
        p1, q1, p2, q2, a, b = self._align(other)
        return RingScalar(p1 + p2, q1 + q2, a, b)

    __radd__ = __add__

    def __neg__(self) -> RingScalar:
        return RingScalar(-self.p, -self.q, self.a, self.b)

    def __sub__(self, other: Scalarish) -> RingScalar:
        if isinstance(other, int):
            other = RingScalar(other)
        elif not isinstance(other, RingScalar):
            return NotImplemented
        p1, q1, p2, q2, a, b = self._align(other)
        return RingScalar(p1 - p2, q1 - q2, a, b)

    def __rsub__(self, other: Scalarish) -> RingScalar:
        return (-self) + other

    def __mul__(self, other: Scalarish) -> RingScalar:
        if isinstance(other, int):
            return RingScalar(self.p * other, self.q * other, self.a, self.b)
        if not isinstance(other, RingScalar):
            return NotImplemented
        p, q, r, s = self.p, self.q, other.p, other.q
        return RingScalar(p * r + 2 * q * s, p * s + q * r, self.a + other.a, self.b + other.b)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> RingScalar:
        if n < 0:
            raise ValueError("negative powers leave the ring")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def half(self) -> RingScalar:
        return RingScalar(self.p, self.q, self.a + 1, self.b)

    def third(self) -> RingScalar:
        return RingScalar(self.p, self.q, self.a, self.b + 1)

    def conjugate(self) -> RingScalar:
        """Galois conjugate ``sqrt2 -> -sqrt2``."""
        return RingScalar(self.p, -self.q, self.a, self.b)

    # order

    def sign(self) -> int:
        """Exact sign of the real number (denominators are positive)."""
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return (q > 0) - (q < 0)
        if p > 0 and q > 0:
            return 1
        if p < 0 and q < 0:
            return -1
        # opposite signs: compare p^2 with 2 q^2
        if p * p > 2 * q * q:
            return 1 if p > 0 else -1
        return 1 if q > 0 else -1

    def __lt__(self, other: Scalarish) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: Scalarish) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: Scalarish) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: Scalarish) -> bool:
        return (self - other).sign() >= 0

    # identity

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.q == 0 and self.a == 0 and self.b == 0 and self.p == other
        if not isinstance(other, RingScalar):
            return NotImplemented
        return self.p == other.p and self.q == other.q and self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"RingScalar({self.p}, {self.q}, {self.a}, {self.b})"

    def __str__(self) -> str:
        num = f"{self.p}{self.q:+}√2" if self.q else str(self.p)
        d = self.denominator
        if d == 1:
            return num
        return f"({num})/{d}" if self.q else f"{num}/{d}"

    def __reduce__(self):
        return (RingScalar, (self.p, self.q, self.a, self.b))

    def to_json(self) -> list[str]:
        return [str(self.p), str(self.q), str(self.a), str(self.b)]

    @classmethod
    def from_json(cls, data: Sequence[str | int]) -> RingScalar:
        p, q, a, b = (int(x) for x in data)
        return cls(p, q, a, b)


ZERO = RingScalar(0)
ONE = RingScalar(1)
SQRT2 = RingScalar(0, 1)
HALF = RingScalar(1, 0, 1, 0)


def canonicalize(s: RingScalar) -> RingScalar:
    """Return the canonical form of ``s``; construction already canonicalizes."""
    return RingScalar(s.p, s.q, s.a, s.b)


def ring_add(u: RingScalar, v: RingScalar) -> RingScalar:
    return u + v


def ring_mul(u: RingScalar, v: RingScalar) -> RingScalar:
    return u * v


def ring_neg(u: RingScalar) -> RingScalar:
    return -u


@dataclass(frozen=True)
class Vec3E:
    x: RingScalar
    y: RingScalar
    z: RingScalar

    @classmethod
    def of(cls, x: Scalarish | Fraction, y: Scalarish | Fraction, z: Scalarish | Fraction) -> Vec3E:
        return cls(RingScalar.of(x), RingScalar.of(y), RingScalar.of(z))

    def __iter__(self) -> Iterator[RingScalar]:
        yield self.x
        yield self.y
        yield self.z

    def __add__(self, other: Vec3E) -> Vec3E:
        return Vec3E(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3E) -> Vec3E:
        return Vec3E(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> Vec3E:
        return Vec3E(-self.x, -self.y, -self.z)

    def scale(self, s: Scalarish) -> Vec3E:
        return Vec3E(self.x * s, self.y * s, self.z * s)

    def half(self) -> Vec3E:
        return Vec3E(self.x.half(), self.y.half(), self.z.half())

    def dot(self, other: Vec3E) -> RingScalar:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: Vec3E) -> Vec3E:
        return Vec3E(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm_sq(self) -> RingScalar:
        return self.dot(self)

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.y.is_zero() and self.z.is_zero()

    def __str__(self) -> str:
        return f"({self.x}, {self.y}, {self.z})"

    def to_json(self) -> list[list[str]]:
        return [c.to_json() for c in self]

    @classmethod
    def from_json(cls, data) -> Vec3E:
        return cls(*(RingScalar.from_json(c) for c in data))


ORIGIN = Vec3E(ZERO, ZERO, ZERO)
E_X = Vec3E(ONE, ZERO, ZERO)
E_Y = Vec3E(ZERO, ONE, ZERO)
E_Z = Vec3E(ZERO, ZERO, ONE)


def norm_sq(v: Vec3E) -> RingScalar:
    return v.norm_sq()


@dataclass(frozen=True)
class Mat3E:
    """Row-major 3x3 matrix of ring scalars."""

    entries: tuple[RingScalar, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != 9:
            raise ValueError("a 3x3 matrix needs 9 entries")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Scalarish | Fraction]]) -> Mat3E:
        flat = tuple(RingScalar.of(x) for row in rows for x in row)
        return cls(flat)

    @classmethod
    def identity(cls) -> Mat3E:
        return IDENTITY

    def __getitem__(self, ij: tuple[int, int]) -> RingScalar:
        i, j = ij
        return self.entries[3 * i + j]

    def row(self, i: int) -> tuple[RingScalar, RingScalar, RingScalar]:
        return self.entries[3 * i : 3 * i + 3]  # type: ignore[return-value]

    def transpose(self) -> Mat3E:
        e = self.entries
        return Mat3E((e[0], e[3], e[6], e[1], e[4], e[7], e[2], e[5], e[8]))

    def __matmul__(self, other: Mat3E) -> Mat3E:
        return mat_mul(self, other)

    def apply(self, v: Vec3E) -> Vec3E:
        e = self.entries
        return Vec3E(
            e[0] * v.x + e[1] * v.y + e[2] * v.z,
            e[3] * v.x + e[4] * v.y + e[5] * v.z,
            e[6] * v.x + e[7] * v.y + e[8] * v.z,
        )

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(x) for x in self.row(i)) for i in range(3)) + "]"

    def to_json(self) -> list[list[str]]:
        return [x.to_json() for x in self.entries]


IDENTITY = Mat3E((ONE, ZERO, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ONE))


def mat_mul(A: Mat3E, B: Mat3E) -> Mat3E:
    a, b = A.entries, B.entries
    out = []
    for i in range(3):
        for j in range(3):
            out.append(a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j])
    return Mat3E(tuple(out))


def mat_det(A: Mat3E) -> RingScalar:
    e = A.entries
    return (
        e[0] * (e[4] * e[8] - e[5] * e[7])
        - e[1] * (e[3] * e[8] - e[5] * e[6])
        + e[2] * (e[3] * e[7] - e[4] * e[6])
    )


def is_rotation(A: Mat3E) -> bool:
    return mat_mul(A, A.transpose()) == IDENTITY and mat_det(A) == ONE


def axis_rotation(axis: int, c: Scalarish | Fraction, s: Scalarish | Fraction) -> Mat3E:
    """Counterclockwise rotation about coordinate ``axis`` (0=x, 1=y, 2=z) with cos c, sin s."""
    c, s = RingScalar.of(c), RingScalar.of(s)
    if c * c + s * s != ONE:
        raise ValueError("cos^2 + sin^2 must equal 1")
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    rows = [[ZERO] * 3 for _ in range(3)]
    rows[axis][axis] = ONE
    rows[i][i], rows[i][j] = c, -s
    rows[j][i], rows[j][j] = s, c
    return Mat3E.from_rows(rows)


@dataclass(frozen=True)
class IsometryE:
    """Affine map ``x -> linear @ x + translation`` with a rotation as linear part."""

    linear: Mat3E
    translation: Vec3E

    @classmethod
    def identity(cls) -> IsometryE:
        return cls(IDENTITY, ORIGIN)

    @classmethod
    def rotation(cls, m: Mat3E) -> IsometryE:
        if not is_rotation(m):
            raise ValueError("linear part is not a rotation")
        return cls(m, ORIGIN)

    @classmethod
    def translate(cls, v: Vec3E) -> IsometryE:
        return cls(IDENTITY, v)

    def __call__(self, x: Vec3E) -> Vec3E:
        return isometry_apply(self, x)

    def __matmul__(self, other: IsometryE) -> IsometryE:
        return isometry_compose(self, other)

    def inverse(self) -> IsometryE:
        return isometry_invert(self)

    def to_json(self) -> dict:
        return {"linear": self.linear.to_json(), "translation": self.translation.to_json()}


def isometry_apply(g: IsometryE, x: Vec3E) -> Vec3E:
    return g.linear.apply(x) + g.translation


def isometry_compose(g: IsometryE, h: IsometryE) -> IsometryE:
    """``g after h``."""
    return IsometryE(mat_mul(g.linear, h.linear), g.linear.apply(h.translation) + g.translation)


def isometry_invert(g: IsometryE) -> IsometryE:
    lt = g.linear.transpose()
    return IsometryE(lt, -lt.apply(g.translation))
