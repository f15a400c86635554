"""Words in the free group evaluated as rotations of the sphere.

``s`` acts as ``phi`` (rotation about z by arccos 1/3) and ``t`` as ``rho``
(the same angle about x).  Points of the form ``[a, b*sqrt2, c] / 3**k`` are
closed under both, which is what makes the integer recurrences below work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .exactring import ONE, ZERO, Mat3E, RingScalar, Vec3E, mat_mul
from .freegroup import LETTERS, Letter, Word, ball_size, invert, _INV
from .report import PreconditionError, ResourceLimitError, resource_cap


@dataclass(frozen=True)
class SphereTriple:
    """The point ``[a, b*sqrt2, c] / 3**k``."""

    a: int
    b: int
    c: int
    k: int = 0

    def __post_init__(self) -> None:
        if self.k < 0:
            raise PreconditionError("k must be nonnegative")

    def on_sphere(self) -> bool:
        return self.a * self.a + 2 * self.b * self.b + self.c * self.c == 9**self.k

    def canonical(self) -> SphereTriple:
        a, b, c, k = self.a, self.b, self.c, self.k
        while k > 0 and a % 3 == 0 and b % 3 == 0 and c % 3 == 0:
            a, b, c, k = a // 3, b // 3, c // 3, k - 1
        if k == self.k:
            return self
        return SphereTriple(a, b, c, k)

    def same_point(self, other: SphereTriple) -> bool:
        return self.canonical() == other.canonical()

    def to_vec(self) -> Vec3E:
        return Vec3E(RingScalar(self.a, 0, 0, self.k), RingScalar(0, self.b, 0, self.k), RingScalar(self.c, 0, 0, self.k))

    @classmethod
    def from_vec(cls, v: Vec3E) -> SphereTriple:
        """Inverse of :meth:`to_vec`; raises if ``v`` is not of the triple form."""
        if not (v.x.is_rational() and v.z.is_rational() and v.y.p == 0):
            raise PreconditionError("vector is not of the form [a, b*sqrt2, c]/3^k")
        if v.x.a or v.y.a or v.z.a:
            raise PreconditionError("vector has a power of 2 in a denominator")
        k = max(v.x.b, v.y.b, v.z.b)
        return cls(v.x.p * 3 ** (k - v.x.b), v.y.q * 3 ** (k - v.y.b), v.z.p * 3 ** (k - v.z.b), k)

    def sort_key(self) -> tuple[int, int, int, int]:
        t = self.canonical()
        return (t.k, t.a, t.b, t.c)

    def to_json(self) -> list[int]:
        return [self.a, self.b, self.c, self.k]

    @classmethod
    def parse(cls, text: str) -> SphereTriple:
        parts = [int(x) for x in text.split(",")]
        if len(parts) != 4:
            raise PreconditionError("a sphere triple is 'a,b,c,k'")
        return cls(*parts)


START = SphereTriple(1, 0, 0, 0)

_R = RingScalar
_THIRD = _R(1, 0, 0, 1)
_TWO_RT2_THIRD = _R(0, 2, 0, 1)


def _phi(sign: int) -> Mat3E:
    s = _TWO_RT2_THIRD if sign > 0 else -_TWO_RT2_THIRD
    return Mat3E.from_rows([[_THIRD, -s, ZERO], [s, _THIRD, ZERO], [ZERO, ZERO, ONE]])


def _rho(sign: int) -> Mat3E:
    s = _TWO_RT2_THIRD if sign > 0 else -_TWO_RT2_THIRD
    return Mat3E.from_rows([[ONE, ZERO, ZERO], [ZERO, _THIRD, -s], [ZERO, s, _THIRD]])


_LETTER_MATRICES = (_phi(1), _phi(-1), _rho(1), _rho(-1))


def letter_matrix(l: Letter) -> Mat3E:
    return _LETTER_MATRICES[l]


def word_matrix(w: Word) -> Mat3E:
    """Product of letter matrices, leftmost letter applied last."""
    m = Mat3E.identity()
    for l in w:
        m = mat_mul(m, _LETTER_MATRICES[l])
    return m


def apply_letter(l: Letter, t: SphereTriple) -> SphereTriple:
    a, b, c = t.a, t.b, t.c
    if l == Letter.SIGMA:
        return SphereTriple(a - 4 * b, b + 2 * a, 3 * c, t.k + 1)
    if l == Letter.SIGMA_INV:
        return SphereTriple(a + 4 * b, b - 2 * a, 3 * c, t.k + 1)
    if l == Letter.TAU:
        return SphereTriple(3 * a, b - 2 * c, c + 4 * b, t.k + 1)
    return SphereTriple(3 * a, b + 2 * c, c - 4 * b, t.k + 1)


def apply_word(w: Word, t: SphereTriple) -> SphereTriple:
    for l in reversed(w):
        t = apply_letter(l, t)
    return t


def evaluate(w: Word) -> SphereTriple:
    """``w[1,0,0]`` with ``k = len(w)``."""
    return apply_word(w, START)


def check_divisibility(w: Word) -> bool:
    if not w or w[-1] != Letter.SIGMA:
        raise PreconditionError("divisibility is claimed only for nonempty words ending in phi", str(w))
    return evaluate(w).b % 3 != 0


def cyclic_reduce(w: Word) -> Word:
    i, j = 0, len(w) - 1
    while i < j and w[j] == _INV[w[i]]:
        i += 1
        j -= 1
    return Word._trusted(w[i : j + 1])


def phi_ending_conjugate(w: Word) -> Word:
    """A word ending in ``s`` that is the identity iff ``w`` is.

    Cyclically reduce, invert if no ``s`` occurs but ``S`` does, rotate so the
    word ends at an ``s``.  A pure power of ``t`` is conjugated by ``s``.
    """
    if not w:
        raise PreconditionError("the identity has no phi-ending conjugate")
    u = cyclic_reduce(w)
    if Letter.SIGMA not in u and Letter.SIGMA_INV in u:
        u = invert(u)
    if Letter.SIGMA in u:
        # rotate so the last occurrence of s is at the end
        i = len(u) - 1 - u[::-1].index(Letter.SIGMA)
        return Word._trusted(u[i + 1 :] + u[: i + 1])
    return Word._trusted((Letter.SIGMA_INV,) + u + (Letter.SIGMA,))


# fast integer evaluation of word matrices

# A matrix (A + B*sqrt2)/3^k is held as 9 (A_ij, B_ij) integer pairs, row-major.
IntMat = tuple


def _int_identity() -> IntMat:
    return ((1, 0, 0, 0, 1, 0, 0, 0, 1), (0,) * 9, 0)


def _int_left(l: Letter, m: IntMat) -> IntMat:
    """``letter_matrix(l) @ m`` on the integer representation."""
    A, B, k = m
    sgn = -1 if l & 1 else 1
    if l < 2:
        i, j, r = 0, 1, 2
    else:
        i, j, r = 1, 2, 0
    A, B = list(A), list(B)
    nA, nB = A[:], B[:]
    for col in range(3):
        ai, bi, aj, bj = A[3 * i + col], B[3 * i + col], A[3 * j + col], B[3 * j + col]
        # row_i' = row_i - sgn*2sqrt2*row_j ; row_j' = sgn*2sqrt2*row_i + row_j
        nA[3 * i + col] = ai - sgn * 4 * bj
        nB[3 * i + col] = bi - sgn * 2 * aj
        nA[3 * j + col] = aj + sgn * 4 * bi
        nB[3 * j + col] = bj + sgn * 2 * ai
        nA[3 * r + col] = 3 * A[3 * r + col]
        nB[3 * r + col] = 3 * B[3 * r + col]
    return (tuple(nA), tuple(nB), k + 1)


def _int_is_identity(m: IntMat) -> bool:
    A, B, k = m
    d = 3**k
    return not any(B) and A == (d, 0, 0, 0, d, 0, 0, 0, d)


def _int_to_mat(m: IntMat) -> Mat3E:
    A, B, k = m
    return Mat3E(tuple(RingScalar(a, b, 0, k) for a, b in zip(A, B)))


def int_word_matrix(w: Word) -> Mat3E:
    m = _int_identity()
    for l in reversed(w):
        m = _int_left(l, m)
    return _int_to_mat(m)


@dataclass
class FreenessReport:
    depth: int
    words_checked: int = 0
    violations: list[Word] = field(default_factory=list)
    collisions: list[tuple[Word, Word]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and not self.collisions

    def merge(self, other: FreenessReport) -> FreenessReport:
        return FreenessReport(
            max(self.depth, other.depth),
            self.words_checked + other.words_checked,
            self.violations + other.violations,
            self.collisions + other.collisions,
        )

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "words_checked": self.words_checked,
            "violations": [w.to_json() for w in self.violations],
            "collisions": [[u.to_json(), v.to_json()] for u, v in self.collisions],
            "pass": self.passed,
        }


def _suffix_walk(L: int) -> Iterator[tuple[Word, IntMat]]:
    """Nonempty reduced words up to length ``L`` with their matrices, grown by prepending."""
    stack: list[tuple[tuple[Letter, ...], IntMat]] = []
    ident = _int_identity()
    for x in LETTERS:
        stack.append(((x,), _int_left(x, ident)))
    while stack:
        letters, m = stack.pop()
        yield Word._trusted(letters), m
        if len(letters) < L:
            bad = _INV[letters[0]]
            for x in LETTERS:
                if x is not bad:
                    stack.append(((x,) + letters, _int_left(x, m)))


def certify_freeness(
    L: int,
    *,
    fake_identities: Iterable[Word] = (),
    cap: int | None = None,
) -> FreenessReport:
    """Check every nonempty reduced word of length ``<= L`` is not the identity.

    Two independent routes per word: the divisibility test on its ``s``-ending
    conjugate, and exact evaluation of its matrix.  ``fake_identities`` forces
    the matrix route to see the listed words as the identity (mutation testing).
    """
    if L < 1:
        raise PreconditionError("freeness depth must be at least 1")
    cap = resource_cap() if cap is None else cap
    if ball_size(L) > cap:
        raise ResourceLimitError(f"{ball_size(L) - 1} words exceed the cap {cap}")
    fakes = frozenset(fake_identities)
    report = FreenessReport(L)
    cache: dict[Word, int] = {}
    for w, m in _suffix_walk(L):
        report.words_checked += 1
        c = phi_ending_conjugate(w)
        b = cache.get(c)
        if b is None:
            b = evaluate(c).b
            if len(c) <= L:
                cache[c] = b
        if b % 3 == 0:
            report.violations.append(w)
        if w in fakes or _int_is_identity(m):
            report.collisions.append((w, Word._trusted(())))
    report.violations.sort()
    report.collisions.sort()
    return report


# orbits of a base point


def orbit_ball(base: SphereTriple, radius: int) -> dict[Word, SphereTriple]:
    """``w(base)`` (canonicalized) for every reduced word of length ``<= radius``.

    Words are built by prepending a letter, so each point costs one recurrence step.
    """
    if not base.on_sphere():
        raise PreconditionError("base point is not on the unit sphere", base.to_json())
    cap = resource_cap()
    if ball_size(radius) > cap:
        raise ResourceLimitError(f"orbit ball of radius {radius} exceeds the cap {cap}")
    out: dict[Word, SphereTriple] = {Word._trusted(()): base.canonical()}
    layer = [Word._trusted(())]
    for _ in range(radius):
        nxt = []
        for w in layer:
            bad = _INV[w[0]] if w else None
            p = out[w]
            for x in LETTERS:
                if x is not bad:
                    u = Word._trusted((x,) + w)
                    out[u] = apply_letter(x, p).canonical()
                    nxt.append(u)
        layer = nxt
    return out


def find_stabilizer(base: SphereTriple, depth: int) -> Word | None:
    """A nonempty reduced word of length ``<= depth`` fixing ``base``, or None.

    Meet in the middle: any such word splits as ``v^-1 u`` with ``u, v`` in the
    ball of radius ``ceil(depth/2)``, and then ``u(base) = v(base)``.
    """
    if depth < 0:
        raise PreconditionError("depth must be nonnegative")
    if not base.on_sphere():
        raise PreconditionError("base point is not on the unit sphere", base.to_json())
    if depth == 0:
        return None
    half = (depth + 1) // 2
    seen: dict[SphereTriple, list[Word]] = {}
    best: Word | None = None
    for w, p in orbit_ball(base, half).items():
        for v in seen.get(p, ()):
            rel = invert(v) * w
            if len(rel) <= depth and (best is None or rel < best):
                best = rel
        seen.setdefault(p, []).append(w)
    return best
