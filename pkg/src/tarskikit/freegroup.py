"""The free group on two generators, as reduced words.

Letters are ordered ``s < S < t < T`` (``S``/``T`` the inverses), which gives
the length-lexicographic enumeration order used everywhere.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from typing import Iterable, Iterator

from .equideco import (
    IDENTITY_MOTION,
    EquidecompositionCert,
    LazySet,
    Motion,
    Piece,
    SetView,
    verify,
)
from .report import PreconditionError, ResourceLimitError, VerificationReport, resource_cap


class Letter(enum.IntEnum):
    SIGMA = 0
    SIGMA_INV = 1
    TAU = 2
    TAU_INV = 3

    @property
    def generator(self) -> Letter:
        return Letter(self & 2)

    @property
    def inverse(self) -> bool:
        return bool(self & 1)

    def inv(self) -> Letter:
        return _INV[self]

    @property
    def char(self) -> str:
        return "sStT"[self]


LETTERS = (Letter.SIGMA, Letter.SIGMA_INV, Letter.TAU, Letter.TAU_INV)
_INV = (Letter.SIGMA_INV, Letter.SIGMA, Letter.TAU_INV, Letter.TAU)
_BY_CHAR = {"s": Letter.SIGMA, "S": Letter.SIGMA_INV, "t": Letter.TAU, "T": Letter.TAU_INV}


class PieceLabel(enum.IntEnum):
    W_SIGMA = 0
    W_SIGMA_INV = 1
    W_TAU = 2
    W_TAU_INV = 3
    IDENTITY = 4


class Word(tuple):
    """A reduced word; the empty word is the identity."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int | Letter] = ()) -> Word:
        w = tuple.__new__(cls, (LETTERS[x] for x in letters))
        for x, y in zip(w, w[1:]):
            if y == _INV[x]:
                raise PreconditionError(f"word {w.to_json()!r} is not reduced", w.to_json())
        return w

    @classmethod
    def _trusted(cls, letters: Iterable[Letter]) -> Word:
        return tuple.__new__(cls, letters)

    @classmethod
    def parse(cls, text: str) -> Word:
        """Parse ``"sTt"``-style strings; ``"e"`` or ``""`` is the identity."""
        if text in ("", "e"):
            return IDENTITY
        try:
            return cls(_BY_CHAR[c] for c in text)
        except KeyError as exc:
            raise PreconditionError(f"bad letter {exc.args[0]!r} in word {text!r}") from None

    @classmethod
    def free_reduce(cls, letters: Iterable[int | Letter]) -> Word:
        """Reduced form of an arbitrary letter sequence."""
        stack: list[Letter] = []
        for x in letters:
            x = LETTERS[x]
            if stack and stack[-1] == _INV[x]:
                stack.pop()
            else:
                stack.append(x)
        return cls._trusted(stack)

    def __mul__(self, other: Word) -> Word:  # type: ignore[override]
        return concat_reduce(self, other)

    def __invert__(self) -> Word:
        return invert(self)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self), tuple(self))

    def __lt__(self, other: Word) -> bool:  # type: ignore[override]
        return self.sort_key() < other.sort_key()

    def __le__(self, other: Word) -> bool:  # type: ignore[override]
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: Word) -> bool:  # type: ignore[override]
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: Word) -> bool:  # type: ignore[override]
        return self.sort_key() >= other.sort_key()

    def __str__(self) -> str:
        return self.to_json()

    def __repr__(self) -> str:
        return f"Word({self.to_json()!r})"

    def to_json(self) -> str:
        return "".join("sStT"[x] for x in self) or "e"

    def __reduce__(self):
        return (Word.parse, (self.to_json(),))


IDENTITY = Word._trusted(())
SIGMA = Word._trusted((Letter.SIGMA,))
SIGMA_INV = Word._trusted((Letter.SIGMA_INV,))
TAU = Word._trusted((Letter.TAU,))
TAU_INV = Word._trusted((Letter.TAU_INV,))


def concat_reduce(u: Word, v: Word) -> Word:
    i, n = 0, min(len(u), len(v))
    lu = len(u)
    while i < n and v[i] == _INV[u[lu - 1 - i]]:
        i += 1
    return Word._trusted(u[: lu - i] + v[i:])


def invert(w: Word) -> Word:
    return Word._trusted(_INV[x] for x in reversed(w))


def left_multiply(x: Letter, w: Word) -> Word:
    if w and w[0] == _INV[x]:
        return Word._trusted(w[1:])
    return Word._trusted((x,) + w)


_LABELS = tuple(PieceLabel)


def classify(w: Word) -> PieceLabel:
    if not w:
        return PieceLabel.IDENTITY
    return _LABELS[w[0]]


def ball_size(n: int) -> int:
    return 2 * 3**n - 1 if n >= 0 else 0


def _check_cap(n: int, cap: int | None) -> None:
    cap = resource_cap() if cap is None else cap
    if ball_size(n) > cap:
        raise ResourceLimitError(f"ball of radius {n} has {ball_size(n)} words, cap is {cap}")


@lru_cache(maxsize=2)
def _ball(n: int) -> tuple[Word, ...]:
    layer: list[Word] = [IDENTITY]
    out: list[Word] = [IDENTITY]
    for _ in range(n):
        nxt = []
        for w in layer:
            last = _INV[w[-1]] if w else None
            for x in LETTERS:
                if x is not last:
                    nxt.append(Word._trusted(w + (x,)))
        out.extend(nxt)
        layer = nxt
    return tuple(out)


def enumerate_ball(n: int, cap: int | None = None) -> tuple[Word, ...]:
    """All reduced words of length at most ``n`` in length-lex order."""
    if n < 0:
        raise PreconditionError("radius must be nonnegative")
    _check_cap(n, cap)
    return _ball(n)


def iter_sphere(n: int) -> Iterator[Word]:
    """Reduced words of length exactly ``n``, without materializing the ball."""
    def rec(prefix: tuple[Letter, ...]) -> Iterator[Word]:
        if len(prefix) == n:
            yield Word._trusted(prefix)
            return
        last = _INV[prefix[-1]] if prefix else None
        for x in LETTERS:
            if x is not last:
                yield from rec(prefix + (x,))
    return rec(())


# motions and views


class WordMotion(Motion):
    """Left multiplication by a fixed word."""

    def __init__(self, word: Word):
        self.word = word
        self.reach = len(word)

    def __call__(self, w: Word) -> Word:
        if len(self.word) == 1:
            return left_multiply(self.word[0], w)
        return concat_reduce(self.word, w)

    def inverse(self) -> Motion:
        return WordMotion(invert(self.word))

    def after(self, inner: Motion) -> Motion:
        if isinstance(inner, WordMotion):
            return WordMotion(concat_reduce(self.word, inner.word))
        return super().after(inner)

    def to_json(self):
        return {"kind": "word", "word": self.word.to_json()}

    def __repr__(self) -> str:
        return f"WordMotion({self.word})"


def word_set(name: str, labels: Iterable[PieceLabel]) -> LazySet:
    """The words whose first letter (or identity) is in ``labels``."""
    keep = frozenset(labels)
    everything = len(keep) == 5
    # first-letter test: the identity is keyed by the label value 4
    firsts = frozenset(int(l) for l in keep if l != PieceLabel.IDENTITY)
    with_identity = PieceLabel.IDENTITY in keep

    def contains(w) -> bool:
        if not isinstance(w, Word):
            return False
        return everything or (w[0] in firsts if w else with_identity)

    def enum(d: int) -> Iterable[Word]:
        ball = enumerate_ball(d)
        if everything:
            return ball
        return (w for w in ball if (w[0] in firsts if w else with_identity))

    return LazySet(name, contains, enum, len, {"labels": sorted(l.name for l in keep)})


ALL_LABELS = tuple(PieceLabel)


def group_view() -> LazySet:
    return word_set("G", ALL_LABELS)


def piece_view(*labels: PieceLabel) -> LazySet:
    return word_set("W(" + ",".join(l.name for l in labels) + ")", labels)


def _doubling_cert(gen: Letter) -> EquidecompositionCert:
    g, g_inv = PieceLabel(gen), PieceLabel(gen.inv())
    others = [l for l in ALL_LABELS if l not in (g, g_inv)]
    Q = piece_view(g, *others)
    back = piece_view(g_inv)
    target = piece_view(g, g_inv)
    name = f"G ~ W({gen.char}) u W({gen.inv().char})"
    return EquidecompositionCert(
        group_view(),
        target,
        (Piece(Q, WordMotion(Word._trusted((gen,)))), Piece(back, IDENTITY_MOTION)),
        name=name,
    )


def group_doubling_certs() -> tuple[EquidecompositionCert, EquidecompositionCert]:
    """``G ~ W(s) u W(S)`` and ``G ~ W(t) u W(T)``.

    The first uses ``Q = G - W(S)`` moved by ``s`` (so ``sQ = W(s)``) and keeps
    ``W(S)`` in place; the second is the same with ``t``.
    """
    return _doubling_cert(Letter.SIGMA), _doubling_cert(Letter.TAU)


def verify_group_doubling(
    n: int, certs: tuple[EquidecompositionCert, ...] | None = None
) -> VerificationReport:
    """Check both doubling certificates on ``ball(n)`` with images trimmed to ``ball(n-1)``."""
    if n < 2:
        raise PreconditionError("group doubling is checked from depth 2 on")
    certs = group_doubling_certs() if certs is None else certs
    counts = {}
    sub = []
    for c in certs:
        rep = verify(c, n)
        sub.append(rep.to_json())
        if not rep.passed:
            return VerificationReport("group-doubling", False, n, counts, rep.reason, rep.witness,
                                      {"certificate": c.name, "reports": sub})
        counts[c.name] = rep.counts
    targets = [c.target.points(n - 1) for c in certs]
    for i in range(len(targets)):
        for j in range(i + 1, len(targets)):
            both = targets[i] & targets[j]
            if both:
                return VerificationReport("group-doubling", False, n, counts, "targets overlap",
                                          min(both).to_json(), {"reports": sub})
    counts["ball"] = ball_size(n)
    return VerificationReport("group-doubling", True, n, counts, details={"reports": sub})
