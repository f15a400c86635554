"""Finite group actions, orbit partitions and the star transform.

Also carries free-group paradoxes over to the orbit of a point on the sphere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .equideco import (
    EquidecompositionCert,
    IdentityMotion,
    LazySet,
    Motion,
    Piece,
    SetView,
    point_json,
)
from .freegroup import Word, WordMotion, group_doubling_certs, invert
from .report import PreconditionError, TarskiError, VerificationReport
from .rotact import SphereTriple, apply_word, orbit_ball


class InvalidActionError(PreconditionError):
    pass


def point_order(x: Any) -> tuple:
    """Canonical order on opaque points: by type name, then value."""
    key = getattr(x, "sort_key", None)
    if key is not None:
        return (type(x).__name__, key())
    return (type(x).__name__, x)


@dataclass(frozen=True)
class FiniteAction:
    """A finite group with its multiplication table acting on a finite set."""

    elements: tuple[Hashable, ...]
    identity: Hashable
    mul: Mapping[tuple[Hashable, Hashable], Hashable]
    points: tuple[Hashable, ...]
    act_map: Mapping[tuple[Hashable, Hashable], Hashable]

    def __post_init__(self) -> None:
        _validate(self)

    @classmethod
    def from_tables(
        cls,
        elements: Sequence[Hashable],
        identity: Hashable,
        mul_table: Sequence[Sequence[Hashable]],
        points: Sequence[Hashable],
        act_table: Sequence[Sequence[Hashable]],
    ) -> FiniteAction:
        """Tables are indexed by position: ``mul_table[i][j] = e_i e_j``, ``act_table[i][k] = e_i . x_k``."""
        els, pts = tuple(elements), tuple(points)
        if len(mul_table) != len(els) or any(len(r) != len(els) for r in mul_table):
            raise InvalidActionError("mul_table must be |elements| x |elements|")
        if len(act_table) != len(els) or any(len(r) != len(pts) for r in act_table):
            raise InvalidActionError("act_table must be |elements| x |points|")
        mul = {(g, h): mul_table[i][j] for i, g in enumerate(els) for j, h in enumerate(els)}
        act = {(g, x): act_table[i][k] for i, g in enumerate(els) for k, x in enumerate(pts)}
        return cls(els, identity, mul, pts, act)

    @classmethod
    def from_json(cls, doc: Mapping[str, Any] | str) -> FiniteAction:
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            return cls.from_tables(doc["elements"], doc["identity"], doc["mul_table"], doc["points"], doc["act_table"])
        except KeyError as exc:
            raise InvalidActionError(f"action document lacks {exc.args[0]!r}") from None

    def to_json(self) -> dict[str, Any]:
        return {
            "elements": list(self.elements),
            "identity": self.identity,
            "mul_table": [[self.mul[g, h] for h in self.elements] for g in self.elements],
            "points": list(self.points),
            "act_table": [[self.act_map[g, x] for x in self.points] for g in self.elements],
        }

    @classmethod
    def regular(cls, elements: Sequence[Hashable], identity: Hashable,
                mul: Mapping[tuple[Hashable, Hashable], Hashable]) -> FiniteAction:
        """The group acting on itself by left multiplication."""
        return cls(tuple(elements), identity, dict(mul), tuple(elements), dict(mul))

    def act(self, g: Hashable, x: Hashable) -> Hashable:
        return self.act_map[g, x]

    def act_set(self, g: Hashable, xs: Iterable[Hashable]) -> frozenset:
        return frozenset(self.act_map[g, x] for x in xs)

    def times(self, g: Hashable, h: Hashable) -> Hashable:
        return self.mul[g, h]


def _validate(A: FiniteAction) -> None:
    els, pts, e = A.elements, A.points, A.identity
    if len(set(els)) != len(els):
        raise InvalidActionError("repeated group element")
    if len(set(pts)) != len(pts):
        raise InvalidActionError("repeated point")
    el_set, pt_set = set(els), set(pts)
    if e not in el_set:
        raise InvalidActionError("identity is not a group element", e)
    for g in els:
        for h in els:
            gh = A.mul.get((g, h))
            if gh not in el_set:
                raise InvalidActionError("multiplication is not closed", [g, h, gh])
        if A.mul[e, g] != g or A.mul[g, e] != g:
            raise InvalidActionError("identity law fails", [e, g])
        if not any(A.mul[g, h] == e for h in els):
            raise InvalidActionError("element has no inverse", g)
    for g in els:
        for h in els:
            gh = A.mul[g, h]
            for k in els:
                if A.mul[gh, k] != A.mul[g, A.mul[h, k]]:
                    raise InvalidActionError("multiplication is not associative", [g, h, k])
    for g in els:
        image = set()
        for x in pts:
            y = A.act_map.get((g, x))
            if y not in pt_set:
                raise InvalidActionError("action leaves the carrier", [g, x, y])
            image.add(y)
        if len(image) != len(pts):
            raise InvalidActionError("an element does not act bijectively", g)
    for x in pts:
        if A.act_map[e, x] != x:
            raise InvalidActionError("identity does not act trivially", [e, e, x])
    for g in els:
        for h in els:
            gh = A.mul[g, h]
            for x in pts:
                if A.act_map[gh, x] != A.act_map[g, A.act_map[h, x]]:
                    raise InvalidActionError("action is not compatible with multiplication", [g, h, x])


@dataclass(frozen=True)
class OrbitPartition:
    blocks: tuple[frozenset, ...]
    index: Mapping[Hashable, int]

    def block_of(self, x: Hashable) -> frozenset:
        return self.blocks[self.index[x]]


@dataclass(frozen=True)
class RepresentativeSet:
    points: frozenset

    def __iter__(self):
        return iter(sorted(self.points, key=point_order))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x: object) -> bool:
        return x in self.points


def orbits(A: FiniteAction) -> OrbitPartition:
    index: dict[Hashable, int] = {}
    blocks: list[frozenset] = []
    for x in sorted(A.points, key=point_order):
        if x in index:
            continue
        block = frozenset(A.act(g, x) for g in A.elements)
        for y in block:
            index[y] = len(blocks)
        blocks.append(block)
    return OrbitPartition(tuple(blocks), index)


def is_free(A: FiniteAction) -> bool:
    return all(A.act(g, x) != x for g in A.elements if g != A.identity for x in A.points)


def choose_representatives(P: OrbitPartition) -> RepresentativeSet:
    """The minimum point of every block; stands in for a choice function."""
    return RepresentativeSet(frozenset(min(b, key=point_order) for b in P.blocks))


def translates_partition(A: FiniteAction, M: RepresentativeSet | Iterable[Hashable]) -> VerificationReport:
    """Do the translates ``g(M)`` partition the carrier?"""
    M = frozenset(M)
    name = "translates-partition"
    owner: dict[Hashable, Hashable] = {}
    for g in A.elements:
        moved = A.act_set(g, M)
        if not moved:
            return VerificationReport(name, False, reason="empty translate", witness=point_json(g))
        for y in sorted(moved, key=point_order):
            h = owner.setdefault(y, g)
            if h != g:
                return VerificationReport(name, False, reason="translates overlap",
                                          witness=point_json([h, g, y]))
    missing = set(A.points) - owner.keys()
    if missing:
        return VerificationReport(name, False, reason="translates do not cover the carrier",
                                  witness=point_json(min(missing, key=point_order)))
    return VerificationReport(name, True, counts={"translates": len(A.elements), "points": len(A.points)})


def star(B: Iterable[Hashable], M: RepresentativeSet | Iterable[Hashable], A: FiniteAction) -> frozenset:
    """``B* = union of g(M) over g in B``."""
    M = frozenset(M)
    out: set = set()
    for g in B:
        out |= A.act_set(g, M)
    return frozenset(out)


def lift_partition(
    blocks: Sequence[Iterable[Hashable]], M: RepresentativeSet | Iterable[Hashable], A: FiniteAction
) -> list[frozenset]:
    """Carry a partition of the group to a partition of the carrier via the star transform."""
    blocks = [frozenset(b) for b in blocks]
    seen: set = set()
    for b in blocks:
        if not b:
            raise PreconditionError("empty block in group partition")
        if seen & b:
            raise PreconditionError("group blocks overlap", point_json(min(seen & b, key=point_order)))
        seen |= b
    if seen != set(A.elements):
        raise PreconditionError("blocks do not partition the group", point_json(sorted(set(A.elements) ^ seen, key=point_order)))
    if not is_free(A):
        raise PreconditionError("lifting needs a free action")
    return [star(b, M, A) for b in blocks]


# paradoxes on an orbit of the rotation group


class StabilizerError(TarskiError):
    def __init__(self, message: str, witness: Any = None) -> None:
        super().__init__(message)
        self.witness = witness


class OrbitIndex:
    """Two-way map between the words of a ball and the points they send ``base`` to."""

    def __init__(self, base: SphereTriple, radius: int):
        self.base = base.canonical()
        self.radius = radius
        self.point_of = orbit_ball(base, radius)
        self.word_of: dict[SphereTriple, Word] = {}
        for w, p in self.point_of.items():
            v = self.word_of.setdefault(p, w)
            if v != w:
                raise StabilizerError(
                    f"base point {self.base.to_json()} is fixed by {invert(v) * w}",
                    (invert(v) * w).to_json(),
                )

    def rank(self, p: SphereTriple) -> int:
        w = self.word_of.get(p)
        return self.radius + 1 if w is None else len(w)

    def word(self, p: SphereTriple) -> Word:
        w = self.word_of.get(p)
        if w is None:
            raise PreconditionError("point lies beyond the orbit index", point_json(p))
        return w

    def __len__(self) -> int:
        return len(self.point_of)


class OrbitRotation(Motion):
    """The rotation of a word, acting on canonical sphere triples."""

    def __init__(self, word: Word):
        self.word = word
        self.reach = len(word)

    def __call__(self, p: SphereTriple) -> SphereTriple:
        return apply_word(self.word, p).canonical()

    def inverse(self) -> Motion:
        return OrbitRotation(invert(self.word))

    def to_json(self) -> Any:
        return {"kind": "rotation", "word": self.word.to_json()}


def orbit_view(view: SetView, index: OrbitIndex) -> LazySet:
    """The points ``w(base)`` for ``w`` in a view of words."""
    return LazySet(
        f"orbit[{getattr(view, 'name', 'view')}]",
        lambda p: isinstance(p, SphereTriple) and index.word(p) in view,
        lambda d: (index.point_of[w] for w in view.points(min(d, index.radius))),
        index.rank,
        {"words": view.describe(), "base": index.base.to_json()},
    )


def orbit_motion(m: Motion) -> Motion:
    if isinstance(m, IdentityMotion):
        return m
    if isinstance(m, WordMotion):
        return OrbitRotation(m.word)
    raise PreconditionError(f"cannot carry motion {m!r} to an orbit")


def transfer_cert(c: EquidecompositionCert, index: OrbitIndex) -> EquidecompositionCert:
    pieces = tuple(Piece(orbit_view(v, index), orbit_motion(m)) for v, m in c.pieces)
    return EquidecompositionCert(
        orbit_view(c.source, index), orbit_view(c.target, index), pieces, index.radius, f"orbit: {c.name}"
    )


def transfer_paradox(
    certs: Sequence[EquidecompositionCert] | None,
    base: SphereTriple,
    depth: int,
) -> tuple[EquidecompositionCert, ...]:
    """Carry word-level certificates to the orbit of ``base``, truncated at ``depth``.

    Raises :class:`StabilizerError` if two words of length ``<= depth`` send
    ``base`` to the same point, i.e. it has a stabilizer of length ``<= 2 depth``.
    """
    certs = group_doubling_certs() if certs is None else certs
    index = OrbitIndex(base, depth)
    return tuple(transfer_cert(c, index) for c in certs)
