"""Equidecomposition certificates.

A certificate for ``A ~ B`` is a finite list of ``(piece, motion)`` pairs: the
pieces partition ``A`` and their moved copies partition ``B``.  Sets are
*views*: explicit finite sets, or lazy sets given by a membership test plus a
bounded enumerator.  Lazy sets live in a ranked space (word length, absorber
generation, ...) and ``points(d)`` returns the elements of rank at most ``d``.

Claims about lazy sets are only checked up to a depth.  Motions move rank by
at most ``reach``, so at depth ``d`` the source side is checked in full and
the target side is checked on ranks ``<= d - max reach``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .exactring import IsometryE, Vec3E, isometry_compose
from .report import PreconditionError, TarskiError, VerificationReport

Rank = Callable[[Any], int]


def point_json(x: Any) -> Any:
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, (tuple, list, frozenset, set)):
        return [point_json(y) for y in x]
    return x


def _sorted_json(points: Iterable[Any]) -> list[Any]:
    return sorted((point_json(p) for p in points), key=lambda j: json.dumps(j, sort_keys=True))


# set views


class SetView:
    rank: Rank | None = None

    def __contains__(self, x: Any) -> bool:
        raise NotImplementedError

    def points(self, depth: int | None = None) -> frozenset:
        raise NotImplementedError

    def describe(self) -> Any:
        raise NotImplementedError

    @property
    def ranked(self) -> bool:
        return self.rank is not None

    def __and__(self, other: SetView) -> SetView:
        return Filtered(self, other.__contains__, {"and": other.describe()})

    def __sub__(self, other: SetView) -> SetView:
        return Filtered(self, lambda x: x not in other, {"minus": other.describe()})

    def __or__(self, other: SetView) -> SetView:
        return UnionView((self, other))


class FiniteSet(SetView):
    """An explicit set; if ``rank`` is given it is a depth-``d`` truncation of something larger."""

    def __init__(self, points: Iterable[Hashable], rank: Rank | None = None, name: str | None = None):
        self._points = frozenset(points)
        self.rank = rank
        self.name = name

    def __contains__(self, x: Any) -> bool:
        return x in self._points

    def __len__(self) -> int:
        return len(self._points)

    def points(self, depth: int | None = None) -> frozenset:
        if depth is None or self.rank is None:
            return self._points
        rank = self.rank
        return frozenset(x for x in self._points if rank(x) <= depth)

    def describe(self) -> Any:
        out: dict[str, Any] = {"finite": _sorted_json(self._points)}
        if self.name:
            out["name"] = self.name
        return out

    def __repr__(self) -> str:
        return f"FiniteSet({self.name or len(self._points)})"


class LazySet(SetView):
    def __init__(
        self,
        name: str,
        contains: Callable[[Any], bool],
        enumerate: Callable[[int], Iterable[Any]],
        rank: Rank,
        params: Mapping[str, Any] | None = None,
    ):
        self.name = name
        self._contains = contains
        self._enumerate = enumerate
        self.rank = rank
        self.params = dict(params or {})

    def __contains__(self, x: Any) -> bool:
        return self._contains(x)

    def points(self, depth: int | None = None) -> frozenset:
        if depth is None:
            raise PreconditionError(f"lazy set {self.name!r} needs a depth to enumerate")
        return frozenset(self._enumerate(depth))

    def describe(self) -> Any:
        return {"lazy": self.name, "params": self.params}

    def __repr__(self) -> str:
        return f"LazySet({self.name})"


class Filtered(SetView):
    def __init__(self, base: SetView, predicate: Callable[[Any], bool], label: Any):
        self.base = base
        self.predicate = predicate
        self.label = label
        self.rank = base.rank

    def __contains__(self, x: Any) -> bool:
        return x in self.base and self.predicate(x)

    def points(self, depth: int | None = None) -> frozenset:
        pred = self.predicate
        return frozenset(x for x in self.base.points(depth) if pred(x))

    def describe(self) -> Any:
        return {"filter": self.base.describe(), "by": self.label}


class UnionView(SetView):
    def __init__(self, parts: Sequence[SetView]):
        self.parts = tuple(parts)
        self.rank = next((p.rank for p in self.parts if p.rank is not None), None)

    def __contains__(self, x: Any) -> bool:
        return any(x in p for p in self.parts)

    def points(self, depth: int | None = None) -> frozenset:
        out: set = set()
        for p in self.parts:
            out |= p.points(depth)
        return frozenset(out)

    def describe(self) -> Any:
        return {"union": [p.describe() for p in self.parts]}


class Image(SetView):
    """``motion(base)``."""

    def __init__(self, base: SetView, motion: Motion):
        self.base = base
        self.motion = motion
        self._inverse = motion.inverse()
        self.rank = base.rank

    def __contains__(self, y: Any) -> bool:
        return self._inverse(y) in self.base

    def points(self, depth: int | None = None) -> frozenset:
        m = self.motion
        if depth is None or self.rank is None:
            return frozenset(m(x) for x in self.base.points(depth))
        rank = self.rank
        moved = (m(x) for x in self.base.points(depth + m.reach))
        return frozenset(y for y in moved if rank(y) <= depth)

    def describe(self) -> Any:
        return {"image": self.base.describe(), "motion": self.motion.to_json()}


def materialize(view: SetView, depth: int | None = None) -> FiniteSet:
    return FiniteSet(view.points(depth), rank=view.rank)


# motions


class Motion:
    """An invertible map; ``reach`` bounds how far it can move a point's rank."""

    reach: int = 0

    def __call__(self, x: Any) -> Any:
        raise NotImplementedError

    def inverse(self) -> Motion:
        raise NotImplementedError

    def after(self, inner: Motion) -> Motion:
        if isinstance(inner, IdentityMotion):
            return self
        return ComposedMotion(self, inner)

    def to_json(self) -> Any:
        raise NotImplementedError


class IdentityMotion(Motion):
    reach = 0

    def __call__(self, x: Any) -> Any:
        return x

    def inverse(self) -> Motion:
        return self

    def after(self, inner: Motion) -> Motion:
        return inner

    def to_json(self) -> Any:
        return {"kind": "identity"}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IdentityMotion)

    def __hash__(self) -> int:
        return hash("identity")

    def __repr__(self) -> str:
        return "IdentityMotion()"


IDENTITY_MOTION = IdentityMotion()


class ComposedMotion(Motion):
    def __init__(self, outer: Motion, inner: Motion):
        self.outer = outer
        self.inner = inner
        self.reach = outer.reach + inner.reach

    def __call__(self, x: Any) -> Any:
        return self.outer(self.inner(x))

    def inverse(self) -> Motion:
        return ComposedMotion(self.inner.inverse(), self.outer.inverse())

    def to_json(self) -> Any:
        return {"kind": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


class PermutationMotion(Motion):
    """A bijection of a finite universe given as a mapping."""

    reach = 0

    def __init__(self, mapping: Mapping[Hashable, Hashable]):
        self.mapping = dict(mapping)
        if len(set(self.mapping.values())) != len(self.mapping):
            raise PreconditionError("permutation mapping is not injective")

    def __call__(self, x: Any) -> Any:
        return self.mapping[x]

    def inverse(self) -> Motion:
        return PermutationMotion({v: k for k, v in self.mapping.items()})

    def after(self, inner: Motion) -> Motion:
        if isinstance(inner, PermutationMotion) and inner.mapping.keys() == self.mapping.keys():
            return PermutationMotion({k: self.mapping[v] for k, v in inner.mapping.items()})
        return super().after(inner)

    def to_json(self) -> Any:
        pairs = sorted(([point_json(k), point_json(v)] for k, v in self.mapping.items()), key=json.dumps)
        return {"kind": "permutation", "map": pairs}


class IsometryMotion(Motion):
    def __init__(self, iso: IsometryE, reach: int = 1, name: str | None = None):
        self.iso = iso
        self.reach = reach
        self.name = name

    def __call__(self, x: Vec3E) -> Vec3E:
        return self.iso(x)

    def inverse(self) -> Motion:
        return IsometryMotion(self.iso.inverse(), self.reach, f"{self.name}^-1" if self.name else None)

    def after(self, inner: Motion) -> Motion:
        if isinstance(inner, IsometryMotion):
            return IsometryMotion(isometry_compose(self.iso, inner.iso), self.reach + inner.reach)
        return super().after(inner)

    def to_json(self) -> Any:
        out = {"kind": "isometry", **self.iso.to_json()}
        if self.name:
            out["name"] = self.name
        return out


class LineIsometry(Motion):
    """``n -> (-n if flip else n) + shift`` on the integers."""

    def __init__(self, shift: int, flip: bool = False):
        self.shift = shift
        self.flip = flip
        self.reach = abs(shift)

    def __call__(self, n: int) -> int:
        return (-n if self.flip else n) + self.shift

    def inverse(self) -> Motion:
        return LineIsometry(self.shift if self.flip else -self.shift, self.flip)

    def after(self, inner: Motion) -> Motion:
        if isinstance(inner, LineIsometry):
            shift = (-inner.shift if self.flip else inner.shift) + self.shift
            return LineIsometry(shift, self.flip != inner.flip)
        return super().after(inner)

    def to_json(self) -> Any:
        return {"kind": "line", "shift": self.shift, "flip": self.flip}


def line_set(name: str, predicate: Callable[[int], bool], **params: Any) -> LazySet:
    """A subset of the integers, ranked by absolute value."""
    return LazySet(
        name,
        lambda n: isinstance(n, int) and predicate(n),
        lambda d: (n for n in range(-d, d + 1) if predicate(n)),
        abs,
        params,
    )


# certificates


class Piece(NamedTuple):
    view: SetView
    motion: Motion


@dataclass(frozen=True)
class EquidecompositionCert:
    source: SetView
    target: SetView
    pieces: tuple[Piece, ...]
    depth: int | None = None
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(Piece(*p) for p in self.pieces))

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def ranked(self) -> bool:
        return self.source.ranked or self.target.ranked

    @property
    def reach(self) -> int:
        return max((p.motion.reach for p in self.pieces), default=0)

    def piece_of(self, x: Any) -> int:
        for i, p in enumerate(self.pieces):
            if x in p.view:
                return i
        raise PreconditionError("point lies in no piece", point_json(x))

    def induced(self, x: Any) -> Any:
        return self.pieces[self.piece_of(x)].motion(x)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "depth": self.depth,
            "source": self.source.describe(),
            "target": self.target.describe(),
            "pieces": [{"piece": p.view.describe(), "motion": p.motion.to_json()} for p in self.pieces],
        }


def _resolve_depth(c: EquidecompositionCert, depth: int | None) -> int | None:
    if not c.ranked:
        return None
    if depth is None:
        depth = c.depth
    if depth is None:
        raise PreconditionError(f"certificate {c.name!r} is over lazy sets; give a depth")
    if c.depth is not None and depth > c.depth:
        raise PreconditionError(f"certificate {c.name!r} is only checked to depth {c.depth}")
    if depth < 0:
        raise PreconditionError("depth must be nonnegative")
    return depth


def verify(c: EquidecompositionCert, depth: int | None = None) -> VerificationReport:
    """Check that the pieces partition the source and their images partition the target."""
    depth = _resolve_depth(c, depth)
    name = c.name or "equidecomposition"
    counts: dict[str, Any] = {}

    def fail(reason: str, witness: Any, **details: Any) -> VerificationReport:
        return VerificationReport(name, False, depth, counts, reason, point_json(witness), details)

    source = c.source.points(depth)
    owner: dict[Any, int] = {}
    piece_points = []
    for i, p in enumerate(c.pieces):
        pts = p.view.points(depth)
        piece_points.append(pts)
        for x in pts:
            if x not in source:
                return fail("piece point outside source", x, piece=i)
            j = owner.setdefault(x, i)
            if j != i:
                return fail("pieces overlap", x, pieces=[j, i])
    if len(owner) != len(source):
        missing = min(source - owner.keys(), key=_order_key)
        return fail("source point in no piece", missing)
    counts["source"] = len(source)
    counts["pieces"] = [len(pts) for pts in piece_points]

    trim = None if depth is None else depth - c.reach
    rank = c.target.rank or c.source.rank
    hit: dict[Any, int] = {}
    target = c.target
    for i, (pts, p) in enumerate(zip(piece_points, c.pieces)):
        m = p.motion
        for x in pts:
            y = m(x)
            if trim is not None and rank(y) > trim:
                continue
            if y not in target:
                return fail("image outside target", y, piece=i, preimage=point_json(x))
            j = hit.setdefault(y, i)
            if j != i:
                return fail("images overlap", y, pieces=[j, i])
    if trim is not None and trim < 0:
        expected: frozenset = frozenset()
    else:
        expected = target.points(trim)
    if len(hit) != len(expected) or not expected.issuperset(hit):
        missing = min(expected - hit.keys(), key=_order_key)
        return fail("target point not covered", missing)
    counts["target"] = len(expected)
    return VerificationReport(name, True, depth, counts, details={"trimmed_to": trim} if trim is not None else {})


def _order_key(x: Any) -> Any:
    key = getattr(x, "sort_key", None)
    if key is not None:
        return (0, key())
    return (1, json.dumps(point_json(x), sort_keys=True))


def identity_cert(view: SetView, name: str = "identity") -> EquidecompositionCert:
    return EquidecompositionCert(view, view, (Piece(view, IDENTITY_MOTION),), name=name)


def inverse(c: EquidecompositionCert) -> EquidecompositionCert:
    pieces = []
    for view, m in c.pieces:
        moved: SetView
        if isinstance(view, FiniteSet):
            moved = FiniteSet((m(x) for x in view.points()), rank=view.rank)
        else:
            moved = Image(view, m)
        pieces.append(Piece(moved, m.inverse()))
    name = f"inverse({c.name})" if c.name else "inverse"
    return EquidecompositionCert(c.target, c.source, tuple(pieces), c.depth, name)


def _min_depth(*depths: int | None) -> int | None:
    known = [d for d in depths if d is not None]
    return min(known) if known else None


def _same_set(a: SetView, b: SetView, depth: int | None) -> Any:
    """None if ``a`` and ``b`` agree at ``depth``, else a witness."""
    pa, pb = a.points(depth), b.points(depth)
    if pa == pb:
        return None
    return min(pa ^ pb, key=_order_key)


def compose(
    c1: EquidecompositionCert, c2: EquidecompositionCert, depth: int | None = None
) -> EquidecompositionCert:
    """``A ~ B`` and ``B ~ C`` give ``A ~ C`` with pieces ``A_k & g_k^-1(B_j)``."""
    ranked = c1.ranked or c2.ranked
    if not ranked or depth is not None:
        witness = _same_set(c1.target, c2.source, depth)
        if witness is not None:
            raise PreconditionError("target of the first certificate differs from source of the second",
                                    point_json(witness))
    pieces = []
    for a_view, g in c1.pieces:
        for b_view, h in c2.pieces:
            view: SetView
            if isinstance(a_view, FiniteSet):
                view = FiniteSet((x for x in a_view.points() if g(x) in b_view), rank=a_view.rank)
                if not len(view):
                    continue
            else:
                view = Filtered(a_view, lambda x, g=g, b=b_view: g(x) in b, {"moved_into": b_view.describe()})
            pieces.append(Piece(view, h.after(g)))
    name = f"({c2.name} o {c1.name})" if c1.name and c2.name else "composite"
    return EquidecompositionCert(c1.source, c2.target, tuple(pieces), _min_depth(c1.depth, c2.depth), name)


def _check_subset(inner: SetView, outer: SetView, depth: int | None, what: str) -> None:
    for x in inner.points(depth):
        if x not in outer:
            raise PreconditionError(f"{what}: inclusion fails", point_json(x))


def absorb(P: SetView, Q: SetView, g: Motion, A: SetView, depth: int | None = None) -> EquidecompositionCert:
    """``P <= Q <= A`` and ``g(Q) = Q - P`` give ``A ~ A - P`` with two pieces."""
    _check_subset(P, Q, depth, "P in Q")
    _check_subset(Q, A, depth, "Q in A")
    shift = EquidecompositionCert(Q, Q - P, (Piece(Q, g),), name="shift")
    rep = verify(shift, depth)
    if not rep.passed:
        raise PreconditionError(f"g(Q) != Q - P: {rep.reason}", rep.witness)
    cert = EquidecompositionCert(
        A, A - P, (Piece(Q, g), Piece(A - Q, IDENTITY_MOTION)), name="absorb"
    )
    verify(cert, depth).raise_if_failed()
    return cert


@dataclass
class ParadoxPieces:
    """Disjoint ``B, C`` inside ``A`` with certificates ``B ~ A`` and ``C ~ A``."""

    A: SetView
    B: SetView
    C: SetView
    b_cert: EquidecompositionCert
    c_cert: EquidecompositionCert

    def verify(self, depth: int | None = None) -> VerificationReport:
        for rep in (verify(self.b_cert, depth), verify(self.c_cert, depth)):
            if not rep.passed:
                return rep
        both = self.B.points(depth) & self.C.points(depth)
        if both:
            return VerificationReport("paradox", False, depth, reason="B and C overlap",
                                      witness=point_json(min(both, key=_order_key)))
        for name, s in (("B", self.B), ("C", self.C)):
            outside = [x for x in s.points(depth) if x not in self.A]
            if outside:
                return VerificationReport("paradox", False, depth, reason=f"{name} not inside A",
                                          witness=point_json(min(outside, key=_order_key)))
        return VerificationReport("paradox", True, depth,
                                  {"B": len(self.B.points(depth)), "C": len(self.C.points(depth))})


def transfer(par: ParadoxPieces, move: EquidecompositionCert, depth: int | None = None) -> ParadoxPieces:
    """Carry a paradoxical decomposition of ``A`` across ``A ~ A'``."""
    if depth is not None or not move.ranked:
        par.verify(depth).raise_if_failed()
        verify(move, depth).raise_if_failed()

    def carry(S: SetView, cert_to_A: EquidecompositionCert) -> tuple[SetView, EquidecompositionCert]:
        parts = []
        for view, g in move.pieces:
            parts.append(Piece(Image(view & S, g), g.inverse()))
        S_new = UnionView([p.view for p in parts]) if parts else FiniteSet(())
        back = EquidecompositionCert(S_new, S, tuple(parts), name="carry-back")
        return S_new, compose(compose(back, cert_to_A), move)

    B2, b_cert = carry(par.B, par.b_cert)
    C2, c_cert = carry(par.C, par.c_cert)
    return ParadoxPieces(move.target, B2, C2, b_cert, c_cert)


# Schroeder-Bernstein


class NonStabilizingError(TarskiError):
    pass


@dataclass
class BsbFixedPoint:
    A: frozenset
    B: frozenset
    g: dict
    f: dict
    D: frozenset
    iterations: int

    def phi(self, D: Iterable[Any]) -> frozenset:
        return bsb_phi(D, self.A, self.B, self.g, self.f)


def bsb_phi(D: Iterable[Any], A: frozenset, B: frozenset, g: Mapping, f: Mapping) -> frozenset:
    """``A - f(B - g(D))``."""
    gD = {g[x] for x in D}
    return A - {f[y] for y in B if y not in gD}


def _piece_map(c: EquidecompositionCert, depth: int | None, domain: frozenset) -> dict:
    out: dict = {}
    for i, (view, m) in enumerate(c.pieces):
        for x in view.points(depth):
            if x in out:
                raise PreconditionError(f"pieces of {c.name!r} overlap", point_json(x))
            out[x] = m(x)
    missing = domain - out.keys()
    if missing:
        raise PreconditionError(f"pieces of {c.name!r} do not cover the source", point_json(min(missing, key=_order_key)))
    if len(set(out.values())) != len(out):
        seen: dict = {}
        for x, y in out.items():
            if y in seen:
                raise PreconditionError(f"induced map of {c.name!r} is not injective", point_json(y))
            seen[y] = x
    return out


def bsb_fixed_point(
    gc: EquidecompositionCert,
    fc: EquidecompositionCert,
    depth: int | None = None,
    max_iterations: int | None = None,
) -> BsbFixedPoint:
    """Greatest fixed point of ``D -> A - f(B - g(D))``, iterating down from ``A``.

    On lazy views everything is truncated at ``depth``; ``f``/``g`` images that
    fall outside the truncation are simply not subtracted.
    """
    ranked = gc.ranked or fc.ranked
    if ranked and depth is None:
        depth = _min_depth(gc.depth, fc.depth)
        if depth is None:
            raise PreconditionError("lazy certificates need a depth")
    if not ranked:
        depth = None
    A, B = gc.source, fc.source
    A_pts, B_pts = A.points(depth), B.points(depth)
    g = _piece_map(gc, depth, A_pts)
    f = _piece_map(fc, depth, B_pts)
    rank_b, rank_a = B.rank, A.rank
    for x, y in g.items():
        if (rank_b is None or rank_b(y) <= depth) and y not in B:
            raise PreconditionError("g does not map A into B", point_json(x))
    for y, x in f.items():
        if (rank_a is None or rank_a(x) <= depth) and x not in A:
            raise PreconditionError("f does not map B into A", point_json(y))
    cap = max_iterations if max_iterations is not None else len(A_pts) + 1
    D = A_pts
    for it in range(1, cap + 1):
        nxt = bsb_phi(D, A_pts, B_pts, g, f)
        if nxt == D:
            return BsbFixedPoint(A_pts, B_pts, g, f, D, it)
        D = nxt
    raise NonStabilizingError(f"fixed-point iteration did not stabilize within {cap} steps at depth {depth}")


def bsb_combine(
    gc: EquidecompositionCert,
    fc: EquidecompositionCert,
    depth: int | None = None,
    max_iterations: int | None = None,
) -> EquidecompositionCert:
    """From ``A ~ B' <= B`` and ``B ~ A' <= A`` build ``A ~ B``.

    Uses ``g`` on the fixed point ``D`` and ``f^-1`` on ``A - D``.
    """
    fp = bsb_fixed_point(gc, fc, depth, max_iterations)
    ranked = gc.ranked or fc.ranked
    depth = _min_depth(depth, gc.depth, fc.depth) if ranked else None
    rank = gc.source.rank
    D = fp.D
    gD = {fp.g[x] for x in D}
    pieces = []
    for view, m in gc.pieces:
        part = [x for x in view.points(depth) if x in D]
        if part:
            pieces.append(Piece(FiniteSet(part, rank=rank), m))
    for view, m in fc.pieces:
        part = [fp.f[y] for y in view.points(depth) if y not in gD]
        part = [x for x in part if x in fp.A]
        if part:
            pieces.append(Piece(FiniteSet(part, rank=rank), m.inverse()))
    name = "bsb"
    cert = EquidecompositionCert(gc.source, fc.source, tuple(pieces), depth if ranked else None, name)
    verify(cert, depth).raise_if_failed()
    return cert


def sandwich(
    C: SetView, Q: SetView, A: SetView, c: EquidecompositionCert, depth: int | None = None
) -> EquidecompositionCert:
    """``C <= Q <= A`` and ``C ~ A`` give ``Q ~ A``."""
    _check_subset(C, Q, depth, "C in Q")
    _check_subset(Q, A, depth, "Q in A")
    verify(c, depth).raise_if_failed()
    gc = identity_cert(Q, "inclusion")
    fc = inverse(c)
    return bsb_combine(gc, fc, depth)


def paradox_partition(par: ParadoxPieces, depth: int | None = None) -> ParadoxPieces:
    """Enlarge ``C`` to ``A - B`` so that ``A = B u C`` is a partition."""
    par.verify(depth).raise_if_failed()
    rest = par.A.points(depth) - par.B.points(depth) - par.C.points(depth)
    if not rest:
        return par
    Q = par.A - par.B
    cq = sandwich(par.C, Q, par.A, par.c_cert, depth)
    return ParadoxPieces(par.A, par.B, cq.source, par.b_cert, cq)


def random_piecewise_cert(
    rng: Any, source: Sequence[Hashable], target: Sequence[Hashable], max_pieces: int, name: str = "random"
) -> EquidecompositionCert:
    """A random injection ``source -> target`` cut into at most ``max_pieces`` pieces.

    ``rng`` is a :class:`random.Random`; each piece moves by its own finite permutation.
    """
    if len(target) < len(source):
        raise PreconditionError("no injection into a smaller set")
    if max_pieces < 1:
        raise PreconditionError("need at least one piece")
    src = list(source)
    img = rng.sample(list(target), len(src))
    k = rng.randint(1, max(1, min(max_pieces, len(src))))
    owner = [rng.randrange(k) for _ in src]
    pieces = []
    for i in range(k):
        mapping = {x: y for x, y, o in zip(src, img, owner) if o == i}
        if mapping:
            pieces.append(Piece(FiniteSet(mapping), PermutationMotion(mapping)))
    return EquidecompositionCert(FiniteSet(src), FiniteSet(img), tuple(pieces), name=name)
