"""Doubling the sphere and the ball on a truncated orbit, and plans for the strong form."""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import isqrt
from typing import Any, Iterable, Mapping, Sequence

from .absorption import ball_minus_origin_cert, rational_sqrt
from .actions import OrbitIndex, StabilizerError, transfer_paradox
from .equideco import (
    IDENTITY_MOTION,
    EquidecompositionCert,
    IsometryMotion,
    LazySet,
    Piece,
    verify,
)
from .exactring import IsometryE, RingScalar, Vec3E
from .freegroup import (
    ALL_LABELS,
    Letter,
    PieceLabel,
    Word,
    ball_size,
    classify,
    invert,
    piece_view,
)
from .report import SCHEMA, PreconditionError, VerificationReport
from .rotact import SphereTriple, apply_word, find_stabilizer, word_matrix

# stststst applied to the north pole: its shortest stabilizing word has length 17
DEFAULT_BASE = SphereTriple(1520, -1136, 6177, 8)


def stabilizer_certify(base: SphereTriple, depth: int) -> bool:
    """True iff no nonempty reduced word of length ``<= depth`` fixes ``base``."""
    return find_stabilizer(base, depth) is None


@dataclass
class OrbitCloud:
    base: SphereTriple
    depth: int
    points: dict[Word, SphereTriple]
    labels: dict[Word, PieceLabel]

    @classmethod
    def from_index(cls, index: OrbitIndex) -> OrbitCloud:
        pts = dict(index.point_of)
        return cls(index.base, index.radius, pts, {w: classify(w) for w in pts})

    def __len__(self) -> int:
        return len(self.points)

    def trimmed(self, depth: int) -> frozenset:
        return frozenset(p for w, p in self.points.items() if len(w) <= depth)

    def distinct(self) -> bool:
        return len(set(self.points.values())) == len(self.points)

    def ordered(self) -> list[Word]:
        return sorted(self.points)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "base": self.base.to_json(),
            "depth": self.depth,
            "points": [
                {"word": w.to_json(), "label": self.labels[w].name, "triple": self.points[w].to_json()}
                for w in self.ordered()
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any] | str) -> OrbitCloud:
        if isinstance(doc, str):
            doc = json.loads(doc)
        pts, labels = {}, {}
        for row in doc["points"]:
            w = Word.parse(row["word"])
            pts[w] = SphereTriple(*row["triple"])
            labels[w] = PieceLabel[row["label"]]
        return cls(SphereTriple(*doc["base"]), doc["depth"], pts, labels)


def _copy(index: OrbitIndex, gen: Letter) -> OrbitCloud:
    """Reassemble the orbit from ``W(g)`` (moved by ``g^-1``) and ``W(g^-1)`` (left alone)."""
    back = Word._trusted((gen.inv(),))
    pts: dict[Word, SphereTriple] = {}
    labels: dict[Word, PieceLabel] = {}
    for w, p in index.point_of.items():
        if not w or w[0].generator != gen.generator:
            continue
        if w[0] == gen:
            w2, p2 = back * w, apply_word(back, p).canonical()
        else:
            w2, p2 = w, p
        pts[w2] = p2
        labels[w2] = classify(w)
    return OrbitCloud(index.base, index.radius, pts, labels)


def orbit_double(base: SphereTriple = DEFAULT_BASE, depth: int = 7) -> tuple[OrbitCloud, OrbitCloud, VerificationReport]:
    """Split the orbit ball into two disjoint halves, each reassembling the whole orbit.

    The halves are ``W(s) u W(S)`` and ``W(t) u W(T)``; ``s^-1 W(s) u W(S)`` covers
    the orbit, and likewise for ``t``.  Checked exactly, trimmed to ``depth - 1``.
    """
    if depth < 1:
        raise PreconditionError("orbit doubling needs depth at least 1")
    rel = find_stabilizer(base, 2 * depth)
    if rel is not None:
        raise StabilizerError(f"base point {base.to_json()} is fixed by {rel}", rel.to_json())
    index = OrbitIndex(base, depth)
    full = OrbitCloud.from_index(index)
    name = "orbit-doubling"
    sizes = {l.name: 0 for l in ALL_LABELS}
    for l in full.labels.values():
        sizes[l.name] += 1
    counts: dict[str, Any] = {"points": len(full), "pieces": sizes}

    def fail(reason: str, witness: Any) -> tuple[OrbitCloud, OrbitCloud, VerificationReport]:
        return c1, c2, VerificationReport(name, False, depth, counts, reason, witness)

    c1, c2 = _copy(index, Letter.SIGMA), _copy(index, Letter.TAU)
    if not full.distinct():
        return fail("orbit points not distinct", None)
    for w, p in list(c1.points.items()) + list(c2.points.items()):
        if index.point_of.get(w, p) != p:
            return fail("moved point disagrees with its word", w.to_json())
    used1 = {p for w, p in index.point_of.items() if w and w[0].generator == Letter.SIGMA}
    used2 = {p for w, p in index.point_of.items() if w and w[0].generator == Letter.TAU}
    if used1 & used2:
        return fail("the two halves overlap", index.word(min(used1 & used2, key=SphereTriple.sort_key)).to_json())
    trimmed = full.trimmed(depth - 1)
    for c in (c1, c2):
        got = c.trimmed(depth - 1)
        if got != trimmed:
            odd = min(got ^ trimmed, key=SphereTriple.sort_key)
            return fail("copy does not reassemble the trimmed orbit", index.word(odd).to_json())
    for cert in transfer_paradox(None, base, depth):
        rep = verify(cert, depth)
        if not rep.passed:
            return fail(f"{cert.name}: {rep.reason}", rep.witness)
    counts["copies"] = [len(c1), len(c2)]
    counts["trimmed"] = len(trimmed)
    return c1, c2, VerificationReport(name, True, depth, counts)


# the ball

RADII = (Fraction(1), Fraction(1, 2), Fraction(1, 3))


def _direction(v: Vec3E) -> tuple[Fraction, SphereTriple] | None:
    """``(r, p)`` with ``v = r p``, ``r`` rational and ``p`` a sphere triple, if possible."""
    n = v.norm_sq()
    if not n.is_rational():
        return None
    r = rational_sqrt(n.parts()[0])
    if not r:
        return None
    (xr, xs), (yr, ys), (zr, zs) = v.x.parts(), v.y.parts(), v.z.parts()
    if xs or yr or zs:
        return None
    x, y, z = xr / r, ys / r, zr / r
    dens = [x.denominator, y.denominator, z.denominator]
    k = 0
    while any(d % 3 == 0 for d in dens):
        dens = [d // 3 if d % 3 == 0 else d for d in dens]
        k += 1
    if any(d != 1 for d in dens):
        return None
    s = 3**k
    return r, SphereTriple(int(x * s), int(y * s), int(z * s), k).canonical()


def cone_view(words: LazySet, index: OrbitIndex, radii: Sequence[Fraction] = RADII) -> LazySet:
    """Points ``r p`` with ``0 < r <= 1`` and ``p`` the image of the base under a word in ``words``.

    Enumeration samples the radii in ``radii``; membership accepts any radius in (0, 1].
    """
    def rank(v: Vec3E) -> int:
        d = _direction(v)
        return index.radius + 1 if d is None else index.rank(d[1])

    def contains(v: Any) -> bool:
        if not isinstance(v, Vec3E):
            return False
        d = _direction(v)
        if d is None or not 0 < d[0] <= 1:
            return False
        p = d[1]
        return p in index.word_of and index.word_of[p] in words

    def enum(d: int) -> Iterable[Vec3E]:
        for w in words.points(min(d, index.radius)):
            p = index.point_of[w].to_vec()
            for r in radii:
                yield p.scale(RingScalar.of(r))

    return LazySet(f"cone[{words.name}]", contains, enum, rank, {"radii": [str(r) for r in radii]})


def _rotation_motion(w: Word) -> IsometryMotion:
    return IsometryMotion(IsometryE.rotation(word_matrix(w)), len(w), w.to_json())


@dataclass
class BallParadox:
    """Cones over the two halves of the orbit, each equidecomposable with the whole cone,
    plus the absorption of the centre."""

    whole: LazySet
    halves: tuple[LazySet, LazySet]
    certs: tuple[EquidecompositionCert, EquidecompositionCert]
    centre: EquidecompositionCert
    depth: int
    horizon: int

    def verify(self) -> VerificationReport:
        reports = [verify(c, self.depth) for c in self.certs] + [verify(self.centre, self.horizon)]
        details = {"reports": [r.to_json() for r in reports]}
        for r in reports:
            if not r.passed:
                return VerificationReport("ball-paradox", False, self.depth, reason=f"{r.name}: {r.reason}",
                                          witness=r.witness, details=details)
        a, b = (h.points(self.depth) for h in self.halves)
        if a & b:
            return VerificationReport("ball-paradox", False, self.depth, reason="halves overlap",
                                      witness=min(a & b, key=str).to_json(), details=details)
        counts = {"whole": len(self.whole.points(self.depth)), "halves": [len(a), len(b)]}
        return VerificationReport("ball-paradox", True, self.depth, counts, details=details)


def ball_paradox_cert(depth: int = 4, horizon: int = 50, base: SphereTriple = DEFAULT_BASE) -> BallParadox:
    """The truncated paradox of the punctured ball, with the centre absorption to put 0 back."""
    index = OrbitIndex(base, depth)
    whole = cone_view(piece_view(*ALL_LABELS), index)
    certs = []
    halves = []
    for gen in (Letter.SIGMA, Letter.TAU):
        fwd, back = PieceLabel(gen), PieceLabel(gen.inv())
        Wf = cone_view(piece_view(fwd), index)
        Wb = cone_view(piece_view(back), index)
        half = cone_view(piece_view(fwd, back), index)
        halves.append(half)
        pieces = (Piece(Wf, _rotation_motion(Word._trusted((gen.inv(),)))), Piece(Wb, IDENTITY_MOTION))
        certs.append(EquidecompositionCert(half, whole, pieces, depth, f"cone {gen.char}-half ~ cone"))
    centre = ball_minus_origin_cert(horizon)
    return BallParadox(whole, (halves[0], halves[1]), (certs[0], certs[1]), centre, depth, horizon)


# derivation plans for the strong form


class NodeKind(enum.Enum):
    WEAK_FORM_AXIOM = "WEAK_FORM_AXIOM"
    INCLUSION = "INCLUSION"
    COMPOSE = "COMPOSE"
    BSB = "BSB"
    N_FOLD = "N_FOLD"
    DISJOINT_DOUBLE = "DISJOINT_DOUBLE"


# B ~ A for the ball: 2-piece word certificates, composed on both sides with the
# 2-piece absorption of fixed points (sphere), then of the centre (ball).
WEAK_FORM_BOUND = 2 * 4 * 4


@dataclass(frozen=True)
class DerivationCert:
    kind: NodeKind
    label: str
    bound: int
    children: tuple[DerivationCert, ...] = ()
    params: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "label": self.label, "bound": self.bound}
        if self.params:
            out["params"] = dict(self.params)
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def nodes(self) -> Iterable[DerivationCert]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))


def _leaf(kind: NodeKind, label: str, bound: int = 1, **params: Any) -> DerivationCert:
    return DerivationCert(kind, label, bound, (), params)


def identity_leaf(label: str = "A ~ A") -> DerivationCert:
    return _leaf(NodeKind.INCLUSION, label, 1, motion="identity")


def compose_node(label: str, *children: DerivationCert) -> DerivationCert:
    bound = 1
    for c in children:
        bound *= c.bound
    return DerivationCert(NodeKind.COMPOSE, label, bound, children)


def bsb_node(label: str, forward: DerivationCert, backward: DerivationCert) -> DerivationCert:
    return DerivationCert(NodeKind.BSB, label, forward.bound + backward.bound, (forward, backward))


def disjoint_double_plan() -> DerivationCert:
    """``A ~ A u A1`` with ``A1`` a disjoint translate of ``A``."""
    b = _leaf(NodeKind.WEAK_FORM_AXIOM, "B ~ A", WEAK_FORM_BOUND)
    c_axiom = _leaf(NodeKind.WEAK_FORM_AXIOM, "C ~ A", WEAK_FORM_BOUND)
    widen = bsb_node("A - B ~ A", _leaf(NodeKind.INCLUSION, "A - B <= A"), c_axiom)
    moved = compose_node("A - B ~ A1", widen, _leaf(NodeKind.INCLUSION, "A ~ A1", motion="translation"))
    return DerivationCert(NodeKind.DISJOINT_DOUBLE, "A ~ A u A1", b.bound + moved.bound, (b, moved))


def n_fold_step(previous: int, double: int) -> int:
    """Bound for ``n`` copies from the bound for ``n - 1``.

    ``A <= A_1 u ... u A_n`` by inclusion, and back through ``A ~ A u A'`` composed
    with ``A' ~ A_2 u ... u A_n`` (itself a BSB of the ``n - 1`` case and an inclusion).
    """
    return 1 + double * (previous + 1)


def n_fold_bound(n: int, double: int | None = None) -> int:
    if n < 1:
        raise PreconditionError("n must be at least 1")
    double = disjoint_double_plan().bound if double is None else double
    b = 1
    for _ in range(n - 1):
        b = n_fold_step(b, double)
    return b


def n_fold_plan(n: int) -> DerivationCert:
    """``A ~ A_1 u ... u A_n`` for disjoint translates ``A_j``."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    if n == 1:
        return identity_leaf("A ~ A_1")
    dd = disjoint_double_plan()
    return DerivationCert(
        NodeKind.N_FOLD, f"A ~ A_1 u ... u A_{n}", n_fold_bound(n, dd.bound),
        (dd, _leaf(NodeKind.INCLUSION, "A <= A_1 u ... u A_n")), {"n": n},
    )


def _positive(x: Fraction | int | str, name: str) -> Fraction:
    try:
        v = Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError):
        raise PreconditionError(f"{name} must be a positive rational", str(x)) from None
    if v <= 0:
        raise PreconditionError(f"{name} must be positive", str(x))
    return v


def covering_count(r: Fraction, R: Fraction) -> int:
    """Balls of radius ``r`` centred on a cube grid of side ``r/sqrt3`` needed to cover a radius-``R`` ball.

    Per axis ``m`` cubes with ``m r / sqrt3 >= 2R``, i.e. ``m^2 r^2 >= 12 R^2``; the count is ``m^3``.
    """
    target = 12 * R * R / (r * r)
    m = isqrt(target.numerator // target.denominator)
    while m * m < target:
        m += 1
    return m**3


def strong_form_plan(r_Q: Any, R_Q: Any, r_T: Any, R_T: Any) -> DerivationCert:
    """``Q ~ T`` for bounded bodies containing balls of radius ``r`` and inside balls of radius ``R``."""
    rQ, RQ, rT, RT = (_positive(v, n) for v, n in ((r_Q, "r_Q"), (R_Q, "R_Q"), (r_T, "r_T"), (R_T, "R_T")))
    if rQ > RQ or rT > RT:
        raise PreconditionError("inner radius exceeds outer radius")
    params = {"r_Q": str(rQ), "R_Q": str(RQ), "r_T": str(rT), "R_T": str(RT)}
    if rQ == RQ == rT == RT:
        return DerivationCert(NodeKind.INCLUSION, "Q ~ T", 1, (), {**params, "motion": "translation"})
    r = min(rQ, rT)

    def body(name: str, R: Fraction) -> DerivationCert:
        n = covering_count(r, R)
        cover = compose_node(
            f"{name} <= A",
            _leaf(NodeKind.INCLUSION, f"{name} <= A_1 u ... u A_{n}", covering=n),
            n_fold_plan(n),
        )
        return bsb_node(f"{name} ~ A", cover, _leaf(NodeKind.INCLUSION, f"A <= {name}"))

    q, t = body("Q", RQ), body("T", RT)
    plan = compose_node("Q ~ T", q, _leaf(NodeKind.INCLUSION, "A ~ A'", motion="translation"), t)
    return DerivationCert(plan.kind, plan.label, plan.bound, plan.children, {**params, "r": str(r)})


def validate_plan(plan: DerivationCert) -> VerificationReport:
    """Check every node's bound against its children: COMPOSE multiplies, BSB and DISJOINT_DOUBLE add."""
    checked = 0
    for node in plan.nodes():
        checked += 1
        kids = [c.bound for c in node.children]
        k = node.kind
        if k in (NodeKind.WEAK_FORM_AXIOM, NodeKind.INCLUSION):
            ok = not kids and node.bound == (WEAK_FORM_BOUND if k is NodeKind.WEAK_FORM_AXIOM else 1)
        elif k is NodeKind.COMPOSE:
            prod = 1
            for b in kids:
                prod *= b
            ok = len(kids) >= 2 and node.bound == prod
        elif k is NodeKind.BSB:
            ok = len(kids) == 2 and node.bound == sum(kids)
        elif k is NodeKind.DISJOINT_DOUBLE:
            ok = len(kids) == 2 and node.bound == sum(kids)
        else:
            n = node.params.get("n")
            ok = (
                isinstance(n, int) and n >= 2 and len(node.children) == 2
                and node.children[0].kind is NodeKind.DISJOINT_DOUBLE
                and node.bound == n_fold_bound(n, kids[0])
            )
        if not ok:
            return VerificationReport("plan", False, counts={"nodes": checked},
                                      reason=f"bad {k.value} node", witness=node.label)
    return VerificationReport("plan", True, counts={"nodes": checked, "bound_digits": len(str(plan.bound))})


# exports

EXPORT_FORMATS = ("csv", "json", "ply")


def decimal_coords(t: SphereTriple, digits: int = 12) -> tuple[str, str, str]:
    with localcontext() as ctx:
        ctx.prec = 60 + len(str(3**t.k))
        d = Decimal(3) ** t.k
        vals = (Decimal(t.a) / d, Decimal(t.b) * Decimal(2).sqrt() / d, Decimal(t.c) / d)
        q = Decimal(1).scaleb(-digits)
        return tuple(str(v.quantize(q)) for v in vals)  # type: ignore[return-value]


def export_cloud(c: OrbitCloud, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(c.to_json(), sort_keys=True, indent=1) + "\n"
    words = c.ordered()
    if fmt == "csv":
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["word", "label", "a", "b", "c", "k", "x", "y", "z"])
        for w in words:
            t = c.points[w]
            out.writerow([w.to_json(), c.labels[w].name, t.a, t.b, t.c, t.k, *decimal_coords(t)])
        return buf.getvalue()
    if fmt == "ply":
        lines = [
            "ply", "format ascii 1.0", f"element vertex {len(words)}",
            "property double x", "property double y", "property double z", "property int label",
            "end_header",
        ]
        for w in words:
            lines.append(" ".join((*decimal_coords(c.points[w]), str(int(c.labels[w])))))
        return "\n".join(lines) + "\n"
    raise PreconditionError(f"unsupported export format {fmt!r}; use one of {', '.join(EXPORT_FORMATS)}")


def import_cloud(text: str) -> OrbitCloud:
    return OrbitCloud.from_json(text)


def orbit_cloud(base: SphereTriple = DEFAULT_BASE, depth: int = 7) -> OrbitCloud:
    return OrbitCloud.from_index(OrbitIndex(base, depth))
