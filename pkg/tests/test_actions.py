import json
import random

import pytest

from group_corpus import action_corpus, groups
from tarskikit.actions import (
    FiniteAction,
    InvalidActionError,
    OrbitIndex,
    StabilizerError,
    choose_representatives,
    is_free,
    lift_partition,
    orbit_view,
    orbits,
    star,
    transfer_paradox,
    translates_partition,
)
from tarskikit.equideco import verify
from tarskikit.freegroup import PieceLabel, Word, enumerate_ball, piece_view
from tarskikit.rotact import START, SphereTriple, apply_word

Z2 = [[0, 1], [1, 0]]
DEFAULT_BASE = SphereTriple(1520, -1136, 6177, 8)


def cyclic(n):
    return FiniteAction.regular(range(n), 0, {(i, j): (i + j) % n for i in range(n) for j in range(n)})


def double_swap():
    return FiniteAction.from_tables([0, 1], 0, Z2, list("abcd"), [list("abcd"), list("badc")])


def z2_fixing_a():
    return FiniteAction.from_tables([0, 1], 0, Z2, list("abc"), [list("abc"), list("acb")])


def test_orbits_examples():
    assert orbits(cyclic(3)).blocks == (frozenset({0, 1, 2}),)
    assert set(orbits(double_swap()).blocks) == {frozenset("ab"), frozenset("cd")}
    trivial = FiniteAction.from_tables([0, 1], 0, Z2, list("ab"), [list("ab"), list("ab")])
    assert set(orbits(trivial).blocks) == {frozenset("a"), frozenset("b")}


def test_is_free_examples():
    for n in range(1, 6):
        assert is_free(cyclic(n))
    assert is_free(double_swap())
    assert not is_free(z2_fixing_a())


def test_representatives():
    P = orbits(double_swap())
    M = choose_representatives(P)
    assert set(M) == {"a", "c"}
    assert choose_representatives(orbits(double_swap())) == M
    assert len(choose_representatives(orbits(cyclic(4)))) == 1


def test_translates_examples():
    rep = translates_partition(cyclic(4), [0])
    assert rep.passed
    A = double_swap()
    assert translates_partition(A, ["a", "c"]).passed
    assert A.act_set(1, ["a", "c"]) == frozenset("bd")
    bad = translates_partition(z2_fixing_a(), choose_representatives(orbits(z2_fixing_a())))
    assert not bad.passed and bad.reason == "translates overlap"
    h, g, y = bad.witness
    assert h != g and y == "a"


def test_star_examples():
    A = double_swap()
    M = choose_representatives(orbits(A))
    assert star([0], M, A) == frozenset(M)
    assert star(A.elements, M, A) == frozenset(A.points)


def test_lift_examples():
    A = double_swap()
    M = ["a", "c"]
    assert lift_partition([[0, 1]], M, A) == [frozenset("abcd")]
    assert lift_partition([[0], [1]], M, A) == [frozenset("ac"), frozenset("bd")]
    with pytest.raises(ValueError):
        lift_partition([[0]], M, A)
    with pytest.raises(ValueError):
        lift_partition([[0, 1], [1]], M, A)
    with pytest.raises(ValueError):
        lift_partition([[0, 1]], ["a"], z2_fixing_a())


def test_lift_random_partitions_of_z4():
    rng = random.Random(4)
    A = cyclic(4)
    M = choose_representatives(orbits(A))
    for _ in range(30):
        labels = [rng.randrange(3) for _ in range(4)]
        blocks = [[g for g in range(4) if labels[g] == k] for k in set(labels)]
        lifted = lift_partition(blocks, M, A)
        assert [len(b) for b in lifted] == [len(b) * len(M) for b in blocks]
        assert frozenset().union(*lifted) == frozenset(A.points)


def test_invalid_actions_rejected():
    with pytest.raises(InvalidActionError):
        FiniteAction.from_tables([0, 1], 0, Z2, list("ab"), [list("ab"), list("aa")])
    with pytest.raises(InvalidActionError) as err:
        # g acts as an involution but g*g = g is not a group law
        FiniteAction.from_tables([0, 1], 0, [[0, 1], [1, 1]], list("ab"), [list("ab"), list("ba")])
    assert err.value.witness is not None
    with pytest.raises(InvalidActionError) as err:
        # a 3-cycle cannot be a Z2 action: act(1, act(1, x)) != x
        FiniteAction.from_tables([0, 1], 0, Z2, list("abc"), [list("abc"), list("bca")])
    assert len(err.value.witness) == 3


def test_json_roundtrip():
    A = double_swap()
    doc = json.dumps(A.to_json())
    assert FiniteAction.from_json(doc).to_json() == A.to_json()
    with pytest.raises(InvalidActionError):
        FiniteAction.from_json('{"elements": [0]}')


def test_corpus_size():
    corpus = action_corpus()
    assert len(groups()) == 14
    assert len(corpus) > 1000


@pytest.mark.parametrize("gname", sorted(groups()))
def test_corpus_invariants(gname):
    for label, A in action_corpus():
        if not label.startswith(gname + ":"):
            continue
        P = orbits(A)
        seen = set()
        for b in P.blocks:
            assert not seen & b
            seen |= b
            for g in A.elements:
                assert A.act_set(g, b) == b
        assert seen == set(A.points)
        M = choose_representatives(P)
        assert translates_partition(A, M).passed == is_free(A), label


def test_star_equivariance_on_corpus():
    rng = random.Random(7)
    for label, A in action_corpus()[::7]:
        M = choose_representatives(orbits(A))
        for _ in range(5):
            B = [g for g in A.elements if rng.random() < 0.5]
            g = rng.choice(A.elements)
            gB = [A.times(g, b) for b in B]
            assert star(gB, M, A) == A.act_set(g, star(B, M, A)), label


# orbit transfer


def test_transfer_depth_one_pieces():
    index = OrbitIndex(DEFAULT_BASE, 1)
    view = orbit_view(piece_view(PieceLabel.IDENTITY, PieceLabel.W_TAU, PieceLabel.W_TAU_INV), index)
    pts = view.points(1)
    assert len(pts) == 3
    assert {index.word(p) for p in pts} == {Word.parse(w) for w in ("e", "t", "T")}


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_transfer_distinct_points(n):
    index = OrbitIndex(DEFAULT_BASE, n)
    assert len(index) == len(set(index.point_of.values())) == 2 * 3**n - 1
    for w, p in index.point_of.items():
        assert apply_word(w, DEFAULT_BASE).same_point(p)


def test_transfer_certs_verify():
    for c in transfer_paradox(None, DEFAULT_BASE, 5):
        assert verify(c, 5).passed


def test_transfer_axis_point_rejected():
    with pytest.raises(StabilizerError) as err:
        transfer_paradox(None, START, 1)
    assert Word.parse(err.value.witness) in {Word.parse(w) for w in ("t", "T", "tt", "TT")}


def test_transfer_short_relation_rejected():
    with pytest.raises(StabilizerError):
        transfer_paradox(None, SphereTriple(0, 2, 1, 1), 2)


def test_orbit_index_rank():
    index = OrbitIndex(DEFAULT_BASE, 3)
    for w in enumerate_ball(3):
        assert index.rank(index.point_of[w]) == len(w)
    assert index.rank(SphereTriple(0, 0, 1, 0)) == 4
