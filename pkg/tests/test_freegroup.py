import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import free_reduce, reduced_words
from tarskikit.freegroup import (
    IDENTITY,
    LETTERS,
    Letter,
    PieceLabel,
    Word,
    ball_size,
    classify,
    concat_reduce,
    enumerate_ball,
    group_doubling_certs,
    invert,
    iter_sphere,
    verify_group_doubling,
)
from tarskikit.report import PreconditionError, ResourceLimitError

raw = st.text(alphabet="sStT", max_size=14)
words = raw.map(lambda s: Word.parse(free_reduce(s) or "e"))
W = Word.parse


def test_letters():
    assert len(LETTERS) == 4 == len(set(LETTERS))
    for l in LETTERS:
        assert l.inv().inv() == l and l.inv() != l
        assert l.generator in (Letter.SIGMA, Letter.TAU)


def test_parse_and_serialize():
    assert str(IDENTITY) == "e" and W("e") == IDENTITY
    assert str(Word.free_reduce(W("sT") + W("ts"))) == "ss"
    with pytest.raises(PreconditionError):
        W("sTts")
    with pytest.raises(PreconditionError):
        Word([Letter.SIGMA, Letter.SIGMA_INV])
    with pytest.raises(ValueError):
        W("sx")


def test_concat_examples():
    assert concat_reduce(W("s"), W("S")) == IDENTITY
    assert concat_reduce(W("st"), W("Ts")) == W("ss")


@given(raw, raw)
def test_concat_matches_naive_cancel(a, b):
    u, v = W(free_reduce(a) or "e"), W(free_reduce(b) or "e")
    uv = concat_reduce(u, v)
    assert str(uv) == (free_reduce(str(u).strip("e") + str(v).strip("e")) or "e")
    assert len(uv) <= len(u) + len(v)
    assert (len(uv) - len(u) - len(v)) % 2 == 0


@given(words, words, words)
def test_associative(u, v, w):
    assert (u * v) * w == u * (v * w)


def test_invert_examples():
    assert invert(IDENTITY) == IDENTITY
    assert invert(W("sT")) == W("tS")


def test_invert_over_ball():
    for w in enumerate_ball(6):
        assert invert(invert(w)) == w
        assert concat_reduce(w, invert(w)) == IDENTITY


def test_classify_examples():
    assert classify(W("stS")) == PieceLabel.W_SIGMA
    assert classify(IDENTITY) == PieceLabel.IDENTITY
    assert classify(W("Tss")) == PieceLabel.W_TAU_INV


@pytest.mark.parametrize("n", range(0, 9))
def test_ball_matches_brute_force(n):
    ball = enumerate_ball(n)
    assert len(ball) == ball_size(n) == 2 * 3**n - 1
    if n <= 5:
        assert [str(w) if w else "" for w in ball] == reduced_words(n)


def test_ball_count_examples():
    assert len(enumerate_ball(0)) == 1
    assert len(enumerate_ball(1)) == 5
    assert len(enumerate_ball(8)) == 13121


def test_ball_order_and_reduced():
    ball = enumerate_ball(6)
    assert list(ball) == sorted(ball)
    assert len(set(ball)) == len(ball)
    for w in ball:
        assert all(b != a.inv() for a, b in zip(w, w[1:]))


def test_sphere_is_ball_layer():
    assert list(iter_sphere(4)) == [w for w in enumerate_ball(4) if len(w) == 4]


def test_ball_errors():
    with pytest.raises(PreconditionError):
        enumerate_ball(-1)
    with pytest.raises(ResourceLimitError):
        enumerate_ball(10, cap=1000)


def test_classify_partitions_ball():
    ball = enumerate_ball(6)
    classes = {l: {w for w in ball if classify(w) == l} for l in PieceLabel}
    assert sum(len(c) for c in classes.values()) == len(ball)
    assert set().union(*classes.values()) == set(ball)
    assert classes[PieceLabel.IDENTITY] == {IDENTITY}


def test_doubling_piece_maps():
    sig, tau = group_doubling_certs()
    assert sig.induced(IDENTITY) == W("s")
    assert sig.induced(W("t")) == W("st")
    assert sig.induced(W("St")) == W("St")
    assert tau.induced(IDENTITY) == W("t")


def test_doubling_targets_disjoint():
    sig, tau = group_doubling_certs()
    a, b = sig.target.points(7), tau.target.points(7)
    assert not a & b
    assert {classify(w) for w in a} == {PieceLabel.W_SIGMA, PieceLabel.W_SIGMA_INV}
    assert {classify(w) for w in b} == {PieceLabel.W_TAU, PieceLabel.W_TAU_INV}


def test_boundary_bijectivity():
    n = 7
    ball = enumerate_ball(n)
    Q = [w for w in ball if classify(w) != PieceLabel.W_SIGMA_INV]
    hits: dict[Word, int] = {}
    for q in Q:
        hits[W("s") * q] = hits.get(W("s") * q, 0) + 1
    for w in enumerate_ball(n - 1):
        expected = 1 if classify(w) == PieceLabel.W_SIGMA else 0
        assert hits.get(w, 0) == expected


@pytest.mark.parametrize("n", [2, 8])
def test_verify_group_doubling(n):
    rep = verify_group_doubling(n)
    assert rep.passed, rep.reason
    for counts in (v for k, v in rep.counts.items() if k != "ball"):
        assert sum(counts["pieces"]) == 2 * 3**n - 1
    assert rep.counts["ball"] == 2 * 3**n - 1


def test_verify_group_doubling_bad_depth():
    with pytest.raises(PreconditionError):
        verify_group_doubling(1)


def test_swapped_motion_fails_with_witness():
    sig, tau = group_doubling_certs()
    (q, g), (back, ident) = sig.pieces
    bad = type(sig)(sig.source, sig.target, ((q, ident), (back, g)), name="swapped")
    rep = verify_group_doubling(4, (bad, tau))
    assert not rep.passed and rep.witness is not None
