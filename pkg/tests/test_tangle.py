import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annarc.errors import ArityError, TangleSyntaxError, TokenIndexError
from annarc.tangle import (
    GeneratorToken,
    Kind,
    TangleWord,
    compose,
    cup,
    dual,
    format_word,
    parse_word,
    rot,
)


def test_single_cup():
    w = parse_word("g(2,1)")
    assert len(w) == 1
    assert w.signature == (0, 2)


def test_chained_cups():
    assert parse_word("g(2,1); g(4,1)").signature == (0, 4)


def test_whitespace_is_ignored():
    assert parse_word(" g( 2 , 1 );g(4,1) ") == parse_word("g(2,1); g(4,1)")


def test_chain_mismatch():
    with pytest.raises(ArityError):
        parse_word("g(2,1); g(2,1)")


@pytest.mark.parametrize("text", ["h(2,1)", "g(2)", "r(2,1)", "g(2,1);", "g(2,1) f(2,1)", ""])
def test_bad_syntax(text):
    with pytest.raises(TangleSyntaxError):
        parse_word(text)


@pytest.mark.parametrize("text", ["g(2,3)", "f(4,0)", "t+(1,1)", "w+(2,3)", "g(1,1)"])
def test_bad_index(text):
    with pytest.raises(TokenIndexError):
        parse_word(text)


def test_errors_are_builtin_subclasses():
    assert issubclass(TangleSyntaxError, SyntaxError)
    assert issubclass(ArityError, ValueError)
    assert issubclass(TokenIndexError, IndexError)


def test_format_examples():
    assert format_word(TangleWord((cup(2, 1),))) == "g(2,1)"
    assert format_word(TangleWord.identity(4)) == "id(4)"
    assert format_word(TangleWord((cup(2, 1), rot(2)))) == "g(2,1); r(2)"


def test_identity_parses():
    w = parse_word("id(4)")
    assert w.signature == (4, 4)
    assert not w.tokens


def test_index_n_expands_through_rotations():
    assert format_word(parse_word("g(4,4)")) == "r(2); g(4,3); r'(4)"
    assert format_word(parse_word("f(4,4)")) == "r(4); f(4,3); r'(2)"
    assert format_word(parse_word("t+(4,4)")) == "r(4); t+(4,3); r'(4)"


def test_twists_may_sit_on_the_last_strand():
    assert parse_word("w-(3,3)").tokens == (GeneratorToken(Kind.TWIST_NEG, 3, 3),)


def test_compose_examples():
    assert compose(parse_word("g(2,1)"), parse_word("f(2,1)")).signature == (0, 0)
    w = parse_word("g(2,1); r(2)")
    assert compose(w, TangleWord.identity(2)) == w
    assert compose(TangleWord.identity(0), w) == w
    with pytest.raises(ArityError):
        compose(parse_word("g(2,1)"), parse_word("g(2,1)"))


def test_dual_examples():
    assert dual(parse_word("g(2,1)")) == parse_word("f(2,1)")
    assert dual(parse_word("t+(4,2)")) == parse_word("t-(4,2)")
    w = parse_word("g(2,1); g(4,1); t+(4,1); r(4)")
    assert dual(dual(w)) == w
    assert format_word(dual(parse_word("g(2,1); r(2)"))) == "r'(2); f(2,1)"


# --- random words -----------------------------------------------------------


@st.composite
def words(draw, max_len=8):
    arity = draw(st.integers(0, 4))
    toks = []
    for _ in range(draw(st.integers(0, max_len))):
        options = ["r", "r'", "w+", "w-", "g"]
        if arity >= 2:
            options += ["f", "t+", "t-"]
        kind = draw(st.sampled_from(options))
        if kind == "g":
            toks.append(GeneratorToken(Kind.CUP, arity + 2, draw(st.integers(1, arity + 1))))
            arity += 2
        elif kind == "f":
            toks.append(GeneratorToken(Kind.CAP, arity, draw(st.integers(1, arity - 1))))
            arity -= 2
        elif kind in ("t+", "t-"):
            toks.append(GeneratorToken(Kind(kind), arity, draw(st.integers(1, arity - 1))))
        elif kind in ("w+", "w-"):
            if arity:
                toks.append(GeneratorToken(Kind(kind), arity, draw(st.integers(1, arity))))
        else:
            toks.append(GeneratorToken(Kind(kind), arity))
    if not toks:
        return TangleWord.identity(arity)
    return TangleWord(tuple(toks))


@settings(max_examples=200, deadline=None)
@given(words())
def test_round_trip(w):
    assert parse_word(format_word(w)) == w


@settings(max_examples=200, deadline=None)
@given(words())
def test_dual_is_an_involution_reversing_signatures(w):
    d = dual(w)
    assert dual(d) == w
    assert d.signature == (w.target, w.source)


@settings(max_examples=100, deadline=None)
@given(words(4), words(4), words(4))
def test_compose_signature_is_associative(a, b, c):
    if a.target != b.source or b.target != c.source:
        return
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert left == right
    assert left.signature == (a.source, c.target)
