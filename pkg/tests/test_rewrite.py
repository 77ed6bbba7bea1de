import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annarc.errors import CrossingsIrreducible, NotApplicable
from annarc.matchings import evaluate_word, state_sum
from annarc.rewrite import (
    FORWARD,
    REVERSE,
    RULES,
    RuleInstance,
    applicable_rewrites,
    check_instance,
    check_relation,
    crossing_count,
    eliminate_crossings,
    even_instances,
    instances,
    rewrite,
    wrap_instances,
)
from annarc.tangle import GeneratorToken, Kind, TangleWord, parse_word

TREFOIL = "g(2,1); g(4,2); t+(4,1); t+(4,1); t+(4,1); f(4,2); f(2,1)"


def found(w, rule, pos, direction):
    return any((r.rule, r.position, r.direction) == (rule, pos, direction) for r in applicable_rewrites(w))


def test_rotation_pair_is_found():
    assert found(parse_word("r(4); r'(4)"), "AffRR'", 0, FORWARD)


def test_cup_then_cap_is_found():
    assert found(parse_word("g(4,2); f(4,1)"), "R0", 0, FORWARD)


def test_identity_only_admits_insertions():
    rws = applicable_rewrites(parse_word("id(4)"))
    assert rws and {r.direction for r in rws} == {REVERSE}
    assert applicable_rewrites(parse_word("id(4)"), insertions=False) == []


def test_crossing_pair_cancels():
    assert rewrite(parse_word("t-(2,1); t+(2,1)"), "R2", 0) == parse_word("id(2)")


def test_not_applicable():
    with pytest.raises(NotApplicable):
        rewrite(parse_word("g(2,1); f(2,1)"), "R2", 0)
    with pytest.raises(NotApplicable):
        rewrite(parse_word("r(4); r'(4)"), "AffRR'", 1)


def test_crossing_slides_off_a_cup_then_the_cup_cancels():
    w = parse_word("g(4,1); t+(4,3); f(4,2)")
    w = rewrite(w, "CupCross", 0, REVERSE)
    assert str(w) == "t+(2,1); g(4,1); f(4,2)"
    assert rewrite(w, "R0", 1) == parse_word("t+(2,1)")


def test_rewrites_preserve_signature():
    w = parse_word("g(2,1); g(4,2); t+(4,1); r(4); f(4,2)")
    for rw in applicable_rewrites(w)[:200]:
        out = rewrite(w, rw.rule, rw.position, rw.direction, rw.instance)
        assert out.signature == w.signature


def test_every_rule_has_instances():
    for rule_id in RULES:
        assert instances(rule_id), rule_id
        assert even_instances(rule_id), rule_id


def test_kink_becomes_a_twist():
    w = parse_word("g(2,1); g(4,1); t-(4,2); f(4,1); f(2,1)")
    flat = eliminate_crossings(w)
    assert crossing_count(flat) == 0
    assert str(flat) == "g(2,1); w-(2,1); f(2,1)"
    assert state_sum(flat) == state_sum(w)


def test_flat_words_are_returned_unchanged():
    w = parse_word("g(2,1); r(2)")
    assert eliminate_crossings(w) is w


def test_trefoil_is_irreducible():
    w = parse_word(TREFOIL)
    with pytest.raises(CrossingsIrreducible):
        eliminate_crossings(w)
    (poly,) = state_sum(w).values()
    assert len(poly) > 1  # a flat closed word has a monomial bracket


@pytest.mark.parametrize("rule,params", [
    ("R0", {"n": 4, "i": 1}),
    ("AffCup", {"n": 4, "i": 2}),
    ("R1F", {"n": 4}),
    ("R2", {"n": 4}),
    ("R3", {"n": 4}),
    ("Pitchfork", {"n": 4}),
    ("TwistCross", {"n": 4}),
])
def test_relation_instances_are_sound(rule, params):
    assert check_relation(rule, params)


def test_unsound_relation_is_detected():
    bogus = RuleInstance(
        "Bogus", parse_word("t+(2,1)").tokens, parse_word("t-(2,1)").tokens, 2, 2, ())
    assert not check_instance(bogus)


def test_wrap_instances_are_well_formed():
    ws = wrap_instances()
    assert len(ws) == 24
    assert all(dict(w.params)["wrap"] == 1 for w in ws)


# --- random words keep their bracket under random rewrites ------------------


@st.composite
def open_words(draw):
    toks = [GeneratorToken(Kind.CUP, 2, 1)]
    arity = 2
    for _ in range(draw(st.integers(1, 7))):
        kind = draw(st.sampled_from(["g", "f", "t+", "t-", "w+", "w-", "r", "r'"]))
        if kind == "g" and arity <= 4:
            toks.append(GeneratorToken(Kind.CUP, arity + 2, draw(st.integers(1, arity + 1))))
            arity += 2
        elif kind == "f" and arity >= 2:
            toks.append(GeneratorToken(Kind.CAP, arity, draw(st.integers(1, arity - 1))))
            arity -= 2
        elif kind in ("t+", "t-") and arity >= 2:
            toks.append(GeneratorToken(Kind(kind), arity, draw(st.integers(1, arity - 1))))
        elif kind in ("w+", "w-") and arity:
            toks.append(GeneratorToken(Kind(kind), arity, draw(st.integers(1, arity))))
        elif kind in ("r", "r'") and arity:
            toks.append(GeneratorToken(Kind(kind), arity))
    return TangleWord(tuple(toks))


@settings(max_examples=80, deadline=None)
@given(open_words(), st.data())
def test_random_rewrites_preserve_the_bracket(w, data):
    rws = applicable_rewrites(w)
    rw = data.draw(st.sampled_from(rws))
    out = rewrite(w, rw.rule, rw.position, rw.direction, rw.instance)
    assert state_sum(out) == state_sum(w)
    if w.is_flat and out.is_flat:
        assert evaluate_word(out) == evaluate_word(w)
