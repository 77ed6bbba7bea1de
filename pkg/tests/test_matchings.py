import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annarc.errors import ArityError, FlatnessError, UnbalancedSequence
from annarc.matchings import (
    AffineMatching,
    act_generator,
    admissible_orders,
    enumerate_matchings,
    evaluate_word,
    from_signs,
    loop_counts,
    matching_word,
    result_json,
    run,
    state_of,
    to_signs,
)
from annarc.tangle import cap, compose, cup, dual, parse_word, rot

A1 = from_signs("+-")
A2 = from_signs("-+")
B1 = parse_word("g(2,1); g(4,1)")
B2 = parse_word("g(2,1); r(2); g(4,1)")
B3 = parse_word("g(2,1); r(2); g(4,3)")


def brute_force_matchings(signs):
    """Pairings plus -> minus whose clockwise spans are balanced and pairwise nested or disjoint."""
    m = len(signs)

    def span(a, b):
        return {(a + t) % m for t in range((b - a) % m)}  # unit steps swept clockwise

    plus = [k for k in range(m) if signs[k] == "+"]
    minus = [k for k in range(m) if signs[k] == "-"]
    found = []
    for perm in itertools.permutations(minus):
        ok = True
        for a, b in zip(plus, perm):
            between = [signs[(a + t) % m] for t in range(1, (b - a) % m)]
            if between.count("+") != between.count("-"):
                ok = False
                break
        spans = [span(a, b) for a, b in zip(plus, perm)]
        for s1, s2 in itertools.combinations(spans, 2):
            if s1 & s2 and not (s1 <= s2 or s2 <= s1):
                ok = False
        if ok:
            found.append(frozenset((a + 1, b + 1) for a, b in zip(plus, perm)))
    return found


@pytest.mark.parametrize("n,count", [(0, 1), (1, 2), (2, 6), (3, 20), (4, 70)])
def test_enumeration_counts(n, count):
    ms = enumerate_matchings(n)
    assert len(ms) == count == comb(2 * n, n)
    assert len(set(ms)) == count


def test_two_point_matchings():
    assert A1.arcs == {(1, 2, 0)}
    (arc,) = A2.arcs
    assert arc[:2] == (2, 1) and abs(arc[2]) == 1


def test_nested_four_points():
    assert from_signs("++--").arcs == {(2, 3, 0), (1, 4, 0)}


@pytest.mark.parametrize("signs", ["++--", "+-+-", "-++-", "+--+", "--++", "+++---", "-+-++-+-", "--+-++"])
def test_from_signs_agrees_with_brute_force(signs):
    found = brute_force_matchings(signs)
    assert len(found) == 1
    got = frozenset((a, b) for a, b, _ in from_signs(signs).arcs)
    assert got == found[0]


def test_to_signs_inverts():
    assert to_signs(A1) == "+-"
    for m in enumerate_matchings(3):
        assert from_signs(to_signs(m)) == m


def test_images_are_all_balanced_strings():
    strings = {"".join(c) for c in itertools.product("+-", repeat=4) if c.count("+") == 2}
    assert {m.signs for m in enumerate_matchings(2)} == strings


@pytest.mark.parametrize("bad", ["+", "++-", "+a", "--+"])
def test_unbalanced(bad):
    with pytest.raises(UnbalancedSequence):
        from_signs(bad)


def test_invalid_arc_sets():
    with pytest.raises(ValueError):
        AffineMatching(1, frozenset({(1, 2, -1)}))
    with pytest.raises(ValueError):
        AffineMatching(2, frozenset({(1, 2, 0)}))


def test_serialization():
    assert A1.to_json() == {"n": 1, "signs": "+-", "arcs": [[1, 2, 0]]}
    assert from_signs("+-+-").to_json()["arcs"] == [[1, 2, 0], [3, 4, 0]]


def test_act_generator_examples():
    assert act_generator(None, cup(2, 1)).matching == A1
    assert act_generator(A1, rot(2)).matching == A2
    res = act_generator(A1, cap(2, 1))
    assert (res.matching.n, res.n0, res.n1, res.shift) == (0, 1, 0, 0)


def test_act_generator_errors():
    with pytest.raises(ArityError):
        act_generator(A1, cap(4, 1))
    with pytest.raises(FlatnessError):
        act_generator(A1, parse_word("t+(2,1)").tokens[0])


def test_twists_shift():
    res = evaluate_word(parse_word("g(2,1); w+(2,1); w+(2,2); w-(2,1)"))
    assert res.shift == 1 and res.matching == A1


def test_evaluate_examples():
    res = evaluate_word(compose(parse_word("g(2,1); r(2)"), parse_word("f(2,1)")))
    assert (res.n0, res.n1, res.shift) == (0, 1, 0)
    res = evaluate_word(compose(B1, dual(B1)))
    assert (res.n0, res.n1) == (2, 0)
    res = evaluate_word(compose(B2, dual(B3)))
    assert (res.n0, res.n1) == (0, 2)
    assert res.matching.n == 0


def test_evaluate_rejects():
    with pytest.raises(ArityError):
        evaluate_word(parse_word("id(2)"))
    with pytest.raises(ArityError):
        evaluate_word(parse_word("g(3,1)"))
    with pytest.raises(FlatnessError):
        evaluate_word(parse_word("g(2,1); t+(2,1)"))


def test_result_json():
    assert result_json(evaluate_word(parse_word("g(2,1); f(2,1)"))) == '{"signs":"","n0":1,"n1":0,"shift":0}'


def test_named_words_build_their_matchings():
    assert run(B1).matching().signs == "+-+-"
    assert run(B2).matching().signs == "+--+"
    assert run(parse_word("g(2,2)")).matching() == A2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_loop_invariants(n):
    ms = enumerate_matchings(n)
    for a in ms:
        assert loop_counts(a, a) == (n, 0)
        for b in ms:
            n0, n1 = loop_counts(a, b)
            assert 1 <= n0 + n1 <= n
            assert (n0, n1) == loop_counts(b, a)


def test_loop_counts_agree_with_word_evaluation():
    for a in enumerate_matchings(3):
        for b in enumerate_matchings(3):
            res = evaluate_word(compose(matching_word(b), dual(matching_word(a))))
            assert (res.n0, res.n1) == loop_counts(a, b)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_full_rotation_is_trivial(n):
    for m in enumerate_matchings(n):
        st = state_of(m)
        for _ in range(2 * n):
            st = run(parse_word(f"r({2 * n})"), st)
        assert st.matching() == m


@pytest.mark.parametrize("n", [2, 3, 4])
def test_every_admissible_order_builds_the_matching(n):
    for m in enumerate_matchings(n):
        for order in admissible_orders(m):
            assert run(matching_word(m, order)).matching() == m


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.randoms(use_true_random=False))
def test_rotation_conjugation_is_invisible(n, rng):
    m = rng.choice(enumerate_matchings(n))
    w = matching_word(m)
    k = 2 * n
    twisted = compose(w, parse_word(f"r({k}); r'({k})"))
    assert evaluate_word(twisted) == evaluate_word(w)
