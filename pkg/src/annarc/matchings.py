"""Affine crossingless matchings and the combinatorial evaluator.

Boundary points of a level are numbered ``1..m`` clockwise, starting just
after the seam, a fixed ray from the origin.  An open arc is stored with the
signed number of times it crosses the seam when walked between its ends
(counterclockwise crossings count +1), so a closed loop is essential exactly
when the seam counts along it add up to a nonzero number.

A canonical arc ``(a, b, s)`` runs clockwise from its plus end ``a`` to its
minus end ``b``; ``s`` is ``-1`` when that walk passes the seam, else ``0``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import comb

from .errors import ArityError, FlatnessError, UnbalancedSequence
from .tangle import (
    CROSSINGS,
    GeneratorToken,
    Kind,
    TangleWord,
    cap,
    cup,
    rot_inv,
)


@dataclass(frozen=True)
class AffineMatching:
    n: int
    arcs: frozenset  # of (plus, minus, seam)

    def __post_init__(self):
        arcs = frozenset(tuple(a) for a in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        points = sorted(p for a, b, _ in arcs for p in (a, b))
        if points != list(range(1, 2 * self.n + 1)):
            raise ValueError(f"arcs do not match {2 * self.n} points: {sorted(arcs)}")
        for a, b, s in arcs:
            if s != (0 if a < b else -1):
                raise ValueError(f"arc {(a, b, s)} is not in canonical form")

    @property
    def signs(self) -> str:
        return to_signs(self)

    def partner(self, p: int) -> int:
        for a, b, _ in self.arcs:
            if p == a:
                return b
            if p == b:
                return a
        raise KeyError(p)

    def sorted_arcs(self) -> list[tuple[int, int, int]]:
        return sorted(self.arcs)

    def to_json(self) -> dict:
        return {"n": self.n, "signs": self.signs, "arcs": [list(a) for a in self.sorted_arcs()]}

    def __str__(self):
        return self.signs


def from_signs(signs: str) -> AffineMatching:
    """Pair every ``+`` with the first ``-`` clockwise that balances the run between them."""
    signs = signs.replace("−", "-")
    if set(signs) - {"+", "-"}:
        raise UnbalancedSequence(f"unexpected characters in {signs!r}")
    m = len(signs)
    if signs.count("+") != signs.count("-"):
        raise UnbalancedSequence(f"{signs!r} has unequal numbers of + and -")
    arcs = []
    for a in range(m):
        if signs[a] != "+":
            continue
        depth = 0
        for step in range(1, m):
            b = (a + step) % m
            depth += 1 if signs[b] == "+" else -1
            if depth == -1:
                arcs.append((a + 1, b + 1, 0 if a < b else -1))
                break
    return AffineMatching(m // 2, frozenset(arcs))


def to_signs(matching: AffineMatching) -> str:
    out = [""] * (2 * matching.n)
    for a, b, _ in matching.arcs:
        out[a - 1] = "+"
        out[b - 1] = "-"
    return "".join(out)


def enumerate_matchings(n: int) -> list[AffineMatching]:
    """All ``binom(2n, n)`` affine crossingless matchings of ``2n`` points."""
    out = []
    for plus in itertools.combinations(range(2 * n), n):
        chars = ["-"] * (2 * n)
        for p in plus:
            chars[p] = "+"
        out.append(from_signs("".join(chars)))
    assert len(out) == comb(2 * n, n)
    return out


# --- evaluator state --------------------------------------------------------


@dataclass(frozen=True)
class State:
    """Open arcs on the current top level plus the closed loops seen so far.

    ``ends[k-1] = (j, s)``: point ``k`` is joined to point ``j`` and the walk
    from ``k`` to ``j`` crosses the seam with signed count ``s``.
    """

    ends: tuple = ()
    n0: int = 0
    n1: int = 0
    shift: int = 0

    @property
    def arity(self) -> int:
        return len(self.ends)

    def matching(self) -> AffineMatching:
        arcs = set()
        for k, (j, s) in enumerate(self.ends, start=1):
            if k < j:
                if s == 0:
                    arcs.add((k, j, 0))
                elif s == 1:
                    arcs.add((j, k, -1))
                else:
                    raise AssertionError(f"arc {k}-{j} winds {s} times; not embedded")
        return AffineMatching(self.arity // 2, frozenset(arcs))


def state_of(matching: AffineMatching) -> State:
    ends = [None] * (2 * matching.n)
    for a, b, s in matching.arcs:
        ends[a - 1] = (b, s)
        ends[b - 1] = (a, -s)
    return State(tuple(ends))


def _relabel(ends, where, crossing=None):
    """Move point ``k`` to ``where[k]``; ``crossing[k]`` is its seam count on the way out."""
    size = max(where.values(), default=0)
    out = [None] * size
    c = crossing or {}
    for k, (j, s) in enumerate(ends, start=1):
        if k in where:
            out[where[k] - 1] = (where[j], s - c.get(k, 0) + c.get(j, 0))
    return out


def loop_class(winding: int) -> str:
    if abs(winding) > 1:
        raise AssertionError(f"embedded loop with winding {winding}")
    return "trivial" if winding == 0 else "essential"


def apply_token(state: State, token: GeneratorToken) -> State:
    if token.kind in CROSSINGS:
        raise FlatnessError(f"crossing {token} in a flat evaluation")
    if token.source != state.arity:
        raise ArityError(f"{token} expects {token.source} strands, have {state.arity}")
    m, i = state.arity, token.index
    kind = token.kind
    if kind is Kind.ID:
        return state
    if kind in (Kind.TWIST_POS, Kind.TWIST_NEG):
        step = 1 if kind is Kind.TWIST_POS else -1
        return State(state.ends, state.n0, state.n1, state.shift + step)
    if kind is Kind.CUP:
        where = {k: (k if k < i else k + 2) for k in range(1, m + 1)}
        ends = [None] * (m + 2)
        for k, (j, s) in enumerate(state.ends, start=1):
            ends[where[k] - 1] = (where[j], s)
        ends[i - 1] = (i + 1, 0)
        ends[i] = (i, 0)
        return State(tuple(ends), state.n0, state.n1, state.shift)
    if kind is Kind.CAP:
        a, b = i, i + 1
        ja, sa = state.ends[a - 1]
        jb, sb = state.ends[b - 1]
        n0, n1 = state.n0, state.n1
        ends = list(state.ends)
        if ja == b:
            if loop_class(sa) == "trivial":
                n0 += 1
            else:
                n1 += 1
        else:
            # x -> a, cap a -> b, b -> y
            s = -sa + sb
            ends[ja - 1] = (jb, s)
            ends[jb - 1] = (ja, -s)
        where = {k: (k if k < a else k - 2) for k in range(1, m + 1) if k not in (a, b)}
        out = [None] * (m - 2)
        for k, (j, s) in enumerate(ends, start=1):
            if k in where:
                out[where[k] - 1] = (where[j], s)
        return State(tuple(out), n0, n1, state.shift)
    if kind is Kind.ROT_CCW:
        if m == 0:
            return state
        where = {k: (k - 1 if k > 1 else m) for k in range(1, m + 1)}
        ends = _relabel(state.ends, where, {1: 1})
        return State(tuple(ends), state.n0, state.n1, state.shift)
    if kind is Kind.ROT_CW:
        if m == 0:
            return state
        where = {k: (k + 1 if k < m else 1) for k in range(1, m + 1)}
        ends = _relabel(state.ends, where, {m: -1})
        return State(tuple(ends), state.n0, state.n1, state.shift)
    raise AssertionError(kind)


@dataclass(frozen=True)
class EvaluationResult:
    matching: AffineMatching
    n0: int = 0
    n1: int = 0
    shift: int = 0

    def to_json(self) -> dict:
        return {"signs": self.matching.signs, "n0": self.n0, "n1": self.n1, "shift": self.shift}


def _result(state: State) -> EvaluationResult:
    return EvaluationResult(state.matching(), state.n0, state.n1, state.shift)


def act_generator(matching: AffineMatching | None, token: GeneratorToken) -> EvaluationResult:
    start = State() if matching is None else state_of(matching)
    return _result(apply_token(start, token))


def run(word: TangleWord, start: State | None = None) -> State:
    state = State() if start is None else start
    if state.arity != word.source:
        raise ArityError(f"word starts on {word.source} strands, state has {state.arity}")
    for token in word.tokens:
        state = apply_token(state, token)
    return state


def evaluate_word(word: TangleWord) -> EvaluationResult:
    """Fold the generators of a flat ``(0, 2m)`` word over the empty diagram."""
    if word.source != 0:
        raise ArityError(f"evaluation needs source arity 0, got {word.source}")
    odd = [a for a in word.arities() if a % 2]
    if odd:
        raise ArityError(f"odd strand count {odd[0]} in an evaluated word")
    if not word.is_flat:
        raise FlatnessError("word contains crossings; eliminate them first")
    return _result(run(word))


# --- words for matchings ----------------------------------------------------


def arc_forest(matching: AffineMatching) -> dict:
    """Parent of every arc: the smallest arc whose clockwise span contains it."""
    m = 2 * matching.n

    def span(arc):
        a, b, _ = arc
        return {(a + t - 1) % m + 1 for t in range(1, (b - a) % m)}

    spans = {arc: span(arc) for arc in matching.arcs}
    parent = {}
    for arc in matching.arcs:
        outer = [o for o in matching.arcs if o != arc and arc[0] in spans[o]]
        parent[arc] = min(outer, key=lambda o: len(spans[o]), default=None)
    return parent


def admissible_orders(matching: AffineMatching) -> list[list]:
    """Every parents-before-children ordering of the arcs."""
    parent = arc_forest(matching)
    out = []

    def extend(done, rest):
        if not rest:
            out.append(list(done))
            return
        for arc in sorted(rest):
            if parent[arc] is None or parent[arc] in done:
                extend(done + [arc], rest - {arc})

    extend([], frozenset(matching.arcs))
    return out


def matching_word(matching: AffineMatching, order=None) -> TangleWord:
    """A cup-and-rotation word building ``matching``, inserting arcs in ``order``."""
    if matching.n == 0:
        return TangleWord.identity(0)
    if order is None:
        order = admissible_orders(matching)[0]
    placed: list[int] = []
    tokens = []
    for a, b, _ in order:
        size = len(placed) + 2
        if a < b:
            i = sum(1 for p in placed if p < a) + 1
            tokens.append(cup(size, i))
        else:
            tokens += [cup(size, size - 1), rot_inv(size)]
        placed = sorted(placed + [a, b])
    w = TangleWord(tuple(tokens))
    got = run(w).matching()
    if got != matching:
        raise ValueError(f"order {order} does not build {matching.signs}")
    return w


# --- loops of a closed pair -------------------------------------------------


@dataclass(frozen=True)
class PairLoop:
    points: frozenset
    winding: int

    @property
    def cls(self) -> str:
        return loop_class(self.winding)


def pair_loops(alpha: AffineMatching, beta: AffineMatching) -> list[PairLoop]:
    """Loops of the closed diagram ``dual(alpha)`` over ``beta``, ordered by least point.

    Walks alternate between arcs of ``beta`` and mirrored arcs of ``alpha``;
    mirroring through the circle keeps angles, so a mirrored arc crosses the
    seam exactly as the original does.
    """
    if alpha.n != beta.n:
        raise ValueError("matchings of different sizes")
    lower, upper = state_of(beta).ends, state_of(alpha).ends
    seen = set()
    loops = []
    for start in range(1, 2 * alpha.n + 1):
        if start in seen:
            continue
        p, total, pts = start, 0, []
        while True:
            pts.append(p)
            q, s = lower[p - 1]
            pts.append(q)
            r, t = upper[q - 1]
            total += s + t
            p = r
            if p == start:
                break
        seen.update(pts)
        loops.append(PairLoop(frozenset(pts), total))
    return loops


def loop_counts(alpha: AffineMatching, beta: AffineMatching) -> tuple[int, int]:
    loops = pair_loops(alpha, beta)
    n1 = sum(1 for lp in loops if lp.cls == "essential")
    return len(loops) - n1, n1


# --- state sums for words with crossings ------------------------------------

# Laurent polynomials in A are dicts {exponent: coefficient}.


def poly_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def poly_add(p, q):
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def poly_pow(p, k):
    out = {0: 1}
    for _ in range(k):
        out = poly_mul(out, p)
    return out


LOOP_VALUE = {2: -1, -2: -1}
TWIST_POS_VALUE = {3: -1}
TWIST_NEG_VALUE = {-3: -1}


def _smoothings(token: GeneratorToken):
    """Kauffman resolution of a crossing: (weight, replacement tokens) pairs."""
    n, i = token.strands, token.index
    turn = [cap(n, i), cup(n, i)]
    if token.kind is Kind.CROSS_POS:
        return [({1: 1}, []), ({-1: 1}, turn)]
    return [({-1: 1}, []), ({1: 1}, turn)]


def state_sum(word: TangleWord, start: State | None = None) -> dict:
    """Framed annular bracket of a word started from ``start``.

    Keys are ``(matching, essential loop count)``; values are Laurent
    polynomials in which every trivial loop contributes ``-A^2 - A^-2`` and a
    positive (negative) framing twist contributes ``-A^3`` (``-A^-3``).  On
    flat words the map from evaluation results to these sums is injective.
    """
    states = {State() if start is None else start: {0: 1}}
    for token in word.tokens:
        nxt: dict = {}
        if token.kind in CROSSINGS:
            branches = _smoothings(token)
        else:
            branches = [({0: 1}, [token])]
        for st, coeff in states.items():
            for weight, toks in branches:
                s2 = st
                for t in toks:
                    s2 = apply_token(s2, t)
                nxt[s2] = poly_add(nxt.get(s2, {}), poly_mul(coeff, weight))
        states = {s: c for s, c in nxt.items() if c}
    out: dict = {}
    for st, coeff in states.items():
        factor = poly_mul(poly_pow(LOOP_VALUE, st.n0), coeff)
        tw = TWIST_POS_VALUE if st.shift > 0 else TWIST_NEG_VALUE
        factor = poly_mul(factor, poly_pow(tw, abs(st.shift)))
        key = (st.matching(), st.n1)
        out[key] = poly_add(out.get(key, {}), factor)
    return {k: v for k, v in out.items() if v}


def result_json(result: EvaluationResult) -> str:
    return json.dumps(result.to_json(), separators=(",", ":"))
