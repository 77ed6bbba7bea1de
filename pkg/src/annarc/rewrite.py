"""Isotopy relations as bidirectional rewrite rules on tangle words.

Rules are stored in word order (bottom to top).  Every rule family produces
concrete instances for a bounded strand count; matching a rule against a word
is a lookup of the instance's token tuple.
"""

from __future__ import annotations

import heapq
import random
import zlib
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .errors import CrossingsIrreducible, NotApplicable
from .matchings import (
    admissible_orders,
    enumerate_matchings,
    evaluate_word,
    matching_word,
    state_sum,
)
from .tangle import CROSSINGS, TangleWord, dual, parse_word

FORWARD, REVERSE = "forward", "reverse"
MAX_STRANDS = 8
DEFAULT_BUDGET = 10_000


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    lhs: tuple
    rhs: tuple
    source: int
    target: int
    params: tuple  # sorted (name, value) pairs

    def side(self, direction: str) -> tuple[tuple, tuple]:
        return (self.lhs, self.rhs) if direction == FORWARD else (self.rhs, self.lhs)

    def words(self) -> tuple[TangleWord, TangleWord]:
        def w(toks):
            return TangleWord(toks) if toks else TangleWord.identity(self.source)
        return w(self.lhs), w(self.rhs)

    def describe(self) -> str:
        p = ",".join(f"{k}={v}" for k, v in self.params)
        lhs, rhs = self.words()
        return f"{self.rule}[{p}]: {lhs} ~ {rhs}"


@dataclass(frozen=True)
class RewriteRule:
    id: str
    summary: str
    families: tuple  # callables n_max -> iterable of (params, lhs text, rhs text or arity)


class Rewrite(NamedTuple):
    rule: str
    position: int
    direction: str
    instance: RuleInstance


def _make(rule, params, lhs, rhs):
    lw = parse_word(lhs) if isinstance(lhs, str) else TangleWord.identity(lhs)
    rw = parse_word(rhs) if isinstance(rhs, str) else TangleWord.identity(rhs)
    if lw.signature != rw.signature:
        raise AssertionError(f"{rule} {params}: {lw.signature} != {rw.signature}")
    return RuleInstance(rule, lw.tokens, rw.tokens, lw.source, lw.target, tuple(sorted(params.items())))


def _sign(l):
    return "+" if l == 1 else "-"


def _flip(l):
    return 2 if l == 1 else 1


# Each family yields (params, lhs, rhs); an int side names an identity word.

def _r0(N):
    for n in range(3, N + 1):
        for i in range(1, n - 1):
            yield {"n": n, "i": i, "form": 1}, f"g({n},{i + 1}); f({n},{i})", n - 2
            yield {"n": n, "i": i, "form": 2}, f"g({n},{i}); f({n},{i + 1})", n - 2


def _r1f(N):
    for n in range(3, N + 1):
        for i in range(1, n):
            for l in (1, 2):
                s = _sign(l)
                if i + 1 <= n - 1:
                    yield ({"n": n, "i": i, "l": l, "form": 1},
                           f"g({n},{i}); t{s}({n},{i + 1}); f({n},{i})", f"w{s}({n - 2},{i})")
                if i >= 2:
                    yield ({"n": n, "i": i, "l": l, "form": 2},
                           f"g({n},{i}); t{s}({n},{i - 1}); f({n},{i})", f"w{s}({n - 2},{i - 1})")


def _curl(N):
    # a crossing of the two legs of one cup (or cap) is a framing kink
    for n in range(2, N + 1):
        for i in range(1, n):
            for l in (1, 2):
                s, o = _sign(l), _sign(_flip(l))
                yield ({"n": n, "i": i, "l": l, "form": 1},
                       f"g({n},{i}); t{s}({n},{i})", f"g({n},{i}); w{o}({n},{i})")
                yield ({"n": n, "i": i, "l": l, "form": 2},
                       f"t{s}({n},{i}); f({n},{i})", f"w{o}({n},{i}); f({n},{i})")


def _r2(N):
    for n in range(2, N + 1):
        for i in range(1, n):
            yield {"n": n, "i": i, "form": 1}, f"t-({n},{i}); t+({n},{i})", n
            yield {"n": n, "i": i, "form": 2}, f"t+({n},{i}); t-({n},{i})", n


def _r3(N):
    for n in range(3, N + 1):
        for i in range(1, n - 1):
            for l in (1, 2):
                s = _sign(l)
                a, b = f"t{s}({n},{i})", f"t{s}({n},{i + 1})"
                yield {"n": n, "i": i, "l": l}, f"{a}; {b}; {a}", f"{b}; {a}; {b}"


def _cup_cup(N):
    for n in range(2, N - 1):
        for i in range(1, n):
            for k in range(2, n - i + 2):
                yield ({"n": n, "i": i, "k": k},
                       f"g({n},{i}); g({n + 2},{i + k})", f"g({n},{i + k - 2}); g({n + 2},{i})")


def _cap_cap(N):
    for n in range(2, N - 1):
        for i in range(1, n):
            for k in range(2, n - i + 2):
                yield ({"n": n, "i": i, "k": k},
                       f"f({n + 2},{i}); f({n},{i + k - 2})", f"f({n + 2},{i + k}); f({n},{i})")


def _cup_cap(N):
    for n in range(2, N - 1):
        for i in range(1, n):
            for k in range(2, n - i + 2):
                yield ({"n": n, "i": i, "k": k, "form": 1},
                       f"f({n},{i}); g({n},{i + k - 2})", f"g({n + 2},{i + k}); f({n + 2},{i})")
                yield ({"n": n, "i": i, "k": k, "form": 2},
                       f"f({n},{i + k - 2}); g({n},{i})", f"g({n + 2},{i}); f({n + 2},{i + k})")


def _cup_cross(N):
    for n in range(4, N + 1):
        for l in (1, 2):
            s = _sign(l)
            for i in range(1, n):
                for k in range(2, n):
                    if i + k - 2 <= n - 3:
                        yield ({"n": n, "i": i, "k": k, "l": l, "form": 1},
                               f"t{s}({n - 2},{i + k - 2}); g({n},{i})", f"g({n},{i}); t{s}({n},{i + k})")
                    if i <= n - 3 and i + k <= n - 1:
                        yield ({"n": n, "i": i, "k": k, "l": l, "form": 2},
                               f"t{s}({n - 2},{i}); g({n},{i + k})", f"g({n},{i + k}); t{s}({n},{i})")


def _cap_cross(N):
    for n in range(4, N + 1):
        for l in (1, 2):
            s = _sign(l)
            for i in range(1, n):
                for k in range(2, n):
                    if i + k <= n - 1:
                        yield ({"n": n, "i": i, "k": k, "l": l, "form": 1},
                               f"t{s}({n},{i + k}); f({n},{i})", f"f({n},{i}); t{s}({n - 2},{i + k - 2})")
                    if i + k <= n - 1 and i <= n - 3:
                        yield ({"n": n, "i": i, "k": k, "l": l, "form": 2},
                               f"t{s}({n},{i}); f({n},{i + k})", f"f({n},{i + k}); t{s}({n - 2},{i})")


def _cross_cross(N):
    for n in range(4, N + 1):
        for i in range(1, n):
            for k in range(2, n - i):
                for l in (1, 2):
                    for m in (1, 2):
                        a, b = f"t{_sign(l)}({n},{i})", f"t{_sign(m)}({n},{i + k})"
                        yield {"n": n, "i": i, "k": k, "l": l, "m": m}, f"{b}; {a}", f"{a}; {b}"


def _pitchfork(N):
    for n in range(3, N + 1):
        for i in range(1, n - 1):
            yield {"n": n, "i": i, "form": 1}, f"g({n},{i + 1}); t+({n},{i})", f"g({n},{i}); t-({n},{i + 1})"
            yield {"n": n, "i": i, "form": 2}, f"g({n},{i + 1}); t-({n},{i})", f"g({n},{i}); t+({n},{i + 1})"


def _aff_rr(N):
    for n in range(1, N + 1):
        yield {"n": n, "form": 1}, f"r({n}); r'({n})", n
        yield {"n": n, "form": 2}, f"r'({n}); r({n})", n


def _aff_cap(N):
    for n in range(3, N + 1):
        for i in range(1, n - 1):
            yield {"n": n, "i": i}, f"r({n}); f({n},{i}); r'({n - 2})", f"f({n},{i + 1})"
        yield {"n": n, "i": n - 1}, f"r({n}); r({n}); f({n},{n - 1})", f"f({n},1)"


def _aff_cup(N):
    for n in range(3, N + 1):
        for i in range(1, n - 1):
            yield {"n": n, "i": i}, f"r({n - 2}); g({n},{i}); r'({n})", f"g({n},{i + 1})"
        yield {"n": n, "i": n - 1}, f"g({n},{n - 1}); r'({n}); r'({n})", f"g({n},1)"


def _aff_cross(N):
    for n in range(3, N + 1):
        for l in (1, 2):
            s = _sign(l)
            for i in range(1, n - 1):
                yield {"n": n, "i": i, "l": l}, f"r({n}); t{s}({n},{i}); r'({n})", f"t{s}({n},{i + 1})"
            yield ({"n": n, "i": n - 1, "l": l},
                   f"r({n}); r({n}); t{s}({n},{n - 1}); r'({n}); r'({n})", f"t{s}({n},1)")


def _twist_inv(N):
    for n in range(1, N + 1):
        for i in range(1, n + 1):
            yield {"n": n, "i": i, "form": 1}, f"w+({n},{i}); w-({n},{i})", n
            yield {"n": n, "i": i, "form": 2}, f"w-({n},{i}); w+({n},{i})", n


def _twist_commute(N):
    for n in range(2, N + 1):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for l in (1, 2):
                    for m in (1, 2):
                        a, b = f"w{_sign(l)}({n},{i})", f"w{_sign(m)}({n},{j})"
                        yield {"n": n, "i": i, "j": j, "l": l, "m": m}, f"{a}; {b}", f"{b}; {a}"


def _twist_cup(N):
    for n in range(2, N + 1):
        for i in range(1, n):
            for l in (1, 2):
                s = _sign(l)
                yield {"n": n, "i": i, "l": l}, f"g({n},{i}); w{s}({n},{i})", f"g({n},{i}); w{s}({n},{i + 1})"


def _twist_cup_leg(N):
    for n in range(3, N + 1):
        for i in range(1, n):
            for j in range(1, n - 1):
                for l in (1, 2):
                    s = _sign(l)
                    up = j if j < i else j + 2
                    yield ({"n": n, "i": i, "j": j, "l": l},
                           f"w{s}({n - 2},{j}); g({n},{i})", f"g({n},{i}); w{s}({n},{up})")


def _twist_cap(N):
    for n in range(2, N + 1):
        for i in range(1, n):
            for l in (1, 2):
                s = _sign(l)
                yield {"n": n, "i": i, "l": l}, f"w{s}({n},{i}); f({n},{i})", f"w{s}({n},{i + 1}); f({n},{i})"


def _twist_cap_leg(N):
    for n in range(3, N + 1):
        for i in range(1, n):
            for j in range(1, n + 1):
                if j in (i, i + 1):
                    continue
                for l in (1, 2):
                    s = _sign(l)
                    down = j if j < i else j - 2
                    yield ({"n": n, "i": i, "j": j, "l": l},
                           f"w{s}({n},{j}); f({n},{i})", f"f({n},{i}); w{s}({n - 2},{down})")


def _twist_cross(N):
    for n in range(2, N + 1):
        for i in range(1, n):
            for j in range(1, n + 1):
                after = {i: i + 1, i + 1: i}.get(j, j)
                for l in (1, 2):
                    for m in (1, 2):
                        s, c = _sign(l), _sign(m)
                        yield ({"n": n, "i": i, "j": j, "l": l, "m": m},
                               f"w{s}({n},{j}); t{c}({n},{i})", f"t{c}({n},{i}); w{s}({n},{after})")


def _twist_rot(N):
    for n in range(1, N + 1):
        for j in range(1, n + 1):
            for l in (1, 2):
                s = _sign(l)
                yield {"n": n, "j": j, "l": l}, f"w{s}({n},{j}); r({n})", f"r({n}); w{s}({n},{j - 1 if j > 1 else n})"


RULES = {
    r.id: r
    for r in (
        RewriteRule("R0", "a cap undoes an adjacent cup", (_r0,)),
        RewriteRule("R1F", "a framed kink becomes a twist", (_r1f,)),
        RewriteRule("Curl", "crossing the two legs of a cup or cap is a twist", (_curl,)),
        RewriteRule("R2", "opposite crossings cancel", (_r2,)),
        RewriteRule("R3", "braid relation", (_r3,)),
        RewriteRule("CupCup", "far cups commute", (_cup_cup,)),
        RewriteRule("CapCap", "far caps commute", (_cap_cap,)),
        RewriteRule("CupCap", "far cup and cap commute", (_cup_cap,)),
        RewriteRule("CupCross", "crossings slide past cups", (_cup_cross,)),
        RewriteRule("CapCross", "crossings slide past caps", (_cap_cross,)),
        RewriteRule("CrossCross", "far crossings commute", (_cross_cross,)),
        RewriteRule("Pitchfork", "a cup slides through a crossing", (_pitchfork,)),
        RewriteRule("AffRR'", "opposite rotations cancel", (_aff_rr,)),
        RewriteRule("AffCap", "rotation conjugates caps", (_aff_cap,)),
        RewriteRule("AffCup", "rotation conjugates cups", (_aff_cup,)),
        RewriteRule("AffCross", "rotation conjugates crossings", (_aff_cross,)),
        RewriteRule("TwistInv", "opposite twists cancel", (_twist_inv,)),
        RewriteRule("TwistCommute", "twists on different strands commute", (_twist_commute,)),
        RewriteRule("TwistCup", "a twist slides around a cup", (_twist_cup,)),
        RewriteRule("TwistCupLeg", "a twist passes a cup", (_twist_cup_leg,)),
        RewriteRule("TwistCap", "a twist slides around a cap", (_twist_cap,)),
        RewriteRule("TwistCapLeg", "a twist passes a cap", (_twist_cap_leg,)),
        RewriteRule("TwistCross", "a twist follows its strand through a crossing", (_twist_cross,)),
        RewriteRule("TwistRot", "a twist rides a rotation", (_twist_rot,)),
    )
}

# rules whose identity side would be inserted everywhere by a reverse step
EMPTY_SIDED = ("R0", "R2", "AffRR'", "TwistInv")


@lru_cache(maxsize=None)
def instances(rule_id: str, max_strands: int = MAX_STRANDS) -> tuple[RuleInstance, ...]:
    rule = RULES[rule_id]
    out = []
    for family in rule.families:
        for params, lhs, rhs in family(max_strands):
            out.append(_make(rule_id, params, lhs, rhs))
    return tuple(out)


@lru_cache(maxsize=None)
def _index(max_strands: int):
    by_side: dict = {}
    inserts: dict = {}
    for rule_id in RULES:
        for inst in instances(rule_id, max_strands):
            for direction in (FORWARD, REVERSE):
                pattern, _ = inst.side(direction)
                if pattern:
                    by_side.setdefault(pattern, []).append((inst, direction))
                else:
                    inserts.setdefault(inst.source, []).append((inst, direction))
    lengths = sorted({len(p) for p in by_side})
    return by_side, inserts, lengths


def _bound(w: TangleWord) -> int:
    return max(max(w.arities()) + 2, 4)


def applicable_rewrites(w: TangleWord, insertions: bool = True) -> list[Rewrite]:
    """Every rule application that fits ``w``.

    Reverse steps of rules with an identity side insert that rule's other side
    at every level of matching arity; ``insertions=False`` leaves them out.
    """
    by_side, inserts, lengths = _index(_bound(w))
    toks = w.tokens
    out = []
    for pos in range(len(toks)):
        for length in lengths:
            if pos + length > len(toks):
                break
            for inst, direction in by_side.get(toks[pos:pos + length], ()):
                out.append(Rewrite(inst.rule, pos, direction, inst))
    if insertions:
        levels = w.arities()
        for pos, arity in enumerate(levels):
            for inst, direction in inserts.get(arity, ()):
                out.append(Rewrite(inst.rule, pos, direction, inst))
    return out


def _apply(w: TangleWord, rw: Rewrite) -> TangleWord:
    pattern, result = rw.instance.side(rw.direction)
    toks = w.tokens
    new = toks[:rw.position] + result + toks[rw.position + len(pattern):]
    if not new:
        return TangleWord.identity(w.source)
    return TangleWord(new)


def rewrite(w: TangleWord, rule: str, position: int, direction: str = FORWARD,
            instance: RuleInstance | None = None) -> TangleWord:
    """Apply one rule at ``position``; the first fitting instance is used unless one is given."""
    for rw in applicable_rewrites(w):
        if (rw.rule, rw.position, rw.direction) != (rule, position, direction):
            continue
        if instance is not None and rw.instance != instance:
            continue
        return _apply(w, rw)
    raise NotApplicable(f"{rule} {direction} does not apply at {position} in {w}")


def crossing_count(w: TangleWord) -> int:
    return sum(1 for t in w.tokens if t.kind in CROSSINGS)


def eliminate_crossings(w: TangleWord, budget: int = DEFAULT_BUDGET, slack: int = 4) -> TangleWord:
    """Best-first search for a crossing-free word equivalent to ``w``.

    States are ranked by (crossings, length).  Identity-side insertions are
    never tried, and words more than ``slack`` tokens longer than ``w`` are
    dropped, so the search is a heuristic and not a decision procedure.
    """
    if crossing_count(w) == 0:
        return w
    limit = len(w) + slack
    start = (crossing_count(w), len(w), str(w))
    heap = [(start, w)]
    seen = {str(w)}
    explored = 0
    while heap and explored < budget:
        _, cur = heapq.heappop(heap)
        explored += 1
        for rw in applicable_rewrites(cur, insertions=False):
            nxt = _apply(cur, rw)
            key = str(nxt)
            if key in seen or len(nxt) > limit:
                continue
            seen.add(key)
            c = crossing_count(nxt)
            if c == 0:
                return nxt
            heapq.heappush(heap, ((c, len(nxt), key), nxt))
    raise CrossingsIrreducible(f"no crossing-free form of {w} within {explored} states")


# --- semantic soundness -----------------------------------------------------


@lru_cache(maxsize=None)
def _matchings(n):
    return tuple(enumerate_matchings(n))


def _random_bottom(rng: random.Random, arity: int) -> TangleWord:
    if arity == 0:
        return TangleWord.identity(0)
    m = rng.choice(_matchings(arity // 2))
    orders = admissible_orders(m)
    w = matching_word(m, rng.choice(orders))
    turns = rng.randint(-2, 2)
    extra = [f"r({arity})"] * turns if turns > 0 else [f"r'({arity})"] * -turns
    if extra:
        w = TangleWord(w.tokens + parse_word("; ".join(extra)).tokens)
    return w


def _random_top(rng: random.Random, arity: int) -> TangleWord:
    if arity == 0:
        return TangleWord.identity(0)
    if rng.random() < 0.5:
        m = rng.choice(_matchings(arity // 2))
        cap_word = dual(matching_word(m, rng.choice(admissible_orders(m))))
        if rng.random() < 0.5:
            return TangleWord(parse_word(f"r({arity})").tokens + cap_word.tokens)
        return cap_word
    toks = []
    size = arity
    for _ in range(rng.randint(1, 3)):
        choice = rng.choice("fgrw" if size >= 2 else "grw")
        if choice == "f":
            toks.append(f"f({size},{rng.randint(1, size - 1)})")
            size -= 2
        elif choice == "g":
            toks.append(f"g({size + 2},{rng.randint(1, size + 1)})")
            size += 2
        elif choice == "r" and size:
            toks.append(rng.choice([f"r({size})", f"r'({size})"]))
        elif choice == "w" and size:
            toks.append(f"w{rng.choice('+-')}({size},{rng.randint(1, size)})")
    if not toks:
        return TangleWord.identity(arity)
    return parse_word("; ".join(toks))


def _stack(*words: TangleWord) -> TangleWord:
    toks = tuple(t for w in words for t in w.tokens)
    return TangleWord(toks) if toks else TangleWord.identity(words[0].source)


def check_instance(inst: RuleInstance, contexts: int = 20) -> bool:
    """Both sides agree in ``contexts`` random flat closures (even arities only)."""
    if inst.source % 2 or inst.target % 2:
        raise ValueError("soundness checks need even arities")
    lhs, rhs = inst.words()
    rng = random.Random(zlib.crc32(inst.describe().encode()))
    for _ in range(contexts):
        bottom = _random_bottom(rng, inst.source)
        top = _random_top(rng, inst.target)
        lw, rw = _stack(bottom, lhs, top), _stack(bottom, rhs, top)
        if lw.is_flat and rw.is_flat:
            left, right = evaluate_word(lw), evaluate_word(rw)
        else:
            left, right = state_sum(lw), state_sum(rw)
        if left != right:
            return False
    return True


def even_instances(rule_id: str, max_strands: int = MAX_STRANDS) -> list[RuleInstance]:
    return [i for i in instances(rule_id, max_strands) if i.source % 2 == 0 and i.target % 2 == 0]


def check_relation(rule_id: str, params: dict | None = None, contexts: int = 20) -> bool:
    """True when every even-arity instance of ``rule_id`` matching ``params`` is sound."""
    params = params or {}
    chosen = [i for i in even_instances(rule_id) if params.items() <= dict(i.params).items()]
    if not chosen:
        raise ValueError(f"no even-arity instance of {rule_id} with {params}")
    return all(check_instance(i, contexts) for i in chosen)


def wrap_instances(max_strands: int = 6) -> list[RuleInstance]:
    """Relations with an index equal to the strand count, read through rotations."""
    out = []
    for n in range(4, max_strands + 1, 2):
        w = [
            ("R0", {"n": n, "i": n - 1}, f"g({n},{n}); f({n},{n - 1})", n - 2),
            ("R0", {"n": n, "i": n}, f"g({n},1); f({n},{n})", n - 2),
            ("R2", {"n": n, "i": n}, f"t-({n},{n}); t+({n},{n})", n),
            ("Pitchfork", {"n": n, "i": n - 1}, f"g({n},{n}); t+({n},{n - 1})", f"g({n},{n - 1}); t-({n},{n})"),
            ("Pitchfork", {"n": n, "i": n}, f"g({n},1); t+({n},{n})", f"g({n},{n}); t-({n},1)"),
            ("R1F", {"n": n, "i": n}, f"g({n},{n}); t+({n},1); f({n},{n})", f"w+({n - 2},1)"),
            ("R1F", {"n": n, "i": n - 1}, f"g({n},{n - 1}); t+({n},{n}); f({n},{n - 1})", f"w+({n - 2},1)"),
            ("Curl", {"n": n, "i": n}, f"g({n},{n}); t+({n},{n})", f"g({n},{n}); w-({n},{n})"),
            ("TwistCup", {"n": n, "i": n}, f"g({n},{n}); w+({n},{n})", f"g({n},{n}); w+({n},1)"),
            ("TwistCap", {"n": n, "i": n}, f"w+({n},{n}); f({n},{n})", f"w+({n},1); f({n},{n})"),
            ("TwistCross", {"n": n, "i": n}, f"w+({n},{n}); t+({n},{n})", f"t+({n},{n}); w+({n},1)"),
            ("CupCup", {"n": n - 2, "i": n - 1}, f"g({n - 2},1); g({n},{n})",
             f"g({n - 2},{n - 2}); g({n},1)"),
        ]
        for rule, params, lhs, rhs in w:
            out.append(_make(rule, {**params, "wrap": 1}, lhs, rhs))
    return out


def relation_report(contexts: int = 20, max_strands: int = MAX_STRANDS):
    """``(instance, passed)`` for every even-arity instance of every rule."""
    for rule_id in RULES:
        for inst in even_instances(rule_id, max_strands):
            yield inst, check_instance(inst, contexts)
