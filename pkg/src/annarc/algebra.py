"""Hom spaces between matchings and their composition by surgery.

A morphism from ``alpha`` to ``beta`` lives on the loops of ``dual(alpha)``
stacked over ``beta``.  Trivial loops carry a copy of ``A`` (basis ``1``,
``X``), essential loops a copy of ``A0`` (basis ``V``, ``W``).  Tensor factors
follow the loops ordered by their least marked point.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import LabelClassMismatch, MiddleMismatch
from .geometry import cancel_rotations, embed, extract_loops, remap_visits, surgery
from .matchings import (
    AffineMatching,
    admissible_orders,
    enumerate_matchings,
    matching_word,
    pair_loops,
    run,
    state_of,
)
from .tangle import Kind, TangleWord, dual, rot

TRIVIAL, ESSENTIAL = "trivial", "essential"
LABELS = {TRIVIAL: ("1", "X"), ESSENTIAL: ("V", "W")}
LABEL_DEGREE = {"1": -1, "X": 1, "V": 0, "W": 0}
PAPER, HOMOGENEOUS, CONTROL = "paper", "homogeneous", "control"
MIXED = "mixed"


# --- spaces and elements ----------------------------------------------------


@dataclass(frozen=True)
class HomSpace:
    alpha: AffineMatching
    beta: AffineMatching
    classes: tuple  # loop classes in canonical order
    points: tuple  # marked points of each loop

    @property
    def n(self) -> int:
        return self.alpha.n

    @property
    def n0(self) -> int:
        return self.classes.count(TRIVIAL)

    @property
    def n1(self) -> int:
        return self.classes.count(ESSENTIAL)

    @property
    def shift(self) -> int:
        return self.n

    def basis(self) -> list[tuple]:
        return list(itertools.product(*(LABELS[c] for c in self.classes)))

    def degree_of(self, b: tuple) -> int:
        return sum(LABEL_DEGREE[x] for x in b) + self.shift

    def dims(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.basis():
            d = self.degree_of(b)
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {"n0": self.n0, "n1": self.n1, "dims": {str(k): v for k, v in self.dims().items()}}


@lru_cache(maxsize=None)
def hom_space(alpha: AffineMatching, beta: AffineMatching) -> HomSpace:
    loops = pair_loops(alpha, beta)
    return HomSpace(alpha, beta, tuple(lp.cls for lp in loops), tuple(lp.points for lp in loops))


@dataclass(frozen=True)
class HomElement:
    space: HomSpace
    coeffs: tuple  # sorted (basis, Fraction) pairs with nonzero coefficients

    @classmethod
    def make(cls, space: HomSpace, terms: dict) -> "HomElement":
        valid = set(space.basis())
        clean = {}
        for b, c in terms.items():
            if b not in valid:
                raise LabelClassMismatch(f"{format_tensor(b)} is not a basis tensor of this space")
            c = Fraction(c)
            if c:
                clean[b] = c
        return cls(space, tuple(sorted(clean.items())))

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "HomElement") -> "HomElement":
        if other.space != self.space:
            raise ValueError("elements of different spaces")
        out = self.as_dict()
        for b, c in other.coeffs:
            out[b] = out.get(b, 0) + c
        return HomElement.make(self.space, out)

    def scale(self, k) -> "HomElement":
        return HomElement.make(self.space, {b: c * k for b, c in self.coeffs})

    def to_json(self) -> list[dict]:
        return [{"basis": format_tensor(b), "coeff": str(c)} for b, c in self.coeffs]

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*({format_tensor(b)})" for b, c in self.coeffs)


def element(space: HomSpace, expr: str, coeff=1) -> HomElement:
    return HomElement.make(space, {parse_tensor(expr): coeff})


def identity(alpha: AffineMatching) -> HomElement:
    space = hom_space(alpha, alpha)
    return HomElement.make(space, {tuple("1" for _ in space.classes): 1})


def degree(x: HomElement):
    """Hom degree of a homogeneous element, ``MIXED`` otherwise, ``None`` for zero."""
    degs = {x.space.degree_of(b) for b, _ in x.coeffs}
    if not degs:
        return None
    return degs.pop() if len(degs) == 1 else MIXED


# --- tensor expressions -----------------------------------------------------

_SEP = re.compile(r"\s*(?:⊗|\*)\s*")


def parse_tensor(expr: str) -> tuple:
    expr = expr.strip()
    if expr in ("()", ""):
        return ()
    labels = tuple(_SEP.split(expr))
    bad = [x for x in labels if x not in LABEL_DEGREE]
    if bad:
        raise ValueError(f"unknown labels {bad} in {expr!r}")
    return labels


def format_tensor(b: tuple) -> str:
    return "⊗".join(b) if b else "()"


# --- structure maps ---------------------------------------------------------
# Every map takes a tuple of labels and returns {labels: coefficient}.


def _need(labels, classes):
    for x, c in zip(labels, classes):
        if x not in LABELS[c]:
            raise LabelClassMismatch(f"label {x} on a {c} loop")


def m_sep(a, b):
    _need((a, b), (TRIVIAL, TRIVIAL))
    if a == "1":
        return {(b,): 1}
    if b == "1":
        return {(a,): 1}
    return {}


def m_nest(outer, inner):
    _need((outer, inner), (TRIVIAL, TRIVIAL))
    table = {("1", "1"): {("1",): 1}, ("1", "X"): {("X",): -1}, ("X", "1"): {("X",): 1}}
    return dict(table.get((outer, inner), {}))


def delta_sep(a):
    _need((a,), (TRIVIAL,))
    return {("1", "X"): 1, ("X", "1"): 1} if a == "1" else {}


def delta_nest(a):
    """Split into (outer, inner); the inner loop takes the sign."""
    _need((a,), (TRIVIAL,))
    return {("1", "X"): -1, ("X", "1"): 1} if a == "1" else {}


def act(t, e):
    _need((t, e), (TRIVIAL, ESSENTIAL))
    return {(e,): 1} if t == "1" else {}


def coact(e, variant=PAPER):
    _need((e,), (ESSENTIAL,))
    return {("1" if variant == PAPER else "X", e): 1}


OMEGA = {("V", "W"): 1, ("W", "V"): -1}


def pair(outer, inner):
    _need((outer, inner), (ESSENTIAL, ESSENTIAL))
    w = OMEGA.get((outer, inner), 0)
    return {("X",): w} if w else {}


def copair(a):
    _need((a,), (TRIVIAL,))
    return {("V", "W"): 1, ("W", "V"): -1} if a == "1" else {}


def iota(a):
    _need((a,), (TRIVIAL,))
    return {(a,): 1 if a == "1" else -1}


def iota_inv(a):
    return iota(a)


def matrix(fn, inputs, outputs) -> list[list[int]]:
    """Matrix of a structure map: rows follow ``outputs``, columns ``inputs``."""
    cols = [fn(*x) for x in inputs]
    return [[col.get(y, 0) for col in cols] for y in outputs]


def _linear(fn, terms: dict) -> dict:
    out: dict = {}
    for b, c in terms.items():
        for y, k in fn(*b).items():
            out[y] = out.get(y, 0) + c * k
    return {y: c for y, c in out.items() if c}


def nested_via_iota(outer, inner) -> dict:
    """``iota^-1 . m_sep . (iota x id)`` on one basis tensor."""
    first = {(y[0], inner): c for y, c in iota(outer).items()}
    merged = _linear(m_sep, first)
    return _linear(iota_inv, merged)


# --- surgery plans ----------------------------------------------------------


@dataclass(frozen=True)
class Step:
    map: str  # m_sep, m_nest, delta_sep, delta_nest, act, coact, pair, copair, or iso
    inputs: tuple  # loop positions before, in the map's argument order
    outputs: tuple  # loop positions after, in the map's result order
    carry: tuple  # (before, after) for loops away from the site
    size: int  # loop count after


def _loop_index(loops, level):
    return {frozenset(k for lev, k in lp.visits if lev == level): idx for idx, lp in enumerate(loops)}


def _carry(before, after, b_idx, a_idx, site):
    keys = {lp.visits: k for k, lp in enumerate(after) if k not in a_idx}
    out = []
    for k, lp in enumerate(before):
        if k in b_idx:
            continue
        out.append((k, keys[remap_visits(lp.visits, site)]))
    return tuple(out)


def _classify(ev, before, after) -> Step:
    b_cls = {k: before[k].cls for k in ev.before}
    a_cls = {k: after[k].cls for k in ev.after}
    if ev.kind == "merge":
        kinds = sorted(b_cls.values())
        if kinds == [TRIVIAL, TRIVIAL]:
            name = "m_nest" if ev.nested else "m_sep"
            inputs = ev.outer_first_before
        elif kinds == [ESSENTIAL, TRIVIAL]:
            name = "act"
            inputs = tuple(sorted(ev.before, key=lambda k: b_cls[k] != TRIVIAL))
        else:
            name = "pair"
            inputs = ev.outer_first_before
        return Step(name, inputs, ev.after, (), len(after))
    kinds = sorted(a_cls.values())
    if kinds == [TRIVIAL, TRIVIAL]:
        name = "delta_nest" if ev.nested else "delta_sep"
        outputs = ev.outer_first_after
    elif kinds == [ESSENTIAL, TRIVIAL]:
        name = "coact"
        outputs = tuple(sorted(ev.after, key=lambda k: a_cls[k] != TRIVIAL))
    else:
        name = "copair"
        outputs = ev.outer_first_after
    return Step(name, ev.before, outputs, (), len(after))


@dataclass(frozen=True)
class Plan:
    x_slots: tuple  # loop position of each factor of x
    y_slots: tuple
    steps: tuple
    result_slots: tuple  # final loop position of each output factor
    size: int


def _word(m: AffineMatching, order=None) -> TangleWord:
    return matching_word(m, order) if m.n else TangleWord.identity(0)


@lru_cache(maxsize=None)
def surgery_plan(alpha, beta, gamma, orders=(None, None, None)) -> Plan:
    """Surgery sequence turning ``dual(alpha) beta dual(beta) gamma`` into ``dual(alpha) gamma``."""
    aw, bw, gw = (_word(m, o) for m, o in zip((alpha, beta, gamma), orders))
    toks = gw.tokens + dual(bw).tokens + bw.tokens + dual(aw).tokens
    G, Bn = len(gw), len(bw)
    if not toks:
        return Plan((), (), (), (), 0)
    d = embed(TangleWord(toks))
    loops, _ = extract_loops(d)
    at_x = _loop_index(loops, G + 2 * Bn)
    at_y = _loop_index(loops, G)
    x_slots = tuple(at_x[lp.points] for lp in pair_loops(alpha, beta))
    y_slots = tuple(at_y[lp.points] for lp in pair_loops(beta, gamma))
    steps = []
    site = G + Bn - 1
    while site >= G:
        lower = d.word.tokens[site]
        if lower.kind is Kind.CAP:
            new_d, ev = surgery(d, site)
            after, _ = extract_loops(new_d)
            step = _classify(ev, loops, after)
            carry = _carry(loops, after, ev.before, ev.after, site)
            steps.append(Step(step.map, step.inputs, step.outputs, carry, len(after)))
        else:
            new_d = cancel_rotations(d, site)
            after, _ = extract_loops(new_d) if new_d.word.tokens else ([], {})
            steps.append(Step("iso", (), (), _carry(loops, after, (), (), site), len(after)))
        d, loops = new_d, after
        site -= 1
    at_out = _loop_index(loops, G)
    result_slots = tuple(at_out[lp.points] for lp in pair_loops(alpha, gamma))
    return Plan(x_slots, y_slots, tuple(steps), result_slots, len(loops))


def _run_step(step: Step, labels: tuple, variant: str) -> dict:
    base = [None] * step.size
    for b, a in step.carry:
        base[a] = labels[b]
    if step.map == "iso":
        return {tuple(base): 1}
    args = tuple(labels[k] for k in step.inputs)
    out = {}
    for y, c in CONFIGS[variant][step.map](*args).items():
        new = list(base)
        for pos, lab in zip(step.outputs, y):
            new[pos] = lab
        out[tuple(new)] = c
    return out


def _delta_frobenius(a):
    _need((a,), (TRIVIAL,))
    return {("1", "X"): 1, ("X", "1"): 1} if a == "1" else {("X", "X"): 1}


def _pair_symmetric(outer, inner):
    _need((outer, inner), (ESSENTIAL, ESSENTIAL))
    return {("X",): 1} if outer != inner else {}


def _copair_symmetric(a):
    _need((a,), (TRIVIAL,))
    return {("V", "W"): 1, ("W", "V"): 1} if a == "1" else {}


MAPS = {
    "m_sep": m_sep,
    "m_nest": m_nest,
    "delta_sep": delta_sep,
    "delta_nest": delta_nest,
    "act": act,
    "coact": coact,
    "pair": pair,
    "copair": copair,
}

# "paper" is the literal map list and the default.  "homogeneous" swaps in the
# degree-preserving coaction.  "control" is the ordinary annular Khovanov
# Frobenius structure; it exists only to show that the surgery bookkeeping is
# associative when the local maps are.
CONFIGS = {
    PAPER: MAPS,
    HOMOGENEOUS: {**MAPS, "coact": lambda e: coact(e, HOMOGENEOUS)},
    CONTROL: {
        **MAPS,
        "m_nest": m_sep,
        "delta_sep": _delta_frobenius,
        "delta_nest": _delta_frobenius,
        "coact": lambda e: coact(e, HOMOGENEOUS),
        "pair": _pair_symmetric,
        "copair": _copair_symmetric,
    },
}


def _apply_plan(plan: Plan, bx: tuple, by: tuple, variant: str) -> dict:
    labels = [None] * (len(plan.x_slots) + len(plan.y_slots))
    for slot, lab in zip(plan.x_slots, bx):
        labels[slot] = lab
    for slot, lab in zip(plan.y_slots, by):
        labels[slot] = lab
    state = {tuple(labels): Fraction(1)}
    for step in plan.steps:
        nxt: dict = {}
        for lab, c in state.items():
            for y, k in _run_step(step, lab, variant).items():
                nxt[y] = nxt.get(y, 0) + c * k
        state = {y: c for y, c in nxt.items() if c}
    return {tuple(lab[s] for s in plan.result_slots): c for lab, c in state.items()}


@lru_cache(maxsize=None)
def mult_table(alpha, beta, gamma, variant=PAPER, orders=(None, None, None)) -> dict:
    """Products of basis tensors: ``{(bx, by): {bz: coeff}}``."""
    plan = surgery_plan(alpha, beta, gamma, orders)
    sx, sy = hom_space(alpha, beta), hom_space(beta, gamma)
    return {(bx, by): _apply_plan(plan, bx, by, variant) for bx in sx.basis() for by in sy.basis()}


def compose(x: HomElement, y: HomElement, variant: str = PAPER, orders=(None, None, None)) -> HomElement:
    """The product of ``x`` in M(alpha, beta) and ``y`` in M(beta, gamma), landing in M(alpha, gamma)."""
    if x.space.beta != y.space.alpha:
        raise MiddleMismatch(f"{x.space.beta.signs} != {y.space.alpha.signs}")
    alpha, beta, gamma = x.space.alpha, x.space.beta, y.space.beta
    table = mult_table(alpha, beta, gamma, variant, orders)
    out: dict = {}
    for bx, cx in x.coeffs:
        for by, cy in y.coeffs:
            for bz, k in table[(bx, by)].items():
                out[bz] = out.get(bz, 0) + cx * cy * k
    return HomElement.make(hom_space(alpha, gamma), out)


def basis_elements(space: HomSpace) -> list[HomElement]:
    return [HomElement.make(space, {b: 1}) for b in space.basis()]


# --- checks -----------------------------------------------------------------


def all_orders(m: AffineMatching) -> list:
    return [tuple(o) for o in admissible_orders(m)] if m.n else [None]


def order_independence(n: int, variant: str = PAPER) -> list[dict]:
    """Triples whose product depends on the chosen surgery order."""
    ms = enumerate_matchings(n)
    bad = []
    for a, b, c in itertools.product(ms, repeat=3):
        ref = mult_table(a, b, c, variant)
        for orders in itertools.product(all_orders(a), all_orders(b), all_orders(c)):
            if mult_table(a, b, c, variant, orders) != ref:
                bad.append({"alpha": a.signs, "beta": b.signs, "gamma": c.signs,
                            "orders": [list(map(list, o)) if o else None for o in orders]})
    return bad


def unit_failures(n: int, variant: str = PAPER) -> list[str]:
    ms = enumerate_matchings(n)
    bad = []
    for a, b in itertools.product(ms, repeat=2):
        for x in basis_elements(hom_space(a, b)):
            if compose(identity(a), x, variant) != x or compose(x, identity(b), variant) != x:
                bad.append(f"{a.signs} {b.signs} {x}")
    return bad


def associativity(n: int, variant: str = PAPER) -> dict:
    """Exhaustive check of (xy)z = x(yz) on basis tensors; returns a report."""
    ms = enumerate_matchings(n)
    checked = 0
    failures = []
    nonhomogeneous = 0
    for a, b, c in itertools.product(ms, repeat=3):
        for (bx, by), out in mult_table(a, b, c, variant).items():
            sx, sy, sz = hom_space(a, b), hom_space(b, c), hom_space(a, c)
            for bz in out:
                if sz.degree_of(bz) != sx.degree_of(bx) + sy.degree_of(by):
                    nonhomogeneous += 1
                    break
    for a, b, c, d in itertools.product(ms, repeat=4):
        for x in basis_elements(hom_space(a, b)):
            for y in basis_elements(hom_space(b, c)):
                xy = compose(x, y, variant)
                for z in basis_elements(hom_space(c, d)):
                    checked += 1
                    left = compose(xy, z, variant)
                    right = compose(x, compose(y, z, variant), variant)
                    if left != right:
                        failures.append({
                            "objects": [m.signs for m in (a, b, c, d)],
                            "x": format_tensor(x.coeffs[0][0]),
                            "y": format_tensor(y.coeffs[0][0]),
                            "z": format_tensor(z.coeffs[0][0]),
                            "left": left.to_json(),
                            "right": right.to_json(),
                        })
    return {
        "n": n,
        "coaction": variant,
        "checked": checked,
        "failures": len(failures),
        "nonhomogeneous_products": nonhomogeneous,
        "associative": not failures,
        "examples": failures[:10],
    }


def rotate(m: AffineMatching) -> AffineMatching:
    return run(TangleWord((rot(2 * m.n),)), state_of(m)).matching() if m.n else m


def transport(x: HomElement) -> HomElement:
    """Carry ``x`` along one counterclockwise click: point ``k`` moves to ``k - 1``."""
    space = x.space
    n2 = 2 * space.n
    new_space = hom_space(rotate(space.alpha), rotate(space.beta))
    moved = {frozenset((p - 2) % n2 + 1 for p in pts): k for k, pts in enumerate(space.points)}
    perm = []
    for pts, cls in zip(new_space.points, new_space.classes):
        k = moved[pts]
        if space.classes[k] != cls:
            raise AssertionError("rotation changed a loop class")
        perm.append(k)
    return HomElement.make(new_space, {tuple(b[k] for k in perm): c for b, c in x.coeffs})


def rotation_failures(n: int) -> list[str]:
    bad = []
    for a, b in itertools.product(enumerate_matchings(n), repeat=2):
        for x in basis_elements(hom_space(a, b)):
            y = x
            for _ in range(2 * n):
                y = transport(y)
            if y != x:
                bad.append(f"{a.signs} {b.signs} {x}")
    return bad
