"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines are repeated in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import time
from math import comb

from annarc import algebra, matchings, rewrite
from annarc.cli import oracle_mismatches
from annarc.tangle import parse_word

RESULTS: list[str] = []


def report(label, ok, detail, elapsed=None, limit=None):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    timing = "" if elapsed is None else f" [{elapsed:.2f}s" + ("" if limit is None else f" < {limit}s") + "]"
    line = f"{status} {label}: {detail}{timing}"
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert within, line


def timed(fn):
    t = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - t


# --- 1 ----------------------------------------------------------------------


def test_criterion_1_enumeration():
    counts, dt = timed(lambda: [len(matchings.enumerate_matchings(n)) for n in range(7)])
    expected = [1, 2, 6, 20, 70, 252, 924]
    ok = counts == expected == [comb(2 * n, n) for n in range(7)]
    report("1 enumeration", ok, f"counts {counts}", dt, 1)


# --- 2 ----------------------------------------------------------------------


def test_criterion_2_n1_hom_table():
    a1, a2 = matchings.from_signs("+-"), matchings.from_signs("-+")
    got = {(x.signs, y.signs): algebra.hom_space(x, y).dims() for x in (a1, a2) for y in (a1, a2)}
    want = {("+-", "+-"): {0: 1, 2: 1}, ("-+", "-+"): {0: 1, 2: 1},
            ("+-", "-+"): {1: 2}, ("-+", "+-"): {1: 2}}
    report("2 n=1 Hom table", got == want, f"{len(got)} object pairs match")


# --- 3 ----------------------------------------------------------------------
# Independent model: Hom(a_i, a_i) is the even part and Hom(a_1, a_2) the odd
# part of the exterior algebra on {v, w}; composition is the wedge product.

WEDGE_BASIS = {"1": (), "X": ("v", "w"), "V": ("v",), "W": ("w",)}
FROM_WEDGE = {v: k for k, v in WEDGE_BASIS.items()}


def wedge(x, y):
    word = WEDGE_BASIS[x] + WEDGE_BASIS[y]
    if len(set(word)) < len(word):
        return {}
    sign = 1
    letters = list(word)
    for i in range(len(letters)):
        for j in range(len(letters) - 1 - i):
            if letters[j] > letters[j + 1]:
                letters[j], letters[j + 1] = letters[j + 1], letters[j]
                sign = -sign
    return {(FROM_WEDGE[tuple(letters)],): sign}


def test_criterion_3_n1_composition_table():
    objs = matchings.enumerate_matchings(1)

    def sweep():
        bad, count = [], 0
        for a, b, c in itertools.product(objs, repeat=3):
            table = algebra.mult_table(a, b, c, algebra.PAPER)
            for (bx, by), res in table.items():
                count += 1
                if res != wedge(bx[0], by[0]):
                    bad.append((a.signs, b.signs, c.signs, bx, by, res))
        return bad, count

    (bad, count), dt = timed(sweep)
    report("3 n=1 composition = exterior algebra on W", not bad,
           f"{count} basis products over 8 object triples, {len(bad)} mismatches", dt, 1)


# --- 4 ----------------------------------------------------------------------


def test_criterion_4_n2_loop_counts():
    def sweep():
        b1, b2, b3 = (matchings.run(parse_word(w)).matching()
                      for w in ("g(2,1); g(4,1)", "g(2,1); r(2); g(4,1)", "g(2,1); r(2); g(4,3)"))
        checks = [
            matchings.loop_counts(b1, b1) == (2, 0),
            matchings.loop_counts(b1, b2) == (1, 1),
            matchings.loop_counts(b3, b2) == (0, 2),
        ]
        ms = matchings.enumerate_matchings(2)
        checks += [matchings.loop_counts(a, a) == (2, 0) for a in ms]
        for a, b in itertools.product(ms, repeat=2):
            sp = algebra.hom_space(a, b)
            checks.append(sum(sp.dims().values()) == 2 ** (sp.n0 + sp.n1))
            checks.append(sp.dims() == algebra.hom_space(b, a).dims())
        return checks

    checks, dt = timed(sweep)
    report("4 n=2 loop counts and 6x6 dimension table", all(checks),
           f"{sum(checks)}/{len(checks)} checks", dt, 5)


# --- 5 ----------------------------------------------------------------------


def test_criterion_5_relation_soundness():
    results, dt = timed(lambda: list(rewrite.relation_report(contexts=20)))
    failed = [inst.describe() for inst, ok in results if not ok]
    rules = {inst.rule for inst, _ in results}
    report("5 relation soundness", not failed,
           f"{len(results)} instances of {len(rules)} rules, n<=8, 20 contexts each, {len(failed)} failing",
           dt, 60)


# --- 6 ----------------------------------------------------------------------


def test_criterion_6_oracle_equivalence():
    def sweep():
        total, bad = 0, 0
        for n in range(1, 5):
            t, b = oracle_mismatches(n)
            total += t
            bad += len(b)
        return total, bad

    (total, bad), dt = timed(sweep)
    report("6 seam count vs winding number", bad == 0, f"{total} matching pairs, {bad} mismatches", dt, 60)


# --- 7 ----------------------------------------------------------------------


def test_criterion_7_rotation_and_order_independence():
    def sweep():
        rot = sum(len(algebra.rotation_failures(n)) for n in range(3))
        order = sum(len(algebra.order_independence(n)) for n in range(3))
        return rot, order

    (rot, order), dt = timed(sweep)
    report("7 rotation transport and surgery order", rot == 0 and order == 0,
           f"rotation failures {rot}, order-dependent triples {order} (n<=2)", dt)


# --- 8 ----------------------------------------------------------------------


def test_criterion_8_iota_compatibility():
    pairs = [("1", "1"), ("1", "X"), ("X", "1"), ("X", "X")]
    outs = [("1",), ("X",)]
    direct = algebra.matrix(algebra.m_nest, pairs, outs)
    conjugated = algebra.matrix(algebra.nested_via_iota, pairs, outs)
    report("8 iota compatibility", direct == conjugated, f"m_nest = {direct}")


# --- 9 ----------------------------------------------------------------------


def test_criterion_9a_associativity_n1():
    reports = [algebra.associativity(1, v) for v in (algebra.PAPER, algebra.HOMOGENEOUS)]
    ok = all(r["associative"] for r in reports)
    report("9a associativity n=1", ok, ", ".join(f"{r['coaction']}: {r['checked']} checked, "
                                                 f"{r['failures']} failures" for r in reports))


def n2_reports():
    return {v: algebra.associativity(2, v) for v in (algebra.PAPER, algebra.HOMOGENEOUS, algebra.CONTROL)}


def test_criterion_9b_associativity_n2_report():
    reports, dt = timed(n2_reports)
    text = json.dumps(reports, ensure_ascii=False)
    ok = json.loads(text).keys() == {"paper", "homogeneous", "control"}
    summary = "; ".join(f"{v}: {r['failures']}/{r['checked']} failures, "
                        f"{r['nonhomogeneous_products']} non-homogeneous products" for v, r in reports.items())
    report("9b n=2 diagnostic report produced", ok, summary, dt)


def test_criterion_9c_associativity_n2_default():
    r = algebra.associativity(2, algebra.PAPER)
    report("9c n=2 default configuration associative", r["associative"],
           f"{r['failures']} of {r['checked']} triples of basis tensors fail")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
