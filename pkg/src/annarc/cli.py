"""Command-line front end: ``python3 -m annarc <command> ...``."""

from __future__ import annotations

import argparse
import itertools
import json
import sys

from . import algebra, geometry, matchings, rewrite
from .errors import AnnArcError
from .tangle import parse_word

OK, DOMAIN_ERROR, VERIFY_FAILED = 0, 1, 2


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _matching(text: str, n: int | None) -> matchings.AffineMatching:
    m = matchings.from_signs(text)
    if n is not None and m.n != n:
        raise ValueError(f"{text!r} has {2 * m.n} points but --n is {n}")
    return m


class _Out:
    def __init__(self, path):
        self.path = path
        self.lines: list[str] = []

    def __call__(self, line: str):
        self.lines.append(line)

    def flush(self):
        text = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def cmd_matchings(args, out):
    ms = sorted(matchings.enumerate_matchings(args.n), key=lambda m: m.signs)
    if args.format == "text":
        for m in ms:
            out(m.signs)
    else:
        out(_dumps([m.to_json() for m in ms]))
    return OK


def cmd_hom(args, out):
    space = algebra.hom_space(_matching(args.alpha, args.n), _matching(args.beta, args.n))
    if args.format == "text":
        dims = " ".join(f"{k}:{v}" for k, v in space.dims().items())
        out(f"n0={space.n0} n1={space.n1} dims {dims}")
    else:
        out(_dumps(space.to_json()))
    return OK


def _element(space, expr):
    terms = {}
    for part in expr.split("+"):
        part = part.strip()
        coeff = 1
        if " " in part:
            c, part = part.split(None, 1)
            coeff = c
        terms[algebra.parse_tensor(part)] = coeff
    return algebra.HomElement.make(space, terms)


def cmd_compose(args, out):
    a, b, c = (_matching(s, args.n) for s in (args.alpha, args.beta, args.gamma))
    x = _element(algebra.hom_space(a, b), args.x)
    y = _element(algebra.hom_space(b, c), args.y)
    z = algebra.compose(x, y, args.coaction)
    if args.format == "text":
        out(str(z))
    else:
        out(_dumps({"n": a.n, "alpha": a.signs, "beta": b.signs, "gamma": c.signs,
                    "x": args.x, "y": args.y, "result": z.to_json()}))
    return OK


def mult_records(n: int, variant: str):
    ms = sorted(matchings.enumerate_matchings(n), key=lambda m: m.signs)
    for a, b, c in itertools.product(ms, repeat=3):
        table = algebra.mult_table(a, b, c, variant)
        for (bx, by), res in sorted(table.items()):
            if not res:
                continue
            yield {
                "n": n, "alpha": a.signs, "beta": b.signs, "gamma": c.signs,
                "x": algebra.format_tensor(bx), "y": algebra.format_tensor(by),
                "result": [{"basis": algebra.format_tensor(k), "coeff": str(v)} for k, v in sorted(res.items())],
            }


def cmd_mult_table(args, out):
    records = list(mult_records(args.n, args.coaction))
    if args.format == "text":
        for r in records:
            res = " + ".join(f"{t['coeff']}*{t['basis']}" for t in r["result"])
            out(f"{r['alpha']} {r['beta']} {r['gamma']} {r['x']} . {r['y']} = {res}")
    else:
        out(_dumps(records))
    return OK


def cmd_evaluate(args, out):
    w = parse_word(args.word)
    flat = w if w.is_flat else rewrite.eliminate_crossings(w)
    res = matchings.evaluate_word(flat)
    if args.format == "text":
        out(f"signs={res.matching.signs} n0={res.n0} n1={res.n1} shift={res.shift}")
        if flat is not w:
            out(f"flat form: {flat}")
    else:
        out(matchings.result_json(res))
    return OK


# --- verification suites ----------------------------------------------------


def _suite_relations(args, out):
    failed = 0
    for inst, ok in rewrite.relation_report():
        failed += not ok
        out(f"{'PASS' if ok else 'FAIL'} {inst.describe()}")
    for inst in rewrite.wrap_instances():
        ok = rewrite.check_instance(inst)
        out(f"WRAP-{'PASS' if ok else 'FAIL'} {inst.describe()}")
    out(f"relations: {'PASS' if not failed else 'FAIL'} ({failed} failing)")
    return failed == 0


def _suite_associativity(args, out):
    n = 1 if args.n is None else args.n
    variants = [args.coaction] if n < 2 else [algebra.PAPER, algebra.HOMOGENEOUS, algebra.CONTROL]
    reports = {v: algebra.associativity(n, v) for v in variants}
    for v, r in reports.items():
        if args.format == "text":
            out(f"{'PASS' if r['associative'] else 'FAIL'} associativity n={n} coaction={v} "
                f"checked={r['checked']} failures={r['failures']}")
        else:
            out(_dumps(r))
    return reports[args.coaction if args.coaction in reports else algebra.PAPER]["associative"]


def _suite_rotation(args, out):
    ok = True
    for n in range(0, (2 if args.n is None else args.n) + 1):
        bad = algebra.rotation_failures(n)
        ok &= not bad
        out(f"{'PASS' if not bad else 'FAIL'} rotation n={n} failures={len(bad)}")
    return ok


def _suite_order(args, out):
    ok = True
    for n in range(0, (2 if args.n is None else args.n) + 1):
        bad = algebra.order_independence(n, args.coaction)
        ok &= not bad
        out(f"{'PASS' if not bad else 'FAIL'} order-independence n={n} failures={len(bad)}")
    return ok


def oracle_mismatches(n: int) -> tuple[int, list]:
    ms = matchings.enumerate_matchings(n)
    words = {m: matchings.matching_word(m) for m in ms}
    bad = []
    for a, b in itertools.product(ms, repeat=2):
        geo = geometry.pair_loops_geometric(words[a], words[b])
        comb = {lp.points: lp.cls for lp in matchings.pair_loops(a, b)}
        if geo != comb:
            bad.append((a.signs, b.signs))
    return len(ms) ** 2, bad


def _suite_oracle(args, out):
    ok = True
    for n in range(1, (4 if args.n is None else args.n) + 1):
        total, bad = oracle_mismatches(n)
        ok &= not bad
        out(f"{'PASS' if not bad else 'FAIL'} oracle n={n} pairs={total} mismatches={len(bad)}")
    return ok


SUITES = {
    "relations": _suite_relations,
    "associativity": _suite_associativity,
    "rotation": _suite_rotation,
    "order-independence": _suite_order,
    "oracle": _suite_oracle,
}


def cmd_verify(args, out):
    return OK if SUITES[args.suite](args, out) else VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="annarc", description="Affine tangle words and annular arc algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_required=False):
        sp.add_argument("--n", type=int, required=n_required)
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--out")
        sp.add_argument("--coaction", choices=(algebra.PAPER, algebra.HOMOGENEOUS), default=algebra.PAPER)

    sp = sub.add_parser("matchings", help="list affine crossingless matchings")
    common(sp, n_required=True)
    sp.set_defaults(fn=cmd_matchings)

    sp = sub.add_parser("hom", help="loop counts and graded dimensions of a Hom space")
    common(sp)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--beta", required=True)
    sp.set_defaults(fn=cmd_hom)

    sp = sub.add_parser("compose", help="compose two basis tensors")
    common(sp)
    for name in ("--alpha", "--beta", "--gamma", "--x", "--y"):
        sp.add_argument(name, required=True)
    sp.set_defaults(fn=cmd_compose)

    sp = sub.add_parser("mult-table", help="all nonzero products of basis tensors")
    common(sp, n_required=True)
    sp.set_defaults(fn=cmd_mult_table)

    sp = sub.add_parser("evaluate", help="evaluate a (0, 2m) word")
    common(sp)
    sp.add_argument("--word", required=True)
    sp.set_defaults(fn=cmd_evaluate)

    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp)
    sp.add_argument("--suite", choices=tuple(SUITES), required=True)
    sp.set_defaults(fn=cmd_verify)
    return p


# sign strings such as "-+" look like options to argparse; glue them to their flag
_VALUE_FLAGS = {"--alpha", "--beta", "--gamma", "--x", "--y", "--word"}


def _glue(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue(sys.argv[1:] if argv is None else argv))
    if args.n is not None and args.n < 0:
        parser.error("--n must be nonnegative")
    out = _Out(args.out)
    try:
        code = args.fn(args, out)
    except (AnnArcError, ValueError, KeyError) as exc:
        out.flush()
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    out.flush()
    return code


def main():
    sys.exit(run())
