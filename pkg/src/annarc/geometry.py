"""Exact piecewise-linear embeddings of flat words in the punctured plane.

Level ``j`` of a word (the boundary between tokens ``j-1`` and ``j``) is drawn
on the square of half-size ``j + 1`` centred at the origin.  A point on a
level has a clockwise position ``u`` in ``(0, 1)`` measured from the seam,
the ray up the positive y axis.  Strands only run radially (fixed ``u``) or
along a square of fixed size, so every vertex has rational coordinates and
every edge is an honest straight segment.

Windings are computed from the plane coordinates with a ray along the
positive x axis; the seam bookkeeping of :mod:`annarc.matchings` is not
consulted, which is what makes the two routes independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import FlatnessError, InvalidSite
from .tangle import Kind, TangleWord

F = Fraction
HALF = F(1, 2)
CORNERS = (F(1, 8), F(3, 8), F(5, 8), F(7, 8))


def square_point(r, u):
    """Clockwise position ``u`` on the square of half-size ``r``."""
    p = 8 * (u % 1)
    if p <= 1:
        return (p * r, r)
    if p <= 3:
        return (r, r - (p - 1) * r)
    if p <= 5:
        return (r - (p - 3) * r, -r)
    if p <= 7:
        return (-r, -r + (p - 5) * r)
    return (-r + (p - 7) * r, r)


def _sweep(u0, u1, clockwise):
    """Positions visited going from ``u0`` to ``u1``, corners included, no wrap reduction."""
    pts = [u0]
    if clockwise:
        end = u1 if u1 >= u0 else u1 + 1
        for base in (0, 1):
            for c in (0,) + CORNERS:
                v = c + base
                if u0 < v < end:
                    pts.append(v)
        pts.append(end)
    else:
        end = u1 if u1 <= u0 else u1 - 1
        for base in (0, -1):
            for c in (1,) + tuple(reversed(CORNERS)):
                v = c + base
                if end < v < u0:
                    pts.append(v)
        pts.append(end)
    return sorted(set(pts), reverse=not clockwise)


@dataclass(frozen=True)
class Piece:
    """A strand inside one layer, as ``(radius, position)`` vertices.

    ``ends`` names the level points it joins as ``(level, index)`` pairs.
    """

    layer: int
    path: tuple
    ends: tuple

    def xy(self):
        return [square_point(r, u) for r, u in self.path]


@dataclass(frozen=True)
class PLDiagram:
    word: TangleWord
    levels: tuple  # clockwise positions of the points on each level
    pieces: tuple

    def dump(self) -> list[dict]:
        out = []
        for pc in self.pieces:
            out.append({
                "layer": pc.layer,
                "ends": [list(e) for e in pc.ends],
                "vertices": [[_q(x), _q(y)] for x, y in pc.xy()],
            })
        return out


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _radial(layer, u, r0, r1, ends):
    return Piece(layer, ((r0, u), (r1, u)), ends)


def embed(word: TangleWord, start: tuple = ()) -> PLDiagram:
    """Draw a flat word layer by layer, innermost first."""
    if not word.is_flat:
        raise FlatnessError("only flat words can be embedded")
    levels = [tuple(start)]
    if len(start) != word.source:
        raise ValueError("start positions do not match the source arity")
    if not start and word.source:
        levels = [tuple(F(k, word.source + 1) for k in range(1, word.source + 1))]
    pieces = []
    for j, tok in enumerate(word.tokens):
        cur = levels[-1]
        m = len(cur)
        lo, mid, hi = F(j + 1), F(j + 1) + HALF, F(j + 2)
        i = tok.index
        if tok.kind is Kind.CUP:
            left = cur[i - 2] if i >= 2 else F(0)
            right = cur[i - 1] if i - 1 < m else F(1)
            a, b = left + (right - left) / 3, left + 2 * (right - left) / 3
            new = cur[: i - 1] + (a, b) + cur[i - 1:]
            for k, u in enumerate(cur, start=1):
                out = k if k < i else k + 2
                pieces.append(_radial(j, u, lo, hi, ((j, k), (j + 1, out))))
            path = ((hi, a),) + tuple((mid, v) for v in _sweep(a, b, True)) + ((hi, b),)
            pieces.append(Piece(j, path, ((j + 1, i), (j + 1, i + 1))))
        elif tok.kind is Kind.CAP:
            new = cur[: i - 1] + cur[i + 1:]
            for k, u in enumerate(cur, start=1):
                if k in (i, i + 1):
                    continue
                out = k if k < i else k - 2
                pieces.append(_radial(j, u, lo, hi, ((j, k), (j + 1, out))))
            a, b = cur[i - 1], cur[i]
            path = ((lo, a),) + tuple((mid, v) for v in _sweep(a, b, True)) + ((lo, b),)
            pieces.append(Piece(j, path, ((j, i), (j, i + 1))))
        elif tok.kind in (Kind.ROT_CCW, Kind.ROT_CW) and m:
            if tok.kind is Kind.ROT_CCW:
                moving, target = 1, (cur[-1] + 1) / 2 if m > 1 else (cur[0] + 1) / 2
                new = cur[1:] + (target,)
                out_of = {k: k - 1 for k in range(2, m + 1)}
                out_of[1] = m
                clockwise = False
            else:
                moving, target = m, cur[0] / 2 if m > 1 else cur[0] / 2
                new = (target,) + cur[:-1]
                out_of = {k: k + 1 for k in range(1, m)}
                out_of[m] = 1
                clockwise = True
            for k, u in enumerate(cur, start=1):
                if k != moving:
                    pieces.append(_radial(j, u, lo, hi, ((j, k), (j + 1, out_of[k]))))
            sweep = _sweep(cur[moving - 1], target, clockwise)
            path = ((lo, sweep[0]),) + tuple((mid, v) for v in sweep) + ((hi, sweep[-1]),)
            pieces.append(Piece(j, path, ((j, moving), (j + 1, out_of[moving]))))
        else:
            new = cur
            for k, u in enumerate(cur, start=1):
                pieces.append(_radial(j, u, lo, hi, ((j, k), (j + 1, k))))
        levels.append(tuple(new))
    return PLDiagram(word, tuple(levels), tuple(pieces))


# --- exact predicates -------------------------------------------------------


def orient(p, q, r):
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p, q, r):
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segments_meet(p1, p2, q1, q2) -> bool:
    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return (
        (d1 == 0 and _on_segment(q1, q2, p1))
        or (d2 == 0 and _on_segment(q1, q2, p2))
        or (d3 == 0 and _on_segment(p1, p2, q1))
        or (d4 == 0 and _on_segment(p1, p2, q2))
    )


def winding_number(polygon, point=(F(0), F(0))) -> int:
    """Signed crossings of the rightward horizontal ray from ``point``."""
    w = 0
    px, py = point
    n = len(polygon)
    for k in range(n):
        a, b = polygon[k], polygon[(k + 1) % n]
        if a[1] <= py < b[1] and orient(a, b, point) > 0:
            w += 1
        elif b[1] <= py < a[1] and orient(a, b, point) < 0:
            w -= 1
    return w


def check_crossingless(d: PLDiagram) -> None:
    """Assert that no two strands of a diagram touch except at shared level points."""
    by_layer: dict = {}
    for idx, pc in enumerate(d.pieces):
        pts = pc.xy()
        segs = [(pts[k], pts[k + 1], idx, k) for k in range(len(pts) - 1)]
        by_layer.setdefault(pc.layer, []).extend(segs)
    for segs in by_layer.values():
        for x in range(len(segs)):
            a1, a2, pa, ka = segs[x]
            for y in range(x + 1, len(segs)):
                b1, b2, pb, kb = segs[y]
                if pa == pb and abs(ka - kb) <= 1:
                    continue
                if segments_meet(a1, a2, b1, b2):
                    raise AssertionError(f"strands cross: {(a1, a2)} and {(b1, b2)}")


# --- loops ------------------------------------------------------------------


@dataclass(frozen=True)
class Loop:
    vertices: tuple
    winding: int
    visits: frozenset  # (level, index) points the loop passes

    @property
    def cls(self) -> str:
        return "trivial" if self.winding == 0 else "essential"

    def contains(self, other: "Loop") -> bool:
        return winding_number(self.vertices, other.vertices[0]) != 0


def _chains(d: PLDiagram):
    at: dict = {}
    for idx, pc in enumerate(d.pieces):
        for e in pc.ends:
            at.setdefault(e, []).append(idx)
    used = set()
    chains = []
    for idx in range(len(d.pieces)):
        if idx in used:
            continue
        used.add(idx)
        pc = d.pieces[idx]
        verts = list(pc.xy())
        visits = set(pc.ends)
        end = pc.ends[1]
        closed = False
        while True:
            nxt = [p for p in at.get(end, []) if p not in used]
            if not nxt:
                closed = len(at.get(end, [])) == 2 and end == pc.ends[0]
                break
            k = nxt[0]
            used.add(k)
            q = d.pieces[k]
            qv = q.xy()
            if q.ends[0] == end:
                verts += qv[1:]
                end = q.ends[1]
            else:
                verts += list(reversed(qv))[1:]
                end = q.ends[0]
            visits.update(q.ends)
        if verts[0] == verts[-1]:
            verts = verts[:-1]
        chains.append((verts, frozenset(visits), end == pc.ends[0]))
    return chains


def extract_loops(d: PLDiagram) -> tuple[list[Loop], dict]:
    """Closed loops of a closed diagram and their nesting forest.

    The forest maps each loop index to the index of the smallest loop
    containing it, or ``None``.
    """
    loops = []
    for verts, visits, closed in _chains(d):
        if not closed:
            raise ValueError("diagram has open arcs")
        w = winding_number(verts)
        if abs(w) > 1:
            raise AssertionError(f"embedded loop with winding {w}")
        loops.append(Loop(tuple(verts), w, visits))
    loops.sort(key=lambda lp: min(lp.visits))
    parent = {}
    for k, lp in enumerate(loops):
        outer = [o for o in range(len(loops)) if o != k and loops[o].contains(lp)]
        best = None
        for o in outer:
            if not any(p != o and loops[p] is not lp and loops[o].contains(loops[p]) for p in outer):
                best = o
        parent[k] = best
    return loops, parent


def open_arcs(d: PLDiagram) -> list[tuple[tuple, int]]:
    """Open arcs of a ``(0, m)`` diagram as (top-level endpoints, winding-free tag)."""
    top = len(d.levels) - 1
    out = []
    for verts, visits, closed in _chains(d):
        ends = sorted(e[1] for e in visits if e[0] == top)
        if not closed:
            out.append((tuple(ends), verts))
    return out


# --- surgery ----------------------------------------------------------------


@dataclass(frozen=True)
class SurgeryEvent:
    kind: str  # "merge" or "split"
    before: tuple  # loop indices in the diagram before
    after: tuple  # loop indices in the diagram after
    before_classes: tuple
    after_classes: tuple
    nested: bool
    site: tuple  # (layer, index)
    outer_first_before: tuple = ()
    outer_first_after: tuple = ()


def remap_visits(visits, layer):
    """Level renumbering after deleting tokens ``layer`` and ``layer + 1``."""
    out = set()
    for lev, k in visits:
        if lev == layer + 1:
            continue
        out.add((lev - 2, k) if lev >= layer + 2 else (lev, k))
    return frozenset(out)


def _order_by_nesting(loops, idxs):
    a, b = idxs
    if loops[a].contains(loops[b]):
        return (a, b), True
    if loops[b].contains(loops[a]):
        return (b, a), True
    return (a, b), False


def surgery(d: PLDiagram, site: int):
    """Replace the cap at layer ``site`` and the cup just above it by two radial strands."""
    toks = d.word.tokens
    if not 0 <= site < len(toks) - 1:
        raise InvalidSite(f"no token pair at layer {site}")
    lower, upper = toks[site], toks[site + 1]
    if not (lower.kind is Kind.CAP and upper.kind is Kind.CUP
            and lower.strands == upper.strands and lower.index == upper.index):
        raise InvalidSite(f"layers {site}, {site + 1} are not a matching cap and cup")
    i = lower.index
    before, _ = extract_loops(d)
    new_word = TangleWord(toks[:site] + toks[site + 2:]) if len(toks) > 2 else TangleWord.identity(lower.strands)
    after_d = embed(new_word)
    after, _ = extract_loops(after_d)
    touched_before = {(site, i), (site, i + 1), (site + 2, i), (site + 2, i + 1)}
    touched_after = {(site, i), (site, i + 1)}
    b_idx = tuple(k for k, lp in enumerate(before) if lp.visits & touched_before)
    a_idx = tuple(k for k, lp in enumerate(after) if lp.visits & touched_after)
    kept_before = {remap_visits(lp.visits, site) for k, lp in enumerate(before) if k not in b_idx}
    kept_after = {lp.visits for k, lp in enumerate(after) if k not in a_idx}
    assert kept_before == kept_after, "loops away from the site changed"
    if (len(b_idx), len(a_idx)) == (2, 1):
        kind = "merge"
        ordered, nested = _order_by_nesting(before, b_idx)
        ev = SurgeryEvent(kind, b_idx, a_idx,
                          tuple(before[k].cls for k in b_idx), (after[a_idx[0]].cls,),
                          nested and all(before[k].cls == "trivial" for k in b_idx),
                          (site, i), ordered, a_idx)
    elif (len(b_idx), len(a_idx)) == (1, 2):
        kind = "split"
        ordered, nested = _order_by_nesting(after, a_idx)
        ev = SurgeryEvent(kind, b_idx, a_idx,
                          (before[b_idx[0]].cls,), tuple(after[k].cls for k in a_idx),
                          nested and all(after[k].cls == "trivial" for k in a_idx),
                          (site, i), b_idx, ordered)
    else:
        raise AssertionError(f"surgery changed {len(b_idx)} loops into {len(a_idx)}")
    return after_d, ev


def pair_loops_geometric(alpha_word: TangleWord, beta_word: TangleWord) -> dict:
    """Loop classes of ``dual(alpha)`` over ``beta`` keyed by the middle points each loop visits."""
    from .tangle import compose, dual

    d = embed(compose(beta_word, dual(alpha_word)))
    middle = len(beta_word.tokens)
    loops, _ = extract_loops(d)
    return {frozenset(k for lev, k in lp.visits if lev == middle): lp.cls for lp in loops}


def cancel_rotations(d: PLDiagram, site: int) -> PLDiagram:
    """Delete an ``r``/``r'`` pair at layers ``site`` and ``site + 1``; an isotopy."""
    toks = d.word.tokens
    if not 0 <= site < len(toks) - 1:
        raise InvalidSite(f"no token pair at layer {site}")
    kinds = {toks[site].kind, toks[site + 1].kind}
    if kinds != {Kind.ROT_CCW, Kind.ROT_CW} or toks[site].strands != toks[site + 1].strands:
        raise InvalidSite(f"layers {site}, {site + 1} are not opposite rotations")
    rest = toks[:site] + toks[site + 2:]
    return embed(TangleWord(rest) if rest else TangleWord.identity(toks[site].strands))
