"""Generator tokens, tangle words and the textual word syntax.

Words are read left to right, which is bottom to top in a tangle diagram
(innermost annulus first). ``"g(2,1); g(4,1)"`` therefore builds a cup on
zero strands and then nests a second cup at positions 1, 2 of four.

Grammar (whitespace ignored)::

    word := "id(" NAT ")" | gen (";" gen)*
    gen  := "g(n,i)" | "f(n,i)" | "t+(n,i)" | "t-(n,i)"
          | "w+(n,i)" | "w-(n,i)" | "r(n)" | "r'(n)"

``g`` is a cup whose subscript is the target strand count, ``f`` a cap whose
subscript is the source count, ``t±`` crossings (``t+``: strand ``i`` passes
over), ``w±`` framing twists of strand ``i`` and ``r``/``r'`` the
counterclockwise/clockwise rotations of all strands.  A cup, cap or crossing
with index ``n`` is not primitive; the parser expands it into its defining
word through rotations.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import ArityError, TangleSyntaxError, TokenIndexError


class Kind(enum.Enum):
    CUP = "g"
    CAP = "f"
    CROSS_POS = "t+"
    CROSS_NEG = "t-"
    TWIST_POS = "w+"
    TWIST_NEG = "w-"
    ROT_CCW = "r"
    ROT_CW = "r'"
    ID = "id"


CROSSINGS = (Kind.CROSS_POS, Kind.CROSS_NEG)
TWISTS = (Kind.TWIST_POS, Kind.TWIST_NEG)
ROTATIONS = (Kind.ROT_CCW, Kind.ROT_CW)

_DUAL_KIND = {
    Kind.CUP: Kind.CAP,
    Kind.CAP: Kind.CUP,
    Kind.CROSS_POS: Kind.CROSS_NEG,
    Kind.CROSS_NEG: Kind.CROSS_POS,
    Kind.TWIST_POS: Kind.TWIST_NEG,
    Kind.TWIST_NEG: Kind.TWIST_POS,
    Kind.ROT_CCW: Kind.ROT_CW,
    Kind.ROT_CW: Kind.ROT_CCW,
    Kind.ID: Kind.ID,
}


@dataclass(frozen=True)
class GeneratorToken:
    kind: Kind
    strands: int
    index: int | None = None

    def __post_init__(self):
        n, i = self.strands, self.index
        if n < 0:
            raise TokenIndexError(f"negative strand count in {self}")
        if self.kind in (Kind.ROT_CCW, Kind.ROT_CW, Kind.ID):
            if i is not None:
                raise TokenIndexError(f"{self.kind.value} takes no index")
            return
        if i is None:
            raise TokenIndexError(f"{self.kind.value} needs an index")
        if self.kind in TWISTS:
            if not 1 <= i <= n:
                raise TokenIndexError(f"twist index {i} outside 1..{n}")
            return
        if n < 2:
            raise TokenIndexError(f"{self.kind.value} needs at least 2 strands")
        if not 1 <= i <= n - 1:
            raise TokenIndexError(f"index {i} outside 1..{n - 1} for {self.kind.value}")

    @property
    def source(self) -> int:
        return self.strands - 2 if self.kind is Kind.CUP else self.strands

    @property
    def target(self) -> int:
        return self.strands - 2 if self.kind is Kind.CAP else self.strands

    @property
    def is_flat(self) -> bool:
        return self.kind not in CROSSINGS

    def dual(self) -> "GeneratorToken":
        return GeneratorToken(_DUAL_KIND[self.kind], self.strands, self.index)

    def __str__(self):
        if self.index is None:
            return f"{self.kind.value}({self.strands})"
        return f"{self.kind.value}({self.strands},{self.index})"


def cup(n, i):
    return GeneratorToken(Kind.CUP, n, i)


def cap(n, i):
    return GeneratorToken(Kind.CAP, n, i)


def cross(n, i, l=1):
    return GeneratorToken(Kind.CROSS_POS if l == 1 else Kind.CROSS_NEG, n, i)


def twist(n, i, l=1):
    return GeneratorToken(Kind.TWIST_POS if l == 1 else Kind.TWIST_NEG, n, i)


def rot(n):
    return GeneratorToken(Kind.ROT_CCW, n)


def rot_inv(n):
    return GeneratorToken(Kind.ROT_CW, n)


@dataclass(frozen=True)
class TangleWord:
    """An arity-checked sequence of generators.

    ``arity`` is only consulted when ``tokens`` is empty, where it names the
    identity tangle on that many strands.
    """

    tokens: tuple = ()
    arity: int | None = None

    def __post_init__(self):
        tokens = tuple(self.tokens)
        object.__setattr__(self, "tokens", tokens)
        if not tokens:
            if self.arity is None:
                raise ArityError("empty word needs a declared arity")
            return
        for k, (a, b) in enumerate(zip(tokens, tokens[1:])):
            if a.target != b.source:
                raise ArityError(
                    f"token {k} ({a}) ends on {a.target} strands "
                    f"but token {k + 1} ({b}) starts on {b.source}"
                )
        object.__setattr__(self, "arity", None)

    @classmethod
    def identity(cls, m: int) -> "TangleWord":
        return cls((), m)

    @property
    def signature(self) -> tuple[int, int]:
        if not self.tokens:
            return (self.arity, self.arity)
        return (self.tokens[0].source, self.tokens[-1].target)

    @property
    def source(self) -> int:
        return self.signature[0]

    @property
    def target(self) -> int:
        return self.signature[1]

    @property
    def is_flat(self) -> bool:
        return all(t.is_flat for t in self.tokens)

    def arities(self) -> list[int]:
        """Strand counts at every level, bottom to top (``len(tokens) + 1`` entries)."""
        levels = [self.source]
        levels.extend(t.target for t in self.tokens)
        return levels

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __str__(self):
        return format_word(self)


def word(tokens, arity=None) -> TangleWord:
    tokens = tuple(tokens)
    if not tokens and arity is None:
        raise ArityError("empty word needs a declared arity")
    return TangleWord(tokens, arity)


_GEN = re.compile(r"(id|g|f|t\+|t-|w\+|w-|r'|r)\((\d+)(?:,(\d+))?\)")


def _expand(kind: Kind, n: int, i: int) -> list[GeneratorToken]:
    # index-n generators are defined by conjugating with rotations
    if kind is Kind.CUP:
        return [rot(n - 2), cup(n, n - 1), rot_inv(n)]
    if kind is Kind.CAP:
        return [rot(n), cap(n, n - 1), rot_inv(n - 2)]
    return [rot(n), GeneratorToken(kind, n, n - 1), rot_inv(n)]


def parse_word(text: str) -> TangleWord:
    compact = "".join(text.split())
    if not compact:
        raise TangleSyntaxError("empty word")
    pieces = compact.split(";")
    tokens: list[GeneratorToken] = []
    for k, piece in enumerate(pieces):
        m = _GEN.fullmatch(piece)
        if m is None:
            raise TangleSyntaxError(f"cannot parse generator {piece!r}")
        name, n, i = m.group(1), int(m.group(2)), m.group(3)
        i = None if i is None else int(i)
        if name == "id":
            if len(pieces) != 1 or i is not None:
                raise TangleSyntaxError("id(n) must stand alone")
            return TangleWord.identity(n)
        kind = Kind(name)
        if (kind in ROTATIONS) != (i is None):
            raise TangleSyntaxError(f"wrong number of arguments in {piece!r}")
        if kind in (Kind.CUP, Kind.CAP) + CROSSINGS and n >= 2 and i == n:
            tokens.extend(_expand(kind, n, i))
        else:
            tokens.append(GeneratorToken(kind, n, i))
    return TangleWord(tuple(tokens))


def format_word(w: TangleWord) -> str:
    if not w.tokens:
        return f"id({w.arity})"
    return "; ".join(str(t) for t in w.tokens)


def compose(w1: TangleWord, w2: TangleWord) -> TangleWord:
    """Stack ``w2`` on top of ``w1``."""
    if w1.target != w2.source:
        raise ArityError(f"cannot stack {w2.signature} on {w1.signature}")
    if not w1.tokens and not w2.tokens:
        return w1
    return TangleWord(w1.tokens + w2.tokens)


def dual(w: TangleWord) -> TangleWord:
    """Reflect a word through the circle: reverse it and swap each generator."""
    if not w.tokens:
        return w
    return TangleWord(tuple(t.dual() for t in reversed(w.tokens)))
