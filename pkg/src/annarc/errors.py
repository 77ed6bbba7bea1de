"""Exception taxonomy shared by every module of the package."""


class AnnArcError(Exception):
    """Base class for all domain errors raised by annarc."""


class TangleSyntaxError(AnnArcError, SyntaxError):
    """A tangle word could not be tokenized."""


class ArityError(AnnArcError, ValueError):
    """Strand counts of consecutive pieces do not chain."""


class TokenIndexError(AnnArcError, IndexError):
    """A generator index lies outside its legal range."""


class FlatnessError(AnnArcError, ValueError):
    """A crossing reached code that only handles flat diagrams."""


class UnbalancedSequence(AnnArcError, ValueError):
    pass


class NotApplicable(AnnArcError, ValueError):
    """The requested rewrite does not match the word at that position."""


class CrossingsIrreducible(AnnArcError):
    """Crossing elimination ran out of budget."""


class InvalidSite(AnnArcError, ValueError):
    pass


class LabelClassMismatch(AnnArcError, ValueError):
    """A structure map was fed a loop of the wrong class."""


class MiddleMismatch(AnnArcError, ValueError):
    pass
