"""Exception types shared across modules."""


class PermealabError(Exception):
    """Base class; ``code`` is the CLI exit status it maps to."""

    code = 2


class BudgetError(PermealabError):
    code = 3


class EnumerationLimitExceeded(BudgetError):
    pass


class IndexOutOfPattern(PermealabError, IndexError):
    code = 1


class DomainMismatch(PermealabError, ValueError):
    code = 1


class ZeroXi(PermealabError):
    pass


class DegenerateInput(PermealabError, ValueError):
    code = 1


class ZeroHorizontalExtent(PermealabError, ValueError):
    code = 1


class NotUnfrayed(PermealabError, ValueError):
    code = 1


class ConstantPieceEncountered(PermealabError, ValueError):
    code = 1


class NoSeparatingGap(PermealabError, ValueError):
    code = 1


class MalformedCSV(PermealabError, ValueError):
    code = 1


class VerificationFailed(PermealabError):
    """A checked inequality or invariant did not hold."""
