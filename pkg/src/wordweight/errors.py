"""Exception types shared across the package."""


class WordSyntaxError(ValueError):
    """Malformed word text. ``position`` is the character offset of the bad token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ConjugatorTooLong(ValueError):
    """Conjugator exceeds the length bound for its index."""


class IndexTooSmall(ValueError):
    """Generator index below the family's starting index."""


class BudgetExhausted(RuntimeError):
    """A search or enumeration ran out of its node/cost/time budget."""


class InvalidCertificate(ValueError):
    """The linear functional is unbounded on the generating set in the claimed direction."""


class ConstraintViolation(ValueError):
    """A chain of blocks violates the separation constraint. ``index`` is 1-based."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class PreconditionViolated(ValueError):
    """An operation was called outside its stated domain."""


class UnknownLength(LookupError):
    """The weight provider cannot certify an exact length for some word(s)."""

    def __init__(self, message: str, words=()):
        super().__init__(message)
        self.words = tuple(words)
