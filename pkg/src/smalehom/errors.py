"""Exception and warning types shared across the package."""


class SmalehomError(Exception):
    """Base class for errors raised by this package."""


class InputError(SmalehomError):
    """Malformed or inconsistent input data."""


class HypothesisFailure(SmalehomError):
    """A precondition of a construction does not hold on the given data.

    ``name`` identifies the failed hypothesis so reports and tests can match
    on it without parsing the message.
    """

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        self.detail = detail
        super().__init__(f"{name}: {detail}" if detail else name)


class CriterionInapplicable(HypothesisFailure):
    """The decision criterion needs a non-wandering source."""

    def __init__(self, detail: str = ""):
        super().__init__("source is wandering; criterion inapplicable", detail)


class NotConstantToOne(SmalehomError):
    """Fibre counts disagree or are infinite."""


class CapExceeded(SmalehomError):
    """A bounded search ran past its configured cap."""


class ConstructionError(SmalehomError):
    """An internal consistency check failed (e.g. d∘d ≠ 0)."""


class EmptyShiftWarning(UserWarning):
    """A predicate was evaluated on an empty shift and holds vacuously."""
