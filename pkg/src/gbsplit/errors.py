"""Exception types raised across the package.

Each error carries a short ``code`` string so callers (the CLI in
particular) can report the failure class without parsing messages.
"""


class GroupTestingError(ValueError):
    code = "error"


class EmptySplitError(GroupTestingError):
    """A binary split was asked to search a block with no defective."""

    code = "empty-split"


class InvalidBlockSizeError(GroupTestingError):
    code = "invalid-block-size"


class DomainError(GroupTestingError):
    """An argument lies outside the domain of a formula."""

    code = "domain"


class EndEffectsError(GroupTestingError):
    """The exact worst-case formula needs m to divide n - k."""

    code = "end-effects"


class InvalidSpecError(GroupTestingError):
    code = "invalid-spec"


class OptimalityError(AssertionError):
    """A closed-form block size disagrees with a brute-force grid search."""

    code = "optimality"
