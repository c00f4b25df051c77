"""Exception types shared across the package."""


class RandGroupsError(Exception):
    pass


class RankError(RandGroupsError, ValueError):
    """A generator index is outside 1..rank, or two words disagree on rank."""


class BudgetExceeded(RandGroupsError):
    """An enumeration or search hit its configured cap."""


class PreconditionError(RandGroupsError, ValueError):
    """An operation was applied to an input it is not defined on."""


class MalformedDiagram(RandGroupsError, ValueError):
    pass


class NotATree(RandGroupsError):
    """A diagram still has cells after general reduction."""
