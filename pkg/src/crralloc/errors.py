"""Exception hierarchy shared by every module of the package."""


class AllocationError(Exception):
    """Base class for all errors raised by crralloc."""

    category = "AllocationError"


class MalformedProfile(AllocationError):
    category = "MalformedProfile"


class InconsistentUtilities(AllocationError):
    category = "InconsistentUtilities"


class InfeasibleCapacities(AllocationError):
    category = "InfeasibleCapacities"


class IncompleteAllocation(AllocationError):
    category = "IncompleteAllocation"


class InvalidAllocation(AllocationError):
    """An allocation violates one-copy semantics or an upper capacity."""

    category = "InvalidAllocation"


class UnsupportedSignMode(AllocationError):
    """Necessary-fairness checks refuse instances with mixed-sign utilities."""

    category = "UnsupportedSignMode"


class Infeasible(AllocationError):
    """No circulation satisfies the arc lower bounds."""

    category = "Infeasible"


class NoFeasibleCompletion(Infeasible):
    category = "NoFeasibleCompletion"


class UnsatisfiableGoal(AllocationError):
    category = "UnsatisfiableGoal"


class BudgetExceeded(AllocationError):
    """Branch-and-bound hit its node limit before proving optimality.

    ``incumbent`` holds the best complete allocation found so far (or None)
    and ``value`` its objective value.
    """

    category = "BudgetExceeded"

    def __init__(self, message, incumbent=None, value=None):
        super().__init__(message)
        self.incumbent = incumbent
        self.value = value


class ParseError(AllocationError):
    category = "ParseError"

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class UnknownAlternative(ParseError):
    category = "UnknownAlternative"
