"""Exception hierarchy shared by all modules.

Each class carries the process exit code the CLI maps it to.
"""


class UnitaryLabError(Exception):
    exit_code = 1


class DimensionError(UnitaryLabError, ValueError):
    exit_code = 2


class UsageError(UnitaryLabError, ValueError):
    exit_code = 2


class CapacityError(UnitaryLabError):
    exit_code = 3


class ContractViolation(UnitaryLabError, ValueError):
    exit_code = 4


class DegenerateInput(ContractViolation):
    pass


class SingularityError(ContractViolation):
    pass


class NonConvergence(UnitaryLabError):
    """Raised when an iterative search gives up; `report` holds the last state."""

    exit_code = 5

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
