"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is valid."""


class CapacityError(RuntimeError):
    """An exact enumeration would exceed the configured horizon."""


class InfeasibleError(RuntimeError):
    """A construction cannot be completed within its budget.

    ``report`` carries the binding inequality in serializable form.
    """

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}
