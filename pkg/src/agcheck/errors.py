"""Exception hierarchy shared by every stage of the checker."""


class AgError(Exception):
    """Base class for all checker errors."""


class ParseError(AgError):
    """Raised when a bundle document or an action source cannot be parsed."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class ValidationError(AgError):
    """A syntactically valid input violates a structural invariant."""


class UnknownType(ValidationError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class IndexOutOfRange(ValidationError):
    def __init__(self, index, size, location=None):
        self.index = index
        self.size = size
        where = f"{location}: " if location else ""
        super().__init__(f"{where}index ${index} out of range for a production with |rhs| = {size}")


class PropagateOnNonUnitProduction(ValidationError):
    pass


class MissingActionCfg(AgError):
    pass


class ImbalanceError(AgError):
    """LeaveCtx applied to a root-only context stack."""


class BudgetExceeded(AgError):
    """The state (or tree/choice) budget ran out before the search finished."""

    def __init__(self, message, stats=None):
        self.stats = stats
        super().__init__(message)


class EmptyLanguage(AgError):
    pass


class ChoiceUnderflow(AgError):
    pass


class BaselineDirty(AgError):
    """The unmutated bundle already has error-severity violations."""

    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)
