"""Exception hierarchy shared by all modules."""


class LoziError(Exception):
    """Base class for every error raised by lozi_locus."""


class DegenerateParameterError(LoziError, ValueError):
    pass


class OnKinkError(LoziError, ValueError):
    """Derivative requested on the line x = 0 where it does not exist."""


class LoziDomainError(LoziError, ValueError):
    pass


class PreconditionError(LoziError, ValueError):
    pass


class BudgetError(LoziError, RuntimeError):
    """A computation would exceed (or has exhausted) its configured budget."""


class NotFoundError(LoziError, LookupError):
    pass


class DivergenceError(LoziError, ArithmeticError):
    pass
