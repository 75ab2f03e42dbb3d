"""Exception hierarchy shared by the workbench modules."""


class H1Error(Exception):
    """Base class for every error raised by h1wb."""


class InputError(H1Error):
    """Malformed or out-of-contract input."""


class ThreeColorable(InputError):
    pass


class LoopPresent(InputError):
    pass


class NotCritical(InputError):
    pass


class GlueUndefined(InputError):
    pass


class GadgetInvalid(H1Error):
    pass


class SeedsExhausted(H1Error):
    pass


class UnknownName(InputError):
    pass


class BadArity(InputError):
    pass


class NotAHomomorphism(InputError):
    pass


class NotATriangle(InputError):
    pass


class NotAWitness(InputError):
    pass


class MalformedFormula(InputError):
    pass


class ResourceError(H1Error):
    """A search ran out of its budget; the answer is inconclusive."""


class BudgetExceeded(ResourceError):
    pass


class CapExceeded(ResourceError):
    pass


class SizeLimit(ResourceError):
    pass


class BoundExceeded(ResourceError):
    pass


class SearchTimeout(ResourceError):
    pass


class InternalError(H1Error):
    """Two independent computations disagreed; this is a bug, not bad input."""
