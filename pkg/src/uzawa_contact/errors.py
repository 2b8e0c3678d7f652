"""Exception hierarchy shared by all modules."""


class ContactError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(ContactError, ValueError):
    pass


class NotPositiveDefinite(ContactError):
    def __init__(self, pivot_index, pivot=None):
        self.pivot_index = pivot_index
        self.pivot = pivot
        msg = f"matrix is not positive definite (pivot {pivot_index}"
        if pivot is not None:
            msg += f" = {pivot:.3e}"
        super().__init__(msg + ")")


class NoConvergence(ContactError):
    def __init__(self, max_iter):
        self.max_iter = max_iter
        super().__init__(f"no convergence after {max_iter} iterations")


class ZeroMatrix(ContactError, ValueError):
    pass


class DegenerateElement(ContactError, ValueError):
    pass


class InvalidMeshRatio(ContactError, ValueError):
    pass


class TooManyConstraints(ContactError, ValueError):
    pass


class NoFeasibleSubset(ContactError):
    pass


class ParseError(ContactError, ValueError):
    pass
