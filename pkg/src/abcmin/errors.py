"""Exception types shared across the package."""


class ABCMinError(Exception):
    """Base class for all package errors."""


class InvalidTree(ABCMinError, ValueError):
    pass


class DomainError(ABCMinError, ValueError):
    """A function was evaluated outside its declared domain."""


class NotBranchShaped(ABCMinError, ValueError):
    """A subtree expected to be a B_k or B_k* branch is neither."""

    def __init__(self, vertex, reason=""):
        self.vertex = vertex
        msg = f"subtree rooted at vertex {vertex} is not a B_k/B_k* branch"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class NotRealizable(ABCMinError, ValueError):
    pass


class CapExceeded(ABCMinError, RuntimeError):
    pass


class EmptySpec(ABCMinError, ValueError):
    pass


class MultipleStars(ABCMinError, ValueError):
    pass


class NoComposition(ABCMinError, ValueError):
    pass


class PreconditionViolated(ABCMinError, ValueError):
    """A transformation was asked to rewrite a tree that does not fit its shape."""

    def __init__(self, clause, detail=""):
        self.clause = clause
        msg = f"precondition violated: {clause}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NonIntegralTarget(ABCMinError, ValueError):
    pass
