"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ApproxGroupsError(Exception):
    """Base class for all errors raised by approxgroups."""


class InvalidSpec(ApproxGroupsError, ValueError):
    """A group, set or instance description could not be parsed or built."""


class InvalidInstance(InvalidSpec):
    """An instance file is well formed but unusable (for example, an empty set)."""


class UniverseMismatch(ApproxGroupsError, ValueError):
    """Two sets that must share a universe do not."""


class UndefinedProduct(ApproxGroupsError):
    """A product in a local group is not defined.

    ``reason`` is ``"arity"`` or ``"window-exit"``; ``prefix`` is the index of the
    first offending prefix and ``value`` its partial sum (``None`` for arity).
    """

    def __init__(self, reason: str, prefix: int | None = None, value: int | None = None):
        self.reason = reason
        self.prefix = prefix
        self.value = value
        if reason == "arity":
            msg = f"product of {prefix} elements exceeds the arity cap"
        else:
            msg = f"window exit at prefix {prefix} (partial product {value})"
        super().__init__(msg)


class LocalOverflow(UndefinedProduct):
    """A set-level product in a local group would exceed the arity cap or the window."""


class NotSymmetric(ApproxGroupsError, ValueError):
    """A set expected to be symmetric (closed under inverse, containing 1) is not."""


class PreconditionViolated(ApproxGroupsError, ValueError):
    pass


class Uncoverable(ApproxGroupsError):
    """No family of translates drawn from the pool covers the target."""


class NotEquivalent(ApproxGroupsError):
    pass


class SearchFailed(ApproxGroupsError):
    """The refinement search produced no S meeting its wideness bound.

    The best-effort certificate is attached as ``certificate``.
    """

    def __init__(self, msg: str, certificate=None):
        super().__init__(msg)
        self.certificate = certificate


class InternalInvariantBroken(ApproxGroupsError, AssertionError):
    pass


class BudgetExceeded(ApproxGroupsError):
    pass
