"""Exception hierarchy shared by all modules."""


class PolyApproxError(Exception):
    """Base class for errors raised by this package."""


class EmptyPolyhedron(PolyApproxError):
    """The described polyhedron has no points."""


class LinealityDetected(PolyApproxError):
    """The polyhedron contains a full line; only pointed sets are supported."""


class RaysPresent(PolyApproxError):
    """An operation requiring a bounded V-representation received rays."""


class NumericalBreakdown(PolyApproxError):
    """A solver lost numerical control (pivot underflow, iteration cap)."""


class InstanceInfeasible(PolyApproxError):
    """No feasible point exists inside the instance box."""


class NoInteriorPoint(PolyApproxError):
    """The feasible set has no strictly feasible (Slater) point."""


class RankDeficient(PolyApproxError):
    """The projection matrix does not have full row rank."""


class IterationCap(PolyApproxError):
    """A Benson loop exceeded its cut budget."""


class NotNested(PolyApproxError):
    """The inner set of a Hausdorff query is not contained in the outer set."""


class EpsTooLarge(PolyApproxError):
    """A generator parameter is too large for the construction to be valid."""
