"""Exception types shared across the package."""


class HeatSeriesError(Exception):
    """Base class for all package-specific errors."""


class UnknownVertexError(HeatSeriesError):
    """A queried vertex is not part of the graph."""


class UnreachableVertexError(HeatSeriesError):
    """Two vertices of a finite graph lie in different components."""


class GraphSchemaError(HeatSeriesError):
    """A graph description document violates the schema."""


class RadiusExceededError(HeatSeriesError):
    """Requested evaluation time lies outside the certified interval."""


class TruncationFailureError(HeatSeriesError):
    """The certified tail bound did not reach the tolerance within the term cap."""

    def __init__(self, message, best_bound, terms_used):
        super().__init__(message)
        self.best_bound = best_bound
        self.terms_used = terms_used


class DegreeBoundError(HeatSeriesError):
    """A vertex in the audited region violates the assumed degree bound."""

    def __init__(self, vertex, degree, bound):
        super().__init__(
            f"degree bound violated at vertex {vertex!r}: "
            f"Deg = {degree} > {bound}"
        )
        self.vertex = vertex
        self.degree = degree
        self.bound = bound


class AuditWindowEmptyError(HeatSeriesError):
    """The requested audit window lies entirely below the admissible radius."""

    def __init__(self, r0, xmax):
        super().__init__(
            f"audit window empty: admissible radius starts at {r0}, "
            f"window ends at {xmax}"
        )
        self.r0 = r0
        self.xmax = xmax


class GrowthFitError(HeatSeriesError):
    """No grid point of the envelope family certifies the sampled data."""
