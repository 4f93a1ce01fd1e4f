"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`TorickgkError`.
The command line front end maps :class:`ConfigError` (and polytope or
expression errors met while reading a configuration) to a usage failure and
everything else to a numerical failure.
"""


class TorickgkError(Exception):
    """Base class for all library errors."""


class ConfigError(TorickgkError):
    """A configuration document is malformed or inconsistent."""


# ---------------------------------------------------------------- polytopes


class PolytopeError(TorickgkError):
    """The facet data does not describe a valid Delzant polytope."""


class Unbounded(PolytopeError):
    """The half-space intersection is unbounded."""


class EmptyInterior(PolytopeError):
    """The half-space intersection has empty interior."""


class RedundantHalfspace(PolytopeError):
    """A half-space does not cut out a facet of full dimension."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"half-space {index} is redundant (its face is not a facet)")


class NotDelzant(PolytopeError):
    """A vertex is not simple or its normals do not form a lattice basis."""

    def __init__(self, vertex, facets, determinant=None, message=None):
        self.vertex = [float(v) for v in vertex]
        self.facets = tuple(facets)
        self.determinant = determinant
        if message is None:
            if determinant is None:
                message = f"vertex {self.vertex} is not simple (tight facets {list(self.facets)})"
            else:
                message = (f"vertex {self.vertex} with facets {list(self.facets)} has normal "
                           f"determinant {determinant:g}, not +-1")
        super().__init__(message)


class PointNotOnFaceInterior(PolytopeError):
    """A point expected to lie in the relative interior of a face does not."""


class NoVertexSelection(PolytopeError):
    """No vertex of the face gives a unimodular selection of normals."""


class EmptyGrid(PolytopeError):
    """No lattice point survives the boundary margin."""


# ---------------------------------------------------------------- expressions


class ExprError(TorickgkError):
    """Base class for expression language errors."""


class ExprSyntaxError(ExprError):
    """The source text does not match the grammar."""

    def __init__(self, position, message):
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownIdentifier(ExprError):
    def __init__(self, name, position):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier {name!r} at position {position}")


class ArityError(ExprError):
    def __init__(self, name, expected, got, position):
        self.name = name
        self.expected = expected
        self.got = got
        self.position = position
        super().__init__(f"{name} takes {expected} argument(s), got {got} (position {position})")


class DimensionMismatch(ExprError):
    def __init__(self, name, dim):
        self.name = name
        self.dim = dim
        super().__init__(f"variable {name} is not available in dimension {dim}")


class EvaluationError(ExprError):
    """Evaluation left the domain of an operation; ``node`` is the offending subtree."""

    def __init__(self, node, message):
        self.node = node
        super().__init__(message)


class DomainError(EvaluationError):
    pass


class DivByZero(EvaluationError):
    pass


# ---------------------------------------------------------------- numerics


class OutsideDomain(TorickgkError):
    """A point lies outside the open polytope."""


class FDStepUnderflow(TorickgkError):
    """No admissible finite difference step exists at this point."""


class NotConvexAt(TorickgkError):
    """The Hessian of the potential is not positive definite at a point."""

    def __init__(self, x, min_eig=None):
        self.x = x
        self.min_eig = min_eig
        super().__init__(f"Hessian not positive definite at {list(x)} (smallest eigenvalue {min_eig})")


class SingularPsi(TorickgkError):
    """Hess(tau) + C is singular at a point."""


class Dim4Only(TorickgkError):
    """The quantity is defined only for two-dimensional polytopes."""


class DegenerateAngle(TorickgkError):
    """The angle function is within rounding of -1 or 1 where this is not allowed."""


class AngleSingularity(TorickgkError):
    """1 - p is too small to divide by."""


class StepTooLarge(TorickgkError):
    """The finite difference stencil would leave the open polytope."""


class NotPositiveDefinite(TorickgkError):
    """A metric matrix is not positive definite."""


class DegenerateGrid(TorickgkError):
    """A least squares fit is rank deficient on the given grid."""


class RequiresC1C2(TorickgkError):
    """The positivity check needs a passing smooth extension report first."""


class ChartFailure(TorickgkError):
    """An adapted chart could not be built."""


class UnsupportedFormatForDim(TorickgkError):
    """The output format does not support this dimension."""


class InconsistentComputation(TorickgkError):
    """Two routes to the same quantity disagree beyond rounding."""
