"""Exception hierarchy. Every error raised by this package derives from BmplaneError."""


class BmplaneError(Exception):
    """Base class for all bmplane errors."""


# -- gauge construction ------------------------------------------------------

class NotStarShaped(BmplaneError):
    """Some ray from the origin misses the polygon boundary or crosses it more than once."""


class NotSymmetric(BmplaneError):
    """Vertex set is not equal to its antipodal image and symmetrization was not requested."""


class OriginOutside(BmplaneError):
    """The origin is not strictly interior to the polygon."""


class InvalidExponent(BmplaneError):
    """p-norm exponent outside [1, inf] or NaN."""


class NonPositiveSample(BmplaneError):
    """A radial sample is zero, negative, or not finite."""


class TooFewSamples(BmplaneError):
    """Fewer radial samples than the minimum grid size."""


# -- ellipse layer -----------------------------------------------------------

class NotInCone(BmplaneError):
    """Coefficient triple violates a2 > 0, a2^2 > b2^2 + c2^2."""


class NotPD(BmplaneError):
    """Matrix is not symmetric positive definite."""


class BadAngleOrder(BmplaneError):
    """Interpolation angles do not satisfy the strict ordering inside a pi-window."""


class LeftCone(BmplaneError):
    """A perturbation step was large enough to push the triple out of the cone."""


# -- solver ------------------------------------------------------------------

class NoConvergence(BmplaneError):
    """Bisection exhausted its iteration budget with the bracket still above tolerance."""


class NoAlternance(BmplaneError):
    """No four-point alternation could be located; the candidate is not optimal."""


# -- report ------------------------------------------------------------------

class ConeViolation(BmplaneError):
    """Certificate points do not interleave the way the contact geometry requires."""


# -- oracle ------------------------------------------------------------------

class EmptyGrid(BmplaneError):
    """Oracle search grid has no admissible parameter triple."""


# -- cli / io ----------------------------------------------------------------

class InputError(BmplaneError):
    """Malformed input file, descriptor, or report."""
