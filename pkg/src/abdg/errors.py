"""Typed errors raised by the geometry pipeline.

Every failure mode that a checker is expected to catch and turn into a
report entry gets its own class; anything else is a plain bug and may
surface as ValueError/ZeroDivisionError.
"""

from __future__ import annotations


class AbdgError(Exception):
    """Base class for all package errors."""


class DegenerateJet(AbdgError):
    """Jet arithmetic hit a domain violation (division by a zero-valued
    jet, log/sqrt of a non-positive value, ...)."""


class NotImmersive(AbdgError):
    """Chart derivatives f_u, f_v are (numerically) linearly dependent."""


class NotTransversal(AbdgError):
    """Transversal field lies (numerically) in the tangent plane."""


class DegenerateSurface(AbdgError):
    """The affine fundamental form is singular at the query point."""


class SingularFrame(AbdgError):
    """Moving-frame columns are numerically dependent."""


class NotTangent(AbdgError):
    """The connecting vector of a pair is not tangent to both surfaces."""


class CoincidentPoints(AbdgError):
    """The two surfaces of a pair coincide at the query point."""


class ZeroW(AbdgError):
    """det(fhat - f, xi, xihat) vanishes; the pair frame needs it nonzero."""


class ZeroScale(AbdgError):
    """A transversal rescaling factor vanishes."""


class NotParallel(AbdgError):
    """The two transversal fields are not parallel where parallelism is
    required."""


class DegenerateExpansionBasis(AbdgError):
    """The 1-form pair used as an expansion basis has (numerically)
    vanishing wedge."""


class AlphaZero(AbdgError):
    """Metric reconstruction requested on a pair whose curvature image is
    one-dimensional (no compatible ambient scalar product exists)."""


class InconsistentSignature(AbdgError):
    """Assembled ambient bilinear form has a signature conflicting with
    its case label."""


class Unclassifiable(AbdgError):
    """Case classification hit a boundary value of the invariants."""


class GammaCritical(AbdgError):
    """A chart derivative of the normal-form potential vanishes on the
    evaluation grid."""


class ConstructionFailed(AbdgError):
    """A catalog builder produced an object that fails its own
    self-validation."""


class SignChoiceFailed(AbdgError):
    """No orientation assignment of the two normal fields realizes the
    requested volume normalization."""


class UnknownEntry(AbdgError):
    """Catalog lookup with an unknown name."""


class ParamOutOfRange(AbdgError):
    """Catalog builder parameter outside its documented range."""


class BoundaryStencil(AbdgError):
    """A finite-difference stencil would leave the chart domain."""
