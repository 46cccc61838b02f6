"""Numerical affine differential geometry of immersed surfaces in R^3.

Submodules:

- ``jets``      truncated bivariate Taylor arithmetic (the derivative engine)
- ``geometry``  single-surface invariants: induced connection, affine
                fundamental form, shape operator, conormal, Blaschke normal
- ``forms``     moving frames, pulled-back frame 1-forms, exterior calculus
                on a chart, structure-equation residuals
- ``backlund``  pair-level machinery: adapted pair frames, the conformality
                invariant, condition checkers, curvature and its covariant
                derivative, metric reconstruction
- ``catalog``   built-in analytic surfaces and surface pairs
- ``cli``       batch driver emitting JSON reports, CSV grids and figures
"""

from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
