"""Deferred statistical convergence diagnostics in probabilistic normed spaces."""
from .convergence import (
    ExceedanceParams,
    Outcome,
    ParamGrid,
    estimate_limit,
    test_dstat,
    test_dstat_cauchy,
    test_phi,
    test_strong_deferred,
)
from .density import ToleranceSchedule, deferred_cesaro_mean, deferred_count, deferred_density
from .pns import phi0
from .tnorm import LUKASIEWICZ, MIN, PRODUCT
from .windows import affine, classical, explicit, lacunary, lambda_window

__version__ = "0.1.0"
