"""Generalized concurrence for pure and mixed multipartite states."""
from ._accel import HAS_NUMBA
from .engine import (
    ClassContribution,
    ConcurrenceReport,
    calibrate_norm,
    class_contribution,
    three_partite_concurrence,
    total_concurrence,
)
from .oracle import oracle_class_contribution
from .roof import Ensemble, eigen_ensemble, mix_ensemble, roof_estimate
from .state import (
    DensityMatrix,
    PureState,
    apply_local_phases,
    conjugate,
    ghz_state,
    norm2,
    permute_subsystems,
    product_state,
    random_state,
    w_state,
)

__version__ = "0.1.0"
