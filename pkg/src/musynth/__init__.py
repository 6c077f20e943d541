"""Minimum uncertainty states for pairs of observables."""

from .errors import (
    ConvergenceError,
    DegenerateInputError,
    DimensionError,
    FormatError,
    HermiticityError,
    MusError,
    NormalizationError,
    ResolutionError,
    SignAmbiguousError,
)
from .linalg import EigenPair, commutator_c, general_eigenpairs, hermitian_eigenpairs, inner, norm, normalize
from .mus import (
    MusCandidate,
    MusFamily,
    MusVerdict,
    Reason,
    build_k_operator,
    check_mus,
    condition_residual,
    find_mus_at_lambda,
    gaussian_packet,
    inequality_chain,
    lambda_of_state,
    sweep_lambda,
    verify_gaussian,
)
from .observables import (
    Grid1D,
    Observable,
    load_observable,
    load_state,
    momentum_operator,
    position_operator,
    save_observable,
    save_state,
    spin_operators,
)
from .uncertainty import UncertaintyReport, expectation, robertson_report, schwarz_gap, uncertainty_of
from .variational import MinimizeOptions, MinimizeResult, defect_gradient, defect_objective, minimize_defect

__version__ = "0.1.0"
