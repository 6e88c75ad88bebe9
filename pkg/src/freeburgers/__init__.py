"""Free-probability transforms and complex Burgers-type evolution for log-gases."""

from .errors import (
    BranchUndefinedError,
    CompositionUndefinedError,
    DegenerateMeasureError,
    DomainEscapeError,
    EvolutionFailedError,
    FreeBurgersError,
    InvalidDomainError,
    InvalidInputError,
    InvalidParameterError,
    InversionFailedError,
    NotInvertibleError,
    OutOfDomainError,
    SolverFailedError,
    StepFailedError,
    SUndefinedError,
)
from .measures import (
    DensityPart,
    MeasureSpec,
    density_evaluator,
    hankel_psd_defect,
    make_bernoulli,
    make_dirac,
    make_marcenko_pastur,
    make_semicircle,
    moments,
    normalized_measure,
    push_forward_square,
    symmetrize,
)
from .series import (
    CumulantSequence,
    MomentSequence,
    TruncatedSeries,
    compose,
    cumulants_to_moments,
    lagrange_invert,
    moments_to_cumulants,
    reciprocal,
    sqrt_series,
)

__version__ = "0.1.0"
