"""Convergence certificates for the averaged recurrence 2*x[n+1] - x[n].

The package has two halves.  The positive half certifies convergence
quantitatively: in a space whose topology comes from p-homogeneous
seminorms (p in (0, 1]), once the transformed sequence 2*x[n+1] - x[n]
settles under the budget (2**p - 1)*eps, every later term of x is pinned
under an explicit curve sliding toward eps.  The negative half is an
exact probabilistic model showing the same recurrence fails to transfer
convergence *in probability*: the drive variables tend to 0 while the
solution stays above 1/2 with probability exactly 1/2 along odd indices.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .certificates import (
    DEFAULT_EPS_GRID,
    CertifyReport,
    Refusal,
    TailCertificate,
    certify,
    find_threshold_index,
    indistinguishable_limits_check,
    tail_bound,
    telescoped_bound_check,
)
from .errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    ExponentOutOfRange,
    IndexOutOfRange,
    PrefixTooShort,
)
from .probability import (
    ENUMERATION_CAP,
    IndepEventModel,
    IndicatorSum,
    McConfig,
    McEstimate,
    convergence_in_probability_scan,
    drive_rv,
    event_probability,
    prob_metric_exact,
    prob_metric_mc,
    rv_combine,
    sample_coordinates,
    sample_occurrences,
    solution_rv,
    tail_probability_exact,
    tail_probability_mc,
    union_probability_exact,
    verify_recurrence_identity,
)
from .seminorms import (
    AxiomReport,
    PSeminorm,
    SeminormFamily,
    ball_contains,
    check_seminorm_axioms,
    eval_seminorm,
    points_indistinguishable,
    validate_p,
)
from .sequences import (
    ConvergenceDiagnostic,
    DrivenSpec,
    ExplicitSpec,
    NamedSpec,
    SequencePrefix,
    SequenceSpec,
    closed_form,
    converges_to,
    forward_transform,
    inverse_solve,
    spec_from_config,
)

__version__ = "0.1.0"

__all__ = [
    "AxiomReport",
    "CertifyReport",
    "ConvergenceDiagnostic",
    "DEFAULT_EPS_GRID",
    "DimensionMismatch",
    "DrivenSpec",
    "ENUMERATION_CAP",
    "EnumerationTooLarge",
    "ExplicitSpec",
    "ExponentOutOfRange",
    "IndepEventModel",
    "IndexOutOfRange",
    "IndicatorSum",
    "KERNEL_BACKEND",
    "McConfig",
    "McEstimate",
    "NamedSpec",
    "PSeminorm",
    "PrefixTooShort",
    "Refusal",
    "SeminormFamily",
    "SequencePrefix",
    "SequenceSpec",
    "TailCertificate",
    "ball_contains",
    "certify",
    "check_seminorm_axioms",
    "closed_form",
    "convergence_in_probability_scan",
    "converges_to",
    "drive_rv",
    "eval_seminorm",
    "event_probability",
    "find_threshold_index",
    "forward_transform",
    "indistinguishable_limits_check",
    "inverse_solve",
    "points_indistinguishable",
    "prob_metric_exact",
    "prob_metric_mc",
    "rv_combine",
    "sample_coordinates",
    "sample_occurrences",
    "solution_rv",
    "spec_from_config",
    "tail_bound",
    "tail_probability_exact",
    "tail_probability_mc",
    "telescoped_bound_check",
    "union_probability_exact",
    "validate_p",
    "verify_recurrence_identity",
]
