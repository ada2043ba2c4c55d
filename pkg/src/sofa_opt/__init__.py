"""Survival-of-the-fittest global optimizer for box domains in function spaces.

The optimizer keeps every evaluated point, reselects a parent with
probability proportional to fitness^k, and mutates it with a shrinking
truncated kernel, so the proposal measure localizes on the global maximum of
any positive continuous objective.  The package ships synthetic benchmark
objectives, a stage-structured zooplankton migration fitness model as the
flagship application, and a reproducible experiment harness.
"""

from .core import (
    RunRecord,
    SofaConfig,
    SofaRunError,
    TrialPoint,
    active_dims,
    load_record,
    propose,
    proposal_density,
    run,
    save_record,
    select_reference,
    selection_weights,
)
from .domain import SearchDomain, contains, make_domain, projection
from .objectives import (
    FitnessOutcome,
    Objective,
    constant_objective,
    gaussian_bump,
    random_search_baseline,
    spiky_objective,
    two_bump,
)
from .sampler import (
    BASIC_GAUSSIAN,
    SIMPLIFIED_CAUCHY,
    KernelConfig,
    epsilon_schedule,
    gaussian_sigma,
    sample_truncated_cauchy,
    sample_truncated_gaussian,
)

__version__ = "0.1.0"

__all__ = [
    "BASIC_GAUSSIAN",
    "SIMPLIFIED_CAUCHY",
    "FitnessOutcome",
    "KernelConfig",
    "Objective",
    "RunRecord",
    "SearchDomain",
    "SofaConfig",
    "SofaRunError",
    "TrialPoint",
    "active_dims",
    "constant_objective",
    "contains",
    "epsilon_schedule",
    "gaussian_bump",
    "gaussian_sigma",
    "load_record",
    "make_domain",
    "projection",
    "propose",
    "proposal_density",
    "random_search_baseline",
    "run",
    "sample_truncated_cauchy",
    "sample_truncated_gaussian",
    "save_record",
    "select_reference",
    "selection_weights",
    "spiky_objective",
    "two_bump",
]
