"""Win statistics for cluster-randomized trials: analysis, design, and
simulation of hierarchical composite endpoints."""

from .data import Component, DataError, SubjectRecord, TrialDataset, make_subject
from .design import (
    CompositeProbs,
    DesignInputs,
    DesignResult,
    InfeasibleDesignError,
    contour_matrix,
    describe,
    power,
    required_clusters,
    variance_composite,
    variance_single,
    vif,
)
from .wincore import (
    ComparisonTally,
    PairResult,
    WinEstimates,
    classify_pair,
    estimate,
    permutation_variance,
    rank_icc,
    tally,
)

__all__ = [
    "Component",
    "DataError",
    "SubjectRecord",
    "TrialDataset",
    "make_subject",
    "CompositeProbs",
    "DesignInputs",
    "DesignResult",
    "InfeasibleDesignError",
    "contour_matrix",
    "describe",
    "power",
    "required_clusters",
    "variance_composite",
    "variance_single",
    "vif",
    "ComparisonTally",
    "PairResult",
    "WinEstimates",
    "classify_pair",
    "estimate",
    "permutation_variance",
    "rank_icc",
    "tally",
]

__version__ = "0.1.0"
