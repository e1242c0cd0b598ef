"""Mergeable moment accumulators, variance bounds and summary-statistic audits."""

from ._validation import InputError
from .audit import (
    DispersionKind,
    ReportedSummary,
    Verdict,
    audit_member,
    audit_order_statistic,
    audit_subset,
    audit_summary,
    normalize,
)
from .bounds import (
    BoundResult,
    DataSummary,
    SubsetSummary,
    boyd_hawkins_interval,
    check_samuelson,
    identity_leave_one_out,
    identity_pair_decomposition,
    mallows_richter_bound,
    nagy_bound,
    pair_bound,
    refined_range_bound,
    samuelson_interval,
    split_bound,
    subset_variance_bound,
)
from .estimators import MomentSummarizer, SamuelsonOutlierDetector
from .harness import DriftReport, MergePlan, Topology, order_invariance_trial, partition, run_plan
from .moments import MomentAccumulator, empty, from_values, merge, push, remove

__version__ = "0.1.0"
