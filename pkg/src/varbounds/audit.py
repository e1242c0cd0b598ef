"""Feasibility audit of reported summary statistics.

A report (n, mean, a dispersion figure, optionally min/max) is checked
against the variance bounds.  The audit can only *prove infeasibility*: a
feasible verdict means no bound is violated, not that matching data exist.

Rounding: when a report states ``decimals=d`` every reported real is read as
the interval ``value ± 0.5 * 10**-d`` and each constraint is evaluated at the
point of that box most favourable to feasibility.  Coarser rounding can
therefore only turn infeasible verdicts into feasible ones.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional

from ._validation import InputError, check_count, check_finite_scalar
from .bounds import (
    REL_TOL,
    BoundResult,
    DataSummary,
    SubsetSummary,
    boyd_hawkins_factors,
    centre_term,
    mallows_richter_value,
    nagy_value,
    samuelson_radius,
)

__all__ = [
    "DispersionKind",
    "ReportedSummary",
    "Violation",
    "Verdict",
    "normalize",
    "audit_summary",
    "audit_member",
    "audit_subset",
    "audit_order_statistic",
]


class DispersionKind(str, enum.Enum):
    POPULATION_SD = "population_sd"
    SAMPLE_SD = "sample_sd"
    POPULATION_VARIANCE = "population_variance"
    SAMPLE_VARIANCE = "sample_variance"

    @property
    def is_sample(self) -> bool:
        return self in (DispersionKind.SAMPLE_SD, DispersionKind.SAMPLE_VARIANCE)

    @property
    def is_sd(self) -> bool:
        return self in (DispersionKind.POPULATION_SD, DispersionKind.SAMPLE_SD)


@dataclass(frozen=True)
class ReportedSummary:
    n: int
    mean: float
    dispersion: float
    dispersion_kind: DispersionKind = DispersionKind.SAMPLE_SD
    min: Optional[float] = None
    max: Optional[float] = None
    decimals: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "n", check_count(self.n, "n"))
        object.__setattr__(self, "mean", check_finite_scalar(self.mean, "mean"))
        d = check_finite_scalar(self.dispersion, "dispersion")
        if d < 0:
            raise InputError(f"dispersion must be nonnegative, got {d}")
        object.__setattr__(self, "dispersion", d)
        try:
            object.__setattr__(self, "dispersion_kind", DispersionKind(self.dispersion_kind))
        except ValueError:
            raise InputError(f"unknown dispersion kind {self.dispersion_kind!r}") from None
        for name in ("min", "max"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, check_finite_scalar(v, name))
        if self.decimals is not None:
            dec = check_count(self.decimals, "decimals", minimum=0)
            if dec > 15:
                raise InputError(f"decimals must be <= 15, got {dec}")
            object.__setattr__(self, "decimals", dec)

    @property
    def rounding(self) -> float:
        """Half-width of the rounding interval around each reported value."""
        return 0.0 if self.decimals is None else 0.5 * 10.0 ** (-self.decimals)

    def to_variance(self, dispersion: float) -> float:
        """Convert a dispersion figure of this report's kind to population variance."""
        var = dispersion * dispersion if self.dispersion_kind.is_sd else dispersion
        if self.dispersion_kind.is_sample:
            var *= (self.n - 1) / self.n
        return var


@dataclass(frozen=True)
class Violation:
    constraint: str
    result: BoundResult

    def to_dict(self) -> dict:
        return {
            "constraint": self.constraint,
            "bound": self.result.bound,
            "observed": self.result.observed,
            "slack": self.result.slack,
        }


@dataclass(frozen=True)
class Verdict:
    """Outcome of an audit.

    ``tolerance_used`` is the largest absolute tolerance among the violated
    constraints, or among all evaluated constraints when none failed.
    """

    feasible: bool
    violations: list[Violation] = field(default_factory=list)
    tolerance_used: float = 0.0
    checks: list[str] = field(default_factory=list)

    @property
    def message(self) -> str:
        if self.feasible:
            return "feasible: no bound violated (necessary conditions only; not proof that such data exist)"
        names = ", ".join(v.constraint for v in self.violations)
        return f"infeasible: violates {names}"

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [v.to_dict() for v in self.violations],
            "tolerance_used": self.tolerance_used,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        violations = []
        for v in d["violations"]:
            slack = float(v["slack"])
            violations.append(
                Violation(v["constraint"], BoundResult(float(v["bound"]), float(v["observed"]), slack, False))
            )
        return cls(bool(d["feasible"]), violations, float(d["tolerance_used"]))


def _verdict(results: list[tuple[str, BoundResult]]) -> Verdict:
    failed = [Violation(name, res) for name, res in results if not res.satisfied]
    pool = [v.result for v in failed] if failed else [res for _, res in results]
    tol = max((res.tol for res in pool), default=0.0)
    return Verdict(not failed, failed, tol, [name for name, _ in results])


def normalize(r: ReportedSummary) -> DataSummary:
    """Reported figures at face value, as a population-variance summary."""
    if r.n == 1 and r.dispersion_kind.is_sample:
        raise InputError("a sample dispersion is undefined for n=1")
    return DataSummary(r.n, r.mean, r.to_variance(r.dispersion), r.min, r.max)


@dataclass(frozen=True)
class _Box:
    """Rounding intervals around the reported figures."""

    mean_lo: float
    mean_hi: float
    var_hi: float
    delta: float

    @classmethod
    def of(cls, r: ReportedSummary) -> "_Box":
        normalize(r)
        d = r.rounding
        return cls(r.mean - d, r.mean + d, r.to_variance(r.dispersion + d), d)

    @property
    def sd_hi(self) -> float:
        return math.sqrt(self.var_hi)


def _gap(a_lo: float, a_hi: float, b_lo: float, b_hi: float) -> float:
    """Smallest ``|a - b|`` over two intervals."""
    return max(0.0, a_lo - b_hi, b_lo - a_hi)


def audit_summary(
    r: ReportedSummary, *, range_attained: bool = True, rel_tol: float = REL_TOL
) -> Verdict:
    """Check a report for internal consistency.

    With ``min``/``max`` present: ordering ``min <= mean <= max``; and, when
    the range is attained by data (the default), both extremes inside the
    Samuelson interval, the variance above the range bound and, for n >= 3,
    above the refined range bound.
    """
    box = _Box.of(r)
    d = box.delta
    n = r.n
    results: list[tuple[str, BoundResult]] = []
    lo, hi = r.min, r.max
    if lo is not None and hi is not None:
        results.append(("range_order", BoundResult.upper(hi + d, lo - d, rel_tol)))
    if lo is not None:
        results.append(("mean_above_min", BoundResult.upper(box.mean_hi, lo - d, rel_tol)))
    if hi is not None:
        results.append(("mean_below_max", BoundResult.upper(hi + d, box.mean_lo, rel_tol)))

    if range_attained and n >= 2:
        radius = samuelson_radius(n, box.var_hi)
        if hi is not None:
            results.append(("samuelson_max", BoundResult.upper(box.mean_hi + radius, hi - d, rel_tol)))
        if lo is not None:
            results.append(("samuelson_min", BoundResult.lower(box.mean_lo - radius, lo + d, rel_tol)))
        if lo is not None and hi is not None:
            spread = max(0.0, (hi - d) - (lo + d))
            nagy = nagy_value(n, spread)
            results.append(("nagy", BoundResult.lower(nagy, box.var_hi, rel_tol)))
            if n >= 3:
                # the two terms are minimised separately over the box, which
                # can only under-estimate the joint minimum
                offset = _gap(box.mean_lo, box.mean_hi, (lo + hi) / 2 - d, (lo + hi) / 2 + d)
                refined = nagy + centre_term(n, offset)
                results.append(("refined_range", BoundResult.lower(refined, box.var_hi, rel_tol)))
    return _verdict(results)


def audit_member(x: float, r: ReportedSummary, *, rel_tol: float = REL_TOL) -> Verdict:
    """Could `x` be one of the observations behind the report?"""
    x = check_finite_scalar(x, "x")
    if r.n < 2:
        raise InputError("Samuelson undefined for n<2")
    box = _Box.of(r)
    dist = _gap(x - box.delta, x + box.delta, box.mean_lo, box.mean_hi)
    radius = samuelson_radius(r.n, box.var_hi)
    return _verdict([("samuelson_member", BoundResult.upper(radius, dist, rel_tol))])


def audit_subset(sub: SubsetSummary, r: ReportedSummary, *, rel_tol: float = REL_TOL) -> Verdict:
    """Check a claimed subset mean and/or population variance against the report."""
    box = _Box.of(r)
    n = r.n
    results = []
    if sub.mean is not None:
        if not 1 <= sub.size <= n - 1:
            raise InputError(f"subset mean needs 1 <= r <= n-1, got r={sub.size}, n={n}")
        offset = _gap(sub.mean - box.delta, sub.mean + box.delta, box.mean_lo, box.mean_hi)
        bound = mallows_richter_value(n, sub.size, offset)
        results.append(("mallows_richter", BoundResult.lower(bound, box.var_hi, rel_tol)))
    if sub.variance is not None:
        if sub.size > n:
            raise InputError(f"subset size {sub.size} exceeds n={n}")
        sub_var = max(0.0, sub.variance - box.delta)
        results.append(("subset_variance", BoundResult.lower(sub.size / n * sub_var, box.var_hi, rel_tol)))
    return _verdict(results)


def audit_order_statistic(
    k: int, value: float, r: ReportedSummary, *, rel_tol: float = REL_TOL
) -> Verdict:
    """Check a claimed k-th smallest value (1-based) against the report."""
    k = check_count(k, "k")
    if k > r.n:
        raise InputError(f"k={k} out of range 1..{r.n}")
    value = check_finite_scalar(value, "value")
    box = _Box.of(r)
    below, above = boyd_hawkins_factors(r.n, k)
    sd = box.sd_hi
    d = box.delta
    return _verdict(
        [
            ("boyd_hawkins_lower", BoundResult.lower(box.mean_lo - below * sd, value + d, rel_tol)),
            ("boyd_hawkins_upper", BoundResult.upper(box.mean_hi + above * sd, value - d, rel_tol)),
        ]
    )
