"""Variance bounds derived from the pooled-variance identity.

Every bound here is stated for the population variance ``S^2 = m2 / n``.
Lower bounds on the variance come back as :class:`BoundResult` with
``slack = observed - bound``; upper bounds (e.g. an interval end that a
value must not exceed) use ``slack = bound - observed``.  Either way a
result is satisfied when ``slack >= -tol`` with

    tol = rel_tol * max(1, |observed|, |bound|)

The scalar helpers (``samuelson_radius``, ``nagy_value``, ...) are plain
formulas with no tolerance logic; the audit module evaluates them at
rounding-adjusted points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._validation import InputError, check_count, check_finite_scalar, check_index, check_values
from .moments import from_values

__all__ = [
    "REL_TOL",
    "DataSummary",
    "SubsetSummary",
    "BoundResult",
    "IdentityCheck",
    "samuelson_interval",
    "check_samuelson",
    "pair_bound",
    "nagy_bound",
    "refined_range_bound",
    "mallows_richter_bound",
    "split_bound",
    "subset_variance_bound",
    "boyd_hawkins_interval",
    "check_order_statistics",
    "identity_leave_one_out",
    "identity_pair_decomposition",
]

REL_TOL = 1e-9


def tolerance(observed: float, bound: float, rel_tol: float = REL_TOL) -> float:
    return rel_tol * max(1.0, abs(observed), abs(bound))


@dataclass(frozen=True)
class BoundResult:
    bound: float
    observed: float
    slack: float
    satisfied: bool
    tol: float = 0.0

    @classmethod
    def lower(cls, bound: float, observed: float, rel_tol: float = REL_TOL) -> "BoundResult":
        """`observed` must be at least `bound`."""
        tol = tolerance(observed, bound, rel_tol)
        slack = observed - bound
        return cls(float(bound), float(observed), float(slack), bool(slack >= -tol), tol)

    @classmethod
    def upper(cls, bound: float, observed: float, rel_tol: float = REL_TOL) -> "BoundResult":
        """`observed` must not exceed `bound`."""
        tol = tolerance(observed, bound, rel_tol)
        slack = bound - observed
        return cls(float(bound), float(observed), float(slack), bool(slack >= -tol), tol)

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "observed": self.observed,
            "slack": self.slack,
            "satisfied": self.satisfied,
        }


@dataclass(frozen=True)
class DataSummary:
    """``(n, mean, population variance)`` with an optional attained range.

    Only the field domains are enforced here.  Ordering between ``min``,
    ``mean`` and ``max`` is left to the audit, which reports a violated
    ordering as an infeasibility rather than refusing the input.
    """

    n: int
    mean: float
    variance: float
    min: Optional[float] = None
    max: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "n", check_count(self.n, "n"))
        object.__setattr__(self, "mean", check_finite_scalar(self.mean, "mean"))
        var = check_finite_scalar(self.variance, "variance")
        if var < 0:
            raise InputError(f"variance must be nonnegative, got {var}")
        object.__setattr__(self, "variance", var)
        for name in ("min", "max"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, check_finite_scalar(v, name))

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @classmethod
    def from_values(cls, xs: Sequence[float]) -> "DataSummary":
        arr = check_values(xs, "xs")
        if arr.size == 0:
            raise InputError("cannot summarize an empty dataset")
        acc = from_values(arr)
        return cls(acc.count, acc.mean, acc.population_variance, float(arr.min()), float(arr.max()))

    def _require_range(self, what: str) -> tuple[float, float]:
        if self.min is None or self.max is None:
            raise InputError(f"{what} needs both min and max")
        return self.min, self.max


@dataclass(frozen=True)
class SubsetSummary:
    """Size plus mean and/or population variance of a subset of the data."""

    size: int
    mean: Optional[float] = None
    variance: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "size", check_count(self.size, "subset size"))
        if self.mean is None and self.variance is None:
            raise InputError("subset summary needs a mean or a variance")
        if self.mean is not None:
            object.__setattr__(self, "mean", check_finite_scalar(self.mean, "subset mean"))
        if self.variance is not None:
            v = check_finite_scalar(self.variance, "subset variance")
            if v < 0:
                raise InputError(f"subset variance must be nonnegative, got {v}")
            object.__setattr__(self, "variance", v)


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of a variance decomposition and their difference.

    ``terms`` holds the right-hand-side summands in order.
    """

    lhs: float
    rhs: float
    residual: float
    terms: tuple[float, ...] = ()


# -- scalar formulas ---------------------------------------------------------


def samuelson_radius(n: int, variance: float) -> float:
    """Largest possible ``|x_j - mean|`` for a member of an n-point dataset."""
    return math.sqrt((n - 1) * variance)


def nagy_value(n: int, spread: float) -> float:
    return spread * spread / (2 * n)


def centre_term(n: int, offset: float) -> float:
    """``2/(n-2) * (mean - midrange)**2``, the refinement added to the range bound."""
    return 2.0 * offset * offset / (n - 2)


def mallows_richter_value(n: int, r: int, offset: float) -> float:
    return r * offset * offset / (n - r)


def boyd_hawkins_factors(n: int, k: int) -> tuple[float, float]:
    """Multipliers of the standard deviation below/above the mean for the k-th order statistic."""
    return math.sqrt((n - k) / k), math.sqrt((k - 1) / (n - k + 1))


# -- bounds on summaries -----------------------------------------------------


def _need_n(n: int, minimum: int, msg: str) -> None:
    if n < minimum:
        raise InputError(msg)


def samuelson_interval(s: DataSummary) -> tuple[float, float]:
    """Interval that must contain every observation of the dataset."""
    _need_n(s.n, 2, "Samuelson undefined for n<2")
    r = samuelson_radius(s.n, s.variance)
    return s.mean - r, s.mean + r


def check_samuelson(xs: Sequence[float], rel_tol: float = REL_TOL) -> list[BoundResult]:
    """Per-point check of ``(x_j - mean)**2 <= (n - 1) * S^2``."""
    arr = check_values(xs, "xs")
    _need_n(arr.size, 2, "Samuelson undefined for n<2")
    acc = from_values(arr)
    scaled_var = (acc.count - 1) * acc.population_variance
    dev2 = (arr - acc.mean) ** 2
    return [BoundResult.lower(float(d), scaled_var, rel_tol) for d in dev2]


def pair_bound(n: int, xj: float, xk: float) -> float:
    """Lower bound ``(x_j - x_k)**2 / (2n)`` on the variance from any two members."""
    n = check_count(n, "n")
    _need_n(n, 2, "pair bound needs n >= 2")
    return nagy_value(n, check_finite_scalar(xj, "xj") - check_finite_scalar(xk, "xk"))


def nagy_bound(s: DataSummary, rel_tol: float = REL_TOL) -> BoundResult:
    _need_n(s.n, 2, "range bound needs n >= 2")
    lo, hi = s._require_range("range bound")
    return BoundResult.lower(nagy_value(s.n, hi - lo), s.variance, rel_tol)


def refined_range_bound(s: DataSummary, rel_tol: float = REL_TOL) -> BoundResult:
    _need_n(s.n, 3, "refinement needs n >= 3")
    lo, hi = s._require_range("refined range bound")
    bound = nagy_value(s.n, hi - lo) + centre_term(s.n, s.mean - (lo + hi) / 2)
    return BoundResult.lower(bound, s.variance, rel_tol)


def mallows_richter_bound(s: DataSummary, sub: SubsetSummary, rel_tol: float = REL_TOL) -> BoundResult:
    """Lower bound on the variance implied by the mean of an r-subset."""
    r = sub.size
    if not 1 <= r <= s.n - 1:
        raise InputError(f"subset size r={r} must satisfy 1 <= r <= n-1 (n={s.n})")
    if sub.mean is None:
        raise InputError("subset-mean bound needs the subset mean")
    return BoundResult.lower(mallows_richter_value(s.n, r, sub.mean - s.mean), s.variance, rel_tol)


def split_bound(n1: int, n2: int, mean_x: float, mean_y: float) -> float:
    """Lower bound on the pooled variance of two disjoint groups from their means alone."""
    n1 = check_count(n1, "n1")
    n2 = check_count(n2, "n2")
    d = check_finite_scalar(mean_x, "mean_x") - check_finite_scalar(mean_y, "mean_y")
    n = n1 + n2
    return (n1 * n2 / (n * n)) * d * d


def subset_variance_bound(s: DataSummary, sub: SubsetSummary, rel_tol: float = REL_TOL) -> BoundResult:
    m = sub.size
    if m > s.n:
        raise InputError(f"subset size {m} exceeds n={s.n}")
    if sub.variance is None:
        raise InputError("subset-variance bound needs the subset variance")
    return BoundResult.lower(m / s.n * sub.variance, s.variance, rel_tol)


def boyd_hawkins_interval(s: DataSummary, k: int) -> tuple[float, float]:
    """Interval containing the k-th smallest value (1-based) of any dataset with this summary.

    Defined for every ``1 <= k <= n``; at ``k = 1`` and ``k = n`` one end
    collapses to the mean and the other is the Samuelson end.
    """
    k = check_count(k, "k")
    if k > s.n:
        raise InputError(f"k={k} out of range 1..{s.n}")
    below, above = boyd_hawkins_factors(s.n, k)
    sd = s.sd
    return s.mean - below * sd, s.mean + above * sd


def check_order_statistics(
    xs: Sequence[float], rel_tol: float = REL_TOL
) -> list[tuple[BoundResult, BoundResult]]:
    """For each k, (lower-end, upper-end) checks of the sorted k-th value."""
    arr = check_values(xs, "xs")
    s = DataSummary.from_values(arr)
    out = []
    for k, v in enumerate(np.sort(arr), start=1):
        lo, hi = boyd_hawkins_interval(s, k)
        out.append((BoundResult.lower(lo, float(v), rel_tol), BoundResult.upper(hi, float(v), rel_tol)))
    return out


# -- identities --------------------------------------------------------------


def identity_leave_one_out(xs: Sequence[float], j: int) -> IdentityCheck:
    """Split off ``x_j``: ``S_n^2 = (n-1)/n * S_{n-1}^2 + (x_j - mean)**2 / (n-1)``."""
    arr = check_values(xs, "xs")
    n = arr.size
    j = check_index(j, n, "j")
    _need_n(n, 2, "leave-one-out identity needs n >= 2")
    whole = from_values(arr)
    rest = from_values(np.delete(arr, j))
    rest_term = (n - 1) / n * rest.population_variance
    point_term = (arr[j] - whole.mean) ** 2 / (n - 1)
    lhs = whole.population_variance
    rhs = rest_term + point_term
    return IdentityCheck(lhs, float(rhs), float(lhs - rhs), (rest_term, float(point_term)))


def identity_pair_decomposition(xs: Sequence[float], j: int, k: int) -> IdentityCheck:
    """Split off the pair ``{x_j, x_k}``::

        S_n^2 = (n-2)/n * S_{n-2}^2 + (x_j - x_k)**2 / (2n)
                + 2/(n-2) * (mean - (x_j + x_k)/2)**2
    """
    arr = check_values(xs, "xs")
    n = arr.size
    _need_n(n, 3, "pair decomposition needs n >= 3")
    j = check_index(j, n, "j")
    k = check_index(k, n, "k")
    if j == k:
        raise InputError("pair decomposition needs two distinct indices")
    whole = from_values(arr)
    rest = from_values(np.delete(arr, [j, k]))
    xj, xk = float(arr[j]), float(arr[k])
    rest_term = (n - 2) / n * rest.population_variance
    pair_term = nagy_value(n, xj - xk)
    mid_term = centre_term(n, whole.mean - (xj + xk) / 2)
    lhs = whole.population_variance
    rhs = rest_term + pair_term + mid_term
    return IdentityCheck(lhs, rhs, lhs - rhs, (rest_term, pair_term, mid_term))
