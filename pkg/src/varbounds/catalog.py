"""Evaluate every applicable bound on one dataset (backs ``varbounds bounds``)."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ._validation import check_values
from .bounds import (
    REL_TOL,
    BoundResult,
    DataSummary,
    SubsetSummary,
    boyd_hawkins_interval,
    mallows_richter_bound,
    nagy_bound,
    refined_range_bound,
    split_bound,
    subset_variance_bound,
)
from .moments import from_values


def _row(name: str, res: BoundResult) -> dict:
    return {"name": name, "applicable": True, **res.to_dict()}


def _na(name: str) -> dict:
    return {"name": name, "applicable": False}


def _extreme_split(sorted_xs: np.ndarray, mean: float) -> tuple[np.ndarray, np.ndarray]:
    """Split sorted data into (subset, rest) with the subset mean farthest from `mean`.

    For a fixed size r the subset mean is most extreme at the r smallest or
    the r largest values, so scanning prefixes and suffixes finds the
    strongest subset-mean bound.
    """
    n = sorted_xs.size
    r = np.arange(1, n)
    csum = np.cumsum(sorted_xs)
    low = csum[:-1] / r
    high = (csum[-1] - csum[::-1][1:]) / r  # mean of the r largest
    low_v = r * (low - mean) ** 2 / (n - r)
    high_v = r * (high - mean) ** 2 / (n - r)
    i_low, i_high = int(np.argmax(low_v)), int(np.argmax(high_v))
    if low_v[i_low] >= high_v[i_high]:
        return sorted_xs[: i_low + 1], sorted_xs[i_low + 1:]
    return sorted_xs[n - i_high - 1:], sorted_xs[: n - i_high - 1]


def bound_catalog(xs: Sequence[float], rel_tol: float = REL_TOL) -> list[dict]:
    arr = check_values(xs, "xs")
    s = DataSummary.from_values(arr)
    n = s.n
    names = ["samuelson", "nagy", "refined_range", "mallows_richter", "split", "subset_variance", "boyd_hawkins"]
    if n < 2:
        return [_na(name) for name in names]

    rows = []
    dev2 = float(np.max((arr - s.mean) ** 2))
    rows.append(_row("samuelson", BoundResult.lower(dev2 / (n - 1), s.variance, rel_tol)))
    rows.append(_row("nagy", nagy_bound(s, rel_tol)))
    rows.append(_row("refined_range", refined_range_bound(s, rel_tol)) if n >= 3 else _na("refined_range"))

    ordered = np.sort(arr)
    members, others = _extreme_split(ordered, s.mean)
    r = members.size
    sub, rest = from_values(members), from_values(others)
    rows.append(_row(f"mallows_richter[r={r}]", mallows_richter_bound(s, SubsetSummary(r, mean=sub.mean), rel_tol)))
    split = split_bound(r, n - r, sub.mean, rest.mean)
    rows.append(_row(f"split[{r}|{n - r}]", BoundResult.lower(split, s.variance, rel_tol)))

    # dropping the point nearest the mean leaves the largest (n-1)-subset variance
    keep = np.delete(arr, int(np.argmin(np.abs(arr - s.mean))))
    sub_var = from_values(keep).population_variance
    rows.append(
        _row(f"subset_variance[m={n - 1}]", subset_variance_bound(s, SubsetSummary(n - 1, variance=sub_var), rel_tol))
    )

    for k, v in enumerate(ordered, start=1):
        lo, hi = boyd_hawkins_interval(s, k)
        v = float(v)
        below = BoundResult.lower(lo, v, rel_tol)
        above = BoundResult.upper(hi, v, rel_tol)
        rows.append(
            {
                "name": f"boyd_hawkins[k={k}]",
                "applicable": True,
                "lo": lo,
                "hi": hi,
                "observed": v,
                "slack": min(below.slack, above.slack),
                "satisfied": below.satisfied and above.satisfied,
            }
        )
    return rows

