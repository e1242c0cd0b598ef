"""Input validation helpers shared by the library, the estimators and the CLI."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

#: Largest observation count an accumulator will hold (signed 64-bit range).
MAX_COUNT = 2**63 - 1


class InputError(ValueError):
    """Raised for malformed, non-finite or out-of-domain inputs."""


def check_finite_scalar(x, name: str = "value") -> float:
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise InputError(f"{name} is not a number: {x!r}") from None
    if not math.isfinite(x):
        raise InputError(f"{name} must be finite, got {x!r}")
    return x


def check_values(xs: Iterable[float], name: str = "values") -> np.ndarray:
    """Return `xs` as a 1-d float64 array, rejecting non-finite entries.

    The error message carries the index of the first offending entry.
    """
    try:
        arr = np.asarray(xs, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} could not be read as numbers: {exc}") from None
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    bad = ~np.isfinite(arr)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise InputError(f"{name}[{idx}] is not finite ({arr[idx]!r})")
    return arr


def check_count(n, name: str = "n", minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        else:
            raise InputError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {n}")
    if n > MAX_COUNT:
        raise OverflowError(f"{name}={n} exceeds the supported count range")
    return n


def check_index(j, n: int, name: str = "index") -> int:
    if isinstance(j, bool) or not isinstance(j, (int, np.integer)):
        raise InputError(f"{name} must be an integer, got {j!r}")
    j = int(j)
    if not 0 <= j < n:
        raise InputError(f"{name} {j} out of range for {n} values")
    return j
