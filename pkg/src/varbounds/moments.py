"""Mergeable first/second moment accumulator.

State is ``(count, mean, m2)`` where ``m2`` is the sum of squared deviations
from the mean.  Two accumulators combine with the pooled-variance rule::

    m2 = m2_a + m2_b + (n_a * n_b / (n_a + n_b)) * (mean_b - mean_a) ** 2

which is the combined-variance formula multiplied through by ``n_a + n_b``.
Adding one observation is the ``n_b = 1`` special case (Welford's update);
removing one inverts it.

Accumulators are frozen dataclasses, so every operation returns a new value
and they can be shared freely between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

from ._validation import MAX_COUNT, InputError, check_finite_scalar, check_values

__all__ = [
    "MomentAccumulator",
    "empty",
    "push",
    "remove",
    "merge",
    "from_values",
    "accumulate",
    "population_variance",
    "sample_variance",
    "mean",
]


@dataclass(frozen=True)
class MomentAccumulator:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def __post_init__(self):
        if self.count < 0:
            raise InputError(f"count must be nonnegative, got {self.count}")
        if self.count > MAX_COUNT:
            raise OverflowError("count exceeds the supported range")
        if not (math.isfinite(self.mean) and math.isfinite(self.m2)):
            raise InputError("mean and m2 must be finite")
        if self.m2 < 0:
            raise InputError(f"m2 must be nonnegative, got {self.m2}")
        if self.count == 0 and (self.mean != 0 or self.m2 != 0):
            raise InputError("an empty accumulator must have mean 0 and m2 0")
        if self.count == 1 and self.m2 != 0:
            raise InputError("a single observation has m2 0")

    # convenience forms of the module-level operations
    def push(self, x: float) -> "MomentAccumulator":
        return push(self, x)

    def remove(self, x: float) -> "MomentAccumulator":
        return remove(self, x)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        return merge(self, other)

    __add__ = merge

    @property
    def population_variance(self) -> float:
        return population_variance(self)

    @property
    def sample_variance(self) -> float:
        return sample_variance(self)

    @classmethod
    def from_values(cls, xs: Iterable[float]) -> "MomentAccumulator":
        return from_values(xs)

    def to_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean, "m2": self.m2}

    @classmethod
    def from_dict(cls, d: dict) -> "MomentAccumulator":
        try:
            return cls(int(d["count"]), float(d["mean"]), float(d["m2"]))
        except KeyError as exc:
            raise InputError(f"accumulator is missing field {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "MomentAccumulator":
        return cls.from_dict(json.loads(s))


_EMPTY = MomentAccumulator()


def empty() -> MomentAccumulator:
    return _EMPTY


def push(acc: MomentAccumulator, x: float) -> MomentAccumulator:
    """Add one observation (Welford's update)."""
    x = check_finite_scalar(x, "x")
    n = acc.count + 1
    if n > MAX_COUNT:
        raise OverflowError("count overflow")
    if n == 1:
        return MomentAccumulator(1, x, 0.0)
    delta = x - acc.mean
    new_mean = acc.mean + delta / n
    return MomentAccumulator(n, new_mean, acc.m2 + delta * (x - new_mean))


def remove(acc: MomentAccumulator, x: float) -> MomentAccumulator:
    """Remove one observation previously added to `acc`.

    Membership cannot be verified from moments; the caller vouches for it.
    """
    x = check_finite_scalar(x, "x")
    if acc.count == 0:
        raise InputError("remove from empty accumulator")
    n = acc.count - 1
    if n == 0:
        return _EMPTY
    new_mean = acc.mean - (x - acc.mean) / n
    drop = (x - acc.mean) * (x - new_mean)
    # cancellation residue scales with values no longer in the state, so a
    # negative result cannot be told apart from a bad removal; clamp it
    m2 = max(acc.m2 - drop, 0.0) if n > 1 else 0.0
    return MomentAccumulator(n, new_mean, m2)


def merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    """Combine two disjoint accumulators.

    Arguments are put in a canonical order (larger count first) before
    evaluation, so ``merge(a, b) == merge(b, a)`` holds exactly.
    """
    if b.count == 0:
        return a
    if a.count == 0:
        return b
    if (b.count, b.mean, b.m2) > (a.count, a.mean, a.m2):
        a, b = b, a
    n = a.count + b.count
    if n > MAX_COUNT:
        raise OverflowError("count overflow")
    delta = b.mean - a.mean
    new_mean = a.mean + delta * (b.count / n)
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / n)
    return MomentAccumulator(n, new_mean, m2)


def from_values(xs: Iterable[float]) -> MomentAccumulator:
    """Reference accumulator computed straight from the definitions.

    Two passes with exactly rounded summation; the mean gets one correction
    step so deviations are taken about the best available mean.
    """
    arr = check_values(xs, "xs")
    n = arr.size
    if n == 0:
        return _EMPTY
    if n > MAX_COUNT:
        raise OverflowError("count overflow")
    mu = math.fsum(arr) / n
    mu += math.fsum(arr - mu) / n
    if n == 1:
        return MomentAccumulator(1, float(arr[0]), 0.0)
    dev = arr - mu
    return MomentAccumulator(n, mu, math.fsum(dev * dev))


def mean(acc: MomentAccumulator) -> float:
    if acc.count == 0:
        raise InputError("mean of an empty accumulator")
    return acc.mean


def population_variance(acc: MomentAccumulator) -> float:
    if acc.count == 0:
        raise InputError("population variance of an empty accumulator")
    return acc.m2 / acc.count


def sample_variance(acc: MomentAccumulator) -> float:
    if acc.count < 2:
        raise InputError("sample variance needs at least 2 observations")
    return acc.m2 / (acc.count - 1)


def accumulate(xs: Iterable[float], start: MomentAccumulator = _EMPTY) -> MomentAccumulator:
    """Fold `push` over `xs`; the streaming counterpart of `from_values`."""
    acc = start
    for x in check_values(xs, "xs"):
        acc = push(acc, float(x))
    return acc
