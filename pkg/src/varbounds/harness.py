"""Simulated sharded aggregation of moment accumulators.

Data are scattered over shards, each shard is summarised independently,
and the partial accumulators are combined along a merge tree.  The result
is compared with the single-pass reference accumulator.

Reproducibility contract: ``numpy.random.SeedSequence(seed)`` is spawned
into two child streams (PCG64); the first assigns every value to a shard
(``integers(0, shard_count)``), the second drives the ``random_tree``
pair choices.  Nothing else consumes randomness, so ``(data, plan)``
fixes the merged accumulator bit for bit, whatever the thread scheduling.
"""

from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from ._validation import InputError, check_count, check_values
from .moments import MomentAccumulator, empty, from_values, merge

__all__ = [
    "Topology",
    "MergePlan",
    "DriftReport",
    "partition",
    "merge_tree",
    "run_plan",
    "order_invariance_trial",
]


class Topology(str, enum.Enum):
    LEFT_FOLD = "left_fold"
    BALANCED_TREE = "balanced_tree"
    RANDOM_TREE = "random_tree"


@dataclass(frozen=True)
class MergePlan:
    shard_count: int
    seed: int = 0
    topology: Topology = Topology.RANDOM_TREE

    def __post_init__(self):
        object.__setattr__(self, "shard_count", check_count(self.shard_count, "shard_count"))
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise InputError(f"seed must be an unsigned 64-bit integer, got {seed}")
        object.__setattr__(self, "seed", seed)
        try:
            object.__setattr__(self, "topology", Topology(self.topology))
        except ValueError:
            raise InputError(f"unknown topology {self.topology!r}") from None

    def _streams(self) -> tuple[np.random.Generator, np.random.Generator]:
        part, tree = np.random.SeedSequence(self.seed).spawn(2)
        return np.random.default_rng(part), np.random.default_rng(tree)


@dataclass(frozen=True)
class DriftReport:
    """Errors of merged accumulators against the reference.

    Errors are relative: mean error is scaled by the largest ``|x|``, m2
    error by the reference m2.  ``spread`` is the largest pairwise relative
    difference of merged m2 across trials (0 for a single run).
    """

    mean_rel_error: float
    m2_rel_error: float
    worst_case_over_trials: float
    trials: int
    spread: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "DriftReport":
        return cls(
            float(d["mean_rel_error"]),
            float(d["m2_rel_error"]),
            float(d["worst_case_over_trials"]),
            int(d["trials"]),
            float(d.get("spread", 0.0)),
        )


_TINY = np.finfo(np.float64).tiny


def _rel(value: float, ref: float, scale: float) -> float:
    diff = abs(value - ref)
    if diff == 0.0:
        return 0.0
    return diff / max(scale, _TINY)


def partition(xs: Sequence[float], plan: MergePlan) -> list[np.ndarray]:
    """Scatter `xs` over ``plan.shard_count`` shards; shards may be empty."""
    arr = check_values(xs, "xs")
    if plan.shard_count == 1:
        return [arr]
    part_rng, _ = plan._streams()
    owner = part_rng.integers(0, plan.shard_count, size=arr.size)
    order = np.argsort(owner, kind="stable")
    cuts = np.searchsorted(owner[order], np.arange(1, plan.shard_count))
    return np.split(arr[order], cuts)


def merge_tree(
    accs: Sequence[MomentAccumulator], topology: Topology, rng: Optional[np.random.Generator] = None
) -> MomentAccumulator:
    """Combine accumulators along the tree shape named by `topology`."""
    topology = Topology(topology)
    nodes = list(accs)
    if not nodes:
        return empty()
    if topology is Topology.LEFT_FOLD:
        return reduce(merge, nodes, empty())
    if topology is Topology.BALANCED_TREE:
        while len(nodes) > 1:
            paired = [merge(nodes[i], nodes[i + 1]) for i in range(0, len(nodes) - 1, 2)]
            if len(nodes) % 2:
                paired.append(nodes[-1])
            nodes = paired
        return nodes[0]
    if rng is None:
        raise InputError("random_tree needs a generator")
    while len(nodes) > 1:
        i, j = sorted(rng.choice(len(nodes), size=2, replace=False))
        b = nodes.pop(j)
        a = nodes.pop(i)
        nodes.append(merge(a, b))
    return nodes[0]


def _accumulate_shards(shards: list[np.ndarray], workers: Optional[int]) -> list[MomentAccumulator]:
    if workers is None or workers <= 1 or len(shards) < 2:
        return [from_values(s) for s in shards]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(from_values, shards))


def run_plan(
    xs: Sequence[float], plan: MergePlan, *, workers: Optional[int] = None
) -> tuple[MomentAccumulator, DriftReport]:
    arr = check_values(xs, "xs")
    merged = _run(arr, plan, workers)
    oracle = from_values(arr)
    mean_err, m2_err = _errors(merged, oracle, arr)
    return merged, DriftReport(mean_err, m2_err, max(mean_err, m2_err), 1)


def _run(arr: np.ndarray, plan: MergePlan, workers: Optional[int]) -> MomentAccumulator:
    shards = partition(arr, plan)
    accs = _accumulate_shards(shards, workers)
    _, tree_rng = plan._streams()
    return merge_tree(accs, plan.topology, tree_rng)


def _errors(merged: MomentAccumulator, oracle: MomentAccumulator, arr: np.ndarray) -> tuple[float, float]:
    if merged.count != oracle.count:
        raise AssertionError(f"merged count {merged.count} != {oracle.count}")
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    return _rel(merged.mean, oracle.mean, scale), _rel(merged.m2, oracle.m2, oracle.m2)


def order_invariance_trial(
    xs: Sequence[float],
    trials: int,
    seed: int = 0,
    *,
    shard_count: int = 16,
    topology: Topology = Topology.RANDOM_TREE,
    workers: Optional[int] = None,
) -> DriftReport:
    """Merge the same data under `trials` seeded plans and measure disagreement."""
    arr = check_values(xs, "xs")
    trials = check_count(trials, "trials")
    seeds = np.random.SeedSequence(int(seed)).generate_state(trials, dtype=np.uint64)
    oracle = from_values(arr)
    merged = [_run(arr, MergePlan(shard_count, int(s), topology), workers) for s in seeds]
    errs = [_errors(m, oracle, arr) for m in merged]
    m2s = [m.m2 for m in merged]
    spread = _rel(max(m2s), min(m2s), oracle.m2)
    return DriftReport(
        max(e[0] for e in errs),
        max(e[1] for e in errs),
        max(max(e) for e in errs),
        trials,
        spread,
    )
