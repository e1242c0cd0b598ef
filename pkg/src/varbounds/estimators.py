"""scikit-learn compatible wrappers around the accumulator and the bounds.

``MomentSummarizer`` keeps one mergeable accumulator per feature, so it
supports ``partial_fit`` and combining independently fitted copies.
``SamuelsonOutlierDetector`` flags values that could not belong to the
training sample given only its mean and variance.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, OneToOneFeatureMixin, OutlierMixin, TransformerMixin, clone
from sklearn.utils.validation import check_is_fitted, validate_data

from .bounds import REL_TOL, DataSummary, samuelson_radius
from .moments import MomentAccumulator, from_values, merge


def _column_accumulators(X: np.ndarray) -> list[MomentAccumulator]:
    return [from_values(X[:, j]) for j in range(X.shape[1])]


class MomentSummarizer(OneToOneFeatureMixin, TransformerMixin, BaseEstimator):
    """Per-feature mean/variance with mergeable state; transforms by standardizing.

    Parameters
    ----------
    with_mean : bool, default=True
        Subtract the mean in ``transform``.
    with_std : bool, default=True
        Divide by the standard deviation in ``transform``.
    ddof : {0, 1}, default=0
        0 scales by the population standard deviation, 1 by the sample one.

    Attributes
    ----------
    accumulators_ : list of MomentAccumulator
    n_samples_seen_ : int
    mean_, var_, scale_, data_min_, data_max_ : ndarray of shape (n_features,)
        ``var_`` is always the population variance.
    """

    def __init__(self, with_mean=True, with_std=True, ddof=0):
        self.with_mean = with_mean
        self.with_std = with_std
        self.ddof = ddof

    def fit(self, X, y=None):
        for attr in ("accumulators_", "n_samples_seen_"):
            if hasattr(self, attr):
                delattr(self, attr)
        return self.partial_fit(X, y)

    def partial_fit(self, X, y=None):
        if self.ddof not in (0, 1):
            raise ValueError(f"ddof must be 0 or 1, got {self.ddof!r}")
        first = not hasattr(self, "accumulators_")
        X = validate_data(self, X, reset=first, dtype=np.float64, ensure_all_finite=True)
        batch = _column_accumulators(X)
        lo, hi = X.min(axis=0), X.max(axis=0)
        if first:
            self.accumulators_ = batch
            self.data_min_, self.data_max_ = lo, hi
        else:
            self.accumulators_ = [merge(a, b) for a, b in zip(self.accumulators_, batch)]
            self.data_min_ = np.minimum(self.data_min_, lo)
            self.data_max_ = np.maximum(self.data_max_, hi)
        self._refresh()
        return self

    def _refresh(self):
        accs = self.accumulators_
        self.n_samples_seen_ = accs[0].count
        self.mean_ = np.array([a.mean for a in accs])
        self.var_ = np.array([a.m2 / a.count for a in accs])
        denom = max(self.n_samples_seen_ - self.ddof, 1)
        scale = np.sqrt(np.array([a.m2 for a in accs]) / denom)
        self.scale_ = np.where(scale > 0, scale, 1.0)

    def merge(self, other: "MomentSummarizer") -> "MomentSummarizer":
        """Summarizer fitted on the union of both training sets."""
        check_is_fitted(self)
        check_is_fitted(other)
        if other.n_features_in_ != self.n_features_in_:
            raise ValueError("cannot merge summarizers with different feature counts")
        out = clone(self)
        out.n_features_in_ = self.n_features_in_
        if hasattr(self, "feature_names_in_"):
            out.feature_names_in_ = self.feature_names_in_
        out.accumulators_ = [merge(a, b) for a, b in zip(self.accumulators_, other.accumulators_)]
        out.data_min_ = np.minimum(self.data_min_, other.data_min_)
        out.data_max_ = np.maximum(self.data_max_, other.data_max_)
        out._refresh()
        return out

    def summaries(self) -> list[DataSummary]:
        check_is_fitted(self)
        return [
            DataSummary(a.count, a.mean, a.m2 / a.count, float(lo), float(hi))
            for a, lo, hi in zip(self.accumulators_, self.data_min_, self.data_max_)
        ]

    def transform(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, reset=False, dtype=np.float64, copy=True)
        if self.with_mean:
            X -= self.mean_
        if self.with_std:
            X /= self.scale_
        return X

    def inverse_transform(self, X):
        check_is_fitted(self)
        X = np.array(X, dtype=np.float64, copy=True)
        if self.with_std:
            X *= self.scale_
        if self.with_mean:
            X += self.mean_
        return X


class SamuelsonOutlierDetector(OutlierMixin, BaseEstimator):
    """Flag rows with a feature outside that feature's Samuelson interval.

    No member of the training sample can lie farther than
    ``sqrt(n - 1) * sd`` from the training mean, so every training row is
    an inlier; a flagged row is one that cannot have come from the fitted
    sample.

    ``decision_function`` is the smallest per-feature margin
    ``radius - |x - mean|`` (plus the numeric tolerance); negative means outlier.
    """

    def __init__(self, rel_tol=REL_TOL):
        self.rel_tol = rel_tol

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64, ensure_min_samples=2)
        accs = _column_accumulators(X)
        n = X.shape[0]
        self.center_ = np.array([a.mean for a in accs])
        self.radius_ = np.array([samuelson_radius(n, a.m2 / n) for a in accs])
        self.offset_ = 0.0
        return self

    def _margins(self, X) -> np.ndarray:
        check_is_fitted(self)
        X = validate_data(self, X, reset=False, dtype=np.float64)
        dist = np.abs(X - self.center_)
        tol = self.rel_tol * np.maximum(1.0, np.maximum(dist, self.radius_))
        return self.radius_ - dist + tol

    def score_samples(self, X):
        return self._margins(X).min(axis=1)

    def decision_function(self, X):
        return self.score_samples(X) - self.offset_

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, -1)
