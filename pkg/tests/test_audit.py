import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varbounds import InputError
from varbounds.audit import (
    DispersionKind,
    ReportedSummary,
    Verdict,
    audit_member,
    audit_order_statistic,
    audit_subset,
    audit_summary,
    normalize,
)
from varbounds.bounds import SubsetSummary

POP_SD = DispersionKind.POPULATION_SD
POP_VAR = DispersionKind.POPULATION_VARIANCE


def names(verdict):
    return {v.constraint for v in verdict.violations}


class TestNormalize:
    def test_sample_sd(self):
        s = normalize(ReportedSummary(10, 0.0, 2.0, DispersionKind.SAMPLE_SD))
        assert s.variance == pytest.approx(3.6)

    def test_identity_kind(self):
        assert normalize(ReportedSummary(5, 1.0, 4.0, POP_VAR)).variance == 4.0

    def test_sample_kind_needs_two(self):
        with pytest.raises(InputError):
            normalize(ReportedSummary(1, 0.0, 1.0, DispersionKind.SAMPLE_SD))

    def test_all_kinds(self):
        n = 4
        assert normalize(ReportedSummary(n, 0, 2.0, POP_SD)).variance == 4.0
        assert normalize(ReportedSummary(n, 0, 2.0, DispersionKind.SAMPLE_VARIANCE)).variance == 1.5

    def test_validation(self):
        with pytest.raises(InputError):
            ReportedSummary(0, 0.0, 1.0)
        with pytest.raises(InputError):
            ReportedSummary(3, 0.0, -1.0)
        with pytest.raises(InputError):
            ReportedSummary(3, 0.0, 1.0, decimals=16)
        with pytest.raises(InputError):
            ReportedSummary(3, 0.0, 1.0, "iqr")


class TestAuditSummary:
    def test_samuelson_max_violation(self):
        v = audit_summary(ReportedSummary(10, 0.0, 1.0, POP_SD, max=5.0))
        assert not v.feasible
        assert names(v) == {"samuelson_max"}
        (viol,) = v.violations
        assert viol.result.bound == 3.0
        assert viol.result.slack == -2.0

    def test_nagy_violation(self):
        v = audit_summary(ReportedSummary(4, 2.0, 1.0, POP_VAR, min=0.0, max=4.0))
        assert not v.feasible
        assert "nagy" in names(v)
        nagy = next(x for x in v.violations if x.constraint == "nagy")
        assert nagy.result.bound == 2.0 and nagy.result.observed == 1.0

    def test_real_data_feasible(self):
        v = audit_summary(ReportedSummary(4, 3.25, 3.6875, POP_VAR, min=1.0, max=6.0))
        assert v.feasible and v.violations == []
        assert {"samuelson_max", "samuelson_min", "nagy", "refined_range"} <= set(v.checks)

    def test_ordering(self):
        v = audit_summary(ReportedSummary(5, 10.0, 1.0, POP_SD, min=0.0, max=3.0))
        assert "mean_below_max" in names(v)
        v = audit_summary(ReportedSummary(5, 1.0, 1.0, POP_SD, min=4.0, max=3.0))
        assert {"range_order", "mean_above_min"} <= names(v)

    def test_range_not_attained(self):
        r = ReportedSummary(4, 2.0, 1.0, POP_VAR, min=0.0, max=4.0)
        v = audit_summary(r, range_attained=False)
        assert v.feasible
        assert "nagy" not in v.checks

    def test_rounding_rescues_borderline(self):
        # exact figures of {0, 1}: mean 0.5, population sd 0.5; rounded to 0 decimals
        r = ReportedSummary(2, 0.5, 0.5, POP_SD, min=0.0, max=1.0)
        assert audit_summary(r).feasible
        rounded = ReportedSummary(2, 0.0, 0.0, POP_SD, min=0.0, max=1.0)
        assert not audit_summary(rounded).feasible
        assert audit_summary(ReportedSummary(2, 0.0, 0.0, POP_SD, min=0.0, max=1.0, decimals=0)).feasible

    def test_infeasible_carries_violation_beyond_tolerance(self):
        v = audit_summary(ReportedSummary(10, 0.0, 1.0, POP_SD, max=5.0))
        assert any(x.result.slack < -v.tolerance_used for x in v.violations)

    def test_json_roundtrip(self):
        v = audit_summary(ReportedSummary(4, 2.0, 1.0, POP_VAR, min=0.0, max=4.0))
        d = json.loads(v.to_json())
        assert set(d) == {"feasible", "violations", "tolerance_used"}
        assert set(d["violations"][0]) == {"constraint", "bound", "observed", "slack"}
        assert Verdict.from_dict(d).to_dict() == d


class TestAuditMember:
    R = ReportedSummary(10, 0.0, 1.0, POP_SD)

    def test_outside(self):
        v = audit_member(5.0, self.R)
        assert not v.feasible and names(v) == {"samuelson_member"}

    def test_mean_and_endpoint(self):
        assert audit_member(0.0, self.R).feasible
        assert audit_member(3.0, self.R).feasible
        assert audit_member(-3.0, self.R).feasible
        assert not audit_member(3.001, self.R).feasible

    def test_needs_two(self):
        with pytest.raises(InputError):
            audit_member(0.0, ReportedSummary(1, 0.0, 0.0, POP_SD))


class TestAuditSubset:
    R = ReportedSummary(10, 0.0, 1.0, POP_VAR)

    def test_mean_violation(self):
        v = audit_subset(SubsetSummary(5, mean=2.0), self.R)
        assert not v.feasible
        assert v.violations[0].result.bound == 4.0

    def test_mean_equal(self):
        assert audit_subset(SubsetSummary(5, mean=0.0), self.R).feasible

    def test_variance_violation(self):
        n, var = 10, 1.0
        sub_var = 2 * n / (n - 1) * var
        v = audit_subset(SubsetSummary(n - 1, variance=sub_var), self.R)
        assert names(v) == {"subset_variance"}
        assert v.violations[0].result.bound == pytest.approx(2.0)

    def test_size_domain(self):
        with pytest.raises(InputError):
            audit_subset(SubsetSummary(10, mean=0.0), self.R)
        with pytest.raises(InputError):
            audit_subset(SubsetSummary(11, variance=0.5), self.R)
        assert audit_subset(SubsetSummary(10, variance=1.0), self.R).feasible


class TestAuditOrder:
    R = ReportedSummary(5, 0.0, 1.0, POP_SD)

    def test_median_too_high(self):
        v = audit_order_statistic(3, 2.0, self.R)
        assert names(v) == {"boyd_hawkins_upper"}
        assert v.violations[0].result.bound == pytest.approx(math.sqrt(2 / 3))

    def test_mean_inside(self):
        for k in (2, 3, 4):
            assert audit_order_statistic(k, 0.0, self.R).feasible

    def test_samuelson_endpoint(self):
        assert audit_order_statistic(5, math.sqrt(4), self.R).feasible

    def test_domain(self):
        with pytest.raises(InputError):
            audit_order_statistic(6, 0.0, self.R)
        with pytest.raises(InputError):
            audit_order_statistic(0, 0.0, self.R)


reports = st.builds(
    ReportedSummary,
    n=st.integers(2, 50),
    mean=st.floats(-100, 100),
    dispersion=st.floats(0, 50),
    dispersion_kind=st.sampled_from(list(DispersionKind)),
    min=st.floats(-200, 200),
    max=st.floats(-200, 200),
    decimals=st.integers(0, 6),
)


@settings(max_examples=300)
@given(reports, st.integers(1, 6))
def test_coarser_rounding_never_adds_infeasibility(r, coarsen):
    coarse = ReportedSummary(
        r.n, r.mean, r.dispersion, r.dispersion_kind, r.min, r.max, max(0, r.decimals - coarsen)
    )
    if audit_summary(r).feasible:
        assert audit_summary(coarse).feasible
    for x in (r.min, r.max):
        if audit_member(x, r).feasible:
            assert audit_member(x, coarse).feasible
    if audit_order_statistic(1, r.min, r).feasible:
        assert audit_order_statistic(1, r.min, coarse).feasible


@settings(max_examples=300)
@given(reports)
def test_infeasible_verdicts_explain_themselves(r):
    v = audit_summary(r)
    assert v.feasible == (not v.violations)
    if not v.feasible:
        assert any(x.result.slack < -v.tolerance_used for x in v.violations)


@settings(max_examples=200)
@given(st.lists(st.floats(-1e4, 1e4), min_size=2, max_size=30))
def test_sound_on_real_data(xs):
    arr = np.array(xs)
    n = arr.size
    r = ReportedSummary(n, float(arr.mean()), float(arr.std()), POP_SD, float(arr.min()), float(arr.max()))
    assert audit_summary(r).feasible
    for x in arr:
        assert audit_member(float(x), r).feasible
    for k, v in enumerate(np.sort(arr), start=1):
        assert audit_order_statistic(k, float(v), r).feasible
    for size in range(1, n):
        sub = SubsetSummary(size, mean=float(arr[:size].mean()), variance=float(arr[:size].var()))
        assert audit_subset(sub, r).feasible
