import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleson_lab.trends import (boundedness_verdict, cauchy_verdict, dyadic_radii, loglog_slope,
                                 vanishing_verdict)

R = dyadic_radii(12)


def test_dyadic_radii():
    assert np.allclose(R[:3], [0.5, 0.75, 0.875])


@given(st.floats(-3, 3))
@settings(max_examples=50)
def test_slope_recovers_power(e):
    vals = 2.0 * (1 - R) ** e
    assert loglog_slope(R, vals) == pytest.approx(e, abs=1e-9)


def test_slope_nan_on_zeros():
    assert np.isnan(loglog_slope(R, np.zeros(12)))


@pytest.mark.parametrize("e,verdict", [(0.0, "bounded"), (0.5, "bounded"), (-0.2, "unbounded"), (-1.0, "unbounded")])
def test_boundedness(e, verdict):
    assert boundedness_verdict(R, (1 - R) ** e).verdict == verdict


def test_boundedness_log_growth_flagged_by_tail():
    vals = np.log(1 / (1 - R)) ** 8
    assert boundedness_verdict(R, vals).verdict == "unbounded"


def test_boundedness_nonfinite():
    vals = np.ones(12)
    vals[-1] = np.inf
    assert boundedness_verdict(R, vals).verdict == "unbounded"


@pytest.mark.parametrize("e,verdict", [(0.1, "vanishing"), (1.0, "vanishing"), (0.0, "not_vanishing"),
                                       (-0.3, "not_vanishing")])
def test_vanishing(e, verdict):
    assert vanishing_verdict(R, (1 - R) ** e).verdict == verdict


def test_vanishing_zero_sequence():
    assert vanishing_verdict(R, np.zeros(12)).verdict == "vanishing"


def test_vanishing_requires_decrease():
    vals = (1 - R) ** 1.0
    vals[-1] = vals[-3] * 2
    assert vanishing_verdict(R, vals).verdict == "not_vanishing"


def test_cauchy():
    inc_conv = (1 - R) ** 0.5
    inc_log = np.ones(12)
    assert cauchy_verdict(R, np.cumsum(inc_conv)).verdict == "convergent"
    assert cauchy_verdict(R, np.cumsum(inc_log)).verdict == "divergent"
    assert cauchy_verdict(R[:3], np.cumsum(inc_log[:3])).verdict == "inconclusive"
    finite = np.cumsum(np.r_[np.ones(6), np.zeros(6)])
    assert cauchy_verdict(R, finite).verdict == "convergent"


def test_report_serialises():
    d = boundedness_verdict(R, np.ones(12)).to_dict()
    assert d["verdict"] == "bounded" and len(d["radii"]) == 12
