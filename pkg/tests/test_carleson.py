import csv
import io
import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleson_lab.carleson import (CarlesonParams, carleson_norm, classify_ball, classify_berezin, derive_params,
                                   key_lemma_check, key_lemma_params, kernel_norm_exact, product_inequality_check,
                                   reports_to_csv, to_json, vanishing_probe)
from carleson_lab.measures import RadialPower, atom, zero_measure

tuple_st = st.tuples(st.floats(0.5, 6.0), st.floats(0.5, 6.0), st.floats(-0.9, 3.0))


@given(st.lists(tuple_st, min_size=1, max_size=4))
@settings(max_examples=100)
def test_derive_params_formulae(tuples):
    P = derive_params(tuples)
    lam = sum(q / p for p, q, _ in tuples)
    assert P.lam == pytest.approx(lam)
    assert P.gamma == pytest.approx(sum(a * q / p for p, q, a in tuples) / lam)
    assert P.gamma > -1


def test_thresholds():
    assert CarlesonParams(1.0, 0.0, 1).threshold == pytest.approx(0.0)
    assert CarlesonParams(1.5, 0.5, 2).threshold == pytest.approx(3.5 * 1.5 - 3)
    assert CarlesonParams(0.5, 0.0, 1).threshold == pytest.approx(-0.5)
    assert CarlesonParams(0.5, 0.0, 1).dual_exponent == pytest.approx(2.0)


def test_param_validation():
    with pytest.raises(ValueError):
        CarlesonParams(0.0, 0.0)
    with pytest.raises(ValueError):
        CarlesonParams(1.0, -1.0)
    with pytest.raises(ValueError):
        derive_params([(1.0, 1.0, -1.0)])
    with pytest.raises(ValueError):
        derive_params([])


@pytest.mark.parametrize("r,sigma,p,alpha", [(0.9, 2.0, 2.0, 0.0), (0.99, 1.5, 1.0, 0.5), (0.5, 3.0, 3.0, 1.0)])
def test_kernel_norm_exact(r, sigma, p, alpha):
    b = p * sigma / 2
    expect = float(mpmath.hyp2f1(b, b, 2 + alpha, r * r)) ** (1 / p)
    assert kernel_norm_exact(np.array([r]), sigma, p, alpha) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("route", [classify_ball, classify_berezin])
def test_flip_across_threshold(route):
    P = CarlesonParams(1.0, 0.0, 1)
    assert route(RadialPower(0.1), P).verdict == "carleson"
    assert route(RadialPower(-0.1), P).verdict == "not_carleson"


def test_point_mass_is_carleson():
    P = CarlesonParams(1.0, 0.0, 1)
    rep = carleson_norm(atom(np.array([0.5])), P)
    assert rep["verdict"] == "carleson"
    assert rep["routes_within_bracket"]


def test_norm_homogeneity():
    P = CarlesonParams(1.0, 0.0, 1)
    a = classify_ball(RadialPower(0.5), P).norm_estimate
    b = classify_ball(RadialPower(0.5, 3.0), P).norm_estimate
    assert b == pytest.approx(3 * a, rel=1e-12)


def test_zero_measure():
    P = CarlesonParams(1.0, 0.0, 1)
    rep = carleson_norm(zero_measure(), P)
    assert rep["norm"] == 0.0 and rep["verdict"] == "carleson"


def test_vanishing_probe():
    P = CarlesonParams(1.0, 0.0, 1)
    assert vanishing_probe(RadialPower(0.5), P).verdict == "vanishing"
    assert vanishing_probe(RadialPower(0.0), P).verdict == "not_vanishing"


def test_key_lemma_params():
    P = key_lemma_params(2.0, 2.0, 1.0, 0.0, 0.0)
    assert P.lam == pytest.approx(1.0) and P.gamma == pytest.approx(0.0)


def test_key_lemma_ratio_bounded():
    rep = key_lemma_check(RadialPower(0.5), 2.0, 2.0, 1.0, 0.0, 0.0)
    assert 0 < rep["ratio"] < 50
    with pytest.raises(ValueError):
        key_lemma_check(RadialPower(0.5), 2.0, 1.0, 1.0, 0.0, 0.0)


def test_product_inequality_deterministic():
    mu = RadialPower(0.2)
    tup = [(2.0, 1.0, 0.0), (2.0, 1.0, 0.0)]
    a = product_inequality_check(mu, tup, trials=8, seed=3, J=6)
    b = product_inequality_check(mu, tup, trials=8, seed=3, J=6)
    assert to_json(a) == to_json(b)
    assert 1e-2 <= a["ratio"] <= 1e2


def test_json_is_strict():
    text = to_json({"a": math.inf, "b": math.nan, "c": np.float64(1.5), "d": np.arange(2)})
    d = json.loads(text)
    assert d == {"a": "inf", "b": None, "c": 1.5, "d": [0, 1]}


def test_csv_columns():
    rep = classify_ball(RadialPower(0.0), CarlesonParams(1.0, 0.0, 1), J=4)
    rows = list(csv.DictReader(io.StringIO(reports_to_csv([rep]))))
    assert list(rows[0]) == ["probe_id", "radius", "value", "slope", "verdict"]
    assert len(rows) == 4
