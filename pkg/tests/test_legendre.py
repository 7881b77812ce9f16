"""Legendre transform, tables, L-function evaluation, biduality."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthcalc import (
    CapTooSmallError,
    CapacityError,
    InsufficientTableError,
    LFunctionEvaluator,
    LegendreTable,
    ParameterError,
    UnboundedBelowError,
    bell_series,
    bidual,
    kondratiev_streit,
    l_function,
    l_function_integral,
    l_function_wide,
    legendre_sequence,
    legendre_table,
    legendre_transform,
    power_series,
)


def ks_log_ell(beta: float, t: float) -> float:
    """Closed form: log ell_beta(t) = (1 + beta) t (1 - log t), t > 0."""
    return (1.0 + beta) * t * (1.0 - math.log(t))


# ---------------------------------------------------------------------------
# pointwise transform
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("beta", [0.0, 0.25, 0.5, 0.75])
def test_transform_matches_closed_form(beta):
    spec = kondratiev_streit(beta)
    for t in (0.1, 1.0, 2.0, 17.3, 150.0):
        log_ell, r_star = legendre_transform(spec, t)
        assert log_ell == pytest.approx(ks_log_ell(beta, t), rel=1e-10, abs=1e-10)
        assert r_star == pytest.approx(t ** (1.0 + beta), rel=1e-6)


def test_transform_at_zero_hits_infimum():
    for spec in (kondratiev_streit(0.0), kondratiev_streit(0.5)):
        assert legendre_transform(spec, 0.0) == (0.0, 0.0)


def test_transform_against_dense_grid_minimization():
    # Independent check: brute-force minimize log u(r) - t log r near r*.
    beta, t = 0.5, 12.0
    spec = kondratiev_streit(beta)
    r_star = t ** (1.0 + beta)
    rs = np.geomspace(0.5 * r_star, 2.0 * r_star, 200_001)
    dense = np.min([spec.log_u(float(r)) - t * math.log(r) for r in rs])
    log_ell, _ = legendre_transform(spec, t)
    assert log_ell <= dense + 1e-12
    assert log_ell == pytest.approx(dense, abs=1e-7)


def test_transform_rejects_negative_t():
    with pytest.raises(ParameterError):
        legendre_transform(kondratiev_streit(0.0), -1.0)


def test_transform_beyond_series_capacity():
    u2 = bell_series(2)
    with pytest.raises(CapacityError):
        legendre_transform(u2, u2.t_sup * 1.5)


def test_transform_unbounded_below_for_polynomial():
    # A degree-2 polynomial cannot control r^5: the objective has no minimum.
    trunc = power_series([0.0, 0.0, -math.lgamma(3)], label="deg2")
    with pytest.raises(UnboundedBelowError):
        legendre_transform(trunc, 5.0)


@given(st.floats(min_value=0.05, max_value=300.0),
       st.sampled_from([0.0, 0.25, 0.5, 0.75]))
@settings(max_examples=80, deadline=None)
def test_transform_closed_form_property(t, beta):
    log_ell, _ = legendre_transform(kondratiev_streit(beta), t)
    assert log_ell == pytest.approx(ks_log_ell(beta, t), rel=1e-9, abs=1e-9)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def test_sequence_table_basics(tables60):
    tab = tables60["ks0"]
    assert tab.n_points == 61
    assert tab.is_integer_grid
    assert tab.n_max == 60
    assert tab.log_ell[0] == 0.0
    assert np.all(np.diff(tab.r_star) >= -1e-9)


def test_sequence_matches_pointwise_transform(tables60):
    tab = tables60["ks05"]
    spec = kondratiev_streit(0.5)
    for n in (1, 7, 33, 60):
        log_ell, _ = legendre_transform(spec, float(n))
        assert tab.log_ell[n] == pytest.approx(log_ell, rel=1e-10, abs=1e-10)


def test_non_integer_grid_has_no_n_max():
    tab = legendre_table(kondratiev_streit(0.0), np.array([0.5, 1.5, 2.5]))
    assert not tab.is_integer_grid
    with pytest.raises(ParameterError):
        tab.n_max


def test_table_grid_validation():
    spec = kondratiev_streit(0.0)
    with pytest.raises(ParameterError):
        legendre_table(spec, np.array([2.0, 1.0]))
    with pytest.raises(ParameterError):
        legendre_table(spec, np.array([]))
    with pytest.raises(ParameterError):
        LegendreTable("x", np.array([0.0, 1.0]), np.array([0.0]), np.array([0.0, 1.0]))


def test_csv_text_frozen_values():
    tab = legendre_sequence(kondratiev_streit(0.0), 3)
    lines = tab.csv_text().strip().split("\n")
    assert lines[0] == "t,log_ell,r_star"
    rows = [[float(x) for x in line.split(",")] for line in lines[1:]]
    expect_log_ell = [0.0, 1.0, 2.0 * (1.0 - math.log(2.0)), 3.0 * (1.0 - math.log(3.0))]
    for n, row in enumerate(rows):
        assert row[0] == float(n)
        assert row[1] == pytest.approx(expect_log_ell[n], rel=1e-12, abs=1e-12)
        assert row[2] == pytest.approx(float(n), rel=1e-6, abs=1e-6)


def test_csv_write_is_deterministic(tmp_path):
    spec = kondratiev_streit(0.25)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    legendre_sequence(spec, 12).write_csv(p1)
    legendre_sequence(spec, 12).write_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_table_json_round_trip(tables60):
    tab = tables60["g2"]
    clone = LegendreTable.from_json_dict(tab.to_json_dict())
    assert clone.function_id == tab.function_id
    np.testing.assert_array_equal(clone.t, tab.t)
    np.testing.assert_array_equal(clone.log_ell, tab.log_ell)
    np.testing.assert_array_equal(clone.r_star, tab.r_star)


# ---------------------------------------------------------------------------
# L-function
# ---------------------------------------------------------------------------


def test_l_function_at_zero_is_log_one(evaluators):
    assert l_function(evaluators["ks0"], 0.0) == 0.0


def test_l_function_matches_direct_sum(evaluators):
    # independent oracle: sum exp(n(1 - log n)) r^n with exact coefficients
    for r in (0.5, 1.0, 2.0):
        terms = [1.0] + [
            math.exp(n * (1.0 - math.log(n)) + n * math.log(r))
            for n in range(1, 700)
        ]
        oracle = math.log(math.fsum(terms))
        assert l_function(evaluators["ks0"], r) == pytest.approx(oracle, rel=1e-10)


def test_l_function_frozen_point(evaluators):
    # L_u(1) for the minimal growth function; value pinned by the direct sum
    assert l_function(evaluators["ks0"], 1.0) == pytest.approx(
        1.8840955903719718, rel=1e-9
    )


def test_l_function_truncation_failure_reports_ratio():
    ev = LFunctionEvaluator.from_spec(kondratiev_streit(0.0), n_max=40)
    with pytest.raises(InsufficientTableError) as exc:
        l_function(ev, 1e8)
    assert exc.value.n_max == 40
    assert exc.value.last_ratio > 1.0


def test_l_function_rejects_negative_radius(evaluators):
    with pytest.raises(ParameterError):
        l_function(evaluators["ks0"], -0.5)


def test_wide_range_agrees_with_table_rule(evaluators):
    # r = 400 is inside both regimes for beta = 0
    ev = evaluators["ks0"]
    table_value = l_function(ev, 400.0)
    integral_value = l_function_integral(kondratiev_streit(0.0), 400.0)
    assert integral_value == pytest.approx(table_value, rel=1e-9)
    assert l_function_wide(ev, 400.0) == pytest.approx(table_value, rel=1e-9)


def test_wide_range_matches_saddle_point(evaluators):
    # For the minimal function, log L(r) = r + (1/2) log(2 pi r) + O(1/r).
    ev = evaluators["ks0"]
    for r in (1e5, 1e7, 5e8):
        saddle = r + 0.5 * math.log(2.0 * math.pi * r)
        assert l_function_wide(ev, r) == pytest.approx(saddle, rel=1e-9)


def test_wide_range_dispatch_beyond_table(evaluators):
    # at r = 900 the 1200-term truncation rule cannot trigger for beta = 0,
    # so the wide evaluator must switch to the integral transparently
    ev = evaluators["ks0"]
    with pytest.raises(InsufficientTableError):
        l_function(ev, 900.0)
    assert l_function_wide(ev, 900.0) == pytest.approx(
        l_function_integral(kondratiev_streit(0.0), 900.0), rel=1e-12
    )


def test_l_function_monotone_in_radius(evaluators):
    ev = evaluators["g2"]
    values = [l_function(ev, r) for r in (0.0, 0.1, 1.0, 5.0, 25.0)]
    assert all(b > a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# biduality
# ---------------------------------------------------------------------------


def test_bidual_recovers_log_u(catalog):
    for fid, spec in catalog.items():
        for r in (1e-3, 1.0, 57.3, 1e4):
            expect = spec.log_u(r)
            assert bidual(spec, r) == pytest.approx(expect, rel=1e-8, abs=1e-8), fid


def test_bidual_cap_too_small():
    with pytest.raises(CapTooSmallError):
        bidual(kondratiev_streit(0.0), math.exp(2.0), t_cap=5.0)


def test_bidual_at_zero(catalog):
    assert bidual(catalog["ks0"], 0.0) == 0.0
