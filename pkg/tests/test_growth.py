"""Growth-function catalog: factories, Bell numbers, conditions, Mittag-Leffler."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthcalc import (
    CONDITION_IDS,
    CapacityError,
    ParameterError,
    bell_numbers,
    bell_series,
    check_conditions,
    default_r_grid,
    exponential,
    iterated_exp_sqrt,
    iterated_log,
    kondratiev_streit,
    log_u_grid,
    mittag_leffler,
    mittag_leffler_integral,
    mittag_leffler_series,
    power_series,
    refine_grid,
    spec_from_dict,
    spec_to_dict,
)


def truncated_square_exponential(degree: int = 40):
    """Polynomial truncation of exp(r^2): a counterexample with no exponential
    order, used to exercise the failure paths of the condition checker."""
    log_coeffs = [-math.inf] * (degree + 1)
    for j in range(degree // 2 + 1):
        log_coeffs[2 * j] = -math.lgamma(j + 1)
    return power_series(
        log_coeffs,
        claimed_conditions=("U0", "U1", "U3"),
        label="truncated-exp-square",
    )


# ---------------------------------------------------------------------------
# iterated logarithm
# ---------------------------------------------------------------------------


def test_iterated_log_base_cases():
    assert iterated_log(0, 5.0) == 5.0
    assert iterated_log(0, 0.3) == 0.3
    assert iterated_log(1, math.e) == 1.0
    assert iterated_log(1, 0.5) == 1.0  # clamped below
    assert iterated_log(2, math.exp(math.e)) == 1.0
    assert iterated_log(1, math.exp(4.0)) == pytest.approx(4.0, rel=1e-14)


def test_iterated_log_composition():
    # log_k(r) = max(1, log(log_{k-1}(r))) once the inner value exceeds e.
    for k in (2, 3, 4):
        for r in (10.0, 1e4, 1e9):
            inner = iterated_log(k - 1, r)
            assert iterated_log(k, r) == pytest.approx(
                max(1.0, math.log(inner)), rel=1e-14
            )


@given(st.integers(min_value=1, max_value=4),
       st.floats(min_value=0.0, max_value=1e12, allow_nan=False))
def test_iterated_log_clamped_below(k, r):
    assert iterated_log(k, r) >= 1.0


def test_iterated_log_rejects_negative_depth():
    with pytest.raises(ParameterError):
        iterated_log(-1, 2.0)


# ---------------------------------------------------------------------------
# Bell numbers
# ---------------------------------------------------------------------------


def bell_triangle(n_max: int) -> list[int]:
    """Classical Bell numbers via the Bell-triangle recurrence."""
    row = [1]
    out = [1]
    for _ in range(n_max):
        new = [row[-1]]
        for value in row:
            new.append(new[-1] + value)
        out.append(new[0])
        row = new
    return out


def egf_iterated_exponential(k: int, n_max: int) -> list[int]:
    """n! [r^n] exp_k(r) by exact power-series composition with rationals."""
    # exp of a series with zero constant term, truncated at n_max
    def exp_series(a: list[Fraction]) -> list[Fraction]:
        out = [Fraction(1)] + [Fraction(0)] * n_max
        # out' = a' * out  =>  (n+1) out[n+1] = sum_j (j+1) a[j+1] out[n-j]
        for n in range(n_max):
            acc = Fraction(0)
            for j in range(n + 1):
                if j + 1 <= n_max:
                    acc += (j + 1) * a[j + 1] * out[n - j]
            out[n + 1] = acc / (n + 1)
        return out

    series = [Fraction(0), Fraction(1)] + [Fraction(0)] * (n_max - 1)  # exp_0 - 1 = r
    for _ in range(k):
        composed = exp_series(series)
        series = [c - (Fraction(1) if i == 0 else 0) for i, c in enumerate(composed)]
        series[0] = Fraction(0)
    # series now holds exp_k(r) - 1; add the constant back
    coeffs = list(series)
    coeffs[0] = Fraction(1)
    return [int(coeffs[n] * math.factorial(n)) for n in range(n_max + 1)]


def test_bell_order_one_is_constant():
    assert bell_numbers(1, 8) == [1] * 9


def test_bell_order_two_matches_bell_triangle():
    assert bell_numbers(2, 20) == bell_triangle(20)
    assert bell_numbers(2, 6) == [1, 1, 2, 5, 15, 52, 203]


def test_bell_order_three_matches_exact_composition():
    assert bell_numbers(3, 10) == egf_iterated_exponential(3, 10)
    assert bell_numbers(3, 6) == [1, 1, 3, 12, 60, 358, 2471]


def test_bell_order_two_matches_exact_composition():
    assert bell_numbers(2, 12) == egf_iterated_exponential(2, 12)


def test_bell_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        bell_numbers(0, 5)
    with pytest.raises(ParameterError):
        bell_numbers(2, -1)
    with pytest.raises(CapacityError):
        bell_numbers(2, 1201)


@given(st.integers(min_value=2, max_value=3), st.integers(min_value=1, max_value=30))
def test_bell_strictly_increasing_from_two(k, n):
    b = bell_numbers(k, n + 2)
    assert b[n + 2] > b[n + 1] or n + 2 <= 1


# ---------------------------------------------------------------------------
# catalog evaluation
# ---------------------------------------------------------------------------


def test_kondratiev_streit_closed_form():
    # log u_beta(r) = (1 + beta) r^{1/(1+beta)}
    for beta in (0.0, 0.25, 0.5, 0.75):
        spec = kondratiev_streit(beta)
        for r in (0.5, 7.38905609893065, 123.4, 1e6):
            expect = (1 + beta) * r ** (1.0 / (1 + beta))
            assert spec.log_u(r) == pytest.approx(expect, rel=1e-13)
        assert spec.log_u(0.0) == 0.0


def test_iterated_exp_sqrt_collapses_at_small_argument():
    # For sqrt(r) <= e the inner iterated logs clamp to 1, so
    # log g_k(r) = 2 sqrt(r) there, for every order k.
    r = math.exp(2.0)
    for k in (2, 3):
        assert iterated_exp_sqrt(k).log_u(r) == pytest.approx(
            2.0 * math.e, rel=1e-13
        )


def test_iterated_exp_sqrt_order_slows_growth():
    # Each extra iterated log shrinks the inner factor, so higher order
    # means strictly slower growth once the clamps stop binding.
    g2, g3 = iterated_exp_sqrt(2), iterated_exp_sqrt(3)
    for r in (1e4, 1e6, 1e8):
        assert g3.log_u(r) < g2.log_u(r)


def test_exponential_scaling():
    assert exponential(2.0).log_u(3.0) == pytest.approx(6.0, rel=1e-15)
    assert exponential(1.0).log_u(0.0) == 0.0


def test_power_series_one_plus_r():
    spec = power_series([0.0, 0.0], claimed_conditions=("U0", "U1"), label="one-plus-r")
    assert spec.log_u(3.0) == pytest.approx(math.log(4.0), rel=1e-14)
    assert spec.log_u(0.0) == 0.0


def test_bell_series_log_domain_matches_direct_sum():
    u2 = bell_series(2)
    bells = bell_numbers(2, 80)
    for r in (0.5, 10.0, 40.0):
        oracle = math.log(
            math.fsum(r**n / (bells[n] * math.factorial(n)) for n in range(81))
        )
        assert u2.log_u(r) == pytest.approx(oracle, rel=1e-12)


def test_bell_series_capacity_guard():
    u2 = bell_series(2)
    assert u2.series_cap > 1e9
    with pytest.raises(CapacityError):
        u2.log_u(1e10)


def test_log_u_grid_matches_scalar():
    spec = kondratiev_streit(0.5)
    rs = np.array([0.0, 1.0, 8.0, 1e5])
    grid = log_u_grid(spec, rs)
    for r, v in zip(rs, grid):
        assert v == pytest.approx(spec.log_u(float(r)), rel=1e-14, abs=1e-300)


def test_factory_parameter_validation():
    with pytest.raises(ParameterError):
        kondratiev_streit(1.0)
    with pytest.raises(ParameterError):
        kondratiev_streit(-0.1)
    with pytest.raises(ParameterError):
        iterated_exp_sqrt(0)
    with pytest.raises(ParameterError):
        exponential(0.0)
    with pytest.raises(ParameterError):
        power_series([])
    with pytest.raises(ParameterError):
        kondratiev_streit(0.0).log_u(-1.0)


@given(st.floats(min_value=0.0, max_value=0.95),
       st.floats(min_value=0.0, max_value=1e6),
       st.floats(min_value=1.0, max_value=100.0))
@settings(max_examples=60)
def test_catalog_monotone_and_normalized(beta, r, mult):
    spec = kondratiev_streit(beta)
    assert spec.log_u(0.0) == 0.0
    assert spec.log_u(r * mult) >= spec.log_u(r) - 1e-12


# ---------------------------------------------------------------------------
# condition checker
# ---------------------------------------------------------------------------


def test_condition_ids_order():
    assert CONDITION_IDS == ("U0", "U1", "U2", "U3", "C+,1/2", "C+,log")


def test_catalog_conditions_all_pass():
    for spec in (kondratiev_streit(0.0), kondratiev_streit(0.5),
                 iterated_exp_sqrt(2)):
        report = check_conditions(spec)
        for cond in ("U0", "U1", "U2", "U3"):
            assert report.status(cond) == "pass", (spec.label, cond)
        assert report.passed()


def test_divergence_classes_on_catalog():
    # beta < 1 keeps both divergence ratios growing without bound
    report = check_conditions(kondratiev_streit(0.25))
    assert report.status("C+,1/2") == "pass"
    assert report.status("C+,log") == "pass"


def test_truncated_square_exponential_fails_exponential_order():
    spec = truncated_square_exponential()
    report = check_conditions(spec)
    assert report.status("U2") == "fail"
    check = report.checks["U2"]
    assert check.witness_r is not None and check.witness_r > 0
    # the claim list said U0/U1/U3 hold; those must still verify
    assert report.status("U0") == "pass"
    assert report.status("U1") == "pass"
    assert report.status("U3") == "pass"


def test_u1_implies_u0():
    specs = [kondratiev_streit(0.0), kondratiev_streit(0.75),
             iterated_exp_sqrt(2), iterated_exp_sqrt(3),
             exponential(1.0), bell_series(2), truncated_square_exponential()]
    for spec in specs:
        report = check_conditions(spec)
        if report.status("U1") == "pass":
            assert report.status("U0") == "pass", spec.label


def test_condition_report_json_shape():
    report = check_conditions(kondratiev_streit(0.0))
    d = report.to_json_dict()
    assert set(d["checks"]) == set(CONDITION_IDS)
    for payload in d["checks"].values():
        assert payload["status"] in ("pass", "fail", "inconclusive")


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def test_default_r_grid_shape():
    grid = default_r_grid()
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(1e8)
    assert np.all(np.diff(grid) > 0)


def test_refine_grid_interleaves_geometrically():
    grid = np.array([1.0, 4.0, 16.0])
    fine = refine_grid(grid)
    assert set(grid).issubset(set(fine))
    assert 2.0 in fine and 8.0 in fine
    assert np.all(np.diff(fine) > 0)
    # a leading zero survives refinement
    with_zero = refine_grid(np.array([0.0, 1.0, 4.0]))
    assert with_zero[0] == 0.0 and 2.0 in with_zero


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_spec_round_trip_catalog():
    for spec in (kondratiev_streit(0.25), iterated_exp_sqrt(3),
                 exponential(2.0), bell_series(2)):
        clone = spec_from_dict(spec_to_dict(spec))
        for r in (0.0, 1.0, 50.0):
            assert clone.log_u(r) == spec.log_u(r)


def test_spec_round_trip_power_series_with_gaps():
    spec = truncated_square_exponential(degree=12)
    d = spec_to_dict(spec)
    # absent odd-degree terms serialize as null, not as a non-JSON -Infinity
    assert d["log_coeffs"][1] is None
    assert d["log_coeffs"][0] == 0.0
    assert d["claimed_conditions"] == ["U0", "U1", "U3"]
    clone = spec_from_dict(d)
    for r in (0.0, 0.5, 2.0):
        assert clone.log_u(r) == spec.log_u(r)


def test_spec_from_dict_rejects_malformed_input():
    with pytest.raises(ParameterError):
        spec_from_dict({"kind": "no-such-kind"})
    with pytest.raises(ParameterError):
        spec_from_dict({"kind": "kondratiev-streit"})  # missing beta


# ---------------------------------------------------------------------------
# Mittag-Leffler
# ---------------------------------------------------------------------------


def test_mittag_leffler_classical_limit():
    for t in np.linspace(0.0, 20.0, 41):
        assert mittag_leffler(1.0, float(t)) == pytest.approx(
            math.exp(-t), rel=1e-12, abs=1e-300
        )


def test_mittag_leffler_half_vs_erfc():
    # E_{1/2}(-t) = exp(t^2) erfc(t)
    for t in np.linspace(0.0, 5.0, 26):
        oracle = math.exp(t * t) * math.erfc(float(t))
        assert mittag_leffler(0.5, float(t)) == pytest.approx(oracle, rel=1e-8)


def test_mittag_leffler_series_integral_overlap():
    for lam in (0.4, 0.6, 0.8):
        for t in (0.5, 1.0, 2.0):
            series = mittag_leffler_series(lam, t)
            assert series is not None
            assert mittag_leffler_integral(lam, t) == pytest.approx(
                series, rel=1e-8
            )


def test_mittag_leffler_series_gives_up_when_terms_blow_up():
    assert mittag_leffler_series(0.5, 30.0) is None
    # the public entry point falls back to the integral and stays in (0, 1]
    value = mittag_leffler(0.5, 30.0)
    assert 0.0 < value < 0.1


def test_mittag_leffler_bounds_and_monotonicity():
    for lam in (0.3, 0.7, 1.0):
        previous = 1.0
        assert mittag_leffler(lam, 0.0) == pytest.approx(1.0, rel=1e-12)
        for t in np.linspace(0.1, 8.0, 30):
            value = mittag_leffler(lam, float(t))
            assert 0.0 < value <= previous + 1e-12
            previous = value


def test_mittag_leffler_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        mittag_leffler(0.0, 1.0)
    with pytest.raises(ParameterError):
        mittag_leffler(1.5, 1.0)
    with pytest.raises(ParameterError):
        mittag_leffler(0.5, -1.0)
