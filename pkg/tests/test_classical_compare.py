# tests/test_classical_compare.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvebound.classical_compare import (
    LinearBound,
    NormalizedState,
    _log_expm1_minus,
    asymptotic_slopes,
    bound_classical_liyau,
    dominance_report,
    li_xu_coefficients,
    li_xu_harnack_exponent,
    li_xu_margin,
    linear_margin,
    linearized_bound_hyperbolic,
    linearized_bound_trigonometric,
    new_bound_G,
    satisfies_bakry_qian,
    satisfies_davies,
    satisfies_davies_at,
    satisfies_hamilton,
    satisfies_li_xu,
    satisfies_li_xu_at,
    satisfies_li_yau_alpha,
    satisfies_yau,
    satisfies_yau_at,
    yau_literal_margin,
    yau_margin,
)
from curvebound.core_bounds import CurvatureDimension, eval_phi
from curvebound.errors import DomainError, ParameterError
from curvebound.psi_harnack import HarnackQuery, harnack_exponent


def test_normalized_state():
    ns = NormalizedState.at(2.0, 0.25, -1.0, 3.0)
    assert ns.r == pytest.approx(2.0)
    assert ns.s_var == pytest.approx(0.5)
    with pytest.raises(ParameterError):
        NormalizedState.at(0.0, 1.0, 0.0, 0.0)


def test_classical_liyau_bound():
    assert bound_classical_liyau(2.0, 1.0, 3.0) == 4.0
    with pytest.raises(ParameterError):
        bound_classical_liyau(2.0, 0.0, 3.0)


@pytest.mark.parametrize("K", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
def test_li_xu_coefficients_closed_form(K, t):
    s = K * t
    coeffs = li_xu_coefficients(K, t)
    assert coeffs.A == pytest.approx(1.0 + (math.sinh(2 * s) - 2 * s) / (2 * math.sinh(s) ** 2), rel=1e-12)
    assert coeffs.B == pytest.approx(K * (1.0 + 1.0 / math.tanh(s)), rel=1e-12)


def test_li_xu_is_the_tangent_at_alpha_equal_K():
    """Test dat de Li-Xu coefficienten de raaklijn bij alpha = K zijn."""
    K, t = 1.5, 0.7
    tangent = linearized_bound_hyperbolic(-K, t, K)
    li_xu = li_xu_coefficients(K, t)
    assert tangent.A == pytest.approx(li_xu.A, rel=1e-12)
    assert tangent.B == pytest.approx(li_xu.B, rel=1e-12)


@pytest.mark.parametrize("rho", [-1.0, 1.0])
@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0, 2.5])
def test_hyperbolic_tangent_lines_dominate_phi(rho, alpha):
    t = 1.0
    line = linearized_bound_hyperbolic(rho, t, alpha)
    x0 = 1.0 - alpha**2 / rho**2
    assert line.phi_line(rho, x0) == pytest.approx(eval_phi(rho, t, x0), rel=1e-12, abs=1e-12)
    for x in np.linspace(-10.0, 1.0 + 0.9 * math.pi**2, 50):
        assert line.phi_line(rho, x) >= eval_phi(rho, t, x) - 1e-12


def test_tangent_at_one_has_closed_form():
    rho, t = 2.0, 0.5
    line = linearized_bound_hyperbolic(rho, t, 0.0)
    assert line.A == pytest.approx(1.0 - 2.0 * rho * t / 3.0)
    assert line.B == pytest.approx(1.0 / t - rho + rho * rho * t / 3.0)


@pytest.mark.parametrize("beta", [0.5, 1.5, 3.0])
def test_trigonometric_tangent_lines_dominate_phi(beta):
    rho, t = -1.0, 1.0
    line = linearized_bound_trigonometric(rho, t, beta)
    x0 = 1.0 + beta**2 / rho**2
    assert line.phi_line(rho, x0) == pytest.approx(eval_phi(rho, t, x0), rel=1e-12)
    for x in np.linspace(-10.0, 1.0 + 0.95 * math.pi**2, 50):
        assert line.phi_line(rho, x) >= eval_phi(rho, t, x) - 1e-12


def test_linearized_bounds_reject_bad_parameters():
    with pytest.raises(DomainError):
        linearized_bound_hyperbolic(-1.0, 1.0, -0.5)
    with pytest.raises(DomainError):
        linearized_bound_trigonometric(-1.0, 1.0, math.pi)
    with pytest.raises(ParameterError):
        linearized_bound_hyperbolic(0.0, 1.0, 1.0)


def test_new_bound_meets_li_xu_at_zero():
    """Test dat de nieuwe grens en Li-Xu samenvallen in X = 0."""
    K, t = 1.0, 1.0
    G = new_bound_G(-K, t, 0.0)
    assert G == pytest.approx(2.0 + 2.0 / math.tanh(K * t), rel=1e-12)
    ns = NormalizedState.at(K, t, 0.0, G)
    assert li_xu_margin(ns) == pytest.approx(0.0, abs=1e-12)
    assert linear_margin(ns, li_xu_coefficients(K, t), K) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ParameterError):
        new_bound_G(1.0, t, 0.0)


def test_linear_margin():
    ns = NormalizedState.at(1.0, 1.0, 2.0, 1.0)
    assert linear_margin(ns, LinearBound(A=1.0, B=3.0), 2.0) == pytest.approx(-2.0 + 3.0 - 1.0)


def test_yau_margin_is_normalized_literal_form():
    n, K, t = 3.0, 2.0, 0.5
    gamma_ratio, lap_ratio = 1.7, -0.4
    ns = NormalizedState.at(K, t, -4.0 * lap_ratio / (n * K), 4.0 * gamma_ratio / (n * K))
    literal = yau_literal_margin(n, K, t, gamma_ratio, lap_ratio)
    assert yau_margin(ns) == pytest.approx(4.0 / (n * K) * literal, rel=1e-12)


def test_competitor_predicates():
    inside = NormalizedState.at(1.0, 1.0, 0.0, 0.0)
    outside = NormalizedState.at(1.0, 1.0, 0.0, 1e6)
    for check in (satisfies_yau, satisfies_bakry_qian, satisfies_li_xu):
        assert check(inside)
        assert not check(outside)
    assert satisfies_hamilton(inside)
    assert not satisfies_hamilton(NormalizedState.at(1.0, 1.0, 1e6, 0.0))
    assert satisfies_davies(inside, 2.0)
    assert satisfies_li_yau_alpha(inside, 2.0)
    assert not satisfies_davies(outside, 2.0)
    with pytest.raises(ParameterError):
        satisfies_davies(inside, 1.0)
    with pytest.raises(ParameterError):
        satisfies_li_yau_alpha(inside, 0.5)


@pytest.mark.parametrize("rho", [-0.1, -1.0, -5.0])
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_improved_bound_dominates_competitors(rho, t):
    """Test dat geen concurrent strenger is dan de nieuwe grens op het rooster."""
    reports = dominance_report(CurvatureDimension(rho, 2.0), t)
    assert "yau" in reports
    for label, report in reports.items():
        if label == "yau":
            continue
        assert report.passed, (label, report)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_li_xu_line_touches_improved_bound(t):
    reports = dominance_report(CurvatureDimension(-1.0, 2.0), t)
    # raakpunt in X = 0
    assert reports["li_xu"].min_margin < 1e-2
    assert abs(reports["li_xu"].argmin[0]) < 0.2


def test_dominance_report_labels():
    reports = dominance_report(CurvatureDimension(-2.0, 3.0), 1.0, grid_size=50, alphas=(1.5,))
    assert set(reports) == {
        "li_xu", "bakry_qian", "hamilton", "yau", "li_xu_linear", "davies(alpha=1.5)", "li_yau(alpha=1.5)",
    }
    with pytest.raises(ParameterError):
        dominance_report(CurvatureDimension(1.0, 2.0), 1.0)


def test_asymptotic_slopes():
    slopes = asymptotic_slopes(CurvatureDimension(-1.0, 2.0), 1.0, alphas=(2.0,))
    assert slopes["new"] == -1.0
    assert slopes["davies(alpha=2)"] == -2.0
    assert slopes["hamilton"] == pytest.approx(-math.exp(2.0))
    assert slopes["li_xu"] < -1.0
    with pytest.raises(ParameterError):
        asymptotic_slopes(CurvatureDimension(1.0, 2.0), 1.0)


@pytest.mark.parametrize("a", [1e-4, 5e-3, 0.5, 3.0, 40.0])
def test_log_expm1_minus(a):
    assert _log_expm1_minus(a) == pytest.approx(math.log(math.expm1(a) - a), rel=1e-9, abs=1e-9)


def test_log_expm1_minus_large_argument():
    assert _log_expm1_minus(800.0) == pytest.approx(800.0, rel=1e-12)


def test_li_xu_harnack_exponent():
    n, K, s, t, d = 2.0, 1.0, 1.0, 2.0, 1.0
    volume = 0.25 * n * math.log((math.exp(4.0) - 5.0) / (math.exp(2.0) - 3.0))
    coth_gap = t / math.tanh(K * t) - s / math.tanh(K * s)
    expected = volume + d * d / (4.0 * (t - s)) * (1.0 + coth_gap / (t - s))
    assert li_xu_harnack_exponent(n, K, s, t, d) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ParameterError):
        li_xu_harnack_exponent(n, K, t, s, d)


@given(
    rho=st.floats(min_value=-2.0, max_value=-0.05),
    n=st.floats(min_value=1.0, max_value=8.0),
    s=st.floats(min_value=0.1, max_value=3.0),
    gap=st.floats(min_value=0.1, max_value=3.0),
    d=st.one_of(st.just(0.0), st.floats(min_value=0.05, max_value=3.0)),
)
@settings(max_examples=50, deadline=None)
def test_harnack_exponent_below_li_xu(rho, n, s, gap, d):
    """Test dat de nieuwe Harnack exponent nooit boven die van Li-Xu ligt."""
    t = s + gap
    improved = harnack_exponent(CurvatureDimension(rho, n), HarnackQuery(s, t, d))
    li_xu = li_xu_harnack_exponent(n, -rho, s, t, d)
    assert improved <= li_xu + 1e-7 * max(1.0, abs(li_xu))


def test_predicates_with_full_argument_list():
    n, K, t = 3.0, 1.0, 1.0
    inside = NormalizedState.at(K, t, 0.0, 0.0)
    outside = NormalizedState.at(K, t, 0.0, 1e6)
    assert satisfies_davies_at(inside, n, K, t, 2.0) == satisfies_davies(inside, 2.0)
    assert satisfies_yau_at(inside, n, K, t)
    assert satisfies_li_xu_at(inside, n, K, t)
    assert not satisfies_yau_at(outside, n, K, t)
    assert not satisfies_li_xu_at(outside, n, K, t)
    assert not satisfies_davies_at(outside, n, K, t, 2.0)
    # toestand hoort bij K t = 1, niet bij K t = 2
    with pytest.raises(ParameterError):
        satisfies_yau_at(inside, n, 2.0, t)
    with pytest.raises(ParameterError):
        satisfies_li_xu_at(inside, 0.5, K, t)
    with pytest.raises(ParameterError):
        satisfies_davies_at(inside, n, K, t, 1.0)
