# tests/test_psi_harnack.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize
from scipy.integrate import trapezoid

from curvebound.core_bounds import CurvatureDimension, eval_phi
from curvebound.errors import DomainError, ParameterError, TransformRangeError
from curvebound.psi_harnack import (
    HarnackQuery,
    PsiDomain,
    harnack_exponent,
    harnack_exponent_flat,
    heat_kernel_ratio_bound,
    legendre,
    psi,
    psi_domain,
    psi_prime,
    psi_prime_inverse,
)

POSITIVE = CurvatureDimension(1.0, 2.0)
NEGATIVE = CurvatureDimension(-1.0, 2.0)
FLAT = CurvatureDimension(0.0, 2.0)
FLAT_EXPONENT = math.log(2.0) + 0.25


def interior(cd, t, count=101, right=20.0):
    domain = psi_domain(cd, t)
    hi = domain.hi if math.isfinite(domain.hi) else domain.lo + right
    width = hi - domain.lo
    return np.linspace(domain.lo + 1e-3 * width, hi - 1e-3 * width, count)


def test_psi_domain_membership():
    domain = PsiDomain(lo=-1.0, hi=2.0, lo_open=True)
    assert -1.0 not in domain
    assert 2.0 in domain
    assert domain.interior(0.0)
    assert not domain.interior(2.0)


def test_flat_psi_closed_form():
    """Test dat Psi voor rho = 0 gelijk is aan -sqrt(n/(2t) + y)."""
    assert psi_domain(FLAT, 1.0).lo == -1.0
    assert psi(FLAT, 1.0, 3.0) == pytest.approx(-2.0)
    assert psi_prime(FLAT, 1.0, 3.0) == pytest.approx(-0.25)
    assert psi_prime_inverse(FLAT, 1.0, -0.25) == pytest.approx(3.0)
    result = legendre(FLAT, 1.0, -0.5)
    assert result.value == pytest.approx(1.0)
    assert result.argmax == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("cd", [FLAT, NEGATIVE])
def test_legendre_is_infinite_for_nonnegative_slopes(cd):
    with pytest.raises(TransformRangeError):
        legendre(cd, 1.0, 0.0)
    with pytest.raises(TransformRangeError):
        psi_prime_inverse(cd, 1.0, 0.5)


def test_positive_curvature_interval_ends_at_roots():
    domain = psi_domain(POSITIVE, 1.0)
    assert domain.lo < 0.0 < domain.hi
    assert psi(POSITIVE, 1.0, domain.lo) == 0.0
    assert psi(POSITIVE, 1.0, domain.hi) == 0.0
    assert psi(POSITIVE, 1.0, 0.0) == pytest.approx(-math.sqrt(eval_phi(1.0, 1.0, 0.0)))
    with pytest.raises(DomainError):
        psi(POSITIVE, 1.0, domain.hi + 1.0)
    with pytest.raises(DomainError):
        psi_prime(POSITIVE, 1.0, domain.lo)


def test_negative_curvature_interval_is_unbounded_above():
    domain = psi_domain(NEGATIVE, 1.0)
    assert domain.lo < 0.0
    assert domain.hi == math.inf
    assert psi(NEGATIVE, 1.0, domain.lo) == 0.0


@pytest.mark.parametrize("cd", [POSITIVE, NEGATIVE, CurvatureDimension(2.0, 3.0)])
@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_psi_is_convex(cd, t):
    values = np.array([psi(cd, t, y) for y in interior(cd, t)])
    second = values[2:] - 2.0 * values[1:-1] + values[:-2]
    assert np.all(second >= -1e-12)


@pytest.mark.parametrize("cd", [POSITIVE, NEGATIVE])
def test_psi_prime_matches_central_difference(cd):
    for y in interior(cd, 1.0, count=9)[1:-1]:
        h = 1e-6 * max(1.0, abs(y))
        numeric = (psi(cd, 1.0, y + h) - psi(cd, 1.0, y - h)) / (2.0 * h)
        assert psi_prime(cd, 1.0, y) == pytest.approx(numeric, rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("z", [-3.0, -1.0, -0.2, 0.0, 0.2, 1.0, 3.0])
def test_prime_inverse_positive_curvature(z):
    """Test dat Psi' voor rho > 0 op heel R omkeerbaar is."""
    y = psi_prime_inverse(POSITIVE, 1.0, z)
    assert y in psi_domain(POSITIVE, 1.0)
    assert psi_prime(POSITIVE, 1.0, y) == pytest.approx(z, rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("z", [-3.0, -1.0, -0.2])
def test_prime_inverse_negative_curvature(z):
    y = psi_prime_inverse(NEGATIVE, 1.0, z)
    assert psi_prime(NEGATIVE, 1.0, y) == pytest.approx(z, rel=1e-8)


@given(z=st.floats(min_value=-2.0, max_value=2.0), fraction=st.floats(min_value=0.01, max_value=0.99))
@settings(max_examples=50, deadline=None)
def test_fenchel_young_inequality(z, fraction):
    """Test dat Psi*(z) >= z y - Psi(y) voor elke y in het interval."""
    domain = psi_domain(POSITIVE, 1.0)
    y = domain.lo + fraction * (domain.hi - domain.lo)
    result = legendre(POSITIVE, 1.0, z)
    assert result.value >= z * y - psi(POSITIVE, 1.0, y) - 1e-9
    assert result.value == pytest.approx(z * result.argmax - psi(POSITIVE, 1.0, result.argmax))


def test_harnack_query_validation():
    with pytest.raises(ParameterError):
        HarnackQuery(0.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        HarnackQuery(1.0, 2.0, -1.0)


def test_flat_harnack_exponent():
    """Test dat de gesloten vorm voor rho = 0 de integraal van Psi* over u is."""
    s, t, d = 1.0, 2.0, 1.0
    u = np.linspace(s, t, 2001)
    values = [legendre(FLAT, float(x), -(t - s) / d).value for x in u]
    assert d / (t - s) * trapezoid(values, u) == pytest.approx(FLAT_EXPONENT, rel=1e-6)
    assert harnack_exponent_flat(2.0, s, t, d) == pytest.approx(FLAT_EXPONENT)
    assert harnack_exponent(FLAT, HarnackQuery(s, t, d)) == pytest.approx(FLAT_EXPONENT)
    assert harnack_exponent_flat(2.0, 1.0, 1.0, 0.0) == 0.0
    with pytest.raises(TransformRangeError) as excinfo:
        harnack_exponent_flat(2.0, 2.0, 1.0, 1.0)
    assert excinfo.value.code == "CB006"


@pytest.mark.parametrize("rho", [-1e-6, 1e-6])
def test_general_path_near_zero_curvature(rho):
    """Test dat de algemene route voor |rho| = 1e-6 de vlakke gesloten vormen volgt."""
    cd = CurvatureDimension(rho, 2.0)
    assert psi_domain(cd, 1.0).lo == pytest.approx(-1.0, rel=1e-4)
    for y in (-0.5, 0.0, 3.0, 10.0):
        assert psi(cd, 1.0, y) == pytest.approx(psi(FLAT, 1.0, y), rel=1e-4)
        assert psi_prime(cd, 1.0, y) == pytest.approx(psi_prime(FLAT, 1.0, y), rel=1e-4)
    assert legendre(cd, 1.0, -0.5).value == pytest.approx(1.0, rel=1e-3)
    assert harnack_exponent(cd, HarnackQuery(1.0, 2.0, 1.0)) == pytest.approx(FLAT_EXPONENT, rel=1e-3)


@pytest.mark.parametrize("z", np.linspace(-3.0, -0.05, 20))
def test_flat_legendre_matches_numeric_supremum(z):
    """Test dat Psi* voor rho = 0 gelijk is aan het numerieke supremum van z y - Psi(y)."""
    lo = psi_domain(FLAT, 1.0).lo
    best = optimize.minimize_scalar(
        lambda y: -(z * y - psi(FLAT, 1.0, y)), bounds=(lo, lo + 1e4), method="bounded",
        options={"xatol": 1e-10},
    )
    result = legendre(FLAT, 1.0, z)
    assert result.value == pytest.approx(-best.fun, rel=1e-8, abs=1e-10)
    assert result.value == pytest.approx(-z - 1.0 / (4.0 * z), rel=1e-12)


@pytest.mark.parametrize("cd", [POSITIVE, NEGATIVE])
def test_biconjugate_recovers_psi(cd):
    """Test dat Psi** = Psi: het supremum over z wordt in z = Psi'(y) bereikt."""
    for y in interior(cd, 1.0, count=7)[1:-1]:
        z0 = psi_prime(cd, 1.0, y)
        assert z0 * y - legendre(cd, 1.0, z0).value == pytest.approx(psi(cd, 1.0, y), rel=1e-8, abs=1e-9)
        for step in (-0.3, -0.1, 0.1, 0.3):
            # voor rho < 0 moet z negatief blijven
            z = z0 * (1.0 + step) if cd.rho < 0.0 else z0 + step
            assert z * y - legendre(cd, 1.0, z).value <= psi(cd, 1.0, y) + 1e-9


@pytest.mark.parametrize("cd", [POSITIVE, NEGATIVE])
@pytest.mark.parametrize("s, t, d", [(1.0, 2.0, 1.0), (0.5, 3.0, 2.0)])
def test_harnack_quadrature_matches_trapezoid(cd, s, t, d):
    u = np.linspace(s, t, 1001)
    values = [legendre(cd, float(x), -(t - s) / d).value for x in u]
    expected = d / (t - s) * trapezoid(values, u)
    assert harnack_exponent(cd, HarnackQuery(s, t, d)) == pytest.approx(expected, rel=1e-5)


def test_curvature_orders_harnack_exponents():
    """Test dat positieve kromming de exponent verkleint en negatieve hem vergroot."""
    q = HarnackQuery(1.0, 2.0, 1.0)
    positive = harnack_exponent(POSITIVE, q)
    negative = harnack_exponent(NEGATIVE, q)
    assert 0.0 < positive <= FLAT_EXPONENT + 1e-9
    assert negative >= FLAT_EXPONENT - 1e-9


def test_harnack_exponent_tends_to_flat_value():
    q = HarnackQuery(1.0, 2.0, 1.0)
    assert harnack_exponent(CurvatureDimension(0.01, 2.0), q) == pytest.approx(FLAT_EXPONENT, rel=0.02)


@pytest.mark.parametrize("y", [-0.5, 0.0, 3.0])
def test_psi_tends_to_flat_form_from_negative_curvature(y):
    """Test dat Psi voor rho -> 0- naar de vlakke vorm gaat."""
    flat = psi(FLAT, 1.0, y)
    assert psi(CurvatureDimension(-1e-3, 2.0), 1.0, y) == pytest.approx(flat, rel=1e-2)
    assert psi_domain(CurvatureDimension(-1e-3, 2.0), 1.0).lo == pytest.approx(-1.0, rel=1e-2)


def test_harnack_limiting_cases():
    assert harnack_exponent(POSITIVE, HarnackQuery(1.0, 1.0, 0.0)) == 0.0
    same_time = harnack_exponent(POSITIVE, HarnackQuery(1.0, 1.0, 0.5))
    assert same_time == pytest.approx(0.5 * legendre(POSITIVE, 1.0, 0.0).value)
    assert same_time > 0.0
    # d = 0 integreert het linker eindpunt van het interval
    assert harnack_exponent(POSITIVE, HarnackQuery(1.0, 2.0, 0.0)) > 0.0
    # terug in de tijd mag voor rho > 0
    assert harnack_exponent(POSITIVE, HarnackQuery(2.0, 1.0, 1.0)) > 0.0


def test_negative_curvature_runs_forward_only():
    with pytest.raises(TransformRangeError) as excinfo:
        harnack_exponent(NEGATIVE, HarnackQuery(2.0, 1.0, 1.0))
    assert excinfo.value.code == "CB006"
    with pytest.raises(TransformRangeError):
        harnack_exponent(NEGATIVE, HarnackQuery(1.0, 1.0, 1.0))


def test_heat_kernel_ratio_bound():
    q = HarnackQuery(1.0, 2.0, 1.0)
    assert heat_kernel_ratio_bound(FLAT, q) == pytest.approx(2.0 * math.exp(0.25))
