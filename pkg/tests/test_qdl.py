import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tqft.qdl import (DEFAULT_SPEC, BranchCut, ChargeTriple, DivergentParameter, IntegralSpec,
                      ModularParameter, PoleProximity, TruncationUnstable, asymptotic_ratio,
                      g_weight, identity_residual, li2, nu_prefactor, phi, phi_asymptotic,
                      psi_family, psi_tilde_fourier, qseries, zeta_inv)

B08 = ModularParameter(0.8)
B1 = ModularParameter(1.0)


# ---------------------------------------------------------------- basics

def test_modular_parameter_derived_quantities():
    p = ModularParameter(0.8)
    assert p.cb == pytest.approx(0.5j * (0.8 + 1 / 0.8))
    assert p.is_real
    q = ModularParameter(cmath.exp(0.3j))
    assert abs(q.q) < 1 and abs(q.q_tilde) < 1


@pytest.mark.parametrize("b", [0, -0.5, 1j])
def test_modular_parameter_rejects_bad_b(b):
    with pytest.raises(ValueError):
        ModularParameter(b)


def test_charge_triple_validation():
    assert ChargeTriple(0.1, 0.2).b_charge == pytest.approx(0.2)
    with pytest.raises(ValueError):
        ChargeTriple(0.3, 0.3)
    with pytest.raises(ValueError):
        ChargeTriple(0.0, 0.2)


def test_spec_rejects_contour_reaching_pole():
    with pytest.raises(ValueError):
        IntegralSpec(contour_epsilon=1.2).check(B1)
    with pytest.raises(ValueError):
        IntegralSpec(rel_tol=0)


# -------------------------------------------------------------------- phi

def test_phi_at_zero_squared():
    assert abs(phi(0, B1) ** 2 - cmath.exp(1j * math.pi / 6)) < 1e-10


def test_phi_product_matches_contour_at_complex_b():
    p = ModularParameter(0.8 * cmath.exp(0.25j))
    for z in (0.3, -0.2 + 0.1j, 0.5 - 0.3j):
        a = phi(z, p, method="product")
        c = phi(z, p, method="contour")
        assert abs(a - c) < 1e-8 * abs(a)


def test_phi_unit_modulus_on_real_axis():
    assert abs(abs(phi(0.7, B1)) - 1) < 1e-10


def test_phi_pole_detection():
    with pytest.raises(PoleProximity):
        phi(B08.cb, B08)
    with pytest.raises(PoleProximity):
        phi(-B08.cb - 1j * 0.8, B08)


def test_phi_vectorized_matches_scalar():
    zs = np.array([0.1, -0.4 + 0.2j, 1.3])
    v = phi(zs, B08)
    for z, w in zip(zs, v):
        assert abs(phi(complex(z), B08) - w) < 1e-14


def test_phi_symmetric_in_b_and_inverse_b():
    z = 0.37 - 0.12j
    assert abs(phi(z, ModularParameter(0.8)) - phi(z, ModularParameter(1.25))) < 1e-12


def test_phi_large_real_argument_behaviour():
    # Phi -> 1 at -inf and Phi ~ zeta_inv^-1 e^{i pi z^2} at +inf
    assert abs(phi(-6.0, B1) - 1) < 1e-8
    z = 6.0
    assert abs(phi(z, B1) * zeta_inv(B1) * cmath.exp(-1j * math.pi * z * z) - 1) < 1e-8


# ------------------------------------------------------------- identities

def test_functional_example():
    assert identity_residual("functional", 0.4, ModularParameter(0.9)) < 1e-8


def test_inversion_at_zero():
    assert identity_residual("inversion", 0.0, B08) < 1e-10


def test_fourier_identity_example():
    assert identity_residual("fourier", 0.3 - 0.4j, B08) < 1e-6


def test_beta_identity_example_inside_domain():
    assert identity_residual("beta_integral", (-0.3j, 0.2 + 0.1j), B08) < 1e-6


def test_beta_identity_rejects_point_outside_domain():
    # w = 0.2 - 0.1i lies below the strip 0 < Im w < Im u + Q/2
    with pytest.raises(ValueError):
        identity_residual("beta_integral", (-0.3j, 0.2 - 0.1j), B08)


def test_unknown_identity():
    with pytest.raises(ValueError):
        identity_residual("pentagon", 0.0, B08)


strip_z = st.builds(complex, st.floats(-2.0, 2.0), st.floats(-0.6, 0.6))
real_b = st.floats(0.5, 1.0)


@settings(max_examples=25, deadline=None)
@given(z=strip_z, b=real_b)
def test_functional_equation_property(z, b):
    assert identity_residual("functional", z, ModularParameter(b)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(z=strip_z, b=real_b)
def test_inversion_property(z, b):
    assert identity_residual("inversion", z, ModularParameter(b)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(z=strip_z, b=real_b)
def test_unitarity_property(z, b):
    assert identity_residual("unitarity", z, ModularParameter(b)) < 1e-9


@settings(max_examples=15, deadline=None)
@given(z=strip_z, theta=st.floats(0.15, 0.6))
def test_product_contour_agreement_property(z, theta):
    p = ModularParameter(0.9 * cmath.exp(1j * theta))
    a = phi(z, p, method="product")
    c = phi(z, p, method="contour")
    assert abs(a - c) < 1e-8 * max(1.0, abs(a))


# ------------------------------------------------------------------- li2

def test_li2_special_values():
    assert li2(0) == 0
    assert abs(li2(1) - math.pi ** 2 / 6) < 1e-14
    assert abs(li2(-1) + math.pi ** 2 / 12) < 1e-14


def test_li2_figure_eight_volume():
    assert abs(2 * li2(cmath.exp(1j * math.pi / 3)).imag - 2.0298832128193) < 1e-12


def test_li2_branch_cut():
    with pytest.raises(BranchCut):
        li2(2.0)


@settings(max_examples=50, deadline=None)
@given(x=st.builds(complex, st.floats(-5, 0.99), st.floats(-3, 3)))
def test_li2_matches_mpmath(x):
    ref = complex(mpmath.polylog(2, x))
    assert abs(li2(x) - ref) < 1e-12 * max(1.0, abs(ref))


# ----------------------------------------------------------------- series

def test_pochhammer_empty_product():
    assert qseries("pochhammer_inf", 0, 0.5) == 1


def test_li2q_against_product():
    assert abs(qseries("pochhammer_inf", 0.2, 0.5) - cmath.exp(-qseries("li2q", 0.2, 0.5))) < 1e-12


def test_jacobi_triple_product():
    x, q = 0.3, 0.4
    lhs = (qseries("pochhammer_inf", q, q) * qseries("pochhammer_inf", x, q)
           * qseries("pochhammer_inf", q / x, q))
    rhs = sum((-1) ** k * q ** (k * (k - 1) / 2) * x ** k for k in range(-60, 61))
    assert abs(lhs - rhs) < 1e-10


def test_qseries_divergent():
    with pytest.raises(DivergentParameter):
        qseries("pochhammer_inf", 0.1, 1.0)
    with pytest.raises(DivergentParameter):
        qseries("li2q", 1.5, 0.3)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-0.9, 0.9), q=st.floats(-0.8, 0.8))
def test_pochhammer_is_exp_minus_li2q(x, q):
    assert abs(qseries("pochhammer_inf", x, q) - cmath.exp(-qseries("li2q", x, q))) < 1e-11


# ------------------------------------------------------------ psi family

def test_psi_plain_unit_modulus():
    assert abs(abs(psi_family("plain", ChargeTriple(0.1, 0.1), 0.3, B1)) - 1) < 1e-10


def test_psi_tilde_prime_conjugation_identity():
    ch = ChargeTriple(1 / 8, 1 / 8)
    x = 0.2
    lhs = np.conj(psi_family("tilde_prime_charged", ch, x, B1))
    rhs = (cmath.exp(-1j * math.pi / 12) * cmath.exp(1j * math.pi * x * x)
           * psi_family("charged", ChargeTriple(ch.b_charge, ch.c), -x, B1))
    assert abs(lhs - rhs) < 1e-9


def test_psi_charged_matches_definition():
    ch = ChargeTriple(0.12, 0.21)
    x = 0.35
    cb = B08.cb
    direct = (1 / phi(x - 2 * cb * (ch.a + ch.c), B08) * cmath.exp(-4j * math.pi * cb * ch.a * (x - cb * (ch.a + ch.c)))
              * cmath.exp(-1j * math.pi * cb ** 2 * (4 * (ch.a - ch.c) + 1) / 6))
    assert abs(psi_family("charged", ch, x, B08) - direct) < 1e-10


@pytest.mark.parametrize("a,c,x", [(0.1, 0.2, 0.3), (0.15, 0.15, -0.4), (0.2, 0.1, 0.0)])
def test_psi_tilde_closed_form_matches_fourier_transform(a, c, x):
    ch = ChargeTriple(a, c)
    assert abs(psi_tilde_fourier(ch, x, B08) - psi_family("tilde_charged", ch, x, B08)) < 1e-9


def test_nu_prefactor_examples():
    assert nu_prefactor(0.2, 0.2, B08) == pytest.approx(cmath.exp(-1j * math.pi * B08.cb ** 2 / 6))
    assert nu_prefactor(0.3, 0.05, B1) == pytest.approx(cmath.exp(1j * math.pi / 3))
    assert abs(abs(nu_prefactor(0.1, 0.3, B08)) - 1) < 1e-14


# --------------------------------------------------------------- g weight

def test_g_weight_single_term():
    ch = ChargeTriple(1 / 8, 1 / 8)
    s, t = 0.3, 0.1
    g = g_weight(ch, s, t, B1, IntegralSpec(lattice_M=0))
    direct = psi_family("tilde_prime_charged", ch, s, B1) * cmath.exp(1j * math.pi * t * s)
    assert abs(g - direct) < 1e-12


def test_g_weight_truncation_converges():
    ch = ChargeTriple(1 / 8, 1 / 8)
    a = g_weight(ch, 0.3, 0.1, B1, IntegralSpec(lattice_M=20), check=False)
    b = g_weight(ch, 0.3, 0.1, B1, IntegralSpec(lattice_M=40), check=False)
    assert abs(a - b) < 1e-10


def test_g_weight_truncation_instability_reported():
    with pytest.raises(TruncationUnstable):
        g_weight(ChargeTriple(0.01, 0.01), 0.3, 0.1, B1, IntegralSpec(lattice_M=1))


@settings(max_examples=10, deadline=None)
@given(s=st.floats(-1, 1), t=st.floats(-1, 1))
def test_g_weight_quasi_periodicity(s, t):
    ch = ChargeTriple(1 / 8, 1 / 8)
    g0 = g_weight(ch, s, t, B1)
    g2 = g_weight(ch, s, t + 2, B1)
    assert abs(g2 - g0 * cmath.exp(2j * math.pi * s)) < 1e-10


# ------------------------------------------------------------ asymptotics

def test_asymptotic_leading_term_at_zero():
    p = ModularParameter(0.3)
    expected = cmath.exp(1j * math.pi / (24 * 0.09))
    assert abs(phi_asymptotic(0.0, p, 0) - expected) < 1e-12


@pytest.mark.parametrize("x", [-0.5, 0.0, 0.5])
def test_asymptotic_error_ratio(x):
    assert 3.5 <= asymptotic_ratio(x, 0.4) <= 4.5


def test_asymptotic_higher_orders_improve():
    p = ModularParameter(0.25)
    exact = phi(0.3 / (2 * math.pi * 0.25), p)
    errs = [abs(phi_asymptotic(0.3, p, n) / exact - 1) for n in range(3)]
    assert errs[0] > errs[1] > errs[2]


def test_asymptotic_order_bounds():
    with pytest.raises(ValueError):
        phi_asymptotic(0.0, B08, 5)
    with pytest.raises(ValueError):
        phi_asymptotic(0.0, ModularParameter(cmath.exp(0.2j)), 0)


def test_default_spec_values():
    assert DEFAULT_SPEC.rel_tol == 1e-8
    assert DEFAULT_SPEC.contour_epsilon == 0.05
    assert DEFAULT_SPEC.lattice_M == 24
