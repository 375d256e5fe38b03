import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tqft.invariants import (InvariantResult, KnotId, ReducedForm, UnsupportedKnot, check_balanced_41,
                             chi41_band, chi_41, chi_52, htri_limit, j61_integrand, j_61,
                             kernel_density, mid_depth, psi_charged, reduced_form_61,
                             renormalization_factor, richardson, wgz_transform, z_new_41)
from tqft.mcg import LinearForm
from tqft.qdl import (ChargeTriple, IntegralSpec, ModularParameter, NonConvergence,
                      TruncationUnstable, phi, psi_family)

P08 = ModularParameter(0.8)
CB = P08.cb


def test_knot_id_parsing():
    assert KnotId.parse("4_1") is KnotId.K4_1
    assert KnotId.parse("K6_1") is KnotId.K6_1
    assert str(KnotId.K5_2) == "5_2"
    with pytest.raises(UnsupportedKnot):
        KnotId.parse("3_1")


def test_real_b_required():
    with pytest.raises(ValueError):
        chi_41(0, ModularParameter(cmath.exp(0.3j)))
    with pytest.raises(ValueError):
        chi_41(0, ModularParameter(1.5))


# ---------------------------------------------------------------- kernels

def test_kernel_density_diagonal():
    ch = ChargeTriple(0.1, 0.2)
    k0 = kernel_density(ch, 0.0, 0.3, 0.3, P08)
    k1 = kernel_density(ch, 1.7, 0.3, 0.3, P08)
    ref = psi_family("tilde_prime_charged", ch, 0.0, P08)
    assert abs(k0 - ref) < 1e-12 and abs(k1 - ref) < 1e-12


@pytest.mark.parametrize("x0,x2,x3", [(0.2, -0.1, 0.4), (-0.5, 0.3, 0.1)])
def test_kernel_density_conjugation(x0, x2, x3):
    # <x0,x2|Tbar|x1,x3> = conj <x1,x3|T|x0,x2>, with x1 = x0 - x3
    ch = ChargeTriple(0.15, 0.2)
    neg = kernel_density(ch, x0, x2, x3, P08, sign=-1)
    pos = kernel_density(ch, x0 - x3, x3, x2, P08, sign=1)
    assert abs(neg - np.conj(pos)) < 1e-12
    with pytest.raises(ValueError):
        kernel_density(ch, x0, x2, x3, P08, sign=0)


def test_kernel_density_recomposes_figure_eight_summand():
    # positive and negative tetrahedron on the state (x, y) with x0 = 0; the
    # conjugate kernel fixes x1 = -x and keeps the phase e^{2 pi i x (y - x)}
    pos, neg = ChargeTriple(1 / 6, 1 / 6), ChargeTriple(1 / 6, 1 / 6)
    x, y = 0.13, 0.41
    k = kernel_density(pos, 0.0, x, y, P08) * kernel_density(neg, 0.0, y, x, P08, sign=-1)
    ref = (psi_family("tilde_prime_charged", pos, y - x, P08)
           * np.conj(psi_family("tilde_prime_charged", neg, y - x, P08))
           * cmath.exp(2j * math.pi * x * (y - x)))
    assert abs(k - ref) < 1e-12


@pytest.mark.parametrize("x", [0.0, 0.3, -0.45 + 0.05j])
def test_psi_charged_vectorized(x):
    a, c = 0.12, 0.2
    assert abs(psi_charged(a, c, x, P08) - psi_family("charged", ChargeTriple(a, c), x, P08)) < 1e-10


def test_renormalization_factor_cancels_pole():
    for a, c in [(0.1, 0.2), (0.2, 0.15)]:
        w = CB * (2 * a - 1)
        tp = psi_family("tilde_prime_charged", ChargeTriple(a, c), 0.0, P08)
        assert abs(renormalization_factor(a, c, P08) - phi(w, P08) * tp) < 1e-10
        assert abs(renormalization_factor(a, c, P08, negative=True) - phi(w, P08) * np.conj(tp)) < 1e-10


# --------------------------------------------------------------- chi_41/52

def test_chi41_band_real_axis():
    lo, hi = chi41_band(0.0, P08)
    assert lo == 0 and hi == pytest.approx(P08.Q.real / 2)
    assert mid_depth(P08) == pytest.approx(hi / 2)
    with pytest.raises(NonConvergence):
        chi41_band(2j, P08)


def test_chi41_contour_independence():
    ref = chi_41(0.0, P08)
    assert not ref.flagged
    for eps, depth in [(0.03, None), (0.06, None), (0.05, 0.3), (0.05, 0.6)]:
        r = chi_41(0.0, P08, IntegralSpec(contour_epsilon=eps), depth=depth)
        assert abs(r.value - ref.value) < 1e-7 * abs(ref.value)


def test_chi41_value_at_zero():
    # frozen reference from two-depth agreement at b = 0.8
    assert abs(chi_41(0.0, P08).value - 0.356252045263) < 1e-9


def test_chi41_depth_outside_band():
    with pytest.raises(NonConvergence):
        chi_41(0.0, P08, depth=2.0)


def test_chi52_even_and_contour_independent():
    a = chi_52(0.2, P08).value
    b = chi_52(-0.2, P08).value
    assert abs(a - b) < 1e-8 * abs(a)
    r = chi_52(0.0, P08)
    assert abs(chi_52(0.0, P08, depth=0.3).value - r.value) < 1e-7 * abs(r.value)
    assert r.reduced == pytest.approx(r.value / cmath.exp(-1j * math.pi / 3))


def test_invariant_result_dict():
    r = chi_41(0.0, P08)
    d = r.as_dict()
    assert set(d) == {"value_re", "value_im", "spec", "convergence_report"}
    assert d["convergence_report"]["last_refinement_delta"] < 1e-8 * abs(r.value)
    assert isinstance(InvariantResult(1j, IntegralSpec(), {}).reduced, complex)


# ------------------------------------------------------------------ 6_1

@pytest.mark.parametrize("x,z", [(0.1, 0.2j), (0.3 - 0.1j, -0.2 + 0.3j), (-0.4, 0.5 - 0.1j)])
def test_j61_integrand_two_ways(x, z):
    direct = j61_integrand(x, z, P08)
    inverted = j61_integrand(x, z, P08, form="inverted")
    by_phi = (phi(x, P08) * phi(z, P08) / (phi(-x, P08) * phi(z - x - CB, P08))
              * cmath.exp(1j * math.pi * z * z - 4j * math.pi * CB * z))
    assert abs(direct - inverted) < 1e-9 * abs(direct)
    assert abs(direct - by_phi) < 1e-9 * abs(direct)
    with pytest.raises(ValueError):
        j61_integrand(x, z, P08, form="other")


def test_j61_conjugation_on_real_slice():
    # for real b each Phi has unit modulus on the real line
    x = 0.37
    assert abs(abs(phi(x, P08) / phi(-x, P08)) - 1) < 1e-10


@pytest.mark.slow
def test_j61_contour_independence():
    ref = j_61(0.12)
    cx, cz = ref.convergence_report["contour"]
    moved = j_61(0.12, contour=(complex(cx[0] + 0.05, cx[1]), complex(cz[0] - 0.05, cz[1])))
    assert abs(moved.value - ref.value) < 1e-6 * abs(ref.value)


def test_j61_rejects_bad_hbar():
    with pytest.raises(ValueError):
        j_61(-0.1)


# ------------------------------------------------------------- new formulation

SYM = {1: (1 / 6, 1 / 6, 1 / 6), 2: (1 / 6, 1 / 6, 1 / 6)}


def test_balance_check():
    check_balanced_41(SYM)
    with pytest.raises(ValueError):
        check_balanced_41({1: (0.2, 0.1, 0.2), 2: (1 / 6, 1 / 6, 1 / 6)})
    with pytest.raises(ValueError):
        check_balanced_41({1: (0.2, 0.2, 0.2), 2: (0.2, 0.2, 0.2)})


def test_z_new_truncation_instability():
    with pytest.raises(TruncationUnstable):
        z_new_41(SYM, P08, IntegralSpec(lattice_M=1), n_quad=16)


def test_wgz_transform_quasi_periodicity():
    f = lambda x: cmath.exp(-math.pi * x * x)
    u, v = 0.3, 0.2
    W, info = wgz_transform(f, u, v)
    assert abs(wgz_transform(f, u + 1, v)[0] - cmath.exp(-1j * math.pi * v) * W) < 1e-12
    assert abs(wgz_transform(f, u, v + 1)[0] - cmath.exp(1j * math.pi * u) * W) < 1e-12
    assert info["terms"] > 3


@settings(max_examples=20, deadline=None)
@given(u=st.floats(-1, 1), v=st.floats(-1, 1))
def test_wgz_gaussian_is_its_own_transform(u, v):
    # the Gaussian is fixed by the Fourier transform, which W intertwines with (u, v) -> (v, -u)
    f = lambda x: cmath.exp(-math.pi * x * x)
    a = wgz_transform(f, u, v)[0]
    b = wgz_transform(f, v, -u)[0]
    assert abs(a - b) < 1e-10


def test_wgz_cutoff_and_divergence():
    f = lambda x: 1.0
    with pytest.raises(NonConvergence):
        wgz_transform(f, 0.0, 0.0)
    val, info = wgz_transform(f, 0.0, 0.0, P=3, check=False)
    assert val == 7 and info["range"] == [-3, 3]


# ------------------------------------------------------------ H-triangulations

def test_richardson_exact_on_linear_data():
    eps = [0.02, 0.01, 0.005]
    lim, delta = richardson(eps, [1 + 2j + 3 * e for e in eps])
    assert abs(lim - (1 + 2j)) < 1e-14 and delta < 1e-14


def test_htri_validation():
    with pytest.raises(ValueError):
        htri_limit("4_1", [0.01, 0.02], P08)
    with pytest.raises(ValueError):
        htri_limit("4_1", [0.01], P08)
    with pytest.raises(ValueError):
        htri_limit("4_1", [0.9, 0.5], P08)
    with pytest.raises(UnsupportedKnot):
        htri_limit("3_1", [0.02, 0.01], P08)


def test_htri_six_one_reports_exact_agreement():
    with pytest.raises(UnsupportedKnot, match="same exact expression"):
        htri_limit("6_1", [0.02, 0.01, 0.005], P08)


def test_reduced_forms_six_one_agree():
    orig, new = reduced_form_61("original"), reduced_form_61("new")
    assert orig == new
    assert orig.phase == Fraction(-7)
    assert dict(orig.quadratic) == {("x", "x"): 1, ("x", "z"): 2, ("z", "z"): Fraction(3, 2)}
    with pytest.raises(ValueError):
        reduced_form_61("other")


def test_reduced_form_algebra():
    P = LinearForm.parse
    f = ReducedForm.build(3, [("psi", P("x-z"))], {("z", "x"): 2, ("z", "z"): 1})
    back = f.substitute("z", P("-z")).substitute("z", P("-z"))
    assert back == f
    g = f.tilde_to_plain("psi", "psi2")
    assert g.phase == 2 and dict(g.quadratic)[("x", "x")] == Fraction(1, 2)
    with pytest.raises(KeyError):
        f.tilde_to_plain("nope", "x")
    # phases live in (-12, 12]
    assert ReducedForm.build(13, [], {}).phase == -11
    assert "conj" in str(f)
