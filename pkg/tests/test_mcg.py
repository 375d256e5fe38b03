from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tqft.mcg import (BOUNDARY, BOUNDARY_MULTIPLIERS, INTERNAL, LABELS, TORI,
                      XS_X4_CONTRIBUTIONS, CobordismKernel, KernelTerm, LinearForm,
                      MultiplierFactor, UnknownDirection, build_cobordism, charge_census,
                      contributions, edge_multiplier, kernel_derivative_sum, printed_weights,
                      torus_projection_check, verify)

L = LinearForm.parse


# ------------------------------------------------------------- LinearForm

def test_parse_and_render():
    f = L("x7+x6-x1'-2x1+1/2")
    assert f.coeff("x1") == -2 and f.coeff("x1'") == -1 and f.constant == Fraction(1, 2)
    assert str(f) == "-2x1+x6+x7-x1'+1/2"
    assert L(str(f)) == f
    assert str(LinearForm()) == "0" and L("0").is_zero()


def test_zero_coefficients_dropped():
    assert (L("x1+x2") - L("x2")).coeffs == {"x1": 1}
    assert L("x1-x1").is_zero()


var = st.sampled_from(list(LABELS))
forms = st.builds(LinearForm,
                  st.dictionaries(var, st.fractions(-5, 5, max_denominator=6), max_size=5),
                  st.fractions(-3, 3, max_denominator=4))


@settings(max_examples=100)
@given(f=forms, g=forms, h=forms)
def test_form_arithmetic_laws(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f + g == g + f
    assert (f - f).is_zero()
    assert f.scale(2) == f + f
    assert L(str(f)) == f
    assert hash(f + g) == hash(g + f)


@settings(max_examples=100)
@given(f=forms, g=forms, d=st.dictionaries(var, st.integers(-3, 3), max_size=4))
def test_pairing_is_linear(f, g, d):
    assert (f + g).pair(d) == f.pair(d) + g.pair(d)


def test_multiplier_factor_composition():
    a = MultiplierFactor(L("x1"), 1)
    b = MultiplierFactor(L("-x1+x2"), 1)
    c = a * b
    assert c.form == L("x2") and c.sign == 1
    assert MultiplierFactor(LinearForm(), 2).is_trivial()
    assert not MultiplierFactor(LinearForm(), 1).is_trivial()


# ------------------------------------------------------------- cobordisms

def test_build_examples():
    xs = build_cobordism("X_S")
    xt = build_cobordism("X_T")
    assert xs.terms[0].s == L("x7+x6-x4-x5")
    assert xt.terms[5].t == L("x2+x5-x4-x1")
    assert xs.variables() == set(LABELS) and xt.variables() == set(LABELS)
    assert [t.tet for t in xs.terms if t.conjugate] == [2, 5]
    assert [t.tet for t in xt.terms if t.conjugate] == [1, 4, 5]
    with pytest.raises(ValueError):
        build_cobordism("X_U")


def test_corrections_are_recorded():
    assert build_cobordism("X_S").corrections == ("T5 argument 2: x5+x4-x5-x1 -> x7+x3-x5-x1",)
    assert build_cobordism("X_T").corrections == ("T4 argument 2: x3+x5-x2'-x6 -> x3'+x5-x2'-x6",)
    assert build_cobordism("X_S", verbatim=True).corrections == ()


@pytest.mark.parametrize("which", ["X_S", "X_T"])
@pytest.mark.parametrize("v", INTERNAL)
def test_internal_multipliers_trivial(which, v):
    assert edge_multiplier(build_cobordism(which), v).is_trivial()


def test_verbatim_arguments_break_internal_triviality():
    # the misprinted arguments are what the corrections repair
    assert not all(edge_multiplier(build_cobordism("X_S", verbatim=True), v).is_trivial() for v in INTERNAL)
    assert not all(edge_multiplier(build_cobordism("X_T", verbatim=True), v).is_trivial() for v in INTERNAL)


@pytest.mark.parametrize("which", ["X_S", "X_T"])
@pytest.mark.parametrize("v", BOUNDARY)
def test_boundary_multipliers_match_lemma(which, v):
    m = edge_multiplier(build_cobordism(which), v)
    assert m.form == L(BOUNDARY_MULTIPLIERS[v]) and m.sign == 1


def test_boundary_examples():
    assert edge_multiplier(build_cobordism("X_S"), "x1").form == L("2x3-2x2")
    assert edge_multiplier(build_cobordism("X_T"), "x2'").form == L("2x3'-2x1'")


@pytest.mark.parametrize("which", ["X_S", "X_T"])
@pytest.mark.parametrize("torus", TORI)
def test_torus_direction_trivial(which, torus):
    assert edge_multiplier(build_cobordism(which), {v: 1 for v in torus}).is_trivial()


def test_x4_contributions_match_proof():
    got = contributions(build_cobordism("X_S"), "x4")
    assert [t for t, _ in got] == [t for t, _, _ in XS_X4_CONTRIBUTIONS]
    for (t, m), (_, _, text) in zip(got, XS_X4_CONTRIBUTIONS):
        assert m.form == L(text.replace("-(", "").replace(")", "")).scale(-1 if text.startswith("-(") else 1)
    # signs may sit on different tetrahedra but their product is +1 in both
    proof_sign = 1
    for _, s, _ in XS_X4_CONTRIBUTIONS:
        proof_sign *= s
    total = MultiplierFactor(LinearForm())
    for _, m in got:
        total = total * m
    assert total.sign == proof_sign == 1 and total.form.is_zero()


def test_unknown_direction():
    with pytest.raises(UnknownDirection):
        edge_multiplier(build_cobordism("X_S"), "x9")
    with pytest.raises(UnknownDirection):
        edge_multiplier(build_cobordism("X_S"), {"y1": 1})


def test_non_integer_shift_rejected():
    with pytest.raises(ValueError):
        edge_multiplier(build_cobordism("X_S"), {"x4": Fraction(1, 2)})


# ------------------------------------------------------------ derivatives

@pytest.mark.parametrize("which", ["X_S", "X_T"])
def test_derivative_sum_vanishes(which):
    rep = kernel_derivative_sum(build_cobordism(which))
    assert rep.vanishes()
    assert rep.total.is_zero()


def test_derivative_sum_synthetic_term():
    k = CobordismKernel("synthetic", (KernelTerm(1, False, L("x1-x3"), L("x2-x1")),))
    assert kernel_derivative_sum(k).vanishes()
    k = CobordismKernel("synthetic", (KernelTerm(1, False, L("x1+x3"), L("x2-x1")),))
    assert not kernel_derivative_sum(k).vanishes()


def test_x_t_boundary_coefficients_balanced():
    rep = kernel_derivative_sum(build_cobordism("X_T"))
    assert all(row[2] == 0 for row in rep.per_argument)


# ---------------------------------------------------------- torus projection

def test_torus_projection_examples():
    assert torus_projection_check((-2, 0, 2, 0, -1, 1)) == (0, 0, 0)
    assert torus_projection_check((1, 0, 0, 0, 1, 0)) == (1, -2, 2)
    assert torus_projection_check((-4, 0, 4, 0, -2, 2)) == (-6, 6, -6)


@settings(max_examples=100)
@given(st.lists(st.integers(-5, 5), min_size=6, max_size=6), st.integers(2, 4))
def test_torus_projection_is_quadratic(params, k):
    # the left-hand sides are bilinear, so scaling by k multiplies them by k^2
    target = (-2, 2, -2)
    lhs = [r + t for r, t in zip(torus_projection_check(params), target)]
    scaled = torus_projection_check([k * x for x in params])
    assert list(scaled) == [k * k * v - t for v, t in zip(lhs, target)]
    assert torus_projection_check([k * x for x in (-2, 0, 2, 0, -1, 1)]) != (0, 0, 0)


# ------------------------------------------------------------------ report

def test_verify_report():
    for which in ("X_S", "X_T"):
        rep = verify(which)
        assert rep["internal_trivial"] and rep["boundary_match"]
        assert rep["tori_trivial"] and rep["derivative_sum_zero"]
        assert rep["weights_consistent"]


def test_weight_misprints_surface_in_report():
    assert verify("X_S")["weight_mismatches"] == {"x1": ["a1+a5+c3", "a1+a5+c6"],
                                                  "x4": ["a1+c2+b4+c5+c6", "c1+b2+b4+c5+c6"]}
    assert set(verify("X_T")["weight_mismatches"]) == {"x7"}
    assert charge_census(printed_weights("X_S")) != {}
