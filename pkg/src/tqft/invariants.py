"""Reduced state integrals for 4_1, 5_2 and 6_1 and the formulation checks built on them.

All one-dimensional integrals run along a horizontal line below the real axis
(inside the pole-free band) with the trapezoid rule of `qdl.line_integral`.
The two-dimensional 6_1 integral uses the same rule on a product of lines
through the stationary point of the classical potential.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from numpy.polynomial.legendre import leggauss

from .qdl import (DEFAULT_SPEC, ChargeTriple, IntegralSpec, ModularParameter,
                  NonConvergence, QDLError, TruncationUnstable, _phi_fast,
                  line_integral, nu_prefactor, tilde_prime, zeta_inv)
from .triangulation import Shape, knot_family_path, load_corpus, weight


class UnsupportedKnot(QDLError):
    pass


class KnotId(str, Enum):
    K4_1 = "4_1"
    K5_2 = "5_2"
    K6_1 = "6_1"

    @classmethod
    def parse(cls, s) -> "KnotId":
        if isinstance(s, cls):
            return s
        key = str(s).upper().lstrip("K")
        for k in cls:
            if k.value == key:
                return k
        raise UnsupportedKnot(f"unsupported knot {s!r}")

    def __str__(self):
        return self.value


@dataclass
class InvariantResult:
    value: complex
    spec_used: IntegralSpec
    convergence_report: dict
    prefactors: dict = field(default_factory=dict)
    flagged: bool = False

    @property
    def reduced(self) -> complex:
        """The value with every symbolic prefactor divided out."""
        out = self.value
        for f in self.prefactors.values():
            out /= f
        return out

    def as_dict(self) -> dict:
        return {"value_re": self.value.real, "value_im": self.value.imag,
                "spec": self.spec_used.as_dict(),
                "convergence_report": dict(self.convergence_report)}


def _require_real(p: ModularParameter):
    if not p.is_real or not 0 < p.b.real <= 1:
        raise ValueError("b must be real in (0, 1]")


def _line(f, depth, spec, center=0.0, h0=0.1, scale="value", atol=0.0):
    return line_integral(f, -depth, spec, center=center, h0=h0, scale=scale, atol=atol)


def _result(r, spec, **extra) -> InvariantResult:
    rep = {"last_refinement_delta": r.last_delta, "lattice_M_used": 0, "h": r.h, "L": r.L}
    rep.update(extra)
    flagged = r.last_delta >= spec.rel_tol * max(abs(r.value), spec.abs_tol)
    return InvariantResult(r.value, spec, rep, flagged=flagged)


def mid_depth(p: ModularParameter) -> float:
    """Middle of the pole-free band 0 < depth < Q/2 for real arguments."""
    return p.Q.real / 4


# ---------------------------------------------------------------- kernels

def kernel_density(ch: ChargeTriple, x0, x2, x3, p: ModularParameter,
                   spec: IntegralSpec = DEFAULT_SPEC, sign: int = 1):
    """Density of <x0,x2|T(a,c)|x1,x3> once the delta function fixes x1 = x0 + x2.

    For sign -1 the kernel is <x0,x2|Tbar|x1,x3> = conj <x1,x3|T|x0,x2>; its
    delta function fixes x1 = x0 - x3 and the density is returned in terms of
    the same three free arguments.
    """
    if sign == 1:
        d = np.asarray(x3) - np.asarray(x2)
        return tilde_prime(ch.a, ch.c, d, p, spec.contour_epsilon) * np.exp(2j * np.pi * np.asarray(x0) * d)
    if sign == -1:
        x1 = np.asarray(x0) - np.asarray(x3)
        d = np.asarray(x2) - np.asarray(x3)
        return np.conj(tilde_prime(ch.a, ch.c, d, p, spec.contour_epsilon) * np.exp(2j * np.pi * x1 * d))
    raise ValueError("sign must be +1 or -1")


def psi_charged(a: float, c: float, x, p: ModularParameter, eps: float = 0.05):
    """Vectorized psi_{a,c}(x) = nu_{a,c} e^{-4 pi i c_b a (x - c_b(a+c))} / Phi_b(x - 2 c_b (a+c))."""
    cb = p.cb
    x = np.asarray(x, dtype=complex)
    return (nu_prefactor(a, c, p) * np.exp(-4j * np.pi * cb * a * (x - cb * (a + c)))
            / _phi_fast(x - 2 * cb * (a + c), p, eps))


# ------------------------------------------------------------------ 4_1

def chi41_band(x: complex, p: ModularParameter) -> tuple[float, float]:
    """Admissible depths d (integration line Im y = -d) for chi_41(x)."""
    Q = p.Q.real
    im = complex(x).imag
    lo = max(-Q / 2, im - Q / 2)
    hi = min(0.0, 2 * im, -im)
    if lo >= hi:
        raise NonConvergence(f"no admissible contour for x = {x}")
    return -hi, -lo


def _chi41_integrand(x: complex, p: ModularParameter, eps: float):
    def f(y):
        return _phi_fast(x - y, p, eps) / _phi_fast(y, p, eps) * np.exp(2j * np.pi * x * (2 * y - x))
    return f


def chi_41(x, p: ModularParameter, spec: IntegralSpec = DEFAULT_SPEC,
           depth: float | None = None, atol: float = 0.0) -> InvariantResult:
    """chi_41(x) = int Phi_b(x - y) / Phi_b(y) e^{2 pi i x (2y - x)} dy along Im y = -depth.

    On that line the exponential has modulus proportional to e^{4 pi Re(x) depth},
    so without an explicit depth the line sits in the upper quarter of the
    admissible band for Re x > 1/2, the lower quarter for Re x < -1/2 and the
    middle otherwise. atol is an absolute error the caller is willing to accept.
    """
    _require_real(p)
    x = complex(x)
    eps = spec.contour_epsilon
    lo, hi = chi41_band(x, p)
    if depth is None:
        t = 0.25 if x.real > 0.5 else 0.75 if x.real < -0.5 else 0.5
        depth = lo + (hi - lo) * t
    if not lo < depth < hi:
        raise NonConvergence(f"depth {depth} outside the admissible band ({lo}, {hi})")
    # off the real axis the integral can be far smaller than its integrand
    scale = "value" if x.imag == 0 and abs(x.real) <= 0.5 else "l1"
    r = _line(_chi41_integrand(x, p, eps), depth, spec, center=x.real, scale=scale, atol=atol)
    return _result(r, spec, depth=depth)


# ------------------------------------------------------------------ 5_2

def chi_52(u, p: ModularParameter, spec: IntegralSpec = DEFAULT_SPEC,
           depth: float | None = None) -> InvariantResult:
    """chi_52(u) = e^{-pi i/3} int e^{pi i (w-u)(w+u)} / (Phi(w+u) Phi(w-u) Phi(w)) dw."""
    _require_real(p)
    u = float(u)
    eps = spec.contour_epsilon
    depth = mid_depth(p) if depth is None else depth
    if not 0 < depth < p.Q.real / 2:
        raise NonConvergence("depth outside the admissible band")

    def f(w):
        return (np.exp(1j * np.pi * (w - u) * (w + u))
                / (_phi_fast(w + u, p, eps) * _phi_fast(w - u, p, eps) * _phi_fast(w, p, eps)))

    r = _line(f, depth, spec)
    res = _result(r, spec, depth=depth)
    res.value *= cmath.exp(-1j * math.pi / 3)
    res.prefactors = {"e^(-i pi/3)": cmath.exp(-1j * math.pi / 3)}
    return res


# ------------------------------------------------------------------ 6_1

# stationary point of the classical potential in the rescaled variables
# X = 2 pi b x, Z = 2 pi b z (see volume.volume_from_saddle)
def _saddle_xz():
    from .volume import volume_from_saddle
    return volume_from_saddle().saddle_xz


def j61_integrand(x, z, p: ModularParameter, form: str = "direct", eps: float = 0.05):
    """Phi(x) Phi(z) / (Phi(-x) Phi(z - x - c_b)) e^{pi i z^2 - 4 pi i c_b z}.

    form="inverted" replaces Phi(x)/Phi(-x) by zeta_inv Phi(x)^2 e^{-pi i x^2}.
    """
    cb = p.cb
    x = np.asarray(x, dtype=complex)
    z = np.asarray(z, dtype=complex)
    tail = _phi_fast(z, p, eps) / _phi_fast(z - x - cb, p, eps) * np.exp(1j * np.pi * z * z - 4j * np.pi * cb * z)
    if form == "direct":
        return _phi_fast(x, p, eps) / _phi_fast(-x, p, eps) * tail
    if form == "inverted":
        return zeta_inv(p) * _phi_fast(x, p, eps) ** 2 * np.exp(-1j * np.pi * x * x) * tail
    raise ValueError(f"unknown form {form!r}")


def _j61_grid(p, eps, h, L, cx, cz, dx, dz):
    cb = p.cb
    n = int(math.ceil(L / h))
    j = np.arange(-n, n + 1)
    x = cx + j * h + 1j * dx
    z = cz + j * h + 1j * dz
    A = _phi_fast(x, p, eps) / _phi_fast(-x, p, eps)
    B = _phi_fast(z, p, eps) * np.exp(1j * np.pi * z * z - 4j * np.pi * cb * z)
    # z_k - x_j depends on k - j only
    d = np.arange(-2 * n, 2 * n + 1)
    C = 1 / _phi_fast((cz - cx) + d * h + 1j * (dz - dx) - cb, p, eps)
    Mx = C[(j[:, None] - j[None, :]) + 2 * n]
    W = B[:, None] * Mx * A[None, :]
    val = h * h * complex(W.sum())
    edge = max(np.abs(W[[0, -1], :]).max(), np.abs(W[:, [0, -1]]).max())
    return val, float(edge), float(np.abs(W).max())


def j_61(hbar: float, spec: IntegralSpec = DEFAULT_SPEC, contour: tuple | None = None,
         h0: float = 0.04) -> InvariantResult:
    """J(hbar, 0) for 6_1 as a double integral over shifted lines.

    The lines pass through the stationary point of the classical potential
    (or the point given as `contour` = (x0, z0) in the original variables).
    Step halving stops when successive values agree to rel_tol; the window is
    grown until the integrand on its boundary is negligible.
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    p = ModularParameter.from_hbar(hbar)
    _require_real(p)
    b = p.b.real
    if contour is None:
        X, Z = _saddle_xz()
        contour = (X / (2 * math.pi * b), Z / (2 * math.pi * b))
    x0, z0 = complex(contour[0]), complex(contour[1])
    eps = spec.contour_epsilon
    L = 6 * 0.3 / b
    for _ in range(12):
        val, edge, peak = _j61_grid(p, eps, h0, L, x0.real, z0.real, x0.imag, z0.imag)
        if edge <= spec.abs_tol * 1e-3 * max(peak, 1e-300):
            break
        L *= 1.3
    else:
        raise NonConvergence("6_1 integrand does not decay on the chosen lines")
    h = h0
    delta = math.inf
    for _ in range(spec.max_quad_depth):
        h /= 1.5
        new, _, _ = _j61_grid(p, eps, h, L, x0.real, z0.real, x0.imag, z0.imag)
        delta = abs(new - val)
        val = new
        if delta <= spec.rel_tol * 1e-2 * abs(val):
            break
    else:
        raise NonConvergence(f"6_1 quadrature not converged (last change {delta:.3g})")
    rep = {"last_refinement_delta": delta, "lattice_M_used": 0, "h": h, "L": L,
           "contour": [[x0.real, x0.imag], [z0.real, z0.imag]]}
    return InvariantResult(val, spec, rep, flagged=delta >= spec.rel_tol * abs(val))


# ---------------------------------------------------- new formulation, 4_1

def _shape_tuple(sh) -> tuple[float, float, float]:
    if isinstance(sh, Shape):
        return float(sh.a), float(sh.b), float(sh.c)
    a, b, c = (float(v) for v in sh)
    return a, b, c


def check_balanced_41(shapes: dict, tol: float = 1e-12) -> None:
    M = load_corpus("4_1")
    sh = {t: Shape(*_shape_tuple(shapes[t])) for t in (1, 2)}
    for t, s in sh.items():
        if min(s.a, s.b, s.c) <= 0 or abs(s.a + s.b + s.c - 0.5) > tol:
            raise ValueError(f"tetrahedron {t}: angles must be positive and sum to 1/2")
    for e in M.internal_edges():
        if abs(float(weight(M, sh, e)) - 1) > tol:
            raise ValueError(f"edge {M.labels[e]} is not balanced")


def z_new_41(shapes: dict, p: ModularParameter, spec: IntegralSpec = DEFAULT_SPEC,
             n_quad: int = 40) -> InvariantResult:
    """Lattice state integral of the two-tetrahedron 4_1 complement.

    shapes maps 1 (positive tetrahedron) and 2 (negative) to Shape or (a, b, c).
    The double sum runs over |m|, |n| <= lattice_M. The integrand over the
    unit square depends on s = y - x only, so the square collapses to
    int_{-1}^{1} (1 - |s|) F(s) ds, done by Gauss-Legendre on each half.
    """
    _require_real(p)
    check_balanced_41(shapes)
    ap, _, cp = _shape_tuple(shapes[1])
    am, _, cm = _shape_tuple(shapes[2])
    eps = spec.contour_epsilon

    def value(M, n):
        xg, wg = leggauss(n)
        s = np.concatenate([(xg - 1) / 2, (xg + 1) / 2])
        w = np.concatenate([wg, wg]) / 2 * (1 - np.abs(s))
        m = np.arange(-M, M + 1)
        ph = np.exp(4j * np.pi * s[:, None] * m[None, :])
        G1 = (tilde_prime(ap, cp, s[:, None] + m[None, :], p, eps) * ph).sum(1)
        G2 = (np.conj(tilde_prime(am, cm, -s[:, None] + m[None, :], p, eps)) * ph).sum(1)
        return complex((G1 * G2 * w).sum())

    M = spec.lattice_M
    val = value(M, n_quad)
    ref_M = value(2 * M, n_quad)
    if abs(ref_M - val) > 10 * spec.rel_tol * abs(ref_M):
        raise TruncationUnstable(f"lattice sum not converged at M={M}")
    ref_q = value(M, n_quad + n_quad // 2)
    delta = abs(ref_q - val)
    rep = {"last_refinement_delta": delta, "lattice_M_used": M, "truncation_delta": abs(ref_M - val),
           "n_quad": n_quad}
    return InvariantResult(val, spec, rep, flagged=delta >= spec.rel_tol * abs(val))


def wgz_transform(f, u: complex, v: complex, P: int | None = None, tol: float = 1e-13,
                  max_terms: int = 60, check: bool = True) -> tuple[complex, dict]:
    """(W f)(u, v) = e^{pi i u v} sum_m f(u + m) e^{2 pi i m v}.

    With P given the sum is cut at |m| <= P; otherwise terms are added in each
    direction until two consecutive ones are below tol relative to the sum.
    """
    terms = {}

    def term(m):
        if m not in terms:
            terms[m] = complex(f(u + m)) * cmath.exp(2j * math.pi * m * v)
        return terms[m]

    total = term(0)
    if P is not None:
        for m in range(1, P + 1):
            total += term(m) + term(-m)
    else:
        for direction in (1, -1):
            small = 0
            m = 0
            while small < 2:
                m += direction
                if abs(m) > max_terms:
                    if check:
                        raise NonConvergence("WGZ series does not converge")
                    break
                t = term(m)
                total += t
                small = small + 1 if abs(t) <= tol * max(abs(total), 1e-300) else 0
    ms = sorted(terms)
    edge = max(abs(terms[ms[0]]), abs(terms[ms[-1]]))
    if check and edge > 1e-6 * max(abs(total), 1e-300):
        raise NonConvergence("WGZ series terms do not decay")
    info = {"terms": len(ms), "range": [ms[0], ms[-1]], "edge_term": edge}
    return cmath.exp(1j * math.pi * u * v) * total, info


def formulation_rhs_41(shapes: dict, p: ModularParameter, spec: IntegralSpec = DEFAULT_SPEC,
                       literal: bool = False, P: int | None = None) -> InvariantResult:
    """nu_{c+,b+} nu_{b-,c-} zeta_inv e^{-pi i/6} W(chi_41)(u, v) with u = 2 c_b (b+ - b-).

    The lattice integral reproduces the chain of substitutions term by term
    only with v = 2 c_b (2 b- + c-). literal=True uses v = 2 b- + c- instead;
    chi_41(p) then tends to a nonzero constant as p -> +inf and the series
    diverges, so a cut-off P is required and the check is disabled.
    """
    check_balanced_41(shapes)
    ap, bp, cp = _shape_tuple(shapes[1])
    am, bm, cm = _shape_tuple(shapes[2])
    cb = p.cb
    u = 2 * cb * (bp - bm)
    v = (2 * bm + cm) if literal else 2 * cb * (2 * bm + cm)
    chi_vals = {}
    size = abs(chi_41(u, p, spec).value)

    def f(x):
        # term m carries the weight e^{2 pi i m v}; spend the error budget accordingly
        m = round((x - u).real)
        weight = abs(cmath.exp(2j * math.pi * m * v))
        atol = spec.rel_tol * 1e-2 * size / max(weight, 1e-300)
        r = chi_41(x, p, spec, atol=atol)
        chi_vals[complex(x)] = r
        return r.value

    if literal and P is None:
        raise ValueError("the literal series needs an explicit cut-off P")
    W, info = wgz_transform(f, u, v, P=P, check=not literal)
    pref = {"nu_(c+,b+)": nu_prefactor(cp, bp, p), "nu_(b-,c-)": nu_prefactor(bm, cm, p),
            "zeta_inv": zeta_inv(p), "e^(-i pi/6)": cmath.exp(-1j * math.pi / 6)}
    val = W
    for fct in pref.values():
        val *= fct
    delta = max((r.convergence_report["last_refinement_delta"] for r in chi_vals.values()), default=0.0)
    rep = {"last_refinement_delta": delta, "lattice_M_used": 0, "wgz": info,
           "u": [u.real, u.imag], "v": [complex(v).real, complex(v).imag]}
    return InvariantResult(val, spec, rep, prefactors=pref)


# ------------------------------------------------------ H-triangulations

_HTRI = {KnotId.K4_1: ("4_1_H", 3), KnotId.K5_2: ("5_2_H", 0), KnotId.K6_1: ("6_1_H", 1)}


def renormalization_factor(a: float, c: float, p: ModularParameter, negative: bool = False) -> complex:
    """Phi_b(2 c_b a - c_b) times psi~'_{a,c}(0) (or its conjugate), in closed form.

    psi~'_{a,c}(0) carries 1/Phi_b(2 c_b a - c_b), which cancels exactly; for a
    negative tetrahedron the conjugate is paired through the inversion relation.
    """
    cb = p.cb
    bb = 0.5 - a - c
    phase = cmath.exp(4j * math.pi * cb * cb * c * (c + bb)) * nu_prefactor(c, bb, p)
    if not negative:
        return cmath.exp(-1j * math.pi / 12) * phase
    w = 2 * cb * a - cb
    return cmath.exp(1j * math.pi / 12) * phase.conjugate() * cmath.exp(1j * math.pi * w * w) / zeta_inv(p)


def _reduced_41(S, p, spec):
    a1, b1, c1 = S[1]
    a2, b2, c2 = S[2]
    eps = spec.contour_epsilon
    f = lambda y: (psi_charged(c1, b1, y, p, eps) * psi_charged(b2, c2, y, p, eps)
                   * np.exp(1j * np.pi * y * y))
    return line_integral(f, 0.0, spec, h0=0.1), cmath.exp(-1j * math.pi / 6)


def _reduced_52(S, p, spec):
    a1, b1, c1 = S[1]
    a2, b2, c2 = S[2]
    a3, b3, c3 = S[3]
    eps = spec.contour_epsilon
    f = lambda z: (psi_charged(c1, b1, z, p, eps) * psi_charged(b2, a2, z, p, eps)
                   * psi_charged(c3, b3, z, p, eps) * np.exp(1j * np.pi * z * z))
    return line_integral(f, 0.0, spec, h0=0.1), cmath.exp(-1j * math.pi / 3)


def richardson(eps_list, values) -> tuple[complex, complex]:
    """Two-point first-order Richardson limit from the two smallest eps, plus the
    change against the same extrapolation one step earlier."""
    e = list(eps_list)
    v = list(values)
    r = lambda i: (e[i - 1] * v[i] - e[i] * v[i - 1]) / (e[i - 1] - e[i])
    last = r(len(e) - 1)
    prev = r(len(e) - 2) if len(e) > 2 else v[-1]
    return last, abs(last - prev)


def htri_limit(knot, epsilon_sequence, p: ModularParameter, spec: IntegralSpec = DEFAULT_SPEC,
               slack: str | None = None) -> InvariantResult:
    """Renormalized H-triangulation partition function as the knot angle tends to 0.

    Shapes follow the straight path of `triangulation.knot_family_path`, with
    the degenerating angle equal to eps. At each eps the reduced integral is
    multiplied by the exact renormalization factor; the eps -> 0 value comes
    from Richardson extrapolation.
    """
    _require_real(p)
    knot = KnotId.parse(knot)
    eps_list = [float(e) for e in epsilon_sequence]
    if len(eps_list) < 2 or any(x <= y for x, y in zip(eps_list, eps_list[1:])) or eps_list[-1] <= 0:
        raise ValueError("epsilon_sequence must be positive and strictly decreasing")
    if knot is KnotId.K6_1:
        return _htri_61(eps_list, p, spec, slack)
    name, ktet = _HTRI[knot]
    M = load_corpus(name)
    path = knot_family_path(M, "x'", slack)
    if eps_list[0] >= float(path.positive_up_to()):
        raise ValueError("eps too large for a positive shape structure")
    reduce = _reduced_41 if knot is KnotId.K4_1 else _reduced_52
    values, deltas, pref = [], [], {}
    for e in eps_list:
        sh = path.shapes(Fraction(e).limit_denominator(10 ** 12))
        S = {t: (float(s.a), float(s.b), float(s.c)) for t, s in sh.items()}
        r, phase = reduce(S, p, spec)
        ak, _, ck = S[ktet]
        R = renormalization_factor(ak, ck, p)
        values.append(R * phase * r.value)
        deltas.append(r.last_delta)
    limit, rdelta = richardson(eps_list, values)
    rep = {"last_refinement_delta": max(deltas), "lattice_M_used": 0,
           "epsilons": eps_list, "values": [[v.real, v.imag] for v in values],
           "richardson_delta": rdelta, "slack_edge": path.slack}
    return InvariantResult(limit, spec, rep, prefactors=pref)


# ------------------------------------------------ 6_1 reduced forms, exact

@dataclass(frozen=True)
class ReducedForm:
    """e^{pi i phase/12} conj(psi~'_{a1,c1}(0)) int prod psi(arg) e^{2 pi i quadratic}.

    factors are (name, LinearForm) pairs; quadratic maps sorted variable pairs
    to rational coefficients. Everything is exact, so equality is structural.
    """
    phase: Fraction
    factors: tuple
    quadratic: tuple

    @classmethod
    def build(cls, phase, factors, quadratic: dict) -> "ReducedForm":
        q = {tuple(sorted(k)): Fraction(v) for k, v in quadratic.items() if v}
        return cls((Fraction(phase) + 12) % 24 - 12,
                   tuple(sorted(((n, a) for n, a in factors), key=lambda f: (f[0], str(f[1])))),
                   tuple(sorted(q.items())))

    def substitute(self, var: str, form) -> "ReducedForm":
        from .mcg import LinearForm

        def sub(lf):
            k = lf.coeff(var)
            rest = LinearForm({v: c for v, c in lf.coeffs.items() if v != var}, lf.constant)
            return rest + form.scale(k)

        # quadratic: expand each monomial with the substituted linear form
        q: dict = {}
        for (u, v), c in self.quadratic:
            fu = form if u == var else LinearForm({u: 1})
            fv = form if v == var else LinearForm({v: 1})
            for s, cs in fu.coeffs.items():
                for t, ct in fv.coeffs.items():
                    key = tuple(sorted((s, t)))
                    q[key] = q.get(key, 0) + c * cs * ct
        return ReducedForm.build(self.phase, [(n, sub(a)) for n, a in self.factors], q)

    def tilde_to_plain(self, name: str, new_name: str) -> "ReducedForm":
        """psi~_{c,b}(y) = e^{-pi i/12} e^{pi i y^2} psi_{b,a}(y) applied to one factor."""
        out, q, done = [], dict(self.quadratic), False
        for n, a in self.factors:
            if n == name and not done:
                for s, cs in a.coeffs.items():
                    for t, ct in a.coeffs.items():
                        key = tuple(sorted((s, t)))
                        q[key] = q.get(key, 0) + Fraction(1, 2) * cs * ct
                out.append((new_name, a))
                done = True
            else:
                out.append((n, a))
        if not done:
            raise KeyError(name)
        return ReducedForm.build(self.phase - 1, out, q)

    def __str__(self):
        fs = " ".join(f"{n}({a})" for n, a in self.factors)
        qs = " + ".join(f"{c}*{u}{v}" for (u, v), c in self.quadratic)
        return f"e^(pi i {self.phase}/12) conj(psi~'_(a1,c1)(0)) int {fs} e^(2 pi i ({qs}))"


def reduced_form_61(route: str) -> ReducedForm:
    """Reduced 6_1 H-triangulation integrand reached by either formulation.

    "original": the face-state integral after the delta functions and the u, q
    and s Fourier integrations, in the variables where the arguments read
    (-z, -z, -x, x - z); the final z -> -z is applied here.
    "new": the lattice integral after the x', x, v integrations and the
    lattice-sum unfolding, ending with one psi~ of the fourth tetrahedron that
    is rewritten here.
    """
    from .mcg import LinearForm as L
    P = L.parse
    if route == "original":
        # phases: -2 (u), -1 (conj T3), -2 (q), -2 (s)
        f = ReducedForm.build(-2 - 1 - 2 - 2,
                              [("psi_b2a2", P("-z")), ("psi_b3c3", P("-z")),
                               ("psi_b4a4", P("-x")), ("psi_b5a5", P("x-z"))],
                              {("x", "z"): -2, ("z", "z"): Fraction(3, 2), ("x", "x"): 1})
        return f.substitute("z", P("-z"))
    if route == "new":
        # phases: -5 after the T2..T5 reductions, -1 for psi~_{c5,b5}
        f = ReducedForm.build(-5 - 1,
                              [("psi_b2a2", P("z")), ("psi_b3c3", P("z")),
                               ("psit_c4b4", P("-x")), ("psi_b5a5", P("x+z"))],
                              {("x", "z"): 2, ("z", "z"): Fraction(3, 2), ("x", "x"): Fraction(1, 2)})
        return f.tilde_to_plain("psit_c4b4", "psi_b4a4")
    raise ValueError(f"unknown route {route!r}")


def _htri_61(eps_list, p, spec, slack):
    orig, new = reduced_form_61("original"), reduced_form_61("new")
    if orig != new:
        raise QDLError("6_1 formulations disagree:\n" + str(orig) + "\n" + str(new))
    raise UnsupportedKnot(
        "6_1: both formulations reduce to the same exact expression "
        f"({orig}); its numerical evaluation on R^2 is not supported")
