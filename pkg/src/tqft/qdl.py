"""Faddeev's quantum dilogarithm and its relatives.

Two independent evaluators for Phi_b are provided:

* a contour integral of ``e^{-2izw} / (4 sinh(bw) sinh(w/b) w)`` along a
  tilted V-shaped path that passes above the origin on a small arc;
* the quotient of two infinite q-Pochhammer products, valid when Im(b^2) > 0.

Neither uses the inversion relation, so the identity residuals computed here
test genuinely independent quantities.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import spence


class QDLError(Exception):
    pass


class PoleProximity(QDLError):
    pass


class NonConvergence(QDLError):
    pass


class BranchCut(QDLError):
    pass


class DivergentParameter(QDLError):
    pass


class TruncationUnstable(QDLError):
    pass


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class ModularParameter:
    """The quantum parameter b together with c_b, q and q~."""

    b: complex

    def __post_init__(self):
        b = complex(self.b)
        if b == 0 or b.real <= 0:
            raise ValueError("b must satisfy Re(b) > 0")
        object.__setattr__(self, "b", b)

    @classmethod
    def from_hbar(cls, hbar: float) -> "ModularParameter":
        if not hbar > 0:
            raise ValueError("hbar must be positive")
        return cls(math.sqrt(hbar))

    @property
    def cb(self) -> complex:
        return 0.5j * (self.b + 1 / self.b)

    @property
    def Q(self) -> complex:
        return self.b + 1 / self.b

    @property
    def q(self) -> complex:
        return cmath.exp(1j * math.pi * self.b ** 2)

    @property
    def q_tilde(self) -> complex:
        return cmath.exp(-1j * math.pi / self.b ** 2)

    @property
    def is_real(self) -> bool:
        return self.b.imag == 0


@dataclass(frozen=True)
class ChargeTriple:
    a: float
    c: float

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0 and self.b_charge > 0):
            raise ValueError(f"invalid charges a={self.a}, c={self.c}")

    @property
    def b_charge(self) -> float:
        return 0.5 - self.a - self.c


@dataclass(frozen=True)
class IntegralSpec:
    contour_epsilon: float = 0.05
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    lattice_M: int = 24
    max_quad_depth: int = 12

    def __post_init__(self):
        if not (self.contour_epsilon > 0 and self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("contour_epsilon, rel_tol and abs_tol must be positive")
        if self.lattice_M < 0 or self.max_quad_depth < 1:
            raise ValueError("lattice_M must be >= 0 and max_quad_depth >= 1")

    def check(self, p: ModularParameter) -> None:
        """Reject contour deviations that reach the first pole at c_b."""
        if self.contour_epsilon >= p.cb.imag:
            raise ValueError("contour_epsilon must stay below Im c_b")

    def as_dict(self) -> dict:
        return {"contour_epsilon": self.contour_epsilon, "rel_tol": self.rel_tol,
                "abs_tol": self.abs_tol, "lattice_M": self.lattice_M,
                "max_quad_depth": self.max_quad_depth}


DEFAULT_SPEC = IntegralSpec()


def zeta_inv(p: ModularParameter) -> complex:
    return cmath.exp(1j * math.pi * (1 + 2 * p.cb ** 2) / 6)


def nu_prefactor(a: float, c: float, p: ModularParameter) -> complex:
    return cmath.exp(-1j * math.pi * p.cb ** 2 * (4 * (a - c) + 1) / 6)


# ------------------------------------------------------- contour evaluator

_XG, _WG = leggauss(20)
_XA, _WA = leggauss(48)
_CHUNK = 1000


def _panels(edges):
    a, b = edges[:-1], edges[1:]
    t = ((b - a)[:, None] * (_XG[None, :] + 1) / 2 + a[:, None]).ravel()
    w = ((b - a)[:, None] * _WG[None, :] / 2).ravel()
    return t, w


def _contour_nodes(b: complex, eps: float, up: bool, rate: float, tol=1e-17):
    # V-shaped path: rays at angle +-th, joined by an arc of radius eps above 0.
    # Tilting toward the half plane where e^{-2izw} decays keeps node count fixed.
    th = (math.pi / 2 - abs(cmath.phase(b))) / 2
    if not up:
        th = -th
    T = -math.log(tol) / rate
    s = min(abs(b), 1 / abs(b))
    edges = [eps]
    while edges[-1] < s:
        edges.append(min(2 * edges[-1], s))
    while edges[-1] < T:
        edges.append(edges[-1] + s)
    t, wt = _panels(np.array(edges))
    ang = (_XA + 1) / 2 * (th - (math.pi - th)) + (math.pi - th)
    wang = _WA * (th - (math.pi - th)) / 2
    arc = eps * np.exp(1j * ang)
    nodes = np.concatenate([-t * np.exp(-1j * th), arc, t * np.exp(1j * th)])
    weights = np.concatenate([np.exp(-1j * th) * wt, 1j * arc * wang, np.exp(1j * th) * wt])
    return nodes, weights


def log_phi_contour(z, b: complex, eps: float = 0.05):
    """log Phi_b(z) from the defining integral; needs |Im z| < Im c_b."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.empty_like(flat)
    Q = b + 1 / b
    th = (math.pi / 2 - abs(cmath.phase(b))) / 2
    for up in (True, False):
        mask = flat.real <= 0 if up else flat.real > 0
        if not mask.any():
            continue
        zz = flat[mask]
        rate = (Q.real - 2 * np.abs(zz.imag).max()) * math.cos(th + abs(cmath.phase(b)))
        if rate <= 0:
            raise NonConvergence("argument outside the strip of the integral representation")
        W, D = _contour_nodes(b, eps, up, max(rate, 1e-3))
        g = D / (4 * np.sinh(b * W) * np.sinh(W / b) * W)
        res = np.empty(len(zz), dtype=complex)
        for i in range(0, len(zz), _CHUNK):
            res[i:i + _CHUNK] = np.exp(-2j * np.outer(zz[i:i + _CHUNK], W)) @ g
        out[mask] = res
    return out.reshape(z.shape)


def _normalized_b(b: complex) -> complex:
    # Phi_b is symmetric under b -> 1/b; work with |b| <= 1
    return b if abs(b) <= 1 else 1 / b


def _phi_contour(z, b: complex, eps: float):
    b = _normalized_b(b)
    z = np.array(z, dtype=complex).ravel()
    fac = np.ones_like(z)
    lim = 0.75 * (0.5 * (b + 1 / b)).real
    # walk Im z into the strip with the functional equation
    for _ in range(10000):
        hi = z.imag > lim
        lo = z.imag < -lim
        if not (hi.any() or lo.any()):
            break
        fac[hi] /= 1 + np.exp(2 * np.pi * b * (z[hi] - 0.5j * b))
        z[hi] -= 1j * b
        fac[lo] *= 1 + np.exp(2 * np.pi * b * (z[lo] + 0.5j * b))
        z[lo] += 1j * b
    else:
        raise NonConvergence("argument too far from the real axis")
    return fac * np.exp(log_phi_contour(z, b, eps))


# ------------------------------------------------------- product evaluator

def _log_pochhammer(x, q: complex, tol=1e-17, max_terms=200000):
    aq = abs(q)
    if aq >= 1:
        raise DivergentParameter("|q| must be < 1")
    x = np.asarray(x, dtype=complex)
    xmax = max(float(np.abs(x).max()), 1e-300)
    if aq == 0 or xmax <= tol:
        n = 1
    else:
        n = int(math.ceil(math.log(tol / xmax) / math.log(aq))) + 2
    n = max(n, 1)
    if n > max_terms:
        raise NonConvergence("q-product needs too many factors")
    qs = q ** np.arange(n)
    out = np.zeros(x.shape, dtype=complex)
    flat = x.ravel()
    res = np.empty_like(flat)
    for i in range(0, len(flat), 256):
        res[i:i + 256] = np.log(1 - np.outer(flat[i:i + 256], qs)).sum(axis=1)
    out[...] = res.reshape(x.shape)
    return out


def phi_product(z, p: ModularParameter):
    """Phi_b(z) as a quotient of q-Pochhammer symbols; requires Im(b^2) > 0."""
    b = p.b
    if (b * b).imag <= 0:
        raise DivergentParameter("product form needs Im(b^2) > 0")
    z = np.asarray(z, dtype=complex)
    cb = p.cb
    q2 = cmath.exp(2j * math.pi * b * b)
    qt2 = cmath.exp(-2j * math.pi / (b * b))
    num = _log_pochhammer(np.exp(2 * np.pi * (z + cb) * b), q2)
    den = _log_pochhammer(np.exp(2 * np.pi * (z - cb) / b), qt2)
    return np.exp(num - den)


# products converge like |q^2|^n; below this the integral is cheaper
PRODUCT_MIN_IM_B2 = 0.05


def _check_poles(z, p: ModularParameter, tol: float):
    b = _normalized_b(p.b)
    cb = p.cb
    z = np.asarray(z, dtype=complex).ravel()
    step = abs(b)
    for sign in (1, -1):
        w = sign * z - cb
        # only lattice points with small m, n can be near a finite z
        mmax = int(np.abs(w).max() / step) + 2 if w.size else 0
        for m in range(mmax + 1):
            for n in range(int(mmax * abs(b) ** 2) + 2):
                pt = 1j * b * m + 1j * n / b
                if w.size and np.min(np.abs(w - pt)) < tol:
                    kind = "pole" if sign == 1 else "zero"
                    raise PoleProximity(f"argument within {tol} of a {kind} of Phi_b")


def phi(z, p: ModularParameter, spec: IntegralSpec = DEFAULT_SPEC, method: str = "auto"):
    """Phi_b(z); scalar in, scalar out, arrays broadcast."""
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_poles(zz, p, spec.abs_tol)
    if method == "auto":
        method = "product" if (p.b ** 2).imag > PRODUCT_MIN_IM_B2 else "contour"
    if method == "product":
        out = phi_product(zz, p)
    elif method == "contour":
        out = _phi_contour(zz, p.b, spec.contour_epsilon).reshape(zz.shape)
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(out[0]) if scalar else out


def _phi_fast(z, p: ModularParameter, eps: float = 0.05):
    # no pole screening; for dense quadrature grids known to avoid the lattice
    if (p.b ** 2).imag > PRODUCT_MIN_IM_B2:
        return phi_product(np.asarray(z, dtype=complex), p)
    z = np.asarray(z, dtype=complex)
    return _phi_contour(z, p.b, eps).reshape(z.shape)


# ------------------------------------------------------------- dilogarithms

def li2(x):
    """Principal branch of the Euler dilogarithm."""
    x = complex(x)
    if x.imag == 0 and x.real > 1:
        raise BranchCut("Li2 has its branch cut on (1, inf)")
    return complex(spence(1 - x))


def qseries(kind: str, x: complex, q: complex) -> complex:
    if abs(q) >= 1:
        raise DivergentParameter("|q| must be < 1")
    if kind == "pochhammer_inf":
        return complex(np.exp(_log_pochhammer(np.array([x]), q)[0]))
    if kind == "li2q":
        if abs(x) >= 1:
            raise DivergentParameter("li2q needs |x| < 1")
        total, n, term = 0j, 1, 1.0
        xn, qn = x, q
        while True:
            term = xn / (n * (1 - qn))
            total += term
            if abs(term) < 1e-18 * max(abs(total), 1e-300) or n > 100000:
                break
            n += 1
            xn *= x
            qn *= q
        return total
    raise ValueError(f"unknown kind {kind!r}")


# ------------------------------------------------------------ psi functions

def psi_family(kind: str, ch: ChargeTriple, x, p: ModularParameter,
               spec: IntegralSpec = DEFAULT_SPEC):
    cb = p.cb
    if kind == "plain":
        return 1 / phi(x, p, spec)
    if kind == "charged":
        a, c = ch.a, ch.c
        return (1 / phi(x - 2 * cb * (a + c), p, spec)
                * np.exp(-4j * np.pi * cb * a * (x - cb * (a + c)))
                * nu_prefactor(a, c, p))
    if kind == "tilde_prime_charged":
        return np.exp(-1j * np.pi / 12) * psi_family(
            "charged", ChargeTriple(ch.c, ch.b_charge), x, p, spec)
    if kind == "tilde_charged":
        return psi_family("tilde_prime_charged", ch, x, p, spec) * np.exp(1j * np.pi * np.asarray(x) ** 2)
    raise ValueError(f"unknown kind {kind!r}")


def tilde_prime(a: float, c: float, x, p: ModularParameter, eps: float = 0.05):
    """Vectorized psi~'_{a,c}(x) without pole screening."""
    cb = p.cb
    bb = 0.5 - a - c
    x = np.asarray(x, dtype=complex)
    return (np.exp(-1j * np.pi / 12) / _phi_fast(x - 2 * cb * (c + bb), p, eps)
            * np.exp(-4j * np.pi * cb * c * (x - cb * (c + bb))) * nu_prefactor(c, bb, p))


def psi_tilde_fourier(ch: ChargeTriple, x: float, p: ModularParameter,
                      spec: IntegralSpec = DEFAULT_SPEC) -> complex:
    """psi~_{a,c}(x) as the numerical Fourier transform of psi_{a,c}.

    Independent of the closed form used by psi_family; kept for cross-checks.
    """
    cb = p.cb
    a, c = ch.a, ch.c
    nu = nu_prefactor(a, c, p)
    f = lambda y: (nu / _phi_fast(y - 2 * cb * (a + c), p, spec.contour_epsilon)
                   * np.exp(-4j * np.pi * cb * a * (y - cb * (a + c)))
                   * np.exp(-2j * np.pi * x * y))
    return line_integral(f, 0.0, spec).value


def g_tail_bound(ch: ChargeTriple, p: ModularParameter, M: int) -> float:
    """Rough bound on the terms |m| > M of the Boltzmann lattice sum.

    For real b, |psi~'_{a,c}(x)| decays like exp(-2 pi Q kappa |x|) with
    kappa = min(b_charge, c) on the two sides, up to an O(1) constant.
    """
    kappa = min(ch.b_charge, ch.c)
    rate = 2 * math.pi * p.Q.real * kappa
    return 2 * math.exp(-rate * M) / (1 - math.exp(-rate))


def g_weight(ch: ChargeTriple, s: float, t: float, p: ModularParameter,
             spec: IntegralSpec = DEFAULT_SPEC, check: bool = True) -> complex:
    """Boltzmann weight g_{a,c}(s,t) truncated to |m| <= lattice_M."""
    def partial(M):
        m = np.arange(-M, M + 1)
        terms = tilde_prime(ch.a, ch.c, s + m, p, spec.contour_epsilon) * np.exp(
            1j * np.pi * t * (s + 2 * m))
        return complex(terms.sum())

    M = spec.lattice_M
    val = partial(M)
    if check and M > 0:
        ref = partial(2 * M)
        if abs(ref - val) > 10 * spec.rel_tol * max(abs(ref), spec.abs_tol):
            raise TruncationUnstable(f"g weight not converged at M={M}")
    return val


# ------------------------------------------------------------- quadrature

@dataclass
class LineResult:
    value: complex
    h: float
    L: float
    last_delta: float
    evaluations: int = field(default=0)


def line_integral(f, shift: complex, spec: IntegralSpec = DEFAULT_SPEC,
                  center: float = 0.0, h0: float = 0.05, L0: float = 8.0,
                  scale: str = "value", atol: float = 0.0) -> LineResult:
    """Integral of f over the line center + t + i*shift, t real.

    Trapezoid rule with step halving; for integrands analytic in a strip and
    decaying at both ends it converges geometrically. The window grows until
    the integrand at the ends is below abs_tol * 1e-3 relative to its peak.
    Convergence is judged relative to |value|, or with scale="l1" relative to
    the integral of |f|, which is the attainable accuracy when the integral
    is much smaller than its integrand. atol is an absolute error that is
    always accepted.
    """
    def ends(L):
        v = f(center + np.array([-L, L]) + 1j * shift)
        return float(np.abs(v).max())

    L = L0
    peak = float(np.abs(f(center + np.linspace(-L, L, 81) + 1j * shift)).max())
    for _ in range(40):
        if ends(L) <= spec.abs_tol * 1e-3 * max(peak, 1.0):
            break
        L *= 1.5
    else:
        raise NonConvergence("integrand does not decay")
    n = int(math.ceil(L / h0))
    h = L / n
    t = np.arange(-n, n + 1) * h
    vals = f(center + t + 1j * shift)
    total = complex(vals.sum()) - 0.5 * complex(vals[0] + vals[-1])
    l1 = h * float(np.abs(vals).sum())
    value = h * total
    evals = len(t)
    delta = math.inf
    for _ in range(spec.max_quad_depth):
        mid = (np.arange(-n, n) + 0.5) * h
        mv = f(center + mid + 1j * shift)
        evals += len(mid)
        total += complex(mv.sum())
        h /= 2
        n *= 2
        new = h * total
        delta = abs(new - value)
        value = new
        ref = l1 if scale == "l1" else abs(value)
        if delta <= max(spec.rel_tol * 1e-2 * max(ref, spec.abs_tol), atol):
            return LineResult(value, h, L, delta, evals)
    raise NonConvergence(f"line integral not converged (last change {delta:.3g})")


# ------------------------------------------------------------ identities

def identity_residual(kind: str, args, p: ModularParameter,
                      spec: IntegralSpec = DEFAULT_SPEC) -> float:
    """|LHS - RHS| of a named identity of Phi_b, each side computed separately."""
    cb = p.cb
    b = p.b
    args = tuple(complex(a) for a in np.atleast_1d(args))
    if kind == "functional":
        (z,) = args
        r = 0.0
        for bb in (b, 1 / b):
            lhs = phi(z - 0.5j * bb, p, spec)
            rhs = (1 + cmath.exp(2 * math.pi * bb * z)) * phi(z + 0.5j * bb, p, spec)
            r = max(r, abs(lhs - rhs) / max(1.0, abs(rhs)))
        return r
    if kind == "inversion":
        (z,) = args
        lhs = phi(z, p, spec) * phi(-z, p, spec)
        rhs = cmath.exp(1j * math.pi * z * z) / zeta_inv(p)
        return abs(lhs - rhs) / max(1.0, abs(rhs))
    if kind == "unitarity":
        (z,) = args
        return abs(np.conj(phi(z, p, spec)) * phi(np.conj(z), p, spec) - 1)
    if kind == "fourier":
        # integral over R - i*delta of Phi(x + c_b) e^{2 pi i w x}; -Q/2 < Im w < 0
        (w,) = args
        if not (-p.Q.real / 2 < w.imag < 0):
            raise ValueError("fourier identity needs -Q/2 < Im w < 0")
        delta = min(0.3, 0.5 * cb.imag)
        res = line_integral(lambda x: _phi_fast(x + cb, p) * np.exp(2j * np.pi * w * x),
                            -delta, spec)
        rhs = cmath.exp(-1j * math.pi * (1 - 4 * cb * cb) / 12) / phi(-w - cb, p, spec)
        return abs(res.value - rhs)
    if kind == "beta_integral":
        # integral over R + i*delta of Phi(x+u)/Phi(x-c_b) e^{-2 pi i w x}
        u, w = args
        if not (0 < w.imag < u.imag + p.Q.real / 2):
            raise ValueError("beta integral needs 0 < Im w < Im u + Q/2")
        top = cb.imag - u.imag
        if top <= 0:
            raise ValueError("beta integral needs Im u < Im c_b")
        delta = 0.5 * min(top, cb.imag)
        f = lambda x: (_phi_fast(x + u, p) / _phi_fast(x - cb, p)
                       * np.exp(-2j * np.pi * w * x))
        res = line_integral(f, delta, spec)
        rhs = (phi(u, p, spec) * phi(cb - w, p, spec) / phi(u - w, p, spec)
               * cmath.exp(1j * math.pi * (1 - 4 * cb * cb) / 12))
        return abs(res.value - rhs)
    raise ValueError(f"unknown identity {kind!r}")


# ------------------------------------------------------------ asymptotics

# B_{2n}(1/2) = (2^{1-2n} - 1) B_{2n}
_BERN_HALF = [1.0, -1 / 12, 7 / 240, -31 / 1344, 127 / 3840]


def _li2_neg_exp_derivs(x: float, n: int) -> list[complex]:
    """d^k/dx^k Li2(-e^x) for k = 0..n."""
    out = [li2(-math.exp(x)), -math.log1p(math.exp(x))]
    s = 1 / (1 + math.exp(-x))
    # d^k/dx^k of -sigma as a polynomial in sigma; sigma' = sigma (1 - sigma)
    poly = np.polynomial.Polynomial([0, -1])
    ds = np.polynomial.Polynomial([0, 1, -1])
    for _ in range(2, n + 1):
        out.append(complex(poly(s)))
        poly = poly.deriv() * ds
    return out[: n + 1]


def phi_asymptotic(x: float, p: ModularParameter, order_N: int = 0) -> complex:
    """Truncated quasi-classical expansion of Phi_b(x / (2 pi b)).

    log Phi_b(x/(2 pi b)) ~ sum_n (2 pi i b^2)^{2n-1} B_{2n}(1/2)/(2n)! d^{2n}/dx^{2n} Li2(-e^x)
    """
    if not 0 <= order_N <= 4:
        raise ValueError("order_N must be in 0..4")
    b = p.b
    if b.imag != 0 or not 0 < b.real < 1:
        raise ValueError("asymptotic expansion implemented for real 0 < b < 1")
    d = _li2_neg_exp_derivs(float(x), 2 * order_N)
    h = 2j * math.pi * b.real ** 2
    total = sum(h ** (2 * n - 1) * _BERN_HALF[n] / math.factorial(2 * n) * d[2 * n]
                for n in range(order_N + 1))
    return cmath.exp(total)


def asymptotic_error(x: float, b: float, order_N: int = 0,
                     spec: IntegralSpec = DEFAULT_SPEC) -> float:
    """Relative error of the truncated expansion against the full evaluator."""
    p = ModularParameter(b)
    exact = phi(x / (2 * math.pi * b), p, spec)
    return abs(phi_asymptotic(x, p, order_N) / exact - 1)


def asymptotic_ratio(x: float, b: float, order_N: int = 0,
                     spec: IntegralSpec = DEFAULT_SPEC) -> float:
    """error(b) / error(b/2); about 4 when the leading correction is O(b^2)."""
    return asymptotic_error(x, b, order_N, spec) / asymptotic_error(x, b / 2, order_N, spec)


# ------------------------------------------------------------ identity suite

SUITE_B = (0.6, 0.8, 1.0, cmath.exp(1j * math.pi / 5))
FOURIER_POINTS = ((0.8, 0.3 - 0.4j), (0.8, -0.2 - 0.6j), (1.0, 0.1 - 0.5j),
                  (0.6, -0.4 - 0.3j), (cmath.exp(0.2j), 0.2 - 0.5j))
# (b, u, w) with 0 < Im w < Im u + Q/2 and Im u < Im c_b
BETA_POINTS = ((0.8, -0.3j, 0.2 + 0.1j), (0.8, 0.2 - 0.1j, -0.3 + 0.4j), (1.0, 0.1 + 0.2j, 0.3j),
               (0.6, -0.2 - 0.2j, 0.1 + 0.5j), (0.9, 0.4j, -0.1 + 0.2j))


def suite_grid(p: ModularParameter, n_re: int = 5, n_im: int = 4) -> np.ndarray:
    """n_re x n_im points filling the middle of the strip |Im z| < Im c_b."""
    re = np.linspace(-1.5, 1.5, n_re)
    im = np.linspace(-0.6, 0.6, n_im) * p.cb.imag
    return (re[:, None] + 1j * im[None, :]).ravel()


@dataclass
class SuiteEntry:
    identity: str
    b: complex
    args: tuple
    residual: float
    threshold: float

    @property
    def ok(self) -> bool:
        return bool(self.residual < self.threshold)


def identity_suite(spec: IntegralSpec = DEFAULT_SPEC, pointwise_tol: float = 1e-8,
                   integral_tol: float = 1e-6, integrals: bool = True) -> list[SuiteEntry]:
    """Functional, inversion and unitarity on a 20-point grid for each suite b,
    product against contour where Im b^2 > 0, and the two integral identities."""
    out = []
    for b in SUITE_B:
        p = ModularParameter(b)
        for z in suite_grid(p):
            z = complex(z)
            for kind in ("functional", "inversion"):
                out.append(SuiteEntry(kind, p.b, (z,), identity_residual(kind, z, p, spec), pointwise_tol))
            if p.is_real:
                out.append(SuiteEntry("unitarity", p.b, (z,), identity_residual("unitarity", z, p, spec),
                                      pointwise_tol))
            if (p.b ** 2).imag > 0:
                a = phi(z, p, spec, "product")
                c = phi(z, p, spec, "contour")
                out.append(SuiteEntry("product_vs_contour", p.b, (z,), abs(a - c) / max(1.0, abs(a)),
                                      pointwise_tol))
    if integrals:
        for b, w in FOURIER_POINTS:
            p = ModularParameter(b)
            out.append(SuiteEntry("fourier", p.b, (w,), identity_residual("fourier", w, p, spec), integral_tol))
        for b, u, w in BETA_POINTS:
            p = ModularParameter(b)
            out.append(SuiteEntry("beta_integral", p.b, (u, w),
                                  identity_residual("beta_integral", (u, w), p, spec), integral_tol))
    return out
