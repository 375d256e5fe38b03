"""Stationary-phase analysis of the 6_1 state integral and volume extraction."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .qdl import BranchCut, QDLError, li2


class NoAdmissibleSaddle(QDLError):
    pass


TWO_PI_I = 2j * math.pi

# quartic left after clearing denominators in the stationary system and
# dropping the spurious root t = 0
QUARTIC_61 = (1, 1, -2, -1, 2)


def _log1p_exp(w: complex) -> complex:
    return cmath.log(1 + cmath.exp(w))


def potential_61(x: complex, z: complex):
    """V(x, z) and its gradient.

    V = 2 Li2(-e^x) + Li2(-e^z) - Li2(e^{z-x}) - z^2/2 + 2 pi i z + x^2/2.
    The gradient keeps the additive form of the logarithms, so it is exact on
    the principal sheet of every Li2 term.
    """
    x, z = complex(x), complex(z)
    u = cmath.exp(z - x)
    if abs(u.imag) < 1e-300 and u.real > 1:
        raise BranchCut("e^(z-x) on the cut of Li2")
    V = (2 * li2(-cmath.exp(x)) + li2(-cmath.exp(z)) - li2(u)
         - z * z / 2 + TWO_PI_I * z + x * x / 2)
    gx = -2 * _log1p_exp(x) - cmath.log(1 - u) + x
    gz = -_log1p_exp(z) + cmath.log(1 - u) - z + TWO_PI_I
    return V, (gx, gz)


def hessian_61(x: complex, z: complex) -> np.ndarray:
    ex, ez = cmath.exp(x), cmath.exp(z)
    u = cmath.exp(z - x)
    r = u / (1 - u)
    vxx = 1 - 2 * ex / (1 + ex) - r
    vzz = -1 - ez / (1 + ez) - r
    vxz = r
    return np.array([[vxx, vxz], [vxz, vzz]], dtype=complex)


def quartic_residual(t: complex) -> complex:
    return complex(np.polyval(QUARTIC_61, t))


def saddle_candidates_61() -> list[complex]:
    """Roots of t^4 + t^3 - 2t^2 - t + 2, i.e. 1 - t - t^2 = (1 - t^2)^2 (1 + t) without t = 0."""
    roots = np.linalg.eigvals(np.polynomial.polynomial.polycompanion(QUARTIC_61[::-1]))
    dp = np.polyder(np.array(QUARTIC_61, dtype=float))
    out = []
    for t in roots:
        t = complex(t)
        for _ in range(2):
            t -= quartic_residual(t) / complex(np.polyval(dp, t))
        out.append(t)
    return sorted(out, key=lambda t: (round(t.real, 12), round(t.imag, 12)))


@dataclass
class Saddle:
    t: complex
    x: complex
    z: complex
    V: complex
    grad_norm: float
    hessian_det: complex
    branch: tuple


def _polish(x: complex, z: complex, steps: int = 20, tol: float = 1e-14):
    for _ in range(steps):
        _, g = potential_61(x, z)
        if math.hypot(abs(g[0]), abs(g[1])) < tol:
            break
        H = hessian_61(x, z)
        dx, dz = np.linalg.solve(H, -np.array(g))
        x, z = x + complex(dx), z + complex(dz)
    return x, z


def _recover(t: complex) -> Saddle | None:
    """Lift a root t = e^z to a zero of the gradient, trying adjacent log branches."""
    ex = 1 / (1 / t - 1 - t)
    best = None
    for kz in (0, 1, -1):
        for kx in (0, 1, -1):
            x = cmath.log(ex) + TWO_PI_I * kx
            z = cmath.log(t) + TWO_PI_I * kz
            try:
                _, g = potential_61(x, z)
            except BranchCut:
                continue
            gn = math.hypot(abs(g[0]), abs(g[1]))
            if gn < 1e-6 and (best is None or gn < best[0]):
                best = (gn, x, z, (kx, kz))
    if best is None:
        return None
    _, x, z, br = best
    x, z = _polish(x, z)
    V, g = potential_61(x, z)
    return Saddle(t, x, z, V, math.hypot(abs(g[0]), abs(g[1])),
                  complex(np.linalg.det(hessian_61(x, z))), br)


@dataclass
class SaddleReport:
    roots_t: list
    chosen_root: complex
    saddle_xz: tuple
    grad_norm: float
    im_V: float
    volume: float
    hessian_det: complex
    candidates: list = field(default_factory=list)

    def as_dict(self) -> dict:
        c = lambda w: [w.real, w.imag]
        return {
            "roots_t": [c(t) for t in self.roots_t],
            "chosen_root": c(self.chosen_root),
            "saddle_xz": [c(self.saddle_xz[0]), c(self.saddle_xz[1])],
            "grad_norm": self.grad_norm,
            "im_V": self.im_V,
            "volume": self.volume,
            "hessian_det": c(self.hessian_det),
        }


def saddles_61() -> list[Saddle]:
    return [s for s in (_recover(t) for t in saddle_candidates_61()) if s is not None]


def volume_from_saddle() -> SaddleReport:
    """Dominant stationary point of V and the volume -Im V there.

    Only saddles reached on the principal branch of log t with a nondegenerate
    Hessian are admissible. Among them the contribution e^{V/(2 pi i hbar)}
    has modulus e^{Im V/(2 pi hbar)}, which we read as selecting the saddle
    that makes -Im V positive and largest, i.e. the geometric one.
    """
    roots = saddle_candidates_61()
    found = saddles_61()
    ok = [s for s in found if s.grad_norm < 1e-10 and abs(s.hessian_det) > 1e-8
          and s.branch[1] == 0 and -s.V.imag > 0]
    if not ok:
        raise NoAdmissibleSaddle("no stationary point passes the admissibility checks")
    s = max(ok, key=lambda s: -s.V.imag)
    return SaddleReport(roots, s.t, (s.x, s.z), s.grad_norm, s.V.imag, -s.V.imag,
                        s.hessian_det, found)


# ------------------------------------------------------------ 5_2 potential

def potential_52(w: complex) -> tuple[complex, complex]:
    """Classical limit of the 5_2 integrand: -3 Li2(-e^w) - w^2/2 and its derivative."""
    w = complex(w)
    return -3 * li2(-cmath.exp(w)) - w * w / 2, 3 * _log1p_exp(w) - w


# ------------------------------------------------------------ scaling fits

@dataclass
class ScalingFit:
    knot: str
    hbars: list
    values: list              # 2 pi hbar log|J(hbar, 0)|
    limit: float              # extrapolated value at hbar = 0
    error_estimate: float
    coefficients: list = field(default_factory=list)

    @property
    def volume(self) -> float:
        return -self.limit

    def as_dict(self) -> dict:
        return {"knot": self.knot, "hbars": list(self.hbars), "values": list(self.values),
                "limit": self.limit, "volume": self.volume,
                "error_estimate": self.error_estimate, "coefficients": list(self.coefficients)}


def extrapolate(hbars, values) -> tuple[float, float, list]:
    """Polynomial extrapolation to hbar = 0.

    The loop expansion gives 2 pi hbar log|J| = -Vol + c1 hbar + c2 hbar^2 + ...
    with no hbar log hbar term for these one- and two-dimensional integrals,
    so a polynomial through all points is used. The error estimate is the
    change when the point with the largest hbar is dropped.
    """
    h = np.asarray(hbars, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(h) < 2:
        raise ValueError("need at least two hbar values")
    coeffs = np.polyfit(h, v, len(h) - 1)
    limit = float(coeffs[-1])
    order = np.argsort(h)
    hs, vs = h[order][:-1], v[order][:-1]
    lower = float(np.polyfit(hs, vs, len(hs) - 1)[-1]) if len(hs) > 1 else float(vs[0])
    return limit, abs(limit - lower), [float(c) for c in coeffs[::-1]]


def scaling_values(knot: str, hbar_list, spec=None) -> list[float]:
    from . import invariants as inv
    from .qdl import DEFAULT_SPEC, ModularParameter

    spec = spec or DEFAULT_SPEC
    knot = inv.KnotId.parse(knot)
    out = []
    for hb in hbar_list:
        if knot is inv.KnotId.K6_1:
            val = inv.j_61(hb, spec).value
        else:
            p = ModularParameter.from_hbar(hb)
            f = inv.chi_41 if knot is inv.KnotId.K4_1 else inv.chi_52
            val = f(0.0, p, spec, depth=inv.mid_depth(p)).value
        out.append(2 * math.pi * hb * math.log(abs(val)))
    return out


def scaling_fit(knot: str, hbar_list, spec=None) -> ScalingFit:
    hb = [float(h) for h in hbar_list]
    if len(hb) < 3 or any(a <= b for a, b in zip(hb, hb[1:])):
        raise ValueError("hbar_list must be strictly decreasing with at least 3 entries")
    vals = scaling_values(knot, hb, spec)
    limit, err, coeffs = extrapolate(hb, vals)
    return ScalingFit(str(knot), hb, vals, limit, err, coeffs)


def volume_from_scaling(knot: str, hbar_list, spec=None) -> float:
    return scaling_fit(knot, hbar_list, spec).volume
