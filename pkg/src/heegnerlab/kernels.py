"""Radial test kernels on the hyperbolic plane and their Selberg/Harish-Chandra transforms.

ball(R):            k(u) = 1 if cosh d <= cosh R, with cosh d = 2u + 1.
smoothed(Y, delta): k(u) = (1_{ball(Y +- delta)} * k_delta)(u), k_delta the
                    normalised indicator of the delta-ball; its value at
                    distance d is the area of the lens B(z, Y +- delta) n B(w, delta)
                    divided by the area 4 pi sinh^2(delta/2) of the small ball.

The transform used throughout is h(t) = 2 pi int_0^inf k(r) P_{-1/2+it}(cosh r) sinh r dr,
which sends convolution to products and equals 2 pi (cosh R - 1) at t = i/2
for the ball.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .specfun import DomainError, gamma_ratio_it, gauss_2f1, loggamma

HALF_I = 0.5j


@dataclass(frozen=True)
class KernelSpec:
    kind: str  # "ball" or "smoothed"
    R: float = 0.0
    Y: float = 0.0
    delta: float = 0.0
    sign: int = +1

    def __post_init__(self):
        if self.kind == "ball":
            if not self.R > 0:
                raise ValueError("ball kernel needs R > 0")
        elif self.kind == "smoothed":
            if not (self.Y > self.delta > 0):
                raise ValueError("smoothed kernel needs Y > delta > 0")
            if self.sign not in (1, -1):
                raise ValueError("sign must be +1 or -1")
        else:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @classmethod
    def ball(cls, R: float) -> "KernelSpec":
        return cls("ball", R=R)

    @classmethod
    def smoothed(cls, Y: float, delta: float, sign: int) -> "KernelSpec":
        return cls("smoothed", Y=Y, delta=delta, sign=sign)

    @classmethod
    def from_X(cls, X: float, delta: float, sign: int) -> "KernelSpec":
        """k+ or k- for the counting radius Y with cosh Y = X/2."""
        return cls.smoothed(radius_from_X(X), delta, sign)

    @property
    def outer(self) -> float:
        """Radius of the big ball (R, or Y +- delta)."""
        return self.R if self.kind == "ball" else self.Y + self.sign * self.delta

    @property
    def support(self) -> float:
        """Largest distance at which the kernel is non-zero."""
        return self.R if self.kind == "ball" else self.outer + self.delta


def radius_from_X(X: float) -> float:
    if X < 2:
        raise ValueError("X must be at least 2")
    return math.acosh(X / 2.0)


def u_from_distance(d: float) -> float:
    return math.sinh(d / 2.0) ** 2


def distance_from_u(u: float) -> float:
    return 2.0 * math.asinh(math.sqrt(u))


# ---------------------------------------------------------------------------
# kernel values
# ---------------------------------------------------------------------------


def lens_area(rho: float, delta: float, d: float) -> float:
    """Hyperbolic area of B(z, rho) n B(w, delta) with d(z, w) = d.

    Integrates, over circles of radius s about w, the arc lying in B(z, rho):
    a point at angle theta is inside iff cos theta >= (cosh d cosh s - cosh rho)/(sinh d sinh s).
    """
    if d >= rho + delta:
        return 0.0
    if d + delta <= rho:
        return 4.0 * math.pi * math.sinh(delta / 2.0) ** 2
    if d + rho <= delta:
        return 4.0 * math.pi * math.sinh(rho / 2.0) ** 2
    chd, shd, chr_ = math.cosh(d), math.sinh(d), math.cosh(rho)

    def arc(s):
        if s == 0.0:
            return 2.0 * math.pi if d < rho else 0.0
        kappa = (chd * math.cosh(s) - chr_) / (shd * math.sinh(s))
        kappa = min(1.0, max(-1.0, kappa))
        return 2.0 * math.acos(kappa) * math.sinh(s)

    lo = abs(rho - d)
    pts = [p for p in (lo,) if 0.0 < p < delta]
    val = 0.0
    # below |rho - d| the circle is entirely inside (d < rho) or outside
    if d < rho:
        val += 2.0 * math.pi * (math.cosh(min(lo, delta)) - 1.0)
    a = min(lo, delta)
    if a < delta:
        part, _ = integrate.quad(arc, a, delta, epsabs=1e-13, epsrel=1e-12, limit=200, points=pts or None)
        val += part
    return val


def kernel_eval(spec: KernelSpec, u: float) -> float:
    if u < 0:
        raise ValueError("u must be non-negative")
    if spec.kind == "ball":
        return 1.0 if u <= (math.cosh(spec.R) - 1.0) / 2.0 else 0.0
    d = distance_from_u(u)
    return lens_area(spec.outer, spec.delta, d) / (4.0 * math.pi * math.sinh(spec.delta / 2.0) ** 2)


def default_u_grid(X: float, delta: float, n: int = 1000) -> np.ndarray:
    """Log-spaced u values plus a dense band around the counting boundary (X-2)/4."""
    Y = radius_from_X(X)
    lo_d, hi_d = max(Y - 3 * delta, 0.0), Y + 3 * delta
    band = np.sinh(np.linspace(lo_d, hi_d, n // 2) / 2.0) ** 2
    logs = np.geomspace(1e-6, 4.0 * (X + 2.0), n - n // 2)
    return np.unique(np.concatenate([band, logs, [(X - 2.0) / 4.0]]))


def sandwich_check(X: float, delta: float, u_grid=None, *, slack: float = 1e-10,
                   upper_radius: float | None = None, return_detail: bool = False):
    """Check k-(u) <= 1_{[0,(X-2)/4]}(u) <= k+(u) on a grid.

    ``upper_radius`` replaces Y + delta in the upper kernel (used to confirm the
    check can fail).
    """
    Y = radius_from_X(X)
    if not (0 < delta < Y):
        raise ValueError("need 0 < delta < Y")
    if u_grid is None:
        u_grid = default_u_grid(X, delta)
    lower = KernelSpec.smoothed(Y, delta, -1)
    rho_up = Y + delta if upper_radius is None else upper_radius
    inner = (X - 2.0) / 4.0
    bad = []
    for u in np.asarray(u_grid, dtype=float):
        ind = 1.0 if u <= inner else 0.0
        km = kernel_eval(lower, u)
        d = distance_from_u(u)
        kp = lens_area(rho_up, delta, d) / (4.0 * math.pi * math.sinh(delta / 2.0) ** 2)
        if km > ind + slack or ind > kp + slack:
            bad.append((float(u), km, ind, kp))
    ok = not bad
    return (ok, bad) if return_detail else ok


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def hyp_factor(R: float, t: complex) -> complex:
    """F(-1/2, 3/2; 1 - it; 1/(1 - e^{2R}))."""
    z = 1.0 / (1.0 - math.exp(2.0 * R)) if R < 300 else -0.0
    return gauss_2f1(-0.5, 1.5, 1.0 - 1j * t, z)


def _f_term(R: float, t: complex) -> complex:
    """e^{itR} Gamma(it)/Gamma(3/2+it) F(-1/2, 3/2; 1-it; 1/(1-e^{2R}))."""
    t = complex(t)
    if t.imag == 0.0:
        ratio = gamma_ratio_it(t.real)
    else:
        ratio = cmath.exp(loggamma(1j * t) - loggamma(1.5 + 1j * t))
    return cmath.exp(1j * t * R) * ratio * hyp_factor(R, t)


def sht_ball(R: float, t, *, closed_at_half: bool = True):
    """Transform h_R(t) of the ball kernel of radius R.

    For real t: 2 sqrt(2 pi sinh R) Re(e^{itR} Gamma(it)/Gamma(3/2+it) F(...)).
    At t = i/2 the closed value 2 pi (cosh R - 1) is returned unless
    ``closed_at_half`` is False, in which case the same formula is continued
    as sqrt(2 pi sinh R) (f(t) + f(-t)).
    """
    if not R > 0:
        raise ValueError("R must be positive")
    t = complex(t)
    if t == HALF_I and closed_at_half:
        return 2.0 * math.pi * (math.cosh(R) - 1.0)
    pref = math.sqrt(2.0 * math.pi * math.sinh(R))
    if t.imag == 0.0:
        if t.real == 0.0:
            raise DomainError("t = 0 is excluded (removable point of the formula)")
        return 2.0 * pref * _f_term(R, t.real).real
    if t == HALF_I:
        return (pref * (_f_term(R, t) + _f_term(R, -t))).real
    raise DomainError("sht_ball supports real t and t = i/2")


def sht_smoothed(Y: float, delta: float, sign: int, t, **kw):
    """h+-(t) = h_{Y +- delta}(t) h_delta(t) / (4 pi sinh^2(delta/2))."""
    if not (Y > delta > 0):
        raise ValueError("need Y > delta > 0")
    rho = Y + sign * delta
    if complex(t) == HALF_I and kw.get("closed_at_half", True):
        return 2.0 * math.pi * (math.cosh(rho) - 1.0)
    return sht_ball(rho, t, **kw) * sht_ball(delta, t, **kw) / (4.0 * math.pi * math.sinh(delta / 2.0) ** 2)


def small_r_approx(R: float, t: float) -> float:
    """pi R^2 (2 J_1(Rt)/(Rt)) sqrt(sinh R / R)."""
    from .specfun import bessel_j1_ratio

    return math.pi * R * R * bessel_j1_ratio(R * t) * math.sqrt(math.sinh(R) / R)


# ---------------------------------------------------------------------------
# spherical functions
# ---------------------------------------------------------------------------


def _legendre_md(s: complex, r: np.ndarray) -> np.ndarray:
    """P^0_{s,0}(r) = P_{s-1}(cosh r) from the Mehler-Dirichlet integral.

    (sqrt 2 / pi) int_0^r cosh((s - 1/2) phi) / sqrt(cosh r - cosh phi) dphi with
    phi = r (1 - sigma^2), which removes the endpoint singularity.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    nu = complex(s) - 0.5
    out = np.ones(r.shape, dtype=complex)
    pos = r > 0
    if not np.any(pos):
        return out
    rmax = float(r[pos].max())
    n = int(abs(nu.imag) * rmax * 0.6 + abs(nu.real) * rmax + 40)
    sig, wts = np.polynomial.legendre.leggauss(n)
    sig = 0.5 * (sig + 1.0)
    wts = 0.5 * wts
    rr = r[pos][:, None]
    phi = rr * (1.0 - sig * sig)
    den = np.sqrt(2.0 * np.sinh((rr + phi) / 2.0) * np.sinh(rr * sig * sig / 2.0))
    integrand = np.cosh(nu * phi) * 2.0 * rr * sig / den
    out[pos] = math.sqrt(2.0) / math.pi * (integrand @ wts)
    return out


def spherical_p(n: int, k: int, s, r: float, *, method: str = "auto") -> complex:
    """P^n_{s,k}(r) = ((v-1)/(v+1))^{|n|/2} (2/(1+v))^s F(s - k_n, s + k_n + |n|, 1 + |n|; (v-1)/(v+1)).

    v = cosh r and k_n = k sign(n) (k_0 = k). For n = k = 0 the Mehler-Dirichlet
    integral is used (the series cancels badly for large |Im s| r); other cases
    use the series and raise DomainError if rounding would swamp the result.
    ``method`` may force "series" or "integral".
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    s = complex(s)
    if r == 0:
        return 1.0 + 0j if n == 0 else 0j
    if method == "integral" or (method == "auto" and n == 0 and k == 0):
        if n != 0 or k != 0:
            raise DomainError("the integral route covers n = k = 0 only")
        return complex(_legendre_md(s, np.array([r]))[0])
    kn = k if n == 0 else k * (1 if n > 0 else -1)
    m = abs(n)
    z = math.tanh(r / 2.0) ** 2
    v = math.cosh(r)
    F, err = gauss_2f1(s - kn, s + kn + m, 1 + m, z, return_error=True)
    if err > 1e-8:
        raise DomainError(f"2F1 series loses accuracy here (relative error ~{err:.1e})")
    return z ** (m / 2.0) * (2.0 / (1.0 + v)) ** s * F


def spherical_asymptotic(t: float, r: float) -> float:
    """Main term 2 cos(rt - pi/4) / (sqrt|t| sqrt(2 pi sinh r))."""
    return 2.0 * math.cos(r * t - math.pi / 4.0) / (math.sqrt(abs(t)) * math.sqrt(2.0 * math.pi * math.sinh(r)))


# ---------------------------------------------------------------------------
# numeric transform
# ---------------------------------------------------------------------------

C0 = 2.0 * math.pi


def _gl(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def sht_numeric(spec: KernelSpec, t, *, nodes: int | None = None) -> float:
    """2 pi int_0^inf k((cosh r - 1)/2) P_{-1/2+it}(cosh r) sinh r dr by quadrature.

    At t = i/2 the spherical function is identically 1. The kernel is piecewise
    smooth: constant 1 up to rho - delta and a lens profile up to rho + delta,
    so each piece gets its own Gauss-Legendre rule.
    """
    t = complex(t)
    if t.imag != 0 and t != HALF_I:
        raise DomainError("sht_numeric supports real t and t = i/2")
    s = 0.5 + 1j * t
    pieces = []
    if spec.kind == "ball":
        pieces.append((0.0, spec.R, None))
    else:
        rho, dl = spec.outer, spec.delta
        pieces.append((0.0, rho - dl, None))
        pieces.append((rho - dl, rho + dl, spec))
    total = 0.0
    for a, b, kern in pieces:
        if b <= a:
            continue
        n = nodes or int(abs(t.real) * (b - a) * 0.8 + (80 if kern is None else 120))
        r, w = _gl(a, b, n)
        if t == HALF_I:
            P = np.ones_like(r)
        else:
            P = _legendre_md(s, r).real
        kv = np.ones_like(r) if kern is None else np.array([kernel_eval(kern, u_from_distance(x)) for x in r])
        total += float(np.sum(w * kv * P * np.sinh(r)))
    return C0 * total
