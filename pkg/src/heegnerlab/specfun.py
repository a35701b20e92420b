"""Special functions on complex arguments, in double precision.

Gamma, Gauss 2F1, Riemann/Hurwitz zeta, the completed zeta, Dirichlet L-functions
of quadratic characters, the K-Bessel function of complex order and 2 J_1(x)/x.

Functions accept Python scalars; where noted they also accept numpy arrays in
one argument so that Fourier sums and character sums can be vectorised.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np


class PoleError(ValueError):
    """Argument sits on a pole of the requested function."""


class DomainError(ValueError):
    """Argument outside the region where the evaluation is reliable."""


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _loggamma_right(z):
    # valid for Re z >= 1/2; not the principal branch
    z = z - 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc = acc + _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def _check_gamma_pole(s):
    sr = np.real(s)
    si = np.imag(s)
    bad = (si == 0) & (sr <= 0) & (sr == np.round(sr))
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at {s!r}")


def loggamma(s):
    """log Gamma(s) up to a multiple of 2*pi*i (exp() of it is exact Gamma).

    Works on scalars and numpy arrays.
    """
    scalar = np.ndim(s) == 0
    s = np.asarray(s, dtype=complex)
    _check_gamma_pole(s)
    out = np.empty_like(s)
    right = np.real(s) >= 0.5
    if np.any(right):
        out[right] = _loggamma_right(s[right])
    left = ~right
    if np.any(left):
        sl = s[left]
        # reflection: Gamma(s) Gamma(1-s) = pi / sin(pi s); reduce the sine argument
        # first so that s near a pole keeps its relative accuracy
        n = np.round(sl.real)
        sin_pi = np.where(n % 2 == 0, 1.0, -1.0) * np.sin(np.pi * (sl - n))
        out[left] = math.log(math.pi) - np.log(sin_pi) - _loggamma_right(1.0 - sl)
    return complex(out) if scalar else out


def cgamma(s):
    """Gamma function on the complex plane."""
    return np.exp(loggamma(s)) if np.ndim(s) else cmath.exp(loggamma(s))


def gamma_ratio_it(t: float) -> complex:
    """Gamma(i t) / Gamma(3/2 + i t) for real t != 0, written without the pole of Gamma(it)."""
    if t == 0:
        raise PoleError("Gamma(it) has a pole at t = 0")
    return cmath.exp(loggamma(1 + 1j * t) - loggamma(1.5 + 1j * t)) / (1j * t)


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------


def _series_2f1(a, b, c, z, tol=1e-17, max_terms=200000):
    """Power series; returns (value, largest |term|)."""
    term = 1.0 + 0j
    total = 1.0 + 0j
    biggest = 1.0
    absz = abs(z)
    for n in range(max_terms):
        den = (c + n) * (n + 1)
        if den == 0:
            raise PoleError("2F1 parameter c is a non-positive integer")
        term = term * (a + n) * (b + n) / den * z
        total += term
        at = abs(term)
        biggest = max(biggest, at)
        if at == 0.0:
            return total, biggest
        if n > 2 * max(abs(a), abs(b), abs(c)) + 2:
            ratio = abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2))) * absz
            rho = max(ratio, absz) * (1.0 + 2.0 / (n + 2))
            if rho < 1.0 and at * rho / (1.0 - rho) <= tol * abs(total):
                return total, biggest
    raise DomainError(f"2F1 series did not converge in {max_terms} terms (|z|={absz:.3g})")


def gauss_2f1(a, b, c, z, *, return_error=False):
    """Gauss hypergeometric function 2F1(a, b; c; z).

    The power series is used directly for |z| <= 1/2. Otherwise, if the Pfaff
    image w = z/(z-1) satisfies |w| < 1, the series runs in w with
    2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; w). Anything else raises
    DomainError. With ``return_error`` the second return value estimates the
    relative rounding error from cancellation among the terms.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if z == 0:
        return (1.0 + 0j, 0.0) if return_error else 1.0 + 0j
    if abs(z) <= 0.5:
        val, big = _series_2f1(a, b, c, z)
        pref = 1.0
    else:
        w = z / (z - 1.0)
        if abs(w) >= 1.0 or abs(z) <= abs(w):
            raise DomainError(f"2F1 argument z={z} outside the supported region")
        val, big = _series_2f1(a, c - b, c, w)
        pref = (1.0 - z) ** (-a)
    out = pref * val
    if return_error:
        err = 2.2e-16 * big / max(abs(val), 1e-300) * 10
        return out, err
    return out


# ---------------------------------------------------------------------------
# Zeta functions
# ---------------------------------------------------------------------------

_EM_TERMS = 12


@lru_cache(maxsize=None)
def _bernoulli_coeffs() -> tuple[float, ...]:
    """B_{2k} / (2k)! for k = 1..12."""
    n_max = 2 * _EM_TERMS
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n_max + 1)
    bern = []
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        bern.append(a[0])
    return tuple(float(bern[2 * k] / math.factorial(2 * k)) for k in range(1, _EM_TERMS + 1))


def _em_cutoff(s: complex) -> int:
    return max(20, int(math.ceil(2 * abs(s.imag))), int(math.ceil(abs(s.real))) + 10)


def _phi1(w):
    """(exp(w) - 1) / w, accurate near w = 0 (vectorised)."""
    w = np.asarray(w)
    w = w.astype(complex if np.iscomplexobj(w) else float)
    out = np.empty_like(w)
    small = np.abs(w) < 0.1
    if np.any(small):
        ws = w[small]
        acc = np.ones_like(ws)
        term = np.ones_like(ws)
        for k in range(2, 12):
            term = term * ws / k
            acc = acc + term
        out[small] = acc
    big = ~small
    if np.any(big):
        out[big] = (np.exp(w[big]) - 1.0) / w[big]
    return out


def _hurwitz_em(s: complex, q, regular: bool):
    q = np.asarray(q, dtype=float)
    n_cut = _em_cutoff(s)
    if s.imag == 0.0:
        s = s.real  # real arithmetic is several times faster on the head sum
    n = np.arange(n_cut, dtype=float)
    head = np.sum((q[..., None] + n) ** (-s), axis=-1)
    big = q + n_cut
    logb = np.log(big)
    if regular:
        # (big^(1-s) - 1)/(s-1) = -log(big) * phi1((1-s) log(big))
        tail = -logb * _phi1((1.0 - s) * logb)
    else:
        tail = big ** (1.0 - s) / (s - 1.0)
    tail = tail + 0.5 * big ** (-s)
    rising = s
    power = big ** (-s - 1.0)
    inv2 = 1.0 / (big * big)
    for k, coeff in enumerate(_bernoulli_coeffs(), start=1):
        tail = tail + coeff * rising * power
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        power = power * inv2
    return head + tail


def hurwitz_zeta(s, q):
    """Hurwitz zeta(s, q) = sum_{n>=0} (n+q)^(-s) by Euler-Maclaurin.

    ``q`` may be a numpy array of values in (0, 1]; s is a scalar, s != 1.
    """
    s = complex(s)
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    out = _hurwitz_em(s, q, regular=False)
    return complex(out) if np.ndim(out) == 0 else out


def hurwitz_zeta_regular(s, q):
    """zeta(s, q) - 1/(s-1); entire in s, finite at s = 1."""
    out = _hurwitz_em(complex(s), q, regular=True)
    return complex(out) if np.ndim(out) == 0 else out


def zeta(s) -> complex:
    """Riemann zeta function; Euler-Maclaurin for Re s >= -1, reflection below."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real < -1:
        # zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
        if s.imag == 0 and s.real == round(s.real) and int(s.real) % 2 == 0:
            return 0j
        return 2**s * cmath.pi ** (s - 1) * cmath.sin(cmath.pi * s / 2) * cgamma(1 - s) * zeta(1 - s)
    return hurwitz_zeta(s, 1.0)


def _sm1_zeta(s: complex) -> complex:
    """(s - 1) zeta(s), finite at s = 1."""
    if s.real < -1:
        return (s - 1) * zeta(s)
    return 1.0 + (s - 1.0) * hurwitz_zeta_regular(s, 1.0)


def xi(s) -> complex:
    """Riemann xi: (1/2) s (s-1) pi^(-s/2) Gamma(s/2) zeta(s); entire, xi(s) = xi(1-s)."""
    s = complex(s)
    if s.real < -1:
        s = 1 - s
    # (1/2) s Gamma(s/2) = Gamma(1 + s/2)
    return cmath.exp(loggamma(1 + s / 2)) * cmath.pi ** (-s / 2) * _sm1_zeta(s)


def completed_zeta(s) -> complex:
    """Lambda(s) = pi^(-s/2) Gamma(s/2) zeta(s), with poles at s = 0 and s = 1."""
    s = complex(s)
    if s == 0 or s == 1:
        raise PoleError("completed zeta has poles at s = 0 and s = 1")
    return xi(s) / (0.5 * s * (s - 1))


# ---------------------------------------------------------------------------
# Dirichlet L-functions of quadratic characters
# ---------------------------------------------------------------------------


def dirichlet_l(s, D: int) -> complex:
    """L(s, chi_D) = |D|^(-s) sum_{r=1}^{|D|} chi_D(r) zeta(s, r/|D|).

    The pole parts of the Hurwitz terms cancel because chi_D sums to zero over a
    period, so s = 1 is evaluated directly.
    """
    from .qforms import character_table, is_fundamental

    if not is_fundamental(D):
        raise ValueError(f"{D} is not a negative fundamental discriminant")
    s = complex(s)
    k = abs(D)
    chars = np.asarray(character_table(D), dtype=float)
    r = np.nonzero(chars)[0]
    vals = hurwitz_zeta_regular(s, r / k)
    return complex(k ** (-s) * np.dot(chars[r], vals))


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------


def _kbessel_quad(nu: complex, y: np.ndarray) -> np.ndarray:
    """Trapezoid rule for (1/2) int_R exp(-y cosh v) cosh(nu v) dv on a uniform grid.

    Points are grouped by octave of y so each group gets its own cutoff and step.
    """
    out = np.empty(y.shape, dtype=complex)
    octave = np.floor(np.log2(y))
    for o in np.unique(octave):
        sel = octave == o
        out[sel] = _kbessel_quad_group(nu, y[sel])
    return out


def _kbessel_quad_group(nu: complex, y: np.ndarray) -> np.ndarray:
    ymin, ymax = float(np.min(y)), float(np.max(y))
    re_nu = abs(nu.real)
    v_max = 1.0
    for _ in range(60):
        v_new = math.acosh(1.0 + (45.0 + re_nu * v_max) / ymin)
        if abs(v_new - v_max) < 1e-6:
            break
        v_max = v_new
    v_max = max(v_new, 1.0)
    # error ~ exp(-2 pi d / h) times the growth of the integrand on the strip |Im v| <= d = 1,
    # which is exp(|Im nu| + |Re nu| + y (1 - cos 1)) relative to the integral
    h = 2.0 * math.pi / (45.0 + abs(nu.imag) + re_nu + 4.0 + ymax * (1.0 - math.cos(1.0)))
    h = min(h, 0.25)
    nodes = np.arange(0.0, v_max + h, h)
    w = np.full(nodes.shape, h)
    w[0] = 0.5 * h
    cv = np.cosh(nodes)
    fv = np.cosh(nu * nodes) * w
    return np.exp(-np.multiply.outer(y, cv)) @ fv


def _kbessel_series(nu: complex, y: np.ndarray) -> np.ndarray:
    """pi / (2 sin(nu pi)) (I_{-nu}(y) - I_nu(y)) from the ascending series of I."""

    def ival(order):
        logh = np.log(y / 2.0)
        term = np.exp(order * logh - loggamma(1.0 + order))
        total = term.copy()
        q = (y / 2.0) ** 2
        k = 0
        while True:
            k += 1
            term = term * q / (k * (k + order))
            total = total + term
            if k > 5 and np.all(np.abs(term) <= 1e-17 * np.abs(total)):
                return total
            if k > 2000:
                raise DomainError("I-Bessel series failed to converge")

    diff = ival(-nu) - ival(nu)
    return math.pi / (2.0 * cmath.sin(nu * math.pi)) * diff


def kbessel(nu, y):
    """Modified Bessel K_nu(y) for complex order nu and y > 0.

    Real (float) output when nu is real or purely imaginary.

    Evaluated from K_nu(y) = int_0^inf exp(-y cosh v) cosh(nu v) dv by the
    trapezoid rule, except for orders with |Im nu| >= 2 and y <= 1.2 |Im nu|,
    where that integral cancels down to size exp(-pi |Im nu| / 2) and the
    ascending I-series is used instead. ``y`` may be a numpy array.
    """
    nu = complex(nu)
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise DomainError("kbessel needs y > 0")
    out = np.empty(y.shape, dtype=complex)
    use_series = (abs(nu.imag) >= 2.0) & (y <= 1.2 * abs(nu.imag))
    if np.any(use_series):
        out[use_series] = _kbessel_series(nu, y[use_series])
    rest = ~use_series
    if np.any(rest):
        out[rest] = _kbessel_quad(nu, y[rest])
    if nu.real == 0 or nu.imag == 0:
        out = out.real
        return float(out[0]) if scalar else out
    return complex(out[0]) if scalar else out


def bessel_j1_ratio(x):
    """2 J_1(x) / x, equal to 1 at x = 0. Accepts scalars or arrays."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = np.abs(x) < 1.0
    if np.any(small):
        q = -((x[small] / 2.0) ** 2)
        term = np.ones_like(q)
        acc = term.copy()
        for k in range(1, 20):
            term = term * q / (k * (k + 1))
            acc += term
        out[small] = acc
    big = ~small
    if np.any(big):
        xb = x[big]
        j1 = np.empty_like(xb)
        # Bessel's integral J_1(x) = (1/2pi) int_0^{2pi} cos(tau - x sin tau) dtau,
        # trapezoid on a periodic integrand; chunks keep the node matrix small
        for i in range(0, xb.size, 512):
            xc = xb[i : i + 512]
            m = int(1.2 * np.max(np.abs(xc))) + 40
            tau = 2.0 * np.pi * np.arange(m) / m
            j1[i : i + 512] = np.cos(tau[None, :] - np.multiply.outer(xc, np.sin(tau))).mean(axis=1)
        out[big] = 2.0 * j1 / xb
    return float(out[0]) if scalar else out
