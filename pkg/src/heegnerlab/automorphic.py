"""Eisenstein series and Maass cusp forms for PSL(2, Z), and their sums over Heegner points.

Eisenstein series, with Lambda(s) = pi^{-s/2} Gamma(s/2) zeta(s):

    E(z, s) = y^s + phi(s) y^{1-s}
              + 4/Lambda(2s) sqrt(y) sum_{n>=1} n^{s-1/2} sigma_{1-2s}(n) K_{s-1/2}(2 pi n y) cos(2 pi n x),

    phi(s) = Lambda(2s-1) / Lambda(2s).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .halfplane import Point, reduce_to_fundamental
from .qforms import check_discriminant, heegner_points, unit_count
from .specfun import completed_zeta, dirichlet_l, kbessel, zeta


class TruncationError(RuntimeError):
    pass


class DataError(ValueError):
    pass


def phi(s) -> complex:
    """Scattering coefficient Lambda(2s-1)/Lambda(2s)."""
    s = complex(s)
    den = completed_zeta(2 * s)
    if abs(den) < 1e-300:
        raise ZeroDivisionError(f"Lambda(2s) vanishes numerically at s={s}")
    return completed_zeta(2 * s - 1) / den


def auto_trunc(t: float, y: float) -> int:
    """Fourier terms needed at height y: ceil((|t| + 20)/(2 pi y)) + 10."""
    return int(math.ceil((abs(t) + 20.0) / (2.0 * math.pi * y))) + 10


def _divisor_sigma(N: int, e: complex) -> np.ndarray:
    """sigma_e(n) = sum_{d | n} d^e for n = 0..N (index 0 unused)."""
    out = np.zeros(N + 1, dtype=complex)
    for d in range(1, N + 1):
        out[d::d] += complex(d) ** e
    return out


def eisenstein_xy(x, y, s, trunc: int | None = None) -> np.ndarray:
    """E(x + iy, s) on arrays of points, no reduction; s on the line Re s = 1/2 or to its right.

    Without ``trunc`` the truncation starts at auto_trunc and is doubled while
    the last retained term is above 1e-12 of the constant term; an explicit
    ``trunc`` that is too short raises TruncationError.
    """
    s = complex(s)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    fixed = trunc is not None
    if not fixed:
        trunc = auto_trunc(abs(s.real - 0.5) + abs(s.imag), float(y.min()))
    lam2s = completed_zeta(2 * s)
    const = y ** s + phi(s) * y ** (1 - s)
    scale = np.maximum(np.abs(const), 1.0)
    while True:
        n = np.arange(1, trunc + 1)
        coef = (4.0 / lam2s) * n ** (s - 0.5) * _divisor_sigma(trunc, 1 - 2 * s)[1:]
        arg = 2.0 * math.pi * np.outer(y, n)
        K = np.asarray(kbessel(s - 0.5, arg.ravel())).reshape(arg.shape)
        last = np.abs(coef[-1] * K[:, -1]) * np.sqrt(y)
        if np.all(last <= 1e-12 * scale):
            break
        if fixed:
            raise TruncationError(f"last Fourier term {last.max():.2e} is not negligible; raise trunc")
        trunc *= 2
    terms = coef[None, :] * K * np.cos(2.0 * math.pi * np.outer(x, n))
    return const + np.sqrt(y) * terms.sum(axis=1)


def eisenstein(z: Point, t: float, trunc: int | None = None, *, reduce: bool = True) -> complex:
    """E(z, 1/2 + it). With ``reduce`` the point is first moved into the fundamental domain."""
    if reduce:
        z, _ = reduce_to_fundamental(z)
    return complex(eisenstein_xy([z.x], [z.y], 0.5 + 1j * t, trunc)[0])


def eisenstein_s(z: Point, s, trunc: int | None = None, *, reduce: bool = True) -> complex:
    """E(z, s) for general s (used at s = 2 against the lattice sum)."""
    if reduce:
        z, _ = reduce_to_fundamental(z)
    return complex(eisenstein_xy([z.x], [z.y], s, trunc)[0])


def eisenstein_many(points, t: float) -> np.ndarray:
    """E(z, 1/2 + it) over many points, each reduced first."""
    red = [reduce_to_fundamental(p)[0] for p in points]
    return eisenstein_xy([p.x for p in red], [p.y for p in red], 0.5 + 1j * t)


# ---------------------------------------------------------------------------
# Maass cusp forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaassFormData:
    """Spectral parameter t (eigenvalue 1/4 + t^2), parity, Hecke eigenvalues lam[n-1] = lambda(n), rho(1)."""

    t: float
    parity: str
    lam: tuple[float, ...]
    rho1: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.t > 0:
            raise DataError("t must be positive")
        if self.parity not in ("even", "odd"):
            raise DataError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if not self.lam:
            raise DataError("empty coefficient list")
        if abs(self.lam[0] - 1.0) > 1e-12:
            raise DataError("lambda(1) must be 1")
        if len(self.lam) >= 6 and abs(self.lam[1] * self.lam[2] - self.lam[5]) > 1e-6:
            raise DataError("lambda(2) lambda(3) != lambda(6): not a Hecke eigenform")

    def rho(self, n: int) -> float:
        return self.rho1 * self.lam[n - 1]

    @classmethod
    def from_json_obj(cls, obj: dict) -> "MaassFormData":
        try:
            lam = tuple(float(v) for v in obj["lambda"])
            meta = {k: v for k, v in obj.items() if k not in ("t", "parity", "rho1", "lambda")}
            return cls(float(obj["t"]), str(obj["parity"]), lam, float(obj.get("rho1", 1.0)), meta)
        except KeyError as exc:
            raise DataError(f"missing field {exc}") from exc


def load_maass_forms(path) -> list[MaassFormData]:
    """Read a JSON list of {"t", "parity", "rho1", "lambda"} objects."""
    with open(Path(path)) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: {exc}") from exc
    if isinstance(raw, dict):
        raw = raw.get("forms", [raw])
    out = []
    for i, obj in enumerate(raw):
        try:
            out.append(MaassFormData.from_json_obj(obj))
        except DataError as exc:
            raise DataError(f"{path}: form {i}: {exc}") from exc
    return out


def maass_eval(data: MaassFormData, z: Point, *, reduce: bool = True) -> float:
    """u(z) = 2 rho(1) sum_n lambda(n) sqrt(y) K_{it}(2 pi n y) cos(2 pi n x), sin for odd forms."""
    if reduce:
        z, _ = reduce_to_fundamental(z)
    N = auto_trunc(data.t, z.y)
    if N > len(data.lam):
        raise DataError(f"need {N} coefficients at y={z.y:.4g}, file has {len(data.lam)}")
    n = np.arange(1, N + 1)
    K = np.asarray(kbessel(1j * data.t, 2.0 * math.pi * n * z.y))
    trig = np.cos if data.parity == "even" else np.sin
    lam = np.asarray(data.lam[:N])
    return float(2.0 * data.rho1 * math.sqrt(z.y) * np.sum(lam * K * trig(2.0 * math.pi * n * z.x)))


# ---------------------------------------------------------------------------
# Weyl sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeylSumResult:
    D: int
    t: float
    direct: complex
    formula: complex
    residual: float
    weighted_direct: complex
    weighted_residual: float
    units_ambiguous: bool

    @property
    def rel_residual(self) -> float:
        return self.residual / max(abs(self.direct), abs(self.formula), 1e-300)


def weyl_formula(D: int, t: float) -> complex:
    """(sqrt|D|/2)^s L(s, chi_D) zeta(s) / zeta(2s) at s = 1/2 + it."""
    s = 0.5 + 1j * t
    return (math.sqrt(abs(D)) / 2.0) ** s * dirichlet_l(s, D) * zeta(s) / zeta(2 * s)


def weyl_sum_eisenstein(D: int, t: float) -> WeylSumResult:
    """Sum of E(z, 1/2+it) over the Heegner points of D against its L-function expression.

    ``weighted_*`` weight each point by 2/w(D), which only differs for D = -3, -4.
    """
    check_discriminant(D)
    if abs(t) < 0.1:
        raise ValueError("|t| >= 0.1 required (zeta(1 + 2it) has a pole at t = 0)")
    hs = heegner_points(D)
    vals = eisenstein_xy([p.x for p in hs.points], [p.y for p in hs.points], 0.5 + 1j * t)
    direct = complex(math.fsum(vals.real) + 1j * math.fsum(vals.imag))
    weighted = direct * 2.0 / unit_count(D)
    formula = weyl_formula(D, t)
    return WeylSumResult(D, t, direct, formula, abs(direct - formula), weighted, abs(weighted - formula), D in (-3, -4))


def weyl_sum_cusp(data: MaassFormData, D: int) -> float:
    """Direct sum of a cusp form over the Heegner points of D."""
    check_discriminant(D)
    return math.fsum(maass_eval(data, p) for p in heegner_points(D).points)
