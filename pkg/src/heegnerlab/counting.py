"""Hyperbolic lattice-point counting for PSL(2, Z).

N(z, w, X) = #{gamma in PSL(2, Z) : 4 u(gamma z, w) + 2 <= X}.

The fast counter walks over bottom rows (c, d) of gamma. For a fixed coprime
row the admissible top rows are (a0 + t c, b0 + t d), t in Z, and
Re(gamma z) = t + const, so the condition becomes |t - t*| <= r: each row
contributes an interval of integers. Rows whose interval endpoint sits within
rounding distance of an integer are settled in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .halfplane import Point, reduce_to_fundamental
from .qforms import check_discriminant, heegner_points

BRUTE_FORCE_MAX_X = 1e4
_ROW_CHUNK = 1 << 21


def volume_modular() -> float:
    """Hyperbolic area of the modular surface, pi/3."""
    return math.pi / 3.0


def main_term(X: float) -> float:
    return math.pi * X / volume_modular()


@dataclass(frozen=True)
class CountQuery:
    z: Point
    w: Point
    X: float

    def __post_init__(self):
        if not math.isfinite(self.X):
            raise ValueError("X must be finite")


@dataclass(frozen=True)
class CountResult:
    count: int
    main_term: float
    error: float

    @classmethod
    def of(cls, count: int, X: float) -> "CountResult":
        m = main_term(X)
        return cls(count, m, count - m)


# ---------------------------------------------------------------------------
# fast counter
# ---------------------------------------------------------------------------


def _inverse_mod(d: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised extended Euclid: (gcd(c, d), d^{-1} mod c where the gcd is 1)."""
    old_r = c.copy()
    r = np.mod(d, c)
    old_s = np.zeros_like(c)
    s = np.ones_like(c)
    live = r != 0
    while np.any(live):
        q = np.zeros_like(c)
        q[live] = old_r[live] // r[live]
        old_r, r = np.where(live, r, old_r), np.where(live, old_r - q * r, r)
        old_s, s = np.where(live, s, old_s), np.where(live, old_s - q * s, s)
        live = r != 0
    return old_r, np.mod(old_s, c)


def _exact_ok(a: int, b: int, c: int, d: int, zr, wr, Xr: Fraction) -> bool:
    """4u(gamma z, w) + 2 <= X in exact rationals.

    With q = |cz + d|^2 and P = (ac|z|^2 + (ad + bc)x + bd), the condition reads
    (P - u q)^2 + y^2 + v^2 q^2 <= X q y v; both sides are non-negative, so it
    is squared to remove the irrational y v.
    """
    x, y2 = zr
    u, v2 = wr
    q = (c * x + d) ** 2 + c * c * y2
    P = a * c * (x * x + y2) + (a * d + b * c) * x + b * d
    lhs = (P - u * q) ** 2 + y2 + v2 * q * q
    return lhs * lhs <= Xr * Xr * q * q * y2 * v2


class _Row:
    """One bottom row (c, d) with a particular solution (a0, b0)."""

    __slots__ = ("c", "d", "a0", "b0")

    def __init__(self, c: int, d: int, a0: int):
        self.c, self.d, self.a0 = c, d, a0
        self.b0 = (a0 * d - 1) // c if c else 0

    def ok(self, t: int, zr, wr, Xr) -> bool:
        if self.c == 0:
            return _exact_ok(1, t, 0, 1, zr, wr, Xr)
        return _exact_ok(self.a0 + t * self.c, self.b0 + t * self.d, self.c, self.d, zr, wr, Xr)


def _resolve_row(row: _Row, tstar: float, lo_est: int, hi_est: int, zr, wr, Xr) -> int:
    """Exact count of integers t in the (convex) admissible set of one row."""
    k0 = int(math.floor(tstar + 0.5))
    if not row.ok(k0, zr, wr, Xr):
        return 0
    hi = max(hi_est, k0)
    while not row.ok(hi, zr, wr, Xr):
        hi -= 1
    while row.ok(hi + 1, zr, wr, Xr):
        hi += 1
    lo = min(lo_est, k0)
    while not row.ok(lo, zr, wr, Xr):
        lo += 1
    while row.ok(lo - 1, zr, wr, Xr):
        lo -= 1
    return hi - lo + 1


def _row_intervals(tstar, R2, scale):
    """Float endpoints and an ambiguity mask for rows with |t - t*|^2 <= R2."""
    r = np.sqrt(np.maximum(R2, 0.0))
    lo = np.ceil(tstar - r)
    hi = np.floor(tstar + r)
    # rounding in r is about eps * scale / r; t* carries a few ulps
    tol = 1e-10 * (1.0 + np.abs(tstar) + r) + 1e-12 * scale / np.maximum(r, 1e-300)
    near_lo = np.abs((tstar - r) - np.round(tstar - r)) < tol
    near_hi = np.abs((tstar + r) - np.round(tstar + r)) < tol
    amb = near_lo | near_hi | (np.abs(R2) <= 1e-9 * scale)
    n = np.maximum(hi - lo + 1, 0)
    return lo, hi, n, amb


def count_points(z: Point, w: Point, X: float) -> int:
    """N(z, w, X), exactly."""
    if X < 2:
        return 0
    zs, _ = reduce_to_fundamental(z)
    ws, _ = reduce_to_fundamental(w)
    x, y = zs.x, zs.y
    u, v = ws.x, ws.y
    zr, wr, Xr = zs.rational(), ws.rational(), Fraction(X)
    # rows need qmin = y1/v + v/y1 <= X, i.e. |cz+d|^2 <= (y/v) (X + sqrt(X^2-4))/2
    M = (y / v) * 0.5 * (X + math.sqrt(max(X * X - 4.0, 0.0))) * (1.0 + 1e-9) + 1e-9
    total = 0
    pending: list[tuple[_Row, float, int, int]] = []

    # the translations T^b (c = 0)
    y1 = y
    R2 = y1 * v * (X - (y1 / v + v / y1))
    lo, hi, n, amb = _row_intervals(np.array([u - x]), np.array([R2]), X * y1 * v)
    if amb[0]:
        pending.append((_Row(0, 1, 1), u - x, int(lo[0]), int(hi[0])))
    else:
        total += int(n[0])

    cmax = int(math.floor(math.sqrt(M) / y)) + 1
    c_all = np.arange(1, cmax + 1, dtype=np.int64)
    half = np.sqrt(np.maximum(M - (c_all * y) ** 2, 0.0))
    d_lo = np.floor(-c_all * x - half).astype(np.int64)
    d_hi = np.ceil(-c_all * x + half).astype(np.int64)
    widths = np.maximum(d_hi - d_lo + 1, 0)
    start = 0
    while start < cmax:
        # chunk of c values holding about _ROW_CHUNK candidate rows
        cum = np.cumsum(widths[start:])
        stop = start + max(1, int(np.searchsorted(cum, _ROW_CHUNK, side="right")))
        cs = c_all[start:stop]
        ws_ = widths[start:stop]
        c = np.repeat(cs, ws_)
        offs = np.arange(c.size) - np.repeat(np.cumsum(ws_) - ws_, ws_)
        d = np.repeat(d_lo[start:stop], ws_) + offs
        start = stop

        g, a0 = _inverse_mod(d, c)
        cf = c.astype(float)
        df = d.astype(float)
        q = (cf * x + df) ** 2 + (cf * y) ** 2
        keep = (g == 1) & (q <= M)
        c, d, a0, cf, df, q = c[keep], d[keep], a0[keep], cf[keep], df[keep], q[keep]
        y1 = y / q
        qmin = y1 / v + v / y1
        R2 = y1 * v * (X - qmin)
        tstar = u - a0 / cf + (cf * x + df) / (cf * q)
        lo, hi, n, amb = _row_intervals(tstar, R2, X * y1 * v)
        total += int(n[~amb].sum())
        for i in np.flatnonzero(amb):
            pending.append((_Row(int(c[i]), int(d[i]), int(a0[i])), float(tstar[i]), int(lo[i]), int(hi[i])))

    for row, ts, lo_e, hi_e in pending:
        total += _resolve_row(row, ts, lo_e, hi_e, zr, wr, Xr)
    return total


def count(q: CountQuery) -> CountResult:
    """Exact N(z, w, X) with its main term 3X and error N - 3X."""
    return CountResult.of(count_points(q.z, q.w, q.X), q.X)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def _frobenius(x: float, y: float) -> tuple[float, float]:
    """||g_z||_F and ||g_z^{-1}||_F for g_z = [[sqrt y, x/sqrt y], [0, 1/sqrt y]]."""
    f = math.sqrt(y + (x * x + 1.0) / y)
    return f, f


def _norm_exact_ok(a, b, c, d, zr, wr, Xr) -> bool:
    """||g_w^{-1} gamma g_z||_F^2 <= X, multiplied through by y v and squared."""
    x, y2 = zr
    u, v2 = wr
    e = a - u * c
    lhs = e * e * y2 + (e * x + b - u * d) ** 2 + c * c * y2 * v2 + (c * x + d) ** 2 * v2
    return lhs * lhs <= Xr * Xr * y2 * v2


def brute_force_bound(z: Point, w: Point, X: float) -> int:
    return math.ceil(_frobenius(w.x, w.y)[0] * math.sqrt(X) * _frobenius(z.x, z.y)[1])


def brute_force_count(q: CountQuery) -> int:
    """Exhaustive enumeration over matrices with entries bounded by B(z, w, X).

    Uses 4u(gamma z, w) + 2 = ||g_w^{-1} gamma g_z||_F^2, so no entry of gamma
    exceeds ||g_w||_F sqrt(X) ||g_z^{-1}||_F.
    """
    z, w, X = q.z, q.w, q.X
    if X > BRUTE_FORCE_MAX_X:
        raise ValueError(f"brute_force_count is limited to X <= {BRUTE_FORCE_MAX_X:g}")
    if X < 2:
        return 0
    B = brute_force_bound(z, w, X)
    x, y, u, v = z.x, z.y, w.x, w.y
    zr, wr, Xr = z.rational(), w.rational(), Fraction(X)

    def norms(a, b, c, d):
        e = a - u * c
        return (e * e * y * y + (e * x + b - u * d) ** 2 + c * c * y * y * v * v + (c * x + d) ** 2 * v * v) / (y * v)

    def tally(a, b, c, d):
        val = norms(a.astype(float), b.astype(float), c.astype(float), d.astype(float))
        sure = val <= X * (1 - 1e-9)
        close = np.abs(val - X) <= 1e-9 * X
        n = int(sure.sum())
        for i in np.flatnonzero(close):
            n += _norm_exact_ok(int(a[i]), int(b[i]), int(c[i]), int(d[i]), zr, wr, Xr)
        return n

    total = 0
    bs = np.arange(-B, B + 1, dtype=np.int64)
    ones = np.ones_like(bs)
    total += tally(ones, bs, 0 * ones, ones)
    A, Dm = np.meshgrid(bs, bs, indexing="ij")
    A, Dm = A.ravel(), Dm.ravel()
    AD1 = A * Dm - 1
    for c in range(1, B + 1):
        ok = AD1 % c == 0
        b = AD1[ok] // c
        inb = np.abs(b) <= B
        a, d, b = A[ok][inb], Dm[ok][inb], b[inb]
        total += tally(a, b, np.full_like(a, c), d)
    return total


# ---------------------------------------------------------------------------
# Heegner averages
# ---------------------------------------------------------------------------


def heegner_errors(D: int, X: float) -> list[float]:
    """Per-point errors N(z, z, X) - 3X over the Heegner points, in sorted form order."""
    check_discriminant(D)
    m = main_term(X)
    return [count_points(p, p, X) - m for p in heegner_points(D).points]


def heegner_error_average(D: int, X: float, weights=None) -> float:
    """(1/h(D)) sum_z f(z) (N(z, z, X) - 3X), with f = 1 unless per-point weights are given."""
    errs = heegner_errors(D, X)
    if weights is None:
        weights = [1.0] * len(errs)
    if len(weights) != len(errs):
        raise ValueError(f"expected {len(errs)} weights, got {len(weights)}")
    return math.fsum(f * e for f, e in zip(weights, errs)) / len(errs)
