"""Experiment runner: scans over discriminants, X and t, with CSV/JSON output.

Every scan is a list of independent rows. Rows are computed in a thread pool,
merged back in key order and never abort the scan: a failing row carries its
error in the ``status`` column.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy
from scipy import integrate, stats

from . import __version__
from .automorphic import eisenstein_xy, weyl_sum_eisenstein
from .counting import heegner_error_average
from .halfplane import Point, distance
from .kernels import radius_from_X, sandwich_check
from .qforms import class_group, class_number_formula, fundamental_discriminants, heegner_points, unit_count
from .specfun import dirichlet_l

KINDS = ("error-scan", "equi-scan", "supnorm-scan", "class-scan", "weyl-verify")


@dataclass
class ExperimentConfig:
    kind: str
    D_list: list[int] = field(default_factory=list)
    X_grid: list[float] = field(default_factory=list)
    t_grid: list[float] = field(default_factory=list)
    out: str | None = None
    seed: int = 0
    threads: int = 1
    delta: float = 0.01
    grid: int = 50
    y_max: float = 3.0
    sample: int = 0
    D_range: tuple[int, int] = (-10000, -3)
    check_sandwich: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        self.D_list = [int(d) for d in self.D_list]
        self.X_grid = [float(x) for x in self.X_grid]
        self.t_grid = [float(t) for t in self.t_grid]
        self.D_range = tuple(int(d) for d in self.D_range)
        if any(x < 2 for x in self.X_grid):
            raise ValueError("X-grid values must be >= 2")
        if self.threads < 1:
            raise ValueError("thread budget must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        alias = {"D-list": "D_list", "X-grid": "X_grid", "t-grid": "t_grid", "D-range": "D_range"}
        clean = {}
        for k, v in d.items():
            k = alias.get(k, k.replace("-", "_"))
            if k not in names:
                raise ValueError(f"unknown config key {k!r}")
            clean[k] = v
        return cls(**clean)

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        with open(path) as fh:
            d = json.load(fh)
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(d)

    def discriminants(self) -> list[int]:
        """Explicit D-list, or a seeded sample of ``sample`` fundamental discriminants from D_range."""
        if self.D_list:
            return list(self.D_list)
        lo, hi = self.D_range
        pool = fundamental_discriminants(lo, hi)
        if self.sample and self.sample < len(pool):
            return sorted(random.Random(self.seed).sample(pool, self.sample), reverse=True)
        return pool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["D_range"] = list(self.D_range)
        return d


def log_grid(lo: float, hi: float, n: int) -> list[float]:
    return [float(x) for x in np.geomspace(lo, hi, n)]


def default_config(kind: str, **kw) -> ExperimentConfig:
    base = {
        "error-scan": dict(D_list=[-4, -23], X_grid=log_grid(1e2, 1e4, 16)),
        "equi-scan": dict(sample=50, t_grid=[1.0], D_range=(-10000, -3)),
        "supnorm-scan": dict(t_grid=[1.0, 2.0, 5.0, 10.0]),
        "class-scan": dict(D_range=(-10000, -3)),
        "weyl-verify": dict(D_range=(-200, -3), t_grid=[0.5, 1.0, 2.0, 5.0]),
    }[kind]
    base.update(kw)
    return ExperimentConfig(kind=kind, **base)


COLUMNS = {
    "error-scan": ["D", "X", "h", "error", "abs_e_over_X1_2", "abs_e_over_X7_12", "abs_e_over_X2_3",
                   "units_ambiguous", "status"],
    "equi-scan": ["D", "h", "bump_mean", "bump_expected", "discrepancy", "disc_const", "units_ambiguous", "status"],
    "supnorm-scan": ["t", "grid", "max_abs_E", "normalized", "status"],
    "class-scan": ["D", "h", "L1", "h_formula", "agree", "h_over_sqrtD", "w", "status"],
    "weyl-verify": ["D", "t", "h", "direct_re", "direct_im", "formula_re", "formula_im", "residual",
                    "weighted_residual", "flag", "pass", "status"],
}


@dataclass
class ExperimentResult:
    kind: str
    rows: list[dict]
    meta: dict

    def columns(self) -> list[str]:
        cols = list(COLUMNS.get(self.kind, []))
        for r in self.rows:
            for k in r:
                if k not in cols:
                    cols.insert(len(cols) - 1 if cols and cols[-1] == "status" else len(cols), k)
        return cols


def _map_rows(func, keys, threads: int, names=("key",)) -> list[dict]:
    """Evaluate func(key) for each key; errors become status rows; order follows keys."""

    def safe(key):
        try:
            row = func(key)
            row.setdefault("status", "ok")
            return row
        except Exception as exc:  # a bad row must not stop the scan
            vals = key if isinstance(key, tuple) else (key,)
            return {**dict(zip(names, vals)), "status": f"error: {type(exc).__name__}: {exc}"}

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(safe, keys))
    return [safe(k) for k in keys]


def _meta(cfg: ExperimentConfig, started: float, **extra) -> dict:
    return {
        "config": cfg.to_dict(),
        "versions": {"heegnerlab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "timing": {"started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(started)),
                   "seconds": round(time.time() - started, 3)},
        **extra,
    }


# ---------------------------------------------------------------------------
# error scan
# ---------------------------------------------------------------------------


def loglog_slope(X, e) -> float | None:
    """Least-squares slope of log|e| against log X over points with e != 0."""
    pts = [(math.log(x), math.log(abs(v))) for x, v in zip(X, e) if v not in (None, 0) and math.isfinite(v)]
    if len(pts) < 2:
        return None
    a = np.array(pts)
    return float(np.polyfit(a[:, 0], a[:, 1], 1)[0])


def run_error_scan(cfg: ExperimentConfig) -> ExperimentResult:
    started = time.time()
    if any(x > 1e6 for x in cfg.X_grid):
        raise ValueError("error-scan X-grid is limited to 1e6")
    keys = [(D, X) for D in cfg.discriminants() for X in cfg.X_grid]

    def row(key):
        D, X = key
        e = heegner_error_average(D, X)
        return {"D": D, "X": X, "h": len(class_group(D)), "error": e,
                "abs_e_over_X1_2": abs(e) / X ** 0.5, "abs_e_over_X7_12": abs(e) / X ** (7 / 12),
                "abs_e_over_X2_3": abs(e) / X ** (2 / 3), "units_ambiguous": D in (-3, -4)}

    rows = _map_rows(row, keys, cfg.threads, ("D", "X"))
    rows.sort(key=lambda r: (-r["D"], r["X"]))
    slopes = {}
    for D in sorted({r["D"] for r in rows}, reverse=True):
        ok = [r for r in rows if r["D"] == D and r["status"] == "ok"]
        slopes[str(D)] = loglog_slope([r["X"] for r in ok], [r["error"] for r in ok])
    extra = {"slopes": slopes,
             "note": "desk-scale normalised columns and fitted slopes; no exponent is asserted"}
    if cfg.check_sandwich:
        extra["sandwich"] = [{"X": X, "delta": cfg.delta, "ok": sandwich_check(X, cfg.delta)}
                             for X in kernel_pairs(cfg)]
    return ExperimentResult(cfg.kind, rows, _meta(cfg, started, **extra))


def kernel_pairs(cfg: ExperimentConfig) -> list[float]:
    """X values of a scan for which the smoothed kernels with cfg.delta exist (delta < Y)."""
    return [X for X in cfg.X_grid if X > 2 and cfg.delta < radius_from_X(X)]


# ---------------------------------------------------------------------------
# equidistribution
# ---------------------------------------------------------------------------

BUMP_CENTER = Point(0.0, 1.4)
BUMP_RADIUS = 0.3
FD_YMAX = 10.0


def bump_profile(r):
    """exp(1 - 1/(1 - (r/rho)^2)) inside the hyperbolic disc of radius rho, 0 outside."""
    q = np.asarray(r, dtype=float) / BUMP_RADIUS
    out = np.zeros_like(q)
    inside = q < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside] ** 2))
    return out


def bump(z: Point) -> float:
    return float(bump_profile(distance(z, BUMP_CENTER)))


def _bump_xy(x, y):
    x0, y0 = BUMP_CENTER.x, BUMP_CENTER.y
    u = ((x - x0) ** 2 + (y - y0) ** 2) / (4.0 * y * y0)
    return bump_profile(2.0 * np.arcsinh(np.sqrt(u)))


@lru_cache(maxsize=None)
def bump_integral() -> float:
    """int_F f dmu over the fundamental domain (truncated at y = 10, beyond the support)."""
    val, err = integrate.dblquad(
        lambda y, x: float(_bump_xy(np.array(x), np.array(y))) / (y * y),
        -0.5, 0.5, lambda x: math.sqrt(1.0 - x * x), lambda x: FD_YMAX,
        epsabs=1e-10, epsrel=1e-8,
    )
    if not math.isfinite(val) or err > 1e-6:
        raise RuntimeError(f"fundamental-domain quadrature failed (estimate {val}, error {err})")
    return val


@lru_cache(maxsize=None)
def fd_volume() -> float:
    """int_F dmu by the same quadrature up to y = 10 plus the exact tail 1/10; should be pi/3."""
    val, err = integrate.dblquad(lambda y, x: 1.0 / (y * y), -0.5, 0.5,
                                 lambda x: math.sqrt(1.0 - x * x), lambda x: FD_YMAX,
                                 epsabs=1e-10, epsrel=1e-8)
    if not math.isfinite(val) or err > 1e-6:
        raise RuntimeError(f"fundamental-domain quadrature failed (estimate {val}, error {err})")
    return val + 1.0 / FD_YMAX


def bump_integral_radial() -> float:
    """Same integral in geodesic polar coordinates about the bump centre."""
    val, _ = integrate.quad(lambda r: float(bump_profile(r)) * math.sinh(r), 0.0, BUMP_RADIUS,
                            epsabs=1e-14, epsrel=1e-12)
    return 2.0 * math.pi * val


def _polar_nodes(n_r: int = 48, n_th: int = 64):
    """Points and weights (dmu included) of a tensor rule on the bump's support disc."""
    xr, wr = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * BUMP_RADIUS * (xr + 1.0)
    wr = 0.5 * BUMP_RADIUS * wr
    th = 2.0 * math.pi * np.arange(n_th) / n_th
    R, TH = np.meshgrid(r, th, indexing="ij")
    W = (wr * np.sinh(r))[:, None] * np.full(n_th, 2.0 * math.pi / n_th)[None, :]
    # point at distance R, angle TH from the centre (disc model about z0)
    z0 = complex(BUMP_CENTER.x, BUMP_CENTER.y)
    wdisc = np.tanh(R / 2.0) * np.exp(1j * TH)
    z = (z0 - np.conj(z0) * wdisc) / (1.0 - wdisc)
    return z.real.ravel(), z.imag.ravel(), R.ravel(), W.ravel()


@lru_cache(maxsize=None)
def eisenstein_window_integral(t: float) -> float:
    """int f |E(z, 1/2+it)|^2 dmu for the bump f."""
    x, y, r, w = _polar_nodes()
    E = eisenstein_xy(x, y, 0.5 + 1j * t)
    return float(np.sum(w * bump_profile(r) * np.abs(E) ** 2))


def _equi_row(D: int, t_grid) -> dict:
    hs = heegner_points(D)
    vol = math.pi / 3.0
    f = [bump(p) for p in hs.points]
    row = {"D": D, "h": hs.h, "bump_mean": math.fsum(f) / hs.h, "bump_expected": bump_integral() / vol}
    row["discrepancy"] = abs(row["bump_mean"] - row["bump_expected"])
    # f = 1: mean over the points is 1, so this only measures the quadrature
    row["disc_const"] = abs(1.0 - fd_volume() / vol)
    if t_grid:
        x = np.array([p.x for p in hs.points])
        y = np.array([p.y for p in hs.points])
        fv = np.array(f)
        for t in t_grid:
            E = eisenstein_xy(x, y, 0.5 + 1j * t)
            mean = float(np.sum(fv * np.abs(E) ** 2)) / hs.h
            row[f"disc_E_t{t:g}"] = abs(mean - eisenstein_window_integral(t) / vol)
    row["units_ambiguous"] = D in (-3, -4)
    return row


def run_equi_scan(cfg: ExperimentConfig) -> ExperimentResult:
    started = time.time()
    Ds = cfg.discriminants()
    rows = _map_rows(lambda D: _equi_row(D, cfg.t_grid), Ds, cfg.threads, ("D",))
    rows.sort(key=lambda r: -r["D"])
    ok = [r for r in rows if r["status"] == "ok"]
    rho = None
    if len(ok) >= 3:
        rho = float(stats.spearmanr([-r["D"] for r in ok], [r["discrepancy"] for r in ok])[0])
    extra = {
        "spearman_absD_vs_discrepancy": rho,
        "bump": {"center": [BUMP_CENTER.x, BUMP_CENTER.y], "radius": BUMP_RADIUS,
                 "integral": bump_integral()},
        "note": "the Eisenstein columns weight |E|^2 by the smooth bump, not by a sharp window",
    }
    return ExperimentResult(cfg.kind, rows, _meta(cfg, started, **extra))


# ---------------------------------------------------------------------------
# sup-norm scan
# ---------------------------------------------------------------------------


def fd_grid(n: int, y_max: float = 3.0):
    """n x n grid over the fundamental domain below y_max."""
    xs = -0.5 + (np.arange(n) + 0.5) / n
    fr = (np.arange(n) + 0.5) / n
    X, F = np.meshgrid(xs, fr, indexing="ij")
    ylo = np.sqrt(1.0 - X * X)
    Y = ylo + F * (y_max - ylo)
    return X.ravel(), Y.ravel()


def supnorm(t: float, n: int, y_max: float = 3.0) -> float:
    x, y = fd_grid(n, y_max)
    return float(np.max(np.abs(eisenstein_xy(x, y, 0.5 + 1j * t))))


def run_supnorm_scan(cfg: ExperimentConfig) -> ExperimentResult:
    started = time.time()
    if any(abs(t) > 30 for t in cfg.t_grid):
        raise ValueError("supnorm-scan is limited to |t| <= 30")

    def row(t):
        m = supnorm(t, cfg.grid, cfg.y_max)
        return {"t": t, "grid": cfg.grid, "max_abs_E": m, "normalized": m / abs(t) ** (3 / 8)}

    rows = _map_rows(row, list(cfg.t_grid), cfg.threads, ("t",))
    rows.sort(key=lambda r: r["t"])
    return ExperimentResult(cfg.kind, rows, _meta(cfg, started, normalizer="|t|^(1/2-1/8)"))


# ---------------------------------------------------------------------------
# Weyl-sum identity and class numbers
# ---------------------------------------------------------------------------


def run_weyl_verify(cfg: ExperimentConfig) -> ExperimentResult:
    started = time.time()
    if any(abs(t) < 0.1 for t in cfg.t_grid):
        raise ValueError("t-grid must avoid |t| < 0.1")
    keys = [(D, t) for D in cfg.discriminants() for t in cfg.t_grid]

    def row(key):
        r = weyl_sum_eisenstein(*key)
        return {"D": r.D, "t": r.t, "h": len(class_group(r.D)),
                "direct_re": r.direct.real, "direct_im": r.direct.imag,
                "formula_re": r.formula.real, "formula_im": r.formula.imag,
                "residual": r.residual, "weighted_residual": r.weighted_residual,
                "flag": "units-ambiguous" if r.units_ambiguous else "",
                "pass": (not r.units_ambiguous) and r.residual < 1e-6}

    rows = _map_rows(row, keys, cfg.threads, ("D", "t"))
    rows.sort(key=lambda r: (-r["D"], r["t"]))
    return ExperimentResult(cfg.kind, rows, _meta(cfg, started, weights_note="weighted_residual uses 2/w(D) per point"))


def run_class_scan(cfg: ExperimentConfig) -> ExperimentResult:
    started = time.time()

    def row(D):
        h = len(class_group(D))
        L1 = dirichlet_l(1.0, D).real
        hf = class_number_formula(D, L1)
        return {"D": D, "h": h, "L1": L1, "h_formula": hf, "agree": abs(hf - h) < 1e-6,
                "h_over_sqrtD": h / math.sqrt(-D), "w": unit_count(D)}

    rows = _map_rows(row, cfg.discriminants(), cfg.threads, ("D",))
    rows.sort(key=lambda r: -r["D"])
    return ExperimentResult(cfg.kind, rows, _meta(cfg, started))


RUNNERS = {
    "error-scan": run_error_scan,
    "equi-scan": run_equi_scan,
    "supnorm-scan": run_supnorm_scan,
    "class-scan": run_class_scan,
    "weyl-verify": run_weyl_verify,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.kind](cfg)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def emit(result: ExperimentResult, path=None, fmt: str = "csv", stream=None) -> None:
    """Write rows as CSV (header + rows, 17 significant digits) or JSON {meta, rows}.

    CSV files get the metadata in a ``<path>.meta.json`` sidecar so that the
    CSV itself only depends on the rows.
    """
    if fmt == "csv":
        text = _csv_text(result)
    elif fmt == "json":
        text = json.dumps({"meta": result.meta, "rows": [{k: _json_safe(v) for k, v in r.items()} for r in result.rows]},
                          indent=1, default=str) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None:
        (stream or sys.stdout).write(text)
        return
    path = Path(path)
    path.write_text(text, newline="")
    if fmt == "csv":
        Path(str(path) + ".meta.json").write_text(json.dumps(result.meta, indent=1, default=str) + "\n")


def _csv_text(result: ExperimentResult) -> str:
    buf = io.StringIO()
    cols = result.columns()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(cols)
    for r in result.rows:
        w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def read_csv_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
