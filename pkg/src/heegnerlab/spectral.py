"""Eigenvalue lists, spectral exponential sums S(T, X) and Weyl-law diagnostics."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

WEYL_CONSTANT = 1.0 / 12.0  # vol / (4 pi) with vol = pi/3


class EigenvalueFileError(ValueError):
    pass


@dataclass(frozen=True)
class EigenvalueList:
    values: tuple[float, ...]
    source: str = ""

    def __post_init__(self):
        v = self.values
        if any(x <= 0 for x in v):
            raise ValueError("eigenvalue parameters must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("values must be strictly increasing")

    @classmethod
    def from_values(cls, values, source: str = "") -> "EigenvalueList":
        return cls(tuple(sorted(set(float(x) for x in values))), source)

    def __len__(self) -> int:
        return len(self.values)

    def count(self, T: float) -> int:
        """#{t_j <= T}."""
        return int(np.searchsorted(np.asarray(self.values), T, side="right"))


def load_eigenvalues(path) -> EigenvalueList:
    """One decimal per line; '#' starts a comment; blank lines are skipped."""
    path = Path(path)
    vals = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                x = float(text)
            except ValueError:
                raise EigenvalueFileError(f"{path}:{lineno}: cannot parse {text!r}") from None
            if not (x > 0) or not math.isfinite(x):
                raise EigenvalueFileError(f"{path}:{lineno}: value {x} is not a positive number")
            vals.append(x)
    uniq = sorted(set(vals))
    if len(uniq) < len(vals):
        warnings.warn(f"{path}: dropped {len(vals) - len(uniq)} duplicate value(s)", stacklevel=2)
    return EigenvalueList(tuple(uniq), source=str(path))


def _chunk_sum(ts: np.ndarray, logX: float) -> tuple[float, float]:
    ph = ts * logX
    return math.fsum(np.cos(ph)), math.fsum(np.sin(ph))


def spectral_exp_sum(E: EigenvalueList, T: float, X: float, *, threads: int = 1,
                     chunk: int = 4096) -> complex:
    """S(T, X) = sum_{t_j <= T} X^{i t_j}, accumulated in ascending order.

    Each fixed chunk is summed exactly-rounded (math.fsum) and the chunk sums
    are combined with fsum as well, so the result does not depend on ``threads``.
    """
    if not X > 0:
        raise ValueError("X must be positive")
    ts = np.asarray(E.values[: E.count(T)], dtype=float)
    if ts.size == 0:
        return 0j
    logX = math.log(X)
    pieces = [ts[i : i + chunk] for i in range(0, ts.size, chunk)]
    if threads > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda p: _chunk_sum(p, logX), pieces))
    else:
        parts = [_chunk_sum(p, logX) for p in pieces]
    return complex(math.fsum(p[0] for p in parts), math.fsum(p[1] for p in parts))


def weyl_law_deficit(E: EigenvalueList, T: float) -> float:
    """#{t_j <= T} - T^2/12; warns when T is beyond the largest listed value."""
    if E.values and T > E.values[-1] or not E.values and T > 0:
        warnings.warn(f"T={T} extrapolates beyond the list (max {E.values[-1] if E.values else None})",
                      stacklevel=2)
    return E.count(T) - WEYL_CONSTANT * T * T


def luo_sarnak_shape(E: EigenvalueList, X_grid, T_grid) -> list[dict]:
    """Rows of |S(T, X)| normalised by X^{1/8} T^{5/4} and by T."""
    rows = []
    for X in X_grid:
        for T in T_grid:
            S = spectral_exp_sum(E, T, X)
            rows.append({
                "X": float(X),
                "T": float(T),
                "count": E.count(T),
                "abs_S": abs(S),
                "S_over_X18_T54": abs(S) / (X ** 0.125 * T ** 1.25),
                "S_over_T": abs(S) / T,
            })
    return rows
