import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heegnerlab.spectral import (EigenvalueFileError, EigenvalueList, load_eigenvalues, luo_sarnak_shape,
                                 spectral_exp_sum, weyl_law_deficit)

ts = st.lists(st.floats(0.01, 500, allow_nan=False), max_size=300)


def geometric(h, n, X):
    """sum_{j=1}^n X^{i j h} in closed form."""
    q = cmath.exp(1j * h * math.log(X))
    if abs(q - 1) < 1e-15:
        return complex(n)
    return q * (1 - q**n) / (1 - q)


def test_load_examples(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("1.0\n2.0\n3.0\n")
    assert load_eigenvalues(p).values == (1.0, 2.0, 3.0)
    p.write_text("# header\n2.0\n1.0  # note\n\n2.0\n")
    with pytest.warns(UserWarning, match="duplicate"):
        E = load_eigenvalues(p)
    assert E.values == (1.0, 2.0)
    p.write_text("")
    assert len(load_eigenvalues(p)) == 0


def test_load_errors(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("1.0\nabc\n")
    with pytest.raises(EigenvalueFileError, match=":2:"):
        load_eigenvalues(p)
    p.write_text("1.0\n-2.0\n")
    with pytest.raises(EigenvalueFileError, match=":2:"):
        load_eigenvalues(p)
    with pytest.raises(OSError):
        load_eigenvalues(tmp_path / "nope.txt")


def test_sum_examples():
    E = EigenvalueList.from_values([1, 2, 3])
    assert spectral_exp_sum(E, 10, 1.0) == 3
    assert spectral_exp_sum(E, 2.5, 1.0) == 2
    assert abs(spectral_exp_sum(E, 10, math.exp(2 * math.pi))) <= 3
    with pytest.raises(ValueError):
        spectral_exp_sum(E, 10, 0.0)
    assert spectral_exp_sum(EigenvalueList.from_values([]), 10, 5.0) == 0


@pytest.mark.parametrize("h,n,X", [(0.1, 1000, 7.0), (0.37, 20000, 2.0), (1.0, 5, 100.0), (0.013, 50000, 1e3)])
def test_sum_geometric_oracle(h, n, X):
    E = EigenvalueList.from_values(h * np.arange(1, n + 1))
    assert abs(spectral_exp_sum(E, h * n + 1e-9, X) - geometric(h, n, X)) < 1e-12 * max(1.0, math.sqrt(n))


@given(ts, st.floats(0.01, 600), st.floats(1e-3, 1e6))
def test_sum_bounded_by_count_and_conjugate(values, T, X):
    E = EigenvalueList.from_values(values)
    S = spectral_exp_sum(E, T, X)
    assert abs(S) <= E.count(T) + 1e-9
    assert abs(spectral_exp_sum(E, T, 1 / X) - S.conjugate()) < 1e-12 * max(1, E.count(T))


def test_sum_thread_determinism():
    rng = np.random.default_rng(0)
    E = EigenvalueList.from_values(rng.uniform(0, 1000, 30000))
    ref = spectral_exp_sum(E, 900, 37.5, threads=1, chunk=1024)
    for th in (2, 4, 8):
        assert spectral_exp_sum(E, 900, 37.5, threads=th, chunk=1024) == ref


def test_weyl_deficit_examples():
    with pytest.warns(UserWarning):
        assert weyl_law_deficit(EigenvalueList.from_values([]), 1.0) == pytest.approx(-1 / 12)
    E = EigenvalueList.from_values(np.sqrt(12 * np.arange(1, 2001)))
    for T in np.linspace(1, E.values[-1], 300):
        assert abs(weyl_law_deficit(E, T)) <= 1
    with pytest.warns(UserWarning, match="extrapolates"):
        weyl_law_deficit(E, 1e4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        weyl_law_deficit(E, 10.0)


def test_luo_sarnak_shape():
    E = EigenvalueList.from_values([5.0])
    rows = luo_sarnak_shape(E, [1.0, 10.0], [1.0, 4.0, 20.0])
    assert len(rows) == 6
    for r in rows:
        assert r["S_over_X18_T54"] <= 1 and r["S_over_T"] <= 1
        if r["X"] == 1.0:
            assert r["S_over_T"] == r["count"] / r["T"]
    E = EigenvalueList.from_values(np.linspace(1, 100, 400))
    rows = luo_sarnak_shape(E, [2, 10, 100], [20, 50, 100])
    counts = [r["count"] for r in rows if r["X"] == 2]
    assert counts == sorted(counts)
    assert all(math.isfinite(r["abs_S"]) for r in rows)


def test_eigenvalue_list_invariants():
    with pytest.raises(ValueError):
        EigenvalueList((2.0, 1.0))
    with pytest.raises(ValueError):
        EigenvalueList((0.0,))
    assert EigenvalueList.from_values([3, 1, 3]).values == (1.0, 3.0)
