import math
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from heegnerlab.halfplane import reduce_to_fundamental
from heegnerlab.qforms import (DiscriminantError, QuadForm, character_table, class_group, class_number_formula,
                               fundamental_discriminants, heegner_points, is_fundamental, kronecker, reduce_form,
                               unit_count)
from heegnerlab.specfun import dirichlet_l


def act(f, a, b, c, d):
    """The form f(a x + b y, c x + d y)."""
    A, B, C = f
    return (A * a * a + B * a * c + C * c * c,
            2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d,
            A * b * b + B * b * d + C * d * d)


def reduced_by_search(f, bound=4):
    """Reduced form in the orbit of f, found by trying all small SL2(Z) matrices."""
    seen = set()
    frontier = {f}
    for _ in range(4):
        new = set()
        for g in frontier:
            for a, b, c, d in product(range(-bound, bound + 1), repeat=4):
                if a * d - b * c == 1:
                    new.add(act(g, a, b, c, d))
        seen |= frontier
        frontier = new - seen
        hits = [h for h in seen | frontier if QuadForm(*h).is_reduced()]
        if hits:
            return min(hits)
    return None


def test_is_fundamental_examples():
    assert is_fundamental(-3)
    assert not is_fundamental(-12)
    assert is_fundamental(-20)
    assert not is_fundamental(5) and not is_fundamental(-9) and not is_fundamental(-2)


def test_reduce_form_examples():
    assert reduce_form(1, 0, 5) == QuadForm(1, 0, 5)
    assert reduce_form(5, 0, 1) == QuadForm(*reduced_by_search((5, 0, 1)))
    assert reduce_form(5, 0, 1) == QuadForm(1, 0, 5)
    assert reduce_form(2, -2, 3) == QuadForm(2, 2, 3)


def test_reduce_form_errors():
    with pytest.raises(ValueError):
        reduce_form(1, 3, 1)
    with pytest.raises(ValueError):
        reduce_form(-1, 0, -5)


@settings(max_examples=300)
@given(st.integers(1, 60), st.integers(-60, 60), st.integers(1, 60))
def test_reduce_form_properties(a, b, c):
    if b * b - 4 * a * c >= 0:
        return
    f = reduce_form(a, b, c)
    assert f.is_reduced()
    assert f.disc == b * b - 4 * a * c


@pytest.mark.parametrize("f", [(7, 5, 3), (13, -11, 5), (6, 7, 9), (3, 1, 11)])
def test_reduce_form_matches_orbit_search(f):
    assert reduce_form(*f).as_tuple() == reduced_by_search(f)


def test_class_group_examples():
    assert class_group(-4) == [QuadForm(1, 0, 1)]
    assert class_group(-20) == [QuadForm(1, 0, 5), QuadForm(2, 2, 3)]
    assert class_group(-23) == [QuadForm(1, 1, 6), QuadForm(2, -1, 3), QuadForm(2, 1, 3)]
    with pytest.raises(DiscriminantError):
        class_group(-12)


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -15, -20, -23, -47, -56, -71, -84])
def test_class_group_by_orbit_enumeration(D):
    """Reduce every form (a, b, c) of discriminant D with a, |b| small; count distinct classes."""
    classes = set()
    for a in range(1, 30):
        for b in range(-30, 31):
            if (b * b - D) % (4 * a) == 0:
                classes.add(reduce_form(a, b, (b * b - D) // (4 * a)))
    assert sorted(classes, key=lambda f: (f.a, f.b)) == class_group(D)


def test_heegner_points_examples():
    assert heegner_points(-4).points[0].z == 1j
    rho = heegner_points(-3).points[0]
    assert rho.x == -0.5 and rho.y == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    ys = sorted(p.y for p in heegner_points(-23).points)
    assert ys == pytest.approx(sorted([math.sqrt(23) / 2, math.sqrt(23) / 4, math.sqrt(23) / 4]), abs=1e-14)
    assert heegner_points(-23).points[0].exact == (Fraction(-1, 2), Fraction(23, 4))


@pytest.mark.parametrize("D", fundamental_discriminants(-400, -3))
def test_heegner_points_reduced_and_distinct(D):
    hs = heegner_points(D)
    assert hs.h == len(hs.forms) == len(hs.points) >= 1
    for f, p in zip(hs.forms, hs.points):
        assert f.disc == D and f.is_reduced()
        z, m = reduce_to_fundamental(p)
        assert abs(z.x - p.x) < 1e-12 and abs(z.y - p.y) < 1e-12
        assert -0.5 <= p.x <= 0.5 and p.x**2 + p.y**2 >= 1 - 1e-12
    assert len({(p.x, p.y) for p in hs.points}) == hs.h


def test_kronecker_examples():
    assert kronecker(-4, 3) == -1
    assert kronecker(-4, 2) == 0
    # (2 | -23) by the second supplement: -23 = 1 mod 8
    assert kronecker(-23, 2) == 1


def test_kronecker_multiplicative():
    rng = random.Random(7)
    Ds = fundamental_discriminants(-500, -3)
    for _ in range(1000):
        D = rng.choice(Ds)
        m, n = rng.randint(-200, 200), rng.randint(-200, 200)
        assert kronecker(D, m * n) == kronecker(D, m) * kronecker(D, n)


@pytest.mark.parametrize("D", fundamental_discriminants(-300, -3))
def test_character_table_matches_scalar_and_period(D):
    tab = character_table(D)
    assert list(tab) == [kronecker(D, r) for r in range(-D)]
    assert all(kronecker(D, r + abs(D)) == tab[r] for r in range(0, abs(D), 7))
    assert sum(tab) == 0


def test_class_number_formula_examples():
    assert class_number_formula(-4, math.pi / 4) == pytest.approx(1.0, abs=1e-15)
    assert class_number_formula(-3, math.pi / (3 * math.sqrt(3))) == pytest.approx(1.0, abs=1e-15)
    assert class_number_formula(-23, dirichlet_l(1, -23).real) == pytest.approx(3.0, abs=1e-6)
    assert unit_count(-3) == 6 and unit_count(-4) == 4 and unit_count(-7) == 2


def test_class_numbers_two_ways_up_to_3000():
    for D in fundamental_discriminants(-3000, -3):
        h = len(class_group(D))
        assert abs(class_number_formula(D, dirichlet_l(1, D).real) - h) < 1e-6, D


def test_siegel_band():
    vals = [len(class_group(D)) / math.sqrt(-D) for D in fundamental_discriminants(-10000, -3)]
    assert 1e-2 <= min(vals) and max(vals) <= 10
