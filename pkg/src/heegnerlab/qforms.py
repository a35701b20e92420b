"""Binary quadratic forms of negative fundamental discriminant and their Heegner points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .halfplane import Point


class DiscriminantError(ValueError):
    pass


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


def is_fundamental(D: int) -> bool:
    """True for negative fundamental discriminants."""
    if D >= 0:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def check_discriminant(D: int) -> int:
    if not is_fundamental(D):
        raise DiscriminantError(f"{D} is not a negative fundamental discriminant")
    return D


def unit_count(D: int) -> int:
    """Number of units w(D) of the order of discriminant D."""
    return {-3: 6, -4: 4}.get(D, 2)


@dataclass(frozen=True, order=True)
class QuadForm:
    """A form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def heegner_point(self) -> Point:
        """Root (-b + i sqrt|D|)/(2a), with exact data (x, y^2)."""
        D = self.disc
        return Point.from_exact(Fraction(-self.b, 2 * self.a), Fraction(-D, 4 * self.a * self.a))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def reduce_form(a: int, b: int, c: int) -> QuadForm:
    """Gauss reduction of a positive definite form to its reduced representative."""
    if b * b - 4 * a * c >= 0:
        raise ValueError("reduce_form needs a negative discriminant")
    if a <= 0:
        raise ValueError("reduce_form needs a > 0")
    while True:
        # normalize b into (-a, a]
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


def class_group(D: int) -> list[QuadForm]:
    """All reduced forms of discriminant D, sorted by (a, b)."""
    check_discriminant(D)
    forms = []
    bmax = math.isqrt(-D // 3)
    for b in range(D % 2, bmax + 1, 2):
        m = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                forms.append(QuadForm(a, b, c))
                if 0 < b < a < c:
                    forms.append(QuadForm(a, -b, c))
            a += 1
    forms.sort(key=lambda f: (f.a, f.b))
    return forms


def class_number(D: int) -> int:
    return len(class_group(D))


@dataclass(frozen=True)
class HeegnerSet:
    D: int
    forms: tuple[QuadForm, ...]
    points: tuple[Point, ...]

    @property
    def h(self) -> int:
        return len(self.forms)

    def unit_weights(self) -> list[float]:
        """Per-point weights 2/w(D): 1 except 1/2 for D = -4 and 1/3 for D = -3."""
        return [2.0 / unit_count(self.D)] * self.h

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "h": self.h,
            "forms": [list(f.as_tuple()) for f in self.forms],
            "points": [[p.x, p.y] for p in self.points],
        }


def heegner_points(D: int) -> HeegnerSet:
    forms = tuple(class_group(D))
    return HeegnerSet(D, forms, tuple(f.heegner_point() for f in forms))


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D | n)."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D | n) for odd n > 0
    a = D % n if n > 1 else 0
    if n == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _legendre_table(p: int) -> np.ndarray:
    """(n | p) for n = 0..p-1, p an odd prime."""
    leg = -np.ones(p, dtype=np.int64)
    leg[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    leg[0] = 0
    return leg


def _odd_prime_factors(m: int) -> list[int]:
    out, p = [], 3
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 2
    if m > 1:
        out.append(m)
    return out


# chi for the 2-part of an even fundamental discriminant, indexed by n mod 8
_CHI_TWO = {-4: (0, 1, 0, -1, 0, 1, 0, -1), 8: (0, 1, 0, -1, 0, -1, 0, 1), -8: (0, 1, 0, 1, 0, -1, 0, -1)}


@lru_cache(maxsize=256)
def character_table(D: int) -> np.ndarray:
    """chi_D(r) for r = 0, ..., |D|-1, as a read-only int array.

    A fundamental D is a product of prime discriminants: p* = (-1)^((p-1)/2) p
    for the odd primes p | D, times one of -4, 8, -8 when D is even. chi_D is the
    product of the matching characters, i.e. Legendre symbols (n | p) and a
    fixed pattern mod 8.
    """
    check_discriminant(D)
    k = abs(D)
    n = np.arange(k, dtype=np.int64)
    odd_part = k >> ((k & -k).bit_length() - 1)
    out = np.ones(k, dtype=np.int64)
    d_odd = 1
    for p in _odd_prime_factors(odd_part):
        out *= _legendre_table(p)[n % p]
        d_odd *= p if p % 4 == 1 else -p
    if D % 2 == 0:
        out *= np.asarray(_CHI_TWO[D // d_odd])[n % 8]
    out.setflags(write=False)
    return out


def chi(D: int, n: int) -> int:
    """chi_D(n) through the cached period table."""
    return int(character_table(D)[n % abs(D)])


def class_number_formula(D: int, L1: float) -> float:
    """w(D) sqrt|D| L(1, chi_D) / (2 pi); rounds to h(D)."""
    return unit_count(D) * math.sqrt(abs(D)) * L1 / (2.0 * math.pi)


def fundamental_discriminants(lo: int, hi: int) -> list[int]:
    """Fundamental discriminants D with lo <= D <= hi < 0, in decreasing order (-3, -4, ...)."""
    return [D for D in range(hi, lo - 1, -1) if is_fundamental(D)]
