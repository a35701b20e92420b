"""Upper half-plane geometry and the action of PSL(2, Z)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class Point:
    """A point x + iy of the upper half-plane.

    ``exact`` optionally carries the point as rationals (x, y^2); Heegner points
    and points parsed from decimal strings have one, which lets the lattice
    counter settle boundary ties exactly. It does not take part in equality.
    """

    x: float
    y: float
    exact: tuple[Fraction, Fraction] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not (self.y > 0) or not math.isfinite(self.y) or not math.isfinite(self.x):
            raise ValueError(f"not a point of the upper half-plane: ({self.x}, {self.y})")

    @classmethod
    def from_exact(cls, x: Fraction, y2: Fraction) -> "Point":
        x, y2 = Fraction(x), Fraction(y2)
        return cls(float(x), math.sqrt(y2), (x, y2))

    @classmethod
    def parse(cls, text: str) -> "Point":
        """Parse "x+yi" (also "i", "2i", "rho", "-0.5+0.866i")."""
        s = text.strip().replace(" ", "").lower()
        if s == "rho":
            return cls.from_exact(Fraction(-1, 2), Fraction(3, 4))
        if not s.endswith("i"):
            raise ValueError(f"cannot parse point {text!r}: expected 'x+yi'")
        body = s[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        while cut > 0 and body[cut - 1] in "e":
            cut = max(body.rfind("+", 0, cut), body.rfind("-", 0, cut))
        if cut <= 0:
            xs, ys = "0", body
        else:
            xs, ys = body[:cut], body[cut:]
        if ys in ("", "+"):
            ys = "1"
        try:
            x, y = Fraction(xs), Fraction(ys)
        except ValueError as exc:
            raise ValueError(f"cannot parse point {text!r}") from exc
        if y <= 0:
            raise ValueError(f"point {text!r} is not in the upper half-plane")
        return cls.from_exact(x, y * y)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def rational(self) -> tuple[Fraction, Fraction]:
        """(x, y^2) as exact rationals (the float values themselves if no exact form)."""
        if self.exact is not None:
            return self.exact
        return Fraction(self.x), Fraction(self.y) ** 2

    def __str__(self) -> str:
        return f"{self.x!r}{'+' if self.y >= 0 else ''}{self.y!r}i"


@dataclass(frozen=True)
class ModularMatrix:
    """An element of PSL(2, Z), stored with c > 0, or c = 0 and d > 0."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries} is not 1")
        if self.c < 0 or (self.c == 0 and self.d < 0):
            for name in "abcd":
                object.__setattr__(self, name, -getattr(self, name))

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "ModularMatrix") -> "ModularMatrix":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return ModularMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "ModularMatrix":
        return ModularMatrix(self.d, -self.b, -self.c, self.a)


IDENTITY = ModularMatrix(1, 0, 0, 1)
S = ModularMatrix(0, -1, 1, 0)
T = ModularMatrix(1, 1, 0, 1)


def translation(n: int) -> ModularMatrix:
    return ModularMatrix(1, n, 0, 1)


def apply(m: ModularMatrix, z: Point) -> Point:
    """Moebius action (az + b)/(cz + d).

    The image is computed from the rational data (x, y^2) of z (the float
    values themselves when z has no exact form), so the result carries exact
    data and its coordinates are correctly rounded.
    """
    a, b, c, d = m.entries
    x, y2 = z.rational()
    q = (c * x + d) ** 2 + c * c * y2
    exact = ((a * c * (x * x + y2) + (a * d + b * c) * x + b * d) / q, y2 / (q * q))
    return Point(float(exact[0]), math.sqrt(exact[1]), exact)


def ppinv(z: Point, w: Point) -> float:
    """Point-pair invariant |z - w|^2 / (4 Im z Im w).

    Differences are taken in exact arithmetic: x - x' directly and
    y - y' = (y^2 - y'^2)/(y + y'), so nearby points lose no accuracy.
    """
    xz, y2z = z.rational()
    xw, y2w = w.rational()
    dx = float(xz - xw)
    dy = float(y2z - y2w) / (z.y + w.y)
    return (dx * dx + dy * dy) / (4.0 * z.y * w.y)


def distance(z: Point, w: Point) -> float:
    """Hyperbolic distance; cosh d = 2u + 1, computed as 2 asinh(sqrt u)."""
    return 2.0 * math.asinh(math.sqrt(ppinv(z, w)))


def _is_reduced(x: float, y: float, eps: float) -> bool:
    r2 = x * x + y * y
    if x < -0.5 - eps or x >= 0.5 - eps:
        return False
    if r2 < 1.0 - eps:
        return False
    if r2 <= 1.0 + eps and x > eps:
        return False
    return True


def reduce_to_fundamental(z: Point, eps: float = BOUNDARY_EPS) -> tuple[Point, ModularMatrix]:
    """Map z into the standard fundamental domain.

    Returns (z*, m) with z* = apply(m, z), -1/2 <= x* < 1/2, |z*| >= 1, and on
    the unit arc x* <= 0. Points within ``eps`` of the boundary are treated as
    lying on it.
    """
    m = IDENTITY
    w = z
    for _ in range(10000):
        n = -math.floor(w.x + 0.5 + eps)
        if n:
            step = translation(n)
            w = apply(step, w)
            m = step @ m
        r2 = w.x * w.x + w.y * w.y
        if r2 < 1.0 - eps:
            w = apply(S, w)
            m = S @ m
            continue
        if r2 <= 1.0 + eps and w.x > eps:
            # right half of the arc is identified with the left half by S
            w = apply(S, w)
            m = S @ m
            n = -math.floor(w.x + 0.5 + eps)
            if n:
                step = translation(n)
                w = apply(step, w)
                m = step @ m
        break
    else:  # pragma: no cover - the loop is a strict descent in y
        raise RuntimeError("reduction did not terminate")
    return w, m
