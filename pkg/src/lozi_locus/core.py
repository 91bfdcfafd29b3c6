"""Exact evaluation of the Lozi map L(x, y) = (1 + y - a|x|, b x).

Everything here is closed form. Functions accept a ``(a, b)`` pair (any
2-sequence, typically :class:`Params`) and plane points as ``(x, y)`` pairs.
``step`` and ``inverse_step`` also work elementwise on numpy arrays.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateParameterError, LoziError, OnKinkError

__all__ = [
    "Params",
    "Point",
    "FixedPointData",
    "PeriodTwoPair",
    "step",
    "inverse_step",
    "iterate",
    "jacobian",
    "branch_matrix",
    "fixed_points",
    "period_two",
    "second_iterate_matrix",
    "point_Z",
    "op_norm",
]


class Params(NamedTuple):
    a: float
    b: float


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class FixedPointData:
    location: Point
    unstable_eigenvalue: float
    stable_eigenvalue: float
    unstable_direction: Point
    stable_direction: Point
    exists: bool = True
    """False when the formula puts the point in the other half-plane (no fixed point there)."""

    @property
    def is_saddle(self) -> bool:
        return abs(self.unstable_eigenvalue) > 1.0 > abs(self.stable_eigenvalue)


@dataclass(frozen=True)
class PeriodTwoPair:
    p: Point
    """P, the point in the fourth quadrant."""
    p_prime: Point
    """P', the point in the second quadrant."""
    multipliers: tuple[complex, complex]
    stability: str
    exists: bool
    """True when P and P' really lie on opposite sides of the kink (a > 1 - b)."""


def step(params: Sequence[float], p: Sequence[float]) -> Point:
    a, b = params
    x, y = p
    return Point(1.0 + y - a * abs(x), b * x)


def inverse_step(params: Sequence[float], p: Sequence[float]) -> Point:
    a, b = params
    if b == 0:
        raise DegenerateParameterError("inverse map needs b != 0")
    x, y = p
    u = y / b
    return Point(u, x - 1.0 + a * abs(u))


def iterate(params: Sequence[float], p: Sequence[float], n: int) -> list[Point]:
    """Return ``[p, L(p), ..., L^n(p)]`` (or the backward orbit for n < 0)."""
    f = step if n >= 0 else inverse_step
    out = [Point(*p)]
    for _ in range(abs(n)):
        out.append(f(params, out[-1]))
    return out


def branch_matrix(a: float, b: float, side: int) -> np.ndarray:
    """Linear part of the map on the half-plane ``side`` (+1: x > 0, -1: x < 0)."""
    return np.array([[-side * a, 1.0], [b, 0.0]])


def jacobian(params: Sequence[float], p: Sequence[float]) -> np.ndarray:
    a, b = params
    x = p[0]
    if x == 0:
        raise OnKinkError("the Lozi map is not differentiable on x = 0")
    return branch_matrix(a, b, 1 if x > 0 else -1)


def second_iterate_matrix(a: float, b: float) -> np.ndarray:
    """Derivative of L^2 along the period-two orbit (left branch after right)."""
    return np.array([[b - a * a, a], [-a * b, b]])


def op_norm(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix, closed form."""
    (p, q), (r, s) = m
    ss = p * p + q * q + r * r + s * s
    det = p * s - q * r
    disc = max(ss * ss - 4.0 * det * det, 0.0)
    return math.sqrt(0.5 * (ss + math.sqrt(disc)))


def _unit(vx: float, vy: float) -> Point:
    n = math.hypot(vx, vy)
    return Point(vx / n, vy / n)


def fixed_points(params: Sequence[float]) -> tuple[FixedPointData, FixedPointData]:
    """Closed-form data for X (right half-plane) and Y (left half-plane)."""
    a, b = params
    dx = 1.0 + a - b
    dy = 1.0 - a - b
    if dx == 0:
        raise DegenerateParameterError("fixed point X undefined: 1 + a - b = 0")
    if dy == 0:
        raise DegenerateParameterError("fixed point Y undefined: 1 - a - b = 0")
    root = math.sqrt(a * a + 4.0 * b) if a * a + 4.0 * b >= 0 else math.nan
    X = Point(1.0 / dx, b / dx)
    Y = Point(1.0 / dy, b / dy)
    lux, lsx = (-a - root) / 2.0, (-a + root) / 2.0
    luy, lsy = (a + root) / 2.0, (a - root) / 2.0
    out = (
        FixedPointData(X, lux, lsx, _unit(lux, b), _unit(lsx, b), X.x >= 0),
        FixedPointData(Y, luy, lsy, _unit(luy, b), _unit(lsy, b), Y.x <= 0),
    )
    for fp in out:
        if not fp.exists:
            continue
        loc = fp.location
        img = step(params, loc)
        tol = 1e-12 * (1.0 + math.hypot(*loc))
        if math.isfinite(img.x) and math.hypot(img.x - loc.x, img.y - loc.y) > tol:
            raise LoziError(f"fixed point residual too large at {loc}")
    return out


def period_two(params: Sequence[float]) -> PeriodTwoPair:
    a, b = params
    den = a * a + (1.0 - b) ** 2
    if den == 0:
        raise DegenerateParameterError("period-two points undefined at (a, b) = (0, 1)")
    p = Point((1.0 + a - b) / den, b * (1.0 - a - b) / den)
    pp = Point((1.0 - a - b) / den, b * (1.0 + a - b) / den)
    disc = cmath.sqrt(a * a - 4.0 * b)
    m1 = (-a * a + 2.0 * b + a * disc) / 2.0
    m2 = (-a * a + 2.0 * b - a * disc) / 2.0
    big, small = sorted((abs(m1), abs(m2)), reverse=True)
    if abs(big - 1.0) <= 1e-12 or abs(small - 1.0) <= 1e-12:
        stability = "nonhyperbolic"
    elif big < 1.0:
        stability = "attracting"
    elif small < 1.0:
        stability = "saddle"
    else:
        stability = "repelling"
    return PeriodTwoPair(p, pp, (complex(m1), complex(m2)), stability, p.x > 0 and pp.x < 0)


def point_Z(params: Sequence[float]) -> Point:
    """First crossing of the right half of W^u(X) with the x-axis."""
    a, b = params
    den = 2.0 * (1.0 + a - b)
    if den == 0:
        raise DegenerateParameterError("Z undefined: 1 + a - b = 0")
    return Point((2.0 + a + math.sqrt(a * a + 4.0 * b)) / den, 0.0)
