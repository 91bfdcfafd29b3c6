"""Small-a asymptotics along the lines b = 1 - t a.

The second iterate near the period-two orbit is the linear map ``A``, which
as a -> 0 behaves like the rotation-scaling ``B`` (multiplication by
b e^{-ia}). Its orbits follow logarithmic spirals; the tangency of the limit
spiral with the coordinate axes fixes the constants t0 (x-axis) and t1
(y-axis).

Complex numbers are plain Python ``complex``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import op_norm
from .errors import DivergenceError, LoziDomainError, PreconditionError

__all__ = [
    "SpiralFrame",
    "RootResult",
    "spiral_frame",
    "matrix_A",
    "matrix_B",
    "spiral_point",
    "lemma1_deviation",
    "tangency_residual_im",
    "tangency_residual_re",
    "reduced_residual_x_axis",
    "reduced_residual_y_axis",
    "solve_t0",
    "solve_t1",
]

X_AXIS_ANGLE = 7.0 * math.pi / 4.0
Y_AXIS_ANGLE = 5.0 * math.pi / 4.0
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SpiralFrame:
    t: float
    center_p: complex
    """Limit of a * P as a -> 0."""
    start_z: complex
    """Limit of a * Z as a -> 0."""


@dataclass(frozen=True)
class RootResult:
    value: float
    residual: float
    iterations: int


def spiral_frame(t: float) -> SpiralFrame:
    d = t * t + 1.0
    return SpiralFrame(t, complex((t + 1.0) / d, (t - 1.0) / d), complex(2.0 / (t + 1.0), 0.0))


def _check_line(a: float, t: float) -> float:
    if not 0.0 < t < 1.0:
        raise PreconditionError("t must lie in (0, 1)")
    b = 1.0 - t * a
    if a <= 0 or b <= 0:
        raise PreconditionError("need a > 0 and b = 1 - t a > 0")
    return b


def matrix_A(a: float, t: float) -> np.ndarray:
    """Derivative of L^2 at P written on the line b = 1 - t a."""
    _check_line(a, t)
    return np.array([[1.0 - t * a - a * a, a], [-a + t * a * a, 1.0 - t * a]])


def matrix_B(a: float, t: float) -> np.ndarray:
    b = _check_line(a, t)
    c, s = math.cos(a), math.sin(a)
    return np.array([[b * c, b * s], [-b * s, b * c]])


def spiral_point(v: complex, t: float, phi: float) -> complex:
    return v * math.exp(-t * phi) * cmath.exp(-1j * phi)


def lemma1_deviation(a: float, t: float, phi_max: float, v: complex) -> float:
    """Largest gap between A^n v and the limit spiral for n <= phi_max / a."""
    _check_line(a, t)
    A = matrix_A(a, t)
    n_max = int(math.floor(phi_max / a))
    w = np.array([v.real, v.imag])
    scale = abs(v)
    # only an expanding A can blow up; guard before the spiral comparison degrades
    limit = math.inf if op_norm(A) <= 1.0 else 1e12 * (1.0 + scale)
    worst = 0.0
    for n in range(n_max + 1):
        if n:
            w = A @ w
        if not math.hypot(w[0], w[1]) <= limit:
            raise DivergenceError(f"A^n v diverges at n = {n} (||A|| > 1)")
        gap = abs(complex(w[0], w[1]) - spiral_point(v, t, n * a))
        worst = max(worst, gap)
    return worst


def _check_t(t: float) -> None:
    if not 0.0 < t < 1.0:
        raise LoziDomainError("t must lie in (0, 1)")


def tangency_residual_im(t: float) -> float:
    """Im of the limit spiral point at angle 7pi/4 (zero exactly at t0)."""
    _check_t(t)
    f = spiral_frame(t)
    p, z = f.center_p, f.start_z
    return (p + (z - p) * math.exp(-t * X_AXIS_ANGLE) * cmath.exp(-1j * X_AXIS_ANGLE)).imag


def tangency_residual_re(t: float) -> float:
    """Re of the limit spiral point at angle 5pi/4 (zero exactly at t1)."""
    _check_t(t)
    f = spiral_frame(t)
    p, z = f.center_p, f.start_z
    return (p + (z - p) * math.exp(-t * Y_AXIS_ANGLE) * cmath.exp(-1j * Y_AXIS_ANGLE)).real


def reduced_residual_x_axis(t: float) -> float:
    """sqrt(2) e^{-7 pi t / 4} - (1 + t)."""
    return SQRT2 * math.exp(-X_AXIS_ANGLE * t) - (1.0 + t)


def reduced_residual_y_axis(t: float) -> float:
    """sqrt(2) e^{-5 pi t / 4} - (1 + t)^2 / (1 - t)."""
    if t == 1.0:
        raise LoziDomainError("pole at t = 1")
    return SQRT2 * math.exp(-Y_AXIS_ANGLE * t) - (1.0 + t) ** 2 / (1.0 - t)


def _d_reduced_x(t: float) -> float:
    return -X_AXIS_ANGLE * SQRT2 * math.exp(-X_AXIS_ANGLE * t) - 1.0


def _d_reduced_y(t: float) -> float:
    return -Y_AXIS_ANGLE * SQRT2 * math.exp(-Y_AXIS_ANGLE * t) - (1.0 + t) * (3.0 - t) / (1.0 - t) ** 2


def _bisect_newton(f, df, lo=1e-6, hi=0.5, width=1e-12, newton_steps=3) -> RootResult:
    f_lo = f(lo)
    if f_lo * f(hi) > 0:
        raise ValueError("root not bracketed")
    it = 0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        it += 1
    t = 0.5 * (lo + hi)
    for _ in range(newton_steps):
        t -= f(t) / df(t)
        it += 1
    return RootResult(t, f(t), it)


def solve_t0() -> RootResult:
    """Root of sqrt(2) e^{-7 pi t / 4} = 1 + t."""
    return _bisect_newton(reduced_residual_x_axis, _d_reduced_x)


def solve_t1() -> RootResult:
    """Root of sqrt(2) e^{-5 pi t / 4} = (1 + t)^2 / (1 - t)."""
    return _bisect_newton(reduced_residual_y_axis, _d_reduced_y)
