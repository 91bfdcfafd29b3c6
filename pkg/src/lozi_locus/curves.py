"""Algebraic boundary curves C_n and B_1..B_4, curve minima and their scaling.

C_n is the set of window parameters for which the n-th iterate of Z lands on
the y-axis while all earlier iterates Z^1 .. Z^(n-1) alternate left/right.
Closed forms are available for n <= 5; general n is handled numerically.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import LoziDomainError, NotFoundError, PreconditionError

__all__ = [
    "C_IDS",
    "B_IDS",
    "B_INTERVALS",
    "CurveMin",
    "curve_residual",
    "curve_components",
    "z_orbit_x",
    "sign_pattern_ok",
    "trace_Cn",
    "solve_curve_a",
    "solve_curve_b",
    "curve_min",
    "scaling_table",
    "phi_argument",
]

C_IDS = ("C2", "C3", "C4", "C5")
B_IDS = ("B1", "B2", "B3", "B4")

B_INTERVALS = {
    "B1": (0.0, 0.549134),
    "B2": (0.549134, 0.602505),
    "B3": (0.602505, 0.617056),
    "B4": (0.617056, 0.946803),
}

# Coarse grid resolution used by trace_Cn and curve_min.
GRID_CELLS = 4096
BISECTION_STEPS = 80


def _radical(a, b):
    r = a * a + 4.0 * b
    if np.any(np.asarray(r) < 0):
        raise LoziDomainError("a^2 + 4b < 0: radical undefined")
    return np.sqrt(r)


def _c2(a, b):
    return b**2 + (-2 * a**2 + a + 1) * b - 2 * a**3 + a**2 + 3 * a + 1


def _c3(a, b):
    return b**2 - (4 * a**2 - 2) * b + 2 * a**4 - 3 * a**2 + 1


def _edge_line(a, b):
    return b + a - 1


def _c4(a, b):
    return (
        b**4
        - (8 * a**2 - a - 1) * b**3
        - (-8 * a**4 + 8 * a**3 + a**2 - 2 * a - 1) * b**2
        - (2 * a**6 - 8 * a**5 + 4 * a**4 + 9 * a**3 - 3 * a**2 - 6 * a - 1) * b
        - 2 * a**7
        + 2 * a**6
        + 4 * a**5
        - 3 * a**4
        - 5 * a**3
        + a**2
        + 3 * a
        + 1
    )


def _c5(a, b):
    # constant term is +1: eliminating the radical from x_5 gives
    # (a - b + 1)(a + b - 1) times this octic, and the -1 variant has no roots on C_5
    return (
        b**4
        - (12 * a**2 - 2) * b**3
        - (-22 * a**4 + 15 * a**2 - 3) * b**2
        - (12 * a**6 - 16 * a**4 + 12 * a**2 - 2) * b
        + 2 * a**8
        - 4 * a**6
        + 5 * a**4
        - 3 * a**2
        + 1
    )


def _b1(a, b):
    return a**3 - 4 * a + (a**2 - 2 * b) * _radical(a, b)


def _b2(a, b):
    s = _radical(a, b)
    poly = (
        2 * a**6
        + 2 * a**5 * (1 - 2 * b)
        - 11 * a**4 * b
        + a**3 * b * (4 * b**2 + 6 * b - 9)
        + 3 * a**2 * b**2 * (2 * b + 1)
        + 4 * a * b**2 * (b**2 + b + 1)
        + 4 * b**3
    )
    coef = (
        2 * a**5
        + 2 * a**4 * (1 - 2 * b)
        - 7 * a**3 * b
        + a**2 * b * (4 * b**2 + 6 * b - 5)
        + a * b**2 * (2 * b + 5)
        + 2 * b**2
    )
    return poly + coef * s


def _b3(a, b):
    return a - b - 1


def _b4(a, b):
    return (
        a**5
        + 2 * a**3 * (b - 3)
        - 6 * a**2
        - 4 * a
        + 4 * a * b * (b - 1)
        + (a**4 + 2 * a**2 + 2 * a - 2 * b**2) * _radical(a, b)
    )


_COMPONENTS: dict[str, tuple[Callable, ...]] = {
    "C2": (_c2,),
    "C3": (_c3, _edge_line),
    "C4": (_c4,),
    "C5": (_c5, _edge_line),
    "B1": (_b1,),
    "B2": (_b2,),
    "B3": (_b3,),
    "B4": (_b4,),
}


def curve_components(curve_id: str) -> tuple[Callable, ...]:
    try:
        return _COMPONENTS[curve_id]
    except KeyError:
        raise ValueError(f"unknown curve id {curve_id!r}") from None


def curve_residual(curve_id: str, a, b, component: int | None = None):
    """Left-hand side of the curve equation at ``(a, b)``.

    Curves made of several algebraic components (C3 and C5 contain the window
    edge a + b = 1) return the product unless ``component`` picks one.
    """
    comps = curve_components(curve_id)
    if component is not None:
        return comps[component](a, b)
    out = comps[0](a, b)
    for f in comps[1:]:
        out = out * f(a, b)
    return out


def z_orbit_x(a, b, n: int) -> np.ndarray:
    """x-coordinates of Z^0 .. Z^n, stacked along axis 0 (broadcasts over a, b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = (2.0 + a + np.sqrt(a * a + 4.0 * b)) / (2.0 * (1.0 + a - b))
    y = np.zeros_like(x)
    out = np.empty((n + 1,) + x.shape)
    out[0] = x
    for i in range(1, n + 1):
        x, y = 1.0 + y - a * np.abs(x), b * x
        out[i] = x
    return out


def sign_pattern_ok(xs: np.ndarray, n: int, slack=0.0) -> np.ndarray:
    """Check x_m <= 0 (odd m) and x_m >= 0 (even m) for 1 <= m < n."""
    good = np.ones(xs.shape[1:], dtype=bool)
    for m in range(1, n):
        good &= (xs[m] <= slack) if m % 2 else (xs[m] >= -slack)
    return good


def _slack(xs: np.ndarray) -> np.ndarray:
    return 1e-11 * (1.0 + np.abs(xs[0]))


def _bisect_xn(a_lo, a_hi, b, n, steps=BISECTION_STEPS, along="a"):
    """Vectorised bisection of x_n on brackets [lo, hi] in a (or in b)."""
    lo = np.array(a_lo, dtype=float)
    hi = np.array(a_hi, dtype=float)
    other = np.broadcast_to(np.asarray(b, dtype=float), lo.shape)

    def xn(v):
        return z_orbit_x(v, other, n)[n] if along == "a" else z_orbit_x(other, v, n)[n]

    f_lo = xn(lo)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        f_mid = xn(mid)
        left = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def _roots_on_grid(grid: np.ndarray, values: np.ndarray, tol: np.ndarray):
    """Indices of exact-zero nodes and of cells with a strict sign change."""
    zero = np.abs(values) <= tol
    cells = np.flatnonzero((values[:-1] * values[1:] < 0) & ~zero[:-1] & ~zero[1:])
    return np.flatnonzero(zero), cells


def _roots_in_a(n: int, b: float, cells: int) -> list[float]:
    grid = np.linspace(1.0 - b, 1.0 + b, cells + 1)
    xs = z_orbit_x(grid, b, n)
    nodes, brackets = _roots_on_grid(grid, xs[n], _slack(xs))
    roots = list(grid[nodes])
    if brackets.size:
        roots.extend(_bisect_xn(grid[brackets], grid[brackets + 1], b, n))
    if not roots:
        return []
    roots = np.sort(np.array(roots))
    chk = z_orbit_x(roots, b, n)
    keep = sign_pattern_ok(chk, n, _slack(chk))
    return list(roots[keep])


def trace_Cn(n: int, b_samples: int, cells: int = GRID_CELLS) -> np.ndarray:
    """Numerically trace C_n as an ``(N, 2)`` array of ``(a, b)`` points.

    b runs over the centres of ``b_samples`` equal cells of (0, 1); for each b
    every root of x_n in the closed window [1 - b, 1 + b] that respects the
    C_n sign pattern is kept. Points are ordered by b, then a.
    """
    if n < 2:
        raise PreconditionError("C_n is defined for n >= 2")
    if b_samples < 2:
        raise PreconditionError("need at least two b samples")
    pts = []
    for i in range(b_samples):
        b = (i + 0.5) / b_samples
        pts.extend((a, b) for a in _roots_in_a(n, b, cells))
    return np.array(pts, dtype=float).reshape(-1, 2)


def solve_curve_a(curve_id: str, b: float, a_range=None, cells: int = 2048) -> list[float]:
    """All roots in a of one algebraic curve at fixed b (each component)."""
    lo, hi = a_range if a_range is not None else (max(0.0, 1.0 - b), 1.0 + b)
    grid = np.linspace(lo, hi, cells + 1)
    roots: list[float] = []
    for comp in curve_components(curve_id):
        vals = np.array([comp(a, b) for a in grid]) if cells < 64 else comp(grid, b)
        for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
            roots.append(brentq(lambda a: comp(a, b), grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))
        roots.extend(grid[np.flatnonzero(vals == 0)])
    return sorted(roots)


# |x_n| below which an algebraic root counts as lying on the orbit branch; the
# spurious branches introduced by clearing the radical sit at |x_n| > 1e-3
BRANCH_TOLERANCE = 1e-5


def on_orbit_branch(curve_id: str, a: float, b: float) -> bool:
    """Branch filter for C_n: the sign pattern holds and Z^n is (nearly) on the y-axis.

    The polynomial equations are obtained by squaring away a radical, so they
    also vanish on branches where x_n != 0; those are rejected here.
    """
    if curve_id not in C_IDS:
        raise ValueError(f"branch filter defined for {C_IDS}, not {curve_id!r}")
    n = int(curve_id[1:])
    xs = z_orbit_x(a, b, n)
    scale = 1.0 + abs(float(xs[0]))
    return bool(sign_pattern_ok(xs, n, 1e-11 * scale)) and abs(float(xs[n])) <= BRANCH_TOLERANCE * scale


def branch_points_a(curve_id: str, b: float) -> list[float]:
    """Algebraic roots in a of C_n at height b, in the closed window, on the orbit branch."""
    return [
        a
        for a in solve_curve_a(curve_id, b)
        if 1.0 - b - 1e-12 <= a <= 1.0 + b and on_orbit_branch(curve_id, a, b)
    ]


def solve_curve_b(curve_id: str, a: float, b_range=(0.0, 1.0), cells: int = 2048) -> list[float]:
    """All roots in b of one algebraic curve at fixed a (each component)."""
    grid = np.linspace(b_range[0], b_range[1], cells + 1)
    roots: list[float] = []
    for comp in curve_components(curve_id):
        vals = comp(a, grid)
        for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
            roots.append(brentq(lambda b: comp(a, b), grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))
        roots.extend(grid[np.flatnonzero(vals == 0)])
    return sorted(roots)


@dataclass(frozen=True)
class CurveMin:
    n: int
    a_n: float
    b_n: float

    @property
    def t(self) -> float:
        return (1.0 - self.b_n) / self.a_n


def _b_grid(lo: float, size: int) -> np.ndarray:
    # uniform part plus a log-spaced part that resolves the thin curves near b = 1
    uni = np.linspace(lo, 1.0, size // 2, endpoint=False)
    gap = 1.0 - lo
    log = 1.0 - np.geomspace(gap, gap * 1e-7, size // 2)
    return np.unique(np.concatenate([uni, log]))


# roots closer than this to the window edge a + b = 1 belong to the edge
# component shared by every odd C_n and are ignored by curve_min
EDGE_MARGIN = 1e-6


def _lowest_root_b(n: int, a: float, b_lo: float, b_hi: float, size: int = 512) -> float:
    """Smallest b in [b_lo, b_hi] with x_n(a, b) = 0 on the C_n sign pattern, or inf."""
    b_lo = max(b_lo, 1.0 - a + EDGE_MARGIN, a - 1.0, 0.0)
    if b_lo >= b_hi:
        return math.inf
    grid = np.linspace(b_lo, b_hi, size + 1)
    v = z_orbit_x(a, grid, n)[n]
    for i in np.flatnonzero(v[:-1] * v[1:] <= 0):
        if v[i] == 0:
            r = grid[i]
        elif v[i + 1] == 0:
            r = grid[i + 1]
        else:
            r = brentq(lambda bb: z_orbit_x(a, bb, n)[n], grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
        chk = z_orbit_x(a, r, n)
        if sign_pattern_ok(chk, n, _slack(chk)):
            return float(r)
    return math.inf


@functools.lru_cache(maxsize=None)
def curve_min(n: int, a_samples: int = 512, b_samples: int = 2048) -> CurveMin:
    """Lowest point (minimal b, then minimal a) of C_n away from the window edge.

    A vectorised sign-change search on an (a, b) grid localises the lowest
    branch; the minimum of b along it is then refined by bounded Brent
    minimisation in a, with b recovered by root solving at each trial a.
    """
    if n < 4:
        raise PreconditionError("curve minima are defined for n >= 4")
    a_grid = np.linspace(0.0, 2.0, a_samples + 1)[1:-1]
    b_grid = _b_grid(0.0, b_samples)
    A, B = np.meshgrid(a_grid, b_grid, indexing="ij")
    inside = (B > 1.0 - A + EDGE_MARGIN) & (B >= A - 1.0)
    xs = z_orbit_x(np.where(inside, A, 1.0), np.where(inside, B, 0.5), n)
    ok = sign_pattern_ok(xs, n, _slack(xs)) & inside
    v = xs[n]
    hit = (v[:, :-1] * v[:, 1:] <= 0) & (ok[:, :-1] | ok[:, 1:]) & inside[:, :-1] & inside[:, 1:]
    if not hit.any():
        raise NotFoundError(f"C_{n} not found on the sampling grid")
    ia, ib = np.nonzero(hit)
    order = np.lexsort((ia, ib))
    da = a_grid[1] - a_grid[0]
    best: tuple[float, float] | None = None
    # several candidate cells guard against sign changes rejected on refinement
    for j in order[:8]:
        a0 = a_grid[ia[j]]
        b_lo = b_grid[max(ib[j] - 4, 0)]
        b_hi = b_grid[min(ib[j] + 6, b_grid.size - 1)]
        b0 = _lowest_root_b(n, a0, b_lo, b_hi)
        if not math.isfinite(b0):
            continue
        span = b_hi - b_lo

        def lowest(a: float) -> float:
            # finite penalty off the branch keeps Brent's parabolic steps usable
            r = _lowest_root_b(n, a, b_lo - span, b_hi + span)
            return r if math.isfinite(r) else 2.0

        centre, cand = float(a0), (b0, float(a0))
        for _ in range(64):
            lo, hi = centre - 2 * da, centre + 2 * da
            res = minimize_scalar(lowest, bounds=(lo, hi), method="bounded", options={"xatol": 1e-11})
            if res.fun <= cand[0]:
                cand = (float(res.fun), float(res.x))
            # optimum pinned to the bracket edge: the valley continues, move along it
            if min(res.x - lo, hi - res.x) > 1e-3 * da:
                break
            centre = float(res.x)
        if best is None or cand < best:
            best = cand
        break
    if best is None:
        raise NotFoundError(f"C_{n}: no sign-pattern root near the grid candidates")
    return CurveMin(n, best[1], best[0])


def scaling_table(k_max: int, k_min: int = 2) -> list[tuple[int, float, float]]:
    """Rows ``(k, a_2k, 2k * a_2k)`` for k_min <= k <= k_max."""
    if k_max < 2:
        raise PreconditionError("k_max must be at least 2")
    rows = []
    for k in range(k_min, k_max + 1):
        m = curve_min(2 * k)
        rows.append((k, m.a_n, 2 * k * m.a_n))
    return rows


def phi_argument(a: float, b: float) -> float:
    """Argument in (0, pi) of the complex multiplier of the period-two orbit."""
    d = 4.0 * b - a * a
    if d <= 0:
        raise LoziDomainError("4b <= a^2: the multipliers are real")
    return math.atan2(a * math.sqrt(d), 2.0 * b - a * a)
