"""Stable and unstable manifolds of the saddle fixed point X as polylines.

The map is affine on each side of its kink line, so the image of a segment
that does not cross the kink is again a segment. Tracing therefore splits
every segment where it crosses the kink and maps vertices; no curve
approximation is involved. The stable manifold is traced with the same code
applied to the inverse map, whose kink is the x-axis.

Each half-manifold is seeded with the longest straight piece of the eigenline
through X that stays (together with its image) on X's side of the kink:
that piece lies in the manifold exactly. For the unstable manifold it ends
at Z on the right half and at Z^-1 on the left half; for the lower stable
half it ends at K on the x-axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import shapely

from .core import Point, fixed_points, inverse_step, period_two, point_Z, step
from .curves import B_INTERVALS, solve_curve_a
from .errors import NotFoundError, PreconditionError

__all__ = [
    "Polyline",
    "ManifoldBudget",
    "HomoclinicReport",
    "trace_branch",
    "trace_unstable",
    "trace_stable",
    "axis_crossings",
    "homoclinic_test",
    "stable_points_KV",
    "verify_B_tangency",
    "b_curve_points",
    "trace_B_curve",
    "map_polyline",
]


@dataclass
class Polyline:
    vertices: np.ndarray
    """``(N, 2)`` array of vertices in tracing order."""
    generation_starts: list[int] = field(default_factory=list)
    """Vertex index at which each fundamental-domain generation begins."""
    truncated_by: str | None = None
    """Which budget stopped the trace ("iterations", "vertices", "box"), if any."""

    def __len__(self) -> int:
        return len(self.vertices)

    def segments(self) -> np.ndarray:
        v = self.vertices
        return np.stack([v[:-1], v[1:]], axis=1)

    def generation(self, k: int) -> np.ndarray:
        """Vertices of generation k, including the shared first vertex."""
        start = self.generation_starts[k] - 1
        stop = self.generation_starts[k + 1] if k + 1 < len(self.generation_starts) else len(self.vertices)
        return self.vertices[start:stop]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("x,y\n")
            for x, y in self.vertices:
                fh.write(f"{x:.17g},{y:.17g}\n")


@dataclass(frozen=True)
class ManifoldBudget:
    max_vertices: int = 200_000
    max_iterations: int = 60
    bounding_box: tuple[float, float, float, float] = (-50.0, 50.0, -50.0, 50.0)
    """(x_min, x_max, y_min, y_max)."""

    def __post_init__(self):
        if self.max_vertices < 2 or self.max_iterations < 1:
            raise ValueError("budgets must be positive")
        x0, x1, y0, y1 = self.bounding_box
        if not (x0 < x1 and y0 < y1):
            raise ValueError("empty bounding box")


@dataclass(frozen=True)
class HomoclinicReport:
    verdict: str
    """"Found" or "NotFoundWithinBudget"."""
    intersection_point: Point | None = None
    transversal: bool | None = None
    unstable_segment: int | None = None
    stable_segment: int | None = None

    @property
    def found(self) -> bool:
        return self.verdict == "Found"


Map = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]

# Relative position below which a kink crossing is treated as a vertex on the kink.
SPLIT_EPS = 1e-14


def _split(v: np.ndarray, axis: int) -> np.ndarray:
    """Insert a vertex wherever a segment crosses the kink line ``coord[axis] = 0``."""
    c = v[:, axis]
    cross = np.flatnonzero(c[:-1] * c[1:] < 0)
    if cross.size == 0:
        return v
    t = c[cross] / (c[cross] - c[cross + 1])
    keep = (t > SPLIT_EPS) & (t < 1.0 - SPLIT_EPS)
    cross, t = cross[keep], t[keep]
    if cross.size == 0:
        return v
    pts = v[cross] + t[:, None] * (v[cross + 1] - v[cross])
    pts[:, axis] = 0.0
    return np.insert(v, cross + 1, pts, axis=0)


def _dedupe(v: np.ndarray) -> np.ndarray:
    if len(v) < 2:
        return v
    same = np.all(v[1:] == v[:-1], axis=1)
    if not same.any():
        return v
    return v[np.concatenate([[True], ~same])]


def map_polyline(v: np.ndarray, f: Map, axis: int, times: int = 1) -> np.ndarray:
    """Exact image of a polyline under ``f`` iterated ``times`` times."""
    for _ in range(times):
        v = _split(v, axis)
        x, y = f(v[:, 0], v[:, 1])
        v = _dedupe(np.column_stack([x, y]))
    return v


def _ray_limit(origin: np.ndarray, d: np.ndarray, axis: int) -> float:
    """Distance along d from origin to the kink line (inf if it is never reached)."""
    c, dc = origin[axis], d[axis]
    if dc == 0 or (c > 0) == (dc > 0):
        return math.inf
    return -c / dc


def _box_limit(origin: np.ndarray, d: np.ndarray, box) -> float:
    x0, x1, y0, y1 = box
    s = math.inf
    for k, (lo, hi) in enumerate(((x0, x1), (y0, y1))):
        if d[k] > 0:
            s = min(s, (hi - origin[k]) / d[k])
        elif d[k] < 0:
            s = min(s, (lo - origin[k]) / d[k])
    return max(s, 0.0)


def _inside(v: np.ndarray, box) -> np.ndarray:
    x0, x1, y0, y1 = box
    return (v[:, 0] >= x0) & (v[:, 0] <= x1) & (v[:, 1] >= y0) & (v[:, 1] <= y1)


def _clip_to_box(v: np.ndarray, box) -> tuple[np.ndarray, bool]:
    """Cut the polyline at its first exit from the box (keeping the exit point)."""
    ins = _inside(v, box)
    if ins.all():
        return v, False
    j = int(np.argmin(ins))
    if j == 0:
        return v[:1], True
    p, q = v[j - 1], v[j]
    s = _box_limit(p, q - p, box)
    return np.vstack([v[:j], p + min(s, 1.0) * (q - p)]), True


def trace_branch(
    f: Map,
    axis: int,
    fixed: Sequence[float],
    eigenvalue: float,
    direction: Sequence[float],
    budget: ManifoldBudget = ManifoldBudget(),
) -> Polyline:
    """Trace one half of the invariant manifold of ``fixed`` along ``direction``.

    ``f`` is the map whose expanding eigenvalue ``eigenvalue`` (|.| > 1) has
    eigenvector ``direction``; ``axis`` names the coordinate whose zero set is
    the kink of ``f``.
    """
    X = np.asarray(fixed, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / math.hypot(*d)
    lam = float(eigenvalue)
    if abs(lam) <= 1.0:
        raise PreconditionError("eigenvalue must be expanding")
    times = 1 if lam > 0 else 2
    mu = lam if lam > 0 else lam * lam
    box = budget.bounding_box

    s_max = _ray_limit(X, d, axis)
    if lam < 0:
        s_max = min(s_max, _ray_limit(X, -d, axis) / abs(lam))
        s_max = min(s_max, _box_limit(X, -d, box) / abs(lam))
    s_box = _box_limit(X, d, box)
    if s_box <= s_max:
        # the eigen-ray reaches the box before the kink: the branch is straight
        return Polyline(np.vstack([X, X + s_box * d]), [], "box")
    Q = X + s_max * d
    verts = [X[None, :], Q[None, :]]
    count = 2
    starts: list[int] = []
    domain = map_polyline(np.vstack([X + (Q - X) / mu, Q]), f, axis, times)
    truncated = "iterations"
    for _ in range(budget.max_iterations):
        domain = _split(domain, axis)
        piece, left_box = _clip_to_box(domain, box)
        new = piece[1:]
        if count + len(new) > budget.max_vertices:
            new = new[: budget.max_vertices - count]
            starts.append(count)
            verts.append(new)
            truncated = "vertices"
            break
        starts.append(count)
        verts.append(new)
        count += len(new)
        if left_box:
            truncated = "box"
            break
        domain = map_polyline(domain, f, axis, times)
    return Polyline(_dedupe(np.vstack(verts)), starts, truncated)


def _forward(params) -> Map:
    return lambda x, y: step(params, (x, y))


def _backward(params) -> Map:
    return lambda x, y: inverse_step(params, (x, y))


def _saddle_X(params):
    a, b = params
    if b == 0:
        raise PreconditionError("b must be nonzero")
    X, _ = fixed_points(params)
    if not (X.exists and X.is_saddle):
        raise PreconditionError(f"X is not a saddle at (a, b) = ({a}, {b})")
    return X


def trace_unstable(params: Sequence[float], budget: ManifoldBudget = ManifoldBudget()) -> tuple[Polyline, Polyline]:
    """``(W^u+, W^u-)``: the halves of W^u(X) leaving X to the right and to the left."""
    X = _saddle_X(params)
    d = np.array(X.unstable_direction)
    if d[0] < 0:
        d = -d
    f = _forward(params)
    plus = trace_branch(f, 0, X.location, X.unstable_eigenvalue, d, budget)
    minus = trace_branch(f, 0, X.location, X.unstable_eigenvalue, -d, budget)
    return plus, minus


def trace_stable(params: Sequence[float], budget: ManifoldBudget = ManifoldBudget()) -> tuple[Polyline, Polyline]:
    """``(W^s+, W^s-)``: the upper and lower halves of W^s(X), traced under the inverse map."""
    X = _saddle_X(params)
    d = np.array(X.stable_direction)
    if d[1] < 0:
        d = -d
    g = _backward(params)
    lam = 1.0 / X.stable_eigenvalue
    plus = trace_branch(g, 1, X.location, lam, d, budget)
    minus = trace_branch(g, 1, X.location, lam, -d, budget)
    return plus, minus


def axis_crossings(poly: Polyline | np.ndarray, axis: str) -> list[Point]:
    """Ordered crossings of the polyline with the x-axis (``"x"``) or y-axis (``"y"``).

    A vertex lying on the axis counts when the polyline passes to the other
    side; touching the axis and returning is not a crossing.
    """
    v = poly.vertices if isinstance(poly, Polyline) else np.asarray(poly, dtype=float)
    k = {"x": 1, "y": 0}[axis]
    c = v[:, k]
    scale = 1.0 + np.abs(v).max() if len(v) else 1.0
    sgn = np.where(np.abs(c) <= 1e-12 * scale, 0, np.sign(c)).astype(int)
    nz = np.flatnonzero(sgn)
    out: list[Point] = []
    for i, j in zip(nz[:-1], nz[1:]):
        if sgn[i] == sgn[j]:
            continue
        if j == i + 1:
            t = c[i] / (c[i] - c[j])
            p = v[i] + t * (v[j] - v[i])
            p[k] = 0.0
        else:
            p = v[i + 1].copy()
            p[k] = 0.0
        out.append(Point(float(p[0]), float(p[1])))
    return out


def _orient(p, q, r):
    return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])


def _segment_hits(U: np.ndarray, S: np.ndarray, iu: np.ndarray, js: np.ndarray):
    """Exact-sign intersection test for candidate pairs; returns mask and points."""
    p, q = U[iu, 0], U[iu, 1]
    r, s = S[js, 0], S[js, 1]
    d1 = _orient(p, q, r)
    d2 = _orient(p, q, s)
    d3 = _orient(r, s, p)
    d4 = _orient(r, s, q)
    scale = np.maximum(np.hypot(*(q - p).T) * np.hypot(*(s - r).T), 1e-300)
    eps = 1e-12 * scale
    hit = (d1 * d2 <= 0) & (d3 * d4 <= 0)
    # parallel and collinear pairs carry no transversal information
    denom = d1 - d2
    hit &= np.abs(denom) > eps
    t = np.where(hit, d1 / np.where(hit, denom, 1.0), 0.0)
    pts = r + t[:, None] * (s - r)
    return hit, pts


def homoclinic_test(params: Sequence[float], budget: ManifoldBudget = ManifoldBudget()) -> HomoclinicReport:
    """Search the traced manifold pieces for an intersection other than X."""
    X = _saddle_X(params)
    up, um = trace_unstable(params, budget)
    sp, sm = trace_stable(params, budget)
    U = np.concatenate([up.segments(), um.segments()])
    S = np.concatenate([sp.segments(), sm.segments()])
    if len(U) == 0 or len(S) == 0:
        return HomoclinicReport("NotFoundWithinBudget")
    tree = shapely.STRtree(shapely.linestrings(S))
    iu, js = tree.query(shapely.linestrings(U))
    if iu.size == 0:
        return HomoclinicReport("NotFoundWithinBudget")
    hit, pts = _segment_hits(U, S, iu, js)
    far = np.hypot(pts[:, 0] - X.location.x, pts[:, 1] - X.location.y) > 1e-6
    good = np.flatnonzero(hit & far)
    if good.size == 0:
        return HomoclinicReport("NotFoundWithinBudget")
    first = good[np.lexsort((js[good], iu[good]))[0]]
    du = U[iu[first], 1] - U[iu[first], 0]
    ds = S[js[first], 1] - S[js[first], 0]
    cross = abs(du[0] * ds[1] - du[1] * ds[0]) / (math.hypot(*du) * math.hypot(*ds))
    return HomoclinicReport(
        "Found",
        Point(float(pts[first, 0]), float(pts[first, 1])),
        bool(cross > 1e-9),
        int(iu[first]),
        int(js[first]),
    )


def stable_points_KV(params: Sequence[float], budget: ManifoldBudget = ManifoldBudget(max_iterations=4)) -> tuple[Point, Point]:
    """K and V: first crossings of the lower stable half with the x- and y-axis."""
    _, lower = trace_stable(params, budget)
    xs = axis_crossings(lower, "x")
    ys = axis_crossings(lower, "y")
    if not xs or not ys:
        raise NotFoundError("stable manifold crossings K, V not found within budget")
    return xs[0], ys[0]


def _point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    ab = b - a
    den = ab @ ab
    t = 0.0 if den == 0 else min(max(((p - a) @ ab) / den, 0.0), 1.0)
    return float(math.hypot(*(p - (a + t * ab))))


def _point_polyline_distance(p, v: np.ndarray) -> float:
    if len(v) == 1:
        return float(math.hypot(*(np.asarray(p) - v[0])))
    return min(_point_segment_distance(p, v[i], v[i + 1]) for i in range(len(v) - 1))


def _arc_after(v: np.ndarray, start, axis_k: int) -> np.ndarray:
    """Polyline from the vertex nearest ``start`` up to the next crossing of coord[axis_k] = 0."""
    i0 = int(np.argmin(np.hypot(v[:, 0] - start[0], v[:, 1] - start[1])))
    tail = v[i0:]
    c = tail[:, axis_k]
    scale = 1.0 + np.abs(tail).max()
    for i in range(len(tail) - 1):
        if abs(c[i + 1]) <= 1e-12 * scale:
            return tail[: i + 2]
        if c[i] * c[i + 1] < 0:
            t = c[i] / (c[i] - c[i + 1])
            end = tail[i] + t * (tail[i + 1] - tail[i])
            end[axis_k] = 0.0
            return np.vstack([tail[: i + 1], end])
    raise NotFoundError("the arc does not reach the axis within budget")


def verify_B_tangency(curve_id: str, a: float, b: float, budget: ManifoldBudget = ManifoldBudget(max_iterations=6)) -> float:
    """Distance realising the incidence that defines the boundary curve (0 on the curve).

    B1: Z^2 from [K, V].  B2: V from the unstable arc [Z^2, T].  B4: Z^4 from
    [K, V].  B3 (the edge a = 1 + b) has no manifold incidence; its residual
    is the distance of the period-two multipliers from the unit circle.
    """
    params = (a, b)
    if curve_id == "B3":
        mults = period_two(params).multipliers
        return abs(max(abs(z) for z in mults) - 1.0)
    if curve_id not in ("B1", "B2", "B4"):
        raise ValueError(f"unknown boundary curve {curve_id!r}")
    K, V = stable_points_KV(params, budget)
    Z = point_Z(params)
    orbit = [Z]
    for _ in range(4):
        orbit.append(step(params, orbit[-1]))
    if curve_id == "B1":
        return _point_segment_distance(orbit[2], K, V)
    if curve_id == "B4":
        return _point_segment_distance(orbit[4], K, V)
    plus, _ = trace_unstable(params, budget)
    arc = _arc_after(plus.vertices, orbit[2], 1)
    return _point_polyline_distance(V, arc)


def b_curve_points(curve_id: str, b: float, tol: float = 1e-7) -> list[float]:
    """Values of a on the named B-curve at height b that realise its incidence."""
    if curve_id == "B3":
        return [1.0 + b]
    out = []
    # the red region's right boundary lies partly beyond the edge a = 1 + b
    for a in solve_curve_a(curve_id, b, a_range=(max(1.0 - b, 0.0) + 1e-9, 2.0)):
        try:
            if verify_B_tangency(curve_id, a, b) < tol:
                out.append(a)
        except (NotFoundError, PreconditionError):
            continue
    return out


def trace_B_curve(curve_id: str, b_samples: int) -> np.ndarray:
    """``(N, 2)`` array of (a, b) points of the relevant branch over the curve's b-interval."""
    lo, hi = B_INTERVALS[curve_id]
    pts = []
    for i in range(b_samples):
        b = lo + (i + 0.5) * (hi - lo) / b_samples
        pts.extend((a, b) for a in b_curve_points(curve_id, b))
    return np.array(pts, dtype=float).reshape(-1, 2)
