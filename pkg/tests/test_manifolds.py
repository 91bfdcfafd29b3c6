import math

import numpy as np
import pytest
import shapely

from lozi_locus.core import fixed_points, inverse_step, period_two, point_Z, step
from lozi_locus.errors import PreconditionError
from lozi_locus.manifolds import _split  # noqa: F401  (stored generations are kink-split)
from lozi_locus.manifolds import (
    ManifoldBudget,
    Polyline,
    axis_crossings,
    b_curve_points,
    homoclinic_test,
    map_polyline,
    stable_points_KV,
    trace_B_curve,
    trace_branch,
    trace_stable,
    trace_unstable,
    verify_B_tangency,
)
from lozi_locus.region import Verdict, classify

from helpers import window_params

SMALL = ManifoldBudget(max_vertices=20_000, max_iterations=30)


def dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def test_first_crossings_are_Z_and_Z_inverse(rng):
    for params in window_params(rng, 1000):
        plus, minus = trace_unstable(params, ManifoldBudget(max_iterations=2))
        Z = point_Z(params)
        assert dist(axis_crossings(plus, "x")[0], Z) < 1e-10
        assert dist(axis_crossings(minus, "y")[0], inverse_step(params, Z)) < 1e-10


def test_unstable_spirals_to_period_two():
    params = (0.05, 0.997)
    P = period_two(params)
    for poly in trace_unstable(params, ManifoldBudget(max_iterations=4000)):
        tail = poly.vertices[-100:]
        d = np.minimum(np.hypot(*(tail - P.p).T), np.hypot(*(tail - P.p_prime).T))
        assert d.max() < 1e-3


def test_stable_initial_direction(rng):
    for params in window_params(rng, 50):
        X, _ = fixed_points(params)
        for poly in trace_stable(params, SMALL):
            v = poly.vertices[1] - poly.vertices[0]
            lam, b = X.stable_eigenvalue, params[1]
            assert abs(v[0] * b - v[1] * lam) / math.hypot(*v) < 1e-10
            assert dist(poly.vertices[0], X.location) == 0


def test_stable_forward_invariance(rng):
    for params in window_params(rng, 10):
        for poly in trace_stable(params, SMALL):
            line = shapely.LineString(poly.vertices)
            x, y = step(params, (poly.vertices[:, 0], poly.vertices[:, 1]))
            d = shapely.distance(shapely.points(np.column_stack([x, y])), line)
            assert d.max() < 1e-8


def test_polyline_invariants(rng):
    for params in window_params(rng, 20):
        for poly, axis in [(p, 0) for p in trace_unstable(params, SMALL)] + [(p, 1) for p in trace_stable(params, SMALL)]:
            v = poly.vertices
            assert np.all(np.any(v[1:] != v[:-1], axis=1))
            c = v[:, axis]
            cross = c[:-1] * c[1:] < 0
            scale = 1 + np.abs(v).max()
            # only crossings skipped as numerically on the kink may remain
            assert np.all(np.minimum(np.abs(c[:-1]), np.abs(c[1:]))[cross] < 1e-12 * scale)


def test_kink_splitting_is_exact(rng):
    for params in window_params(rng, 10):
        f = lambda x, y: step(params, (x, y))  # noqa: E731
        plus, _ = trace_unstable(params, SMALL)
        for k in range(len(plus.generation_starts) - 1):
            gen, nxt = plus.generation(k), plus.generation(k + 1)
            if k + 2 >= len(plus.generation_starts) and plus.truncated_by in ("vertices", "box"):
                continue  # the last generation may be cut short
            img = _split(map_polyline(gen, f, 0, times=2), 0)
            assert img.shape == nxt.shape
            assert np.abs(img - nxt).max() < 1e-12 * (1 + np.abs(nxt).max())


def test_symmetry_of_roles(rng):
    for params in window_params(rng, 10):
        X, _ = fixed_points(params)
        g = lambda x, y: inverse_step(params, (x, y))  # noqa: E731
        d = np.array(X.stable_direction)
        d = d if d[1] > 0 else -d
        for sign, poly in zip((1, -1), trace_stable(params, SMALL)):
            ref = trace_branch(g, 1, X.location, 1 / X.stable_eigenvalue, sign * d, SMALL)
            assert np.array_equal(ref.vertices, poly.vertices)


def test_axis_crossings_basic():
    poly = Polyline(np.array([[1.0, 1.0], [2.0, -1.0], [3.0, 0.0], [4.0, -2.0], [5.0, 0.0], [6.0, 3.0]]))
    assert axis_crossings(poly, "y") == []
    xs = axis_crossings(poly, "x")
    # proper crossing at x = 1.5; the touch at (3, 0) is a graze; (5, 0) is a crossing through a vertex
    assert [p.x for p in xs] == [1.5, 5.0]


def test_K_and_V():
    params = (1.4, 0.3)
    K, V = stable_points_KV(params)
    assert K.y == 0 and K.x > 0
    assert V.x == 0 and V.y < 0
    X, _ = fixed_points(params)
    # K and V lie on the stable eigenline through X
    for p in (K, V):
        dx, dy = p.x - X.location.x, p.y - X.location.y
        assert abs(dx * params[1] - dy * X.stable_eigenvalue) < 1e-12


def test_precondition():
    with pytest.raises(PreconditionError):
        trace_unstable((0.3, 0.5))  # attracting-fixed-point case: X does not exist / not a saddle
    with pytest.raises(PreconditionError):
        trace_stable((1.0, 0.0))


def test_homoclinic_examples():
    params = (1.7, 0.5)
    rep = homoclinic_test(params)
    assert rep.found and rep.transversal is not None
    X, _ = fixed_points(params)
    assert dist(rep.intersection_point, X.location) > 1e-6
    up, um = trace_unstable(params)
    sp, sm = trace_stable(params)
    pt = shapely.Point(rep.intersection_point)
    du = min(shapely.distance(pt, shapely.LineString(p.vertices)) for p in (up, um))
    ds = min(shapely.distance(pt, shapely.LineString(p.vertices)) for p in (sp, sm))
    assert du < 1e-9 and ds < 1e-9
    assert not homoclinic_test((0.05, 0.997)).found
    assert not homoclinic_test((1.16, 0.95)).found


def test_small_a_spiral_meets_stable_manifold_only_at_X():
    params = (0.05, 0.997)
    budget = ManifoldBudget(max_iterations=4000)
    assert not homoclinic_test(params, budget).found
    X, _ = fixed_points(params)
    U = np.concatenate([p.segments() for p in trace_unstable(params, budget)])
    S = np.concatenate([p.segments() for p in trace_stable(params, budget)])
    u = shapely.MultiLineString(list(U))
    s = shapely.MultiLineString(list(S))
    meet = shapely.intersection(u, s)
    pts = shapely.get_coordinates(meet)
    assert len(pts) > 0 and np.hypot(*(pts - X.location).T).max() < 1e-9


def test_homoclinic_implies_not_in_r(rng):
    for params in window_params(rng, 15):
        if homoclinic_test(params, SMALL).found:
            assert classify(params).tag is not Verdict.IN_R


@pytest.mark.parametrize("curve_id,b", [("B1", 0.3), ("B2", 0.58), ("B3", 0.61), ("B4", 0.8)])
def test_tangency_on_and_off_curve(curve_id, b):
    roots = b_curve_points(curve_id, b)
    assert len(roots) == 1
    a = roots[0]
    assert verify_B_tangency(curve_id, a, b) < 1e-8
    assert verify_B_tangency(curve_id, a + 1e-3, b) > 1e-6
    assert verify_B_tangency(curve_id, a - 1e-3, b) > 1e-6


def test_B4_incidence_ends_before_interval_top():
    # documented deviation: beyond b ~ 0.91 the B4 equation no longer realises L^4(Z) in [K, V]
    assert b_curve_points("B4", 0.9)
    assert not b_curve_points("B4", 0.94)


def test_trace_B_curve():
    pts = trace_B_curve("B2", 5)
    assert len(pts) == 5
    assert np.all((pts[:, 1] > 0.549134) & (pts[:, 1] < 0.602505))


def test_csv_round_trip(tmp_path):
    plus, _ = trace_unstable((1.4, 0.3), SMALL)
    path = tmp_path / "wu.csv"
    plus.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y"
    back = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.array_equal(back, plus.vertices)


def test_budget_validation():
    with pytest.raises(ValueError):
        ManifoldBudget(max_vertices=0)
    with pytest.raises(ValueError):
        ManifoldBudget(bounding_box=(1, 0, 0, 1))
    poly, _ = trace_unstable((1.4, 0.3), ManifoldBudget(max_vertices=500))
    assert len(poly) <= 500 and poly.truncated_by == "vertices"
