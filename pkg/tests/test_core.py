import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lozi_locus.core import (
    branch_matrix,
    fixed_points,
    inverse_step,
    iterate,
    jacobian,
    op_norm,
    period_two,
    point_Z,
    second_iterate_matrix,
    step,
)
from lozi_locus.errors import DegenerateParameterError, OnKinkError

from helpers import window_params


def close(p, q, tol=1e-12):
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


def test_step_examples():
    assert close(step((1, 0.5), (2 / 3, 1 / 3)), (2 / 3, 1 / 3), 1e-15)
    assert close(step((1, 0.5), (1.2, -0.2)), (-0.4, 0.6), 1e-15)
    assert step((0.7, 0.3), (0.0, 0.0)) == (1.0, 0.0)


def test_inverse_examples():
    assert close(inverse_step((1, 0.5), (-0.4, 0.6)), (1.2, -0.2), 1e-15)
    assert close(inverse_step((1, 0.5), (1, 0)), (0, 0), 0)
    with pytest.raises(DegenerateParameterError):
        inverse_step((1.0, 0.0), (1.0, 1.0))


def test_round_trip_random(rng):
    for _ in range(1000):
        a = rng.uniform(-2, 2)
        b = rng.uniform(0.01, 2)
        p = rng.uniform(-10, 10, 2)
        q = inverse_step((a, b), step((a, b), p))
        assert math.hypot(*(np.array(q) - p)) < 1e-12 * (1 + math.hypot(*p)) * 10 / b


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-3, 3),
    st.floats(0.01, 1.0),
    st.floats(-10, 10),
    st.floats(-10, 10),
)
def test_involution_property(a, b, x, y):
    q = inverse_step((a, b), step((a, b), (x, y)))
    scale = 1 + math.hypot(x, y)
    assert math.hypot(q[0] - x, q[1] - y) <= 1e-12 * scale / b * 10


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 2), st.floats(0.01, 1.0), st.floats(-10, 10), st.floats(-10, 10))
def test_half_plane_mapping(a, b, x, y):
    assume(abs(x) > 1e-300)  # b * x underflows to 0 for subnormal x
    q = step((a, b), (x, y))
    if x < 0:
        assert q.y < 0
    elif x > 0:
        assert q.y > 0


def test_iterate_backward_and_forward():
    orbit = iterate((1.4, 0.3), (0.1, 0.2), 5)
    assert len(orbit) == 6
    back = iterate((1.4, 0.3), orbit[-1], -5)
    assert close(back[-1], (0.1, 0.2), 1e-12)


def test_jacobian_examples():
    assert np.array_equal(jacobian((1, 0.5), (1.2, -0.2)), [[-1, 1], [0.5, 0]])
    assert np.array_equal(jacobian((1, 0.5), (-0.4, 0.6)), [[1, 1], [0.5, 0]])
    with pytest.raises(OnKinkError):
        jacobian((1, 0.5), (0.0, 3.0))


def test_jacobian_composition(rng):
    for a, b in window_params(rng, 200):
        P = period_two((a, b))
        prod = jacobian((a, b), P.p_prime) @ jacobian((a, b), P.p)
        assert np.allclose(prod, second_iterate_matrix(a, b), atol=1e-14, rtol=0)


def test_fixed_point_examples():
    X, Y = fixed_points((1, 0.5))
    assert close(X.location, (2 / 3, 1 / 3), 1e-15)
    assert X.unstable_eigenvalue == pytest.approx((-1 - math.sqrt(3)) / 2, abs=1e-15)
    assert X.stable_eigenvalue == pytest.approx((-1 + math.sqrt(3)) / 2, abs=1e-15)
    assert X.is_saddle
    assert close(Y.location, (-2, -1), 1e-15)
    X17, _ = fixed_points((1.7, 0.5))
    assert close(X17.location, (1 / 2.2, 0.5 / 2.2), 1e-15)


def test_fixed_point_degenerate():
    with pytest.raises(DegenerateParameterError, match="X"):
        fixed_points((0.5, 1.5))
    with pytest.raises(DegenerateParameterError, match="Y"):
        fixed_points((0.5, 0.5))


def test_virtual_Y_flagged():
    # for a + b < 1 the formula for Y lands in the right half-plane: no fixed point there
    _, Y = fixed_points((0.01, 0.01))
    assert not Y.exists


def test_fixed_point_residual_and_eigen(rng):
    for a, b in window_params(rng, 300):
        for fp in fixed_points((a, b)):
            if not fp.exists:
                continue
            loc = fp.location
            assert close(step((a, b), loc), loc, 1e-12 * (1 + math.hypot(*loc)))
            M = branch_matrix(a, b, 1 if loc.x > 0 else -1)
            for lam in (fp.unstable_eigenvalue, fp.stable_eigenvalue):
                v = np.array([lam, b])
                assert np.allclose(M @ v, lam * v, atol=1e-12)
            d = fp.unstable_direction
            assert abs(d.x * b - d.y * fp.unstable_eigenvalue) < 1e-12


def test_period_two_examples():
    P = period_two((1, 0.5))
    assert close(P.p, (1.2, -0.2), 1e-15)
    assert close(P.p_prime, (-0.4, 0.6), 1e-15)
    assert all(abs(abs(z) - 0.5) < 1e-12 for z in P.multipliers)
    assert P.stability == "attracting" and P.exists
    assert period_two((1.5, 0.5)).stability == "nonhyperbolic"
    assert period_two((1.8, 0.5)).stability == "saddle"
    with pytest.raises(DegenerateParameterError):
        period_two((0.0, 1.0))


def test_period_two_round_trip(rng):
    for a, b in window_params(rng, 1000):
        P = period_two((a, b))
        s = 1 + math.hypot(*P.p)
        assert close(step((a, b), P.p), P.p_prime, 1e-12 * s)
        assert close(step((a, b), P.p_prime), P.p, 1e-12 * s)


def test_point_Z_examples():
    assert close(point_Z((1, 0.5)), ((3 + math.sqrt(3)) / 3, 0), 1e-15)
    z = point_Z((0.05, 0.997))
    assert z.x == pytest.approx((2.05 + math.sqrt(0.0025 + 3.988)) / (2 * 0.053), rel=1e-13)


def test_Z_on_unstable_eigenline(rng):
    for a, b in window_params(rng, 1000):
        X, _ = fixed_points((a, b))
        Z = point_Z((a, b))
        lam = X.unstable_eigenvalue
        dx, dy = Z.x - X.location.x, Z.y - X.location.y
        # (dx, dy) parallel to (lam, b), with positive parameter s = dy / b
        assert abs(dx * b - dy * lam) < 1e-12 * (1 + abs(lam))
        assert dy / b < 0 or dx > 0


def test_op_norm_matches_svd(rng):
    for _ in range(200):
        m = rng.normal(size=(2, 2))
        assert op_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-12)
