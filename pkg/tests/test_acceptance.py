"""Acceptance criteria, one test per criterion (run with ``pytest -v``)."""
import math

import numpy as np
import pytest

from lozi_locus.cli import main
from lozi_locus.core import fixed_points, inverse_step, jacobian, period_two, point_Z, second_iterate_matrix, step
from lozi_locus.curves import curve_min, curve_residual, scaling_table, trace_Cn, z_orbit_x
from lozi_locus.manifolds import ManifoldBudget, axis_crossings, homoclinic_test, trace_unstable
from lozi_locus.region import ClassifierConfig, Verdict, classify, find_periodic_orbits
from lozi_locus.scan import FOUND, ScanSpec, render, scan, with_budgets
from lozi_locus.spiral import lemma1_deviation

from helpers import algebraic_branch_points, window_params

T0 = 0.0535502597736068
T1 = 0.05019615992097643


def test_criterion_01_constants(capsys):
    assert main(["roots"]) == 0
    lines = capsys.readouterr().out.splitlines()
    t0, t1 = float(lines[0].split()[1]), float(lines[1].split()[1])
    assert abs(t0 - T0) < 1e-12
    assert abs(t1 - T1) < 1e-12
    assert t1 < t0


def test_criterion_02_closed_form_consistency(rng):
    for a, b in window_params(rng, 1000):
        params = (a, b)
        X, _ = fixed_points(params)
        assert math.dist(step(params, X.location), X.location) < 1e-10
        P = period_two(params)
        assert math.dist(step(params, P.p), P.p_prime) < 1e-10
        assert math.dist(step(params, P.p_prime), P.p) < 1e-10
        prod = jacobian(params, P.p_prime) @ jacobian(params, P.p)
        assert np.abs(prod - second_iterate_matrix(a, b)).max() < 1e-10
        Z = point_Z(params)
        lam = X.unstable_eigenvalue
        assert abs((Z.x - X.location.x) * b - (Z.y - X.location.y) * lam) < 1e-10
        plus, minus = trace_unstable(params, ManifoldBudget(max_iterations=2))
        assert math.dist(axis_crossings(plus, "x")[0], Z) < 1e-10
        assert math.dist(axis_crossings(minus, "y")[0], inverse_step(params, Z)) < 1e-10


def test_criterion_03_curve_oracle_equivalence():
    for n in (2, 3, 4, 5):
        cid = f"C{n}"
        alg = algebraic_branch_points(cid, 100)
        assert len(alg) == 100
        for a, b in alg:
            assert abs(z_orbit_x(a, b, n)[n]) < 1e-8
        traced = trace_Cn(n, 2000)
        idx = np.linspace(0, len(traced) - 1, 100).round().astype(int)
        assert len(traced) >= 100
        for a, b in traced[idx]:
            assert abs(curve_residual(cid, a, b)) < 1e-7


def test_criterion_04_minima_monotonicity():
    mins = {k: curve_min(k) for k in range(4, 43)}
    for k in range(4, 41):
        assert mins[k + 2].b_n >= mins[k].b_n
        assert mins[k + 2].a_n <= mins[k].a_n
    assert mins[6].b_n > mins[4].b_n and mins[6].a_n < mins[4].a_n


def test_criterion_05_scaling_law():
    rows = {k: v for k, _, v in scaling_table(40)}
    target = 7 * math.pi / 4
    err10, err40 = abs(rows[10] - target), abs(rows[40] - target)
    assert err40 < err10, f"|2k a_2k - 7pi/4|: k=10 -> {err10:.4f}, k=40 -> {err40:.4f} (2k a_2k at k=40 is {rows[40]:.6f})"
    assert err40 < 0.05, f"final error {err40:.4f}"


def test_criterion_06_spiral_deviation_rate():
    d2 = lemma1_deviation(1e-2, 0.5, 2 * math.pi, 1)
    d3 = lemma1_deviation(1e-3, 0.5, 2 * math.pi, 1)
    assert 5 <= d2 / d3 <= 20


def test_criterion_07_classification_spot_checks():
    assert classify((0.5, 0.25)).tag is Verdict.ATTRACTING_FIXED_POINT
    assert classify((1.7, 0.5)).tag is Verdict.OUTSIDE_WINDOW
    assert homoclinic_test((1.7, 0.5)).found
    rc = classify((0.05, 0.997))
    assert rc.tag is Verdict.IN_R and rc.radius is not None
    for params in [(1.16, 0.95), (0.4, 0.997)]:
        assert classify(params).tag in (Verdict.NOT_IN_R, Verdict.IN_R)
        assert homoclinic_test(params).verdict == "NotFoundWithinBudget"


def test_criterion_08_period_six_counterexample(capsys):
    assert main(["orbits", "--a", "1.60", "--b", "0.61", "--period", "6"]) == 0
    assert "saddle" in capsys.readouterr().out
    params = (1.60, 0.61)
    saddles = [o for o in find_periodic_orbits(params, 6) if o.stability == "saddle"]
    assert saddles
    for o in saddles:
        assert len(o.points) == 6 and o.residual(params) < 1e-10


def test_criterion_09_figure_regeneration():
    spec = ScanSpec(a_range=(0.0, 2.0), b_range=(0.0, 1.0), width=400, height=200)
    img = scan(spec, threads=1)
    a, b = spec.parameters()
    white = img.mask(Verdict.IN_R)
    assert white.any()
    assert np.all((1 - b[white] < a[white]) & (a[white] < 1 + b[white]))
    i, j = int(0.997 * 200), int(0.05 / 2 * 400)
    assert white[max(i - 3, 0) : i + 1, max(j - 3, 0) : j + 4].any()
    lower = scan(with_budgets(spec, max_pairs=1000), threads=1)
    assert np.all(white[lower.mask(Verdict.IN_R)])
    assert np.all(img.mask(Verdict.NOT_IN_R)[lower.mask(Verdict.NOT_IN_R)])
    assert render(img) == render(scan(spec, threads=2))


def test_criterion_10_no_pixel_in_r_and_homoclinic():
    spec = ScanSpec(
        a_range=(0.0, 2.0), b_range=(0.0, 1.0), width=100, height=50,
        mode="region_plus_homoclinic", homoclinic_everywhere=True,
    )
    img = scan(spec)
    found = img.homoclinic == FOUND
    assert found.any() and img.mask(Verdict.IN_R).any()
    assert not np.any(found & img.mask(Verdict.IN_R))
