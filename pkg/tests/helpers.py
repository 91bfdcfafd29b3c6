"""Shared helpers for the test modules."""


def window_params(rng, n, margin=1e-3):
    """Random (a, b) with 0 < b < 1 and 1 - b < a < 1 + b."""
    b = rng.uniform(0.02, 0.98, n)
    a = 1.0 - b + margin + rng.uniform(0.0, 1.0, n) * (2.0 * b - 2.0 * margin)
    return list(zip(a.tolist(), b.tolist()))


def algebraic_branch_points(curve_id, count, b_samples=2000):
    """``count`` evenly spread algebraic points of C_n on the orbit branch."""
    import numpy as np

    from lozi_locus.curves import branch_points_a

    pts = []
    for i in range(b_samples):
        b = (i + 0.5) / b_samples
        pts.extend((a, b) for a in branch_points_a(curve_id, b))
    if len(pts) <= count:
        return pts
    idx = np.linspace(0, len(pts) - 1, count).round().astype(int)
    return [pts[i] for i in idx]
