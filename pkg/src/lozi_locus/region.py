"""Parameter classification and periodic orbits.

The region test follows the orbit of Z: odd iterates must stay in the closed
left half-plane and even iterates in the closed right half-plane. Since the
map is linear near the period-two orbit {P, P'}, the test can stop as soon
as an even iterate enters a ball around P that provably never leaves the
fourth quadrant (with its image ball in the second quadrant).

The classifier is written once, vectorised over arrays of parameters; the
scalar entry points run the same code on length-one arrays so that scalar and
raster verdicts agree bit for bit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Point, branch_matrix, step
from .errors import BudgetError, PreconditionError

__all__ = [
    "Verdict",
    "RegionClass",
    "ClassifierConfig",
    "Certificate",
    "PeriodicOrbit",
    "AOfTResult",
    "classify",
    "classify_arrays",
    "certify_convergence",
    "certificate_constants",
    "find_periodic_orbits",
    "scan_line_a_of_t",
]


class Verdict(str, enum.Enum):
    NO_PERIODIC_ORBITS = "NoPeriodicOrbits"
    ATTRACTING_FIXED_POINT = "AttractingFixedPoint"
    SEGMENT_OF_PERIOD_TWO = "SegmentOfPeriodTwo"
    IN_R = "InR"
    NOT_IN_R = "NotInR"
    OUTSIDE_WINDOW = "OutsideWindow"
    UNDECIDED = "Undecided"

    @property
    def code(self) -> int:
        return _CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "Verdict":
        return _VERDICTS[int(code)]

    def __str__(self) -> str:
        return self.value


_VERDICTS = list(Verdict)
_CODES = {v: i for i, v in enumerate(_VERDICTS)}


@dataclass(frozen=True)
class RegionClass:
    tag: Verdict
    fail_index: int | None = None
    """Smallest n with a sign violation at Z^n (NotInR only)."""
    pairs_checked: int = 0
    witness: Point | None = None
    """The violating iterate (NotInR) or the certified even iterate (InR)."""
    radius: float | None = None
    """Radius of the certified ball around P (InR only)."""

    def to_dict(self) -> dict:
        out: dict = {"tag": self.tag.value, "pairs_checked": self.pairs_checked}
        if self.fail_index is not None:
            out["fail_index"] = self.fail_index
        if self.witness is not None:
            out["witness"] = [self.witness.x, self.witness.y]
        if self.radius is not None:
            out["radius"] = self.radius
        return out


@dataclass(frozen=True)
class ClassifierConfig:
    max_pairs: int = 100_000
    boundary_tolerance: float = 0.0

    def __post_init__(self):
        if self.max_pairs < 1:
            raise ValueError("max_pairs must be >= 1")


@dataclass(frozen=True)
class Certificate:
    certified: bool
    radius: float


# Largest power of A tried when looking for a contracting iterate.
MAX_CERT_POWER = 64


def _op_norm_arrays(p, q, r, s):
    ss = p * p + q * q + r * r + s * s
    det = p * s - q * r
    disc = np.maximum(ss * ss - 4.0 * det * det, 0.0)
    return np.sqrt(0.5 * (ss + np.sqrt(disc)))


def certificate_constants(a, b):
    """Per-parameter constants ``(m, K)`` of the convergence certificate.

    ``m`` is the norm of the right-branch linear part and ``K`` the largest
    norm among A^0 .. A^(j-1), where j is the first power with ||A^j|| < 1
    (K is inf when no such j <= MAX_CERT_POWER exists). Any even iterate
    within r of P then stays within K r of P forever.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = _op_norm_arrays(-a, np.ones_like(a), b, np.zeros_like(a))
    A = (b - a * a, a, -a * b, b)
    M = (np.ones_like(a), np.zeros_like(a), np.zeros_like(a), np.ones_like(a))
    K = np.ones_like(a)
    done = np.zeros(a.shape, dtype=bool)
    for _ in range(MAX_CERT_POWER):
        M = (
            A[0] * M[0] + A[1] * M[2],
            A[0] * M[1] + A[1] * M[3],
            A[2] * M[0] + A[3] * M[2],
            A[2] * M[1] + A[3] * M[3],
        )
        nrm = _op_norm_arrays(*M)
        newly = ~done & (nrm < 1.0)
        done |= newly
        K = np.where(done, K, np.maximum(K, nrm))
        if done.all():
            break
    return m, np.where(done, K, np.inf)


def _period_two_arrays(a, b):
    den = a * a + (1.0 - b) ** 2
    return (
        (1.0 + a - b) / den,
        b * (1.0 - a - b) / den,
        (1.0 - a - b) / den,
        b * (1.0 + a - b) / den,
    )


def _certify_arrays(x, y, px, py, qx, qy, m, K):
    r = np.hypot(x - px, y - py)
    R = K * r
    ok = (px - R > 0) & (py + R < 0) & (qx + m * R < 0) & (qy - m * R > 0)
    return ok, r


def certify_convergence(params: Sequence[float], z_even: Sequence[float]) -> Certificate:
    """Decide whether every later iterate of ``z_even`` keeps the R sign pattern."""
    a, b = params
    if not (0.0 < b < 1.0 and 1.0 - b < a < 1.0 + b):
        raise PreconditionError("certificate needs window parameters 1-b < a < 1+b, 0 < b < 1")
    A = np.array([float(a)])
    B = np.array([float(b)])
    m, K = certificate_constants(A, B)
    px, py, qx, qy = _period_two_arrays(A, B)
    ok, r = _certify_arrays(np.array([z_even[0]]), np.array([z_even[1]]), px, py, qx, qy, m, K)
    return Certificate(bool(ok[0]), float(r[0]))


def classify_arrays(a, b, cfg: ClassifierConfig = ClassifierConfig()) -> dict[str, np.ndarray]:
    """Vectorised classifier.

    Returns a dict of equally shaped arrays: ``code`` (Verdict codes),
    ``fail_index``, ``pairs``, ``wx``, ``wy`` (witness) and ``radius``.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    shape = a.shape
    a = a.ravel()
    b = b.ravel()
    n = a.size
    code = np.full(n, _CODES[Verdict.OUTSIDE_WINDOW], dtype=np.int8)
    fail = np.full(n, -1, dtype=np.int64)
    pairs = np.zeros(n, dtype=np.int64)
    wx = np.full(n, np.nan)
    wy = np.full(n, np.nan)
    radius = np.full(n, np.nan)

    in_b = (b > 0) & (b < 1)
    code[in_b & (a <= b - 1)] = _CODES[Verdict.NO_PERIODIC_ORBITS]
    code[in_b & (a > b - 1) & (a < 1 - b)] = _CODES[Verdict.ATTRACTING_FIXED_POINT]
    code[in_b & (a == 1 - b)] = _CODES[Verdict.SEGMENT_OF_PERIOD_TWO]
    window = in_b & (a > 1 - b) & (a < 1 + b)

    idx = np.flatnonzero(window)
    aa, bb = a[idx], b[idx]
    m, K = certificate_constants(aa, bb)
    px, py, qx, qy = _period_two_arrays(aa, bb)
    x = (2.0 + aa + np.sqrt(aa * aa + 4.0 * bb)) / (2.0 * (1.0 + aa - bb))
    y = np.zeros_like(x)
    tol = cfg.boundary_tolerance

    k = 0
    while idx.size and k < cfg.max_pairs:
        k += 1
        x, y = 1.0 + y - aa * np.abs(x), bb * x
        bad_odd = x > tol
        xo, yo = x, y
        x, y = 1.0 + y - aa * np.abs(x), bb * x
        bad_even = ~bad_odd & (x < -tol)
        ok, r = _certify_arrays(x, y, px, py, qx, qy, m, K)
        ok &= ~bad_odd & ~bad_even
        finished = bad_odd | bad_even | ok
        if not finished.any():
            continue
        if bad_odd.any():
            j = idx[bad_odd]
            code[j] = _CODES[Verdict.NOT_IN_R]
            fail[j] = 2 * k - 1
            wx[j], wy[j] = xo[bad_odd], yo[bad_odd]
            pairs[j] = k
        if bad_even.any():
            j = idx[bad_even]
            code[j] = _CODES[Verdict.NOT_IN_R]
            fail[j] = 2 * k
            wx[j], wy[j] = x[bad_even], y[bad_even]
            pairs[j] = k
        if ok.any():
            j = idx[ok]
            code[j] = _CODES[Verdict.IN_R]
            wx[j], wy[j] = x[ok], y[ok]
            radius[j] = r[ok]
            pairs[j] = k
        keep = ~finished
        idx, aa, bb, x, y = idx[keep], aa[keep], bb[keep], x[keep], y[keep]
        m, K, px, py, qx, qy = m[keep], K[keep], px[keep], py[keep], qx[keep], qy[keep]

    code[idx] = _CODES[Verdict.UNDECIDED]
    pairs[idx] = k
    out = {"code": code, "fail_index": fail, "pairs": pairs, "wx": wx, "wy": wy, "radius": radius}
    return {key: val.reshape(shape) for key, val in out.items()}


def _region_class(res: dict[str, np.ndarray], i) -> RegionClass:
    tag = Verdict.from_code(res["code"][i])
    fail = int(res["fail_index"][i])
    wx, wy, rad = float(res["wx"][i]), float(res["wy"][i]), float(res["radius"][i])
    return RegionClass(
        tag,
        fail_index=fail if fail >= 0 else None,
        pairs_checked=int(res["pairs"][i]),
        witness=Point(wx, wy) if math.isfinite(wx) else None,
        radius=rad if math.isfinite(rad) else None,
    )


def classify(params: Sequence[float], cfg: ClassifierConfig = ClassifierConfig()) -> RegionClass:
    a, b = params
    res = classify_arrays(np.array([float(a)]), np.array([float(b)]), cfg)
    return _region_class(res, 0)


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: tuple[Point, ...]
    sign_sequence: str
    multipliers: tuple[complex, complex]
    stability: str
    on_boundary: bool = False

    def residual(self, params: Sequence[float]) -> float:
        worst = 0.0
        for i, p in enumerate(self.points):
            q = step(params, p)
            nxt = self.points[(i + 1) % self.period]
            worst = max(worst, math.hypot(q.x - nxt.x, q.y - nxt.y))
        return worst


MAX_PERIOD = 24


def _lyndon_words(n: int):
    """Duval's algorithm: aperiodic binary necklaces of length n (0 = L, 1 = R)."""
    w = [-1]
    while w:
        w[-1] += 1
        if len(w) == n:
            yield tuple(w)
        m = len(w)
        while len(w) < n:
            w.append(w[len(w) - m])
        while w and w[-1] == 1:
            w.pop()


def _stability(mults) -> str:
    mods = sorted(abs(z) for z in mults)
    if any(abs(v - 1.0) <= 1e-9 for v in mods):
        return "nonhyperbolic"
    if mods[1] < 1.0:
        return "attracting"
    if mods[0] < 1.0:
        return "saddle"
    return "repelling"


def find_periodic_orbits(params: Sequence[float], period: int) -> list[PeriodicOrbit]:
    """All orbits of exact period ``period``, one affine solve per itinerary."""
    a, b = params
    if period < 1:
        raise PreconditionError("period must be >= 1")
    if period > MAX_PERIOD:
        raise BudgetError(f"period {period} exceeds the cap of {MAX_PERIOD} (2^{MAX_PERIOD} itineraries)")
    if b == 0:
        raise PreconditionError("b must be nonzero")
    mats = {0: branch_matrix(a, b, -1), 1: branch_matrix(a, b, 1)}
    e1 = np.array([1.0, 0.0])
    found: list[PeriodicOrbit] = []
    seen: list[np.ndarray] = []
    for word in _lyndon_words(period):
        M = np.eye(2)
        c = np.zeros(2)
        for s in word:
            M = mats[s] @ M
            c = mats[s] @ c + e1
        S = M - np.eye(2)
        det = S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
        if abs(det) <= 1e-14 * (1.0 + np.abs(M).max()):
            continue
        v = np.linalg.solve(S, -c)
        pts = [Point(float(v[0]), float(v[1]))]
        for s in word[:-1]:
            w = mats[s] @ np.array(pts[-1]) + e1
            pts.append(Point(float(w[0]), float(w[1])))
        scale = 1.0 + max(math.hypot(*p) for p in pts)
        boundary = False
        valid = True
        for s, p in zip(word, pts):
            if abs(p.x) <= 1e-12 * scale:
                boundary = True
            elif (p.x > 0) != (s == 1):
                valid = False
                break
        if not valid:
            continue
        arr = np.array(pts)
        # boundary orbits can match two itineraries; keep the first
        if boundary and any(
            arr.shape == o.shape and min(np.abs(np.roll(o, r, axis=0) - arr).max() for r in range(period)) < 1e-9 * scale
            for o in seen
        ):
            continue
        seen.append(arr)
        mults = tuple(complex(z) for z in np.linalg.eigvals(M))
        found.append(
            PeriodicOrbit(
                period=period,
                points=tuple(pts),
                sign_sequence="".join("R" if s else "L" for s in word),
                multipliers=mults,
                stability=_stability(mults),
                on_boundary=boundary,
            )
        )
    return found


@dataclass(frozen=True)
class AOfTResult:
    t: float
    a_value: float
    """Largest probed a below which every probe classified InR (0 if none)."""
    truncated: bool
    """An Undecided probe stopped the scan before a definite failure."""
    probes: int


def scan_line_a_of_t(t: float, a_step: float, cfg: ClassifierConfig = ClassifierConfig()) -> AOfTResult:
    """Probe the line b = 1 - t a at a = a_step, 2 a_step, ... until a probe is not InR."""
    if not 0.0 < t < 1.0:
        raise PreconditionError("t must lie in (0, 1)")
    if a_step <= 0:
        raise PreconditionError("a_step must be positive")
    a_top = 2.0 / (1.0 + t)  # a < 1 + b along the line
    count = max(int(math.ceil(a_top / a_step)) - 1, 1)
    a = a_step * np.arange(1, count + 1)
    a = a[a < a_top]
    res = classify_arrays(a, 1.0 - t * a, cfg)
    good = res["code"] == _CODES[Verdict.IN_R]
    first_bad = int(np.argmin(good)) if not good.all() else a.size
    truncated = first_bad < a.size and res["code"][first_bad] == _CODES[Verdict.UNDECIDED]
    value = float(a[first_bad - 1]) if first_bad > 0 else 0.0
    return AOfTResult(t, value, bool(truncated), int(min(first_bad + 1, a.size)))
