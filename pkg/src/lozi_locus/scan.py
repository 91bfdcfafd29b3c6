"""Parameter-space rasters: classify every pixel of a rectangle and render it.

Cell ``(i, j)`` samples the pixel centre
``u = u_min + (j + 0.5)(u_max - u_min)/width``,
``v = v_min + (i + 0.5)(v_max - v_min)/height``, where ``(u, v)`` is ``(a, b)``
or, in ``ct`` coordinates, ``(c, t) = (1/a, (1 - b)/a)``. Row 0 is therefore
the bottom of the parameter rectangle; :func:`render` writes rows top-down so
the picture has b (or t) increasing upwards.

Every pixel is a pure function of its parameters, so the result does not
depend on how rows are distributed over worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .core import fixed_points
from .errors import DegenerateParameterError, PreconditionError
from .manifolds import ManifoldBudget, homoclinic_test
from .region import ClassifierConfig, RegionClass, Verdict, _region_class, classify_arrays

__all__ = [
    "ScanSpec",
    "RasterImage",
    "scan",
    "render",
    "write_csv",
    "load_config",
    "PALETTE",
    "HOMOCLINIC_COLOR",
    "NOT_TESTED",
    "NOT_FOUND",
    "FOUND",
]

REGION_ONLY = "region_only"
REGION_PLUS_HOMOCLINIC = "region_plus_homoclinic"

# homoclinic flag values
NOT_TESTED, NOT_FOUND, FOUND = -1, 0, 1

PALETTE: dict[Verdict, tuple[int, int, int]] = {
    Verdict.IN_R: (255, 255, 255),
    Verdict.NOT_IN_R: (255, 0, 0),
    Verdict.ATTRACTING_FIXED_POINT: (200, 220, 255),
    Verdict.NO_PERIODIC_ORBITS: (160, 160, 255),
    Verdict.OUTSIDE_WINDOW: (220, 220, 220),
    Verdict.UNDECIDED: (128, 128, 128),
    Verdict.SEGMENT_OF_PERIOD_TWO: (255, 200, 0),
}
HOMOCLINIC_COLOR = (0, 0, 0)

SCAN_BUDGET = ManifoldBudget(max_vertices=20_000, max_iterations=30)


@dataclass(frozen=True)
class ScanSpec:
    a_range: tuple[float, float] = (0.0, 2.0)
    """Horizontal range: a, or c = 1/a in ct coordinates."""
    b_range: tuple[float, float] = (0.0, 1.0)
    """Vertical range: b, or t = (1 - b)/a in ct coordinates."""
    width: int = 400
    height: int = 200
    classifier_config: ClassifierConfig = field(default_factory=ClassifierConfig)
    mode: str = REGION_ONLY
    coordinate_system: str = "ab"
    manifold_budget: ManifoldBudget = SCAN_BUDGET
    homoclinic_everywhere: bool = False
    """Also run the homoclinic test on InR pixels (used for cross-checks)."""

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        for lo, hi in (self.a_range, self.b_range):
            if not lo < hi:
                raise ValueError("ranges must be nonempty")
        if self.mode not in (REGION_ONLY, REGION_PLUS_HOMOCLINIC):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.coordinate_system not in ("ab", "ct"):
            raise ValueError(f"unknown coordinate system {self.coordinate_system!r}")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel-centre coordinates along the horizontal and vertical axes."""
        (u0, u1), (v0, v1) = self.a_range, self.b_range
        u = u0 + (np.arange(self.width) + 0.5) * (u1 - u0) / self.width
        v = v0 + (np.arange(self.height) + 0.5) * (v1 - v0) / self.height
        return u, v

    def parameters(self, rows: Iterable[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
        """``(a, b)`` grids for the given rows (all rows by default)."""
        u, v = self.axes()
        if rows is not None:
            v = v[np.asarray(list(rows), dtype=int)]
        U, V = np.meshgrid(u, v)
        if self.coordinate_system == "ab":
            return U, V
        with np.errstate(divide="ignore"):
            a = 1.0 / U
        return a, 1.0 - V * a

    def summary(self) -> str:
        (u0, u1), (v0, v1) = self.a_range, self.b_range
        names = ("a", "b") if self.coordinate_system == "ab" else ("c", "t")
        text = (
            f"mode={self.mode} {names[0]}=[{u0!r},{u1!r}] {names[1]}=[{v0!r},{v1!r}] "
            f"size={self.width}x{self.height} max_pairs={self.classifier_config.max_pairs}"
        )
        if self.mode == REGION_PLUS_HOMOCLINIC:
            mb = self.manifold_budget
            text += f" max_vertices={mb.max_vertices} max_iterations={mb.max_iterations}"
        return text


@dataclass
class RasterImage:
    spec: ScanSpec
    code: np.ndarray
    """``(height, width)`` Verdict codes."""
    fail_index: np.ndarray
    pairs: np.ndarray
    homoclinic: np.ndarray
    """NOT_TESTED, NOT_FOUND or FOUND per cell."""

    def verdict(self, i: int, j: int) -> Verdict:
        return Verdict.from_code(self.code[i, j])

    def cell(self, i: int, j: int) -> RegionClass:
        res = {"code": self.code, "fail_index": self.fail_index, "pairs": self.pairs}
        res["wx"] = res["wy"] = res["radius"] = np.full(self.code.shape, np.nan)
        return _region_class(res, (i, j))

    def parameter(self, i: int, j: int) -> tuple[float, float]:
        a, b = self.spec.parameters([i])
        return float(a[0, j]), float(b[0, j])

    def mask(self, verdict: Verdict) -> np.ndarray:
        return self.code == verdict.code


def _homoclinic_flags(a: np.ndarray, b: np.ndarray, code: np.ndarray, spec: ScanSpec) -> np.ndarray:
    flags = np.full(code.shape, NOT_TESTED, dtype=np.int8)
    if spec.mode != REGION_PLUS_HOMOCLINIC:
        return flags
    in_r = Verdict.IN_R.code
    for idx in np.ndindex(code.shape):
        if code[idx] == in_r and not spec.homoclinic_everywhere:
            continue
        params = (float(a[idx]), float(b[idx]))
        if not (math.isfinite(params[0]) and params[1] != 0):
            continue
        try:
            X = fixed_points(params)[0]
            if not (X.exists and X.is_saddle):
                continue
            report = homoclinic_test(params, spec.manifold_budget)
        except (DegenerateParameterError, PreconditionError):
            continue
        flags[idx] = FOUND if report.found else NOT_FOUND
    return flags


def _scan_rows(spec: ScanSpec, rows: list[int]):
    a, b = spec.parameters(rows)
    res = classify_arrays(a, b, spec.classifier_config)
    flags = _homoclinic_flags(a, b, res["code"], spec)
    return rows, res["code"], res["fail_index"], res["pairs"], flags


def scan(spec: ScanSpec, threads: int = 1) -> RasterImage:
    """Classify every pixel; ``threads`` > 1 distributes rows over processes."""
    h, w = spec.height, spec.width
    code = np.empty((h, w), dtype=np.int8)
    fail = np.empty((h, w), dtype=np.int64)
    pairs = np.empty((h, w), dtype=np.int64)
    flags = np.empty((h, w), dtype=np.int8)
    # interleaved rows balance cheap and expensive parts of the window; a few
    # large blocks keep the vectorised classifier efficient
    n_blocks = 1 if threads <= 1 else min(h, threads)
    blocks = [list(range(k, h, n_blocks)) for k in range(n_blocks)]

    def store(result):
        rows, c, f, p, g = result
        code[rows], fail[rows], pairs[rows], flags[rows] = c, f, p, g

    if threads <= 1:
        for rows in blocks:
            store(_scan_rows(spec, rows))
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for result in pool.map(_scan_rows, [spec] * len(blocks), blocks):
                store(result)
    return RasterImage(spec, code, fail, pairs, flags)


def render(img: RasterImage) -> bytes:
    """Binary PPM (P6) with the fixed palette; top row = largest vertical coordinate."""
    lut = np.zeros((len(Verdict), 3), dtype=np.uint8)
    for verdict, rgb in PALETTE.items():
        lut[verdict.code] = rgb
    rgb = lut[img.code.astype(np.intp)]
    rgb[img.homoclinic == FOUND] = HOMOCLINIC_COLOR
    h, w = img.code.shape
    header = f"P6\n# lozi-locus {img.spec.summary()}\n{w} {h}\n255\n".encode("ascii")
    return header + rgb[::-1].tobytes()


def write_csv(img: RasterImage, path) -> None:
    a, b = img.spec.parameters()
    names = {NOT_TESTED: "", NOT_FOUND: "NotFoundWithinBudget", FOUND: "Found"}
    with open(path, "w", encoding="ascii") as fh:
        fh.write("row,col,a,b,verdict,fail_index,pairs_checked,homoclinic\n")
        for i, j in np.ndindex(img.code.shape):
            fail = int(img.fail_index[i, j])
            fh.write(
                f"{i},{j},{a[i, j]:.17g},{b[i, j]:.17g},{Verdict.from_code(img.code[i, j]).value},"
                f"{fail if fail >= 0 else ''},{int(img.pairs[i, j])},{names[int(img.homoclinic[i, j])]}\n"
            )


CONFIG_KEYS = ("max_pairs", "max_vertices", "max_iterations", "threads")


def load_config(path) -> dict[str, int]:
    """Flat ``key=value`` file; blank lines and ``#`` comments are ignored."""
    out: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (s.strip() for s in line.partition("="))
            if not sep or key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: expected one of {', '.join(CONFIG_KEYS)} as key=value")
            try:
                out[key] = int(value)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: {key} must be an integer") from None
    return out


def with_budgets(spec: ScanSpec, max_pairs=None, max_vertices=None, max_iterations=None) -> ScanSpec:
    cfg = spec.classifier_config
    if max_pairs is not None:
        cfg = replace(cfg, max_pairs=max_pairs)
    mb = spec.manifold_budget
    if max_vertices is not None:
        mb = replace(mb, max_vertices=max_vertices)
    if max_iterations is not None:
        mb = replace(mb, max_iterations=max_iterations)
    return replace(spec, classifier_config=cfg, manifold_budget=mb)
