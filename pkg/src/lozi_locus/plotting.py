"""Matplotlib figures for rasters, curves, manifolds and the scaling table.

Every function returns a :class:`matplotlib.figure.Figure`; saving is left to
the caller. The non-interactive Agg backend is used so figures can be made
without a display.
"""
from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .manifolds import Polyline  # noqa: E402
from .scan import FOUND, HOMOCLINIC_COLOR, PALETTE, RasterImage  # noqa: E402

__all__ = ["raster_figure", "curves_figure", "manifold_figure", "scaling_figure"]


def raster_figure(img: RasterImage):
    lut = np.zeros((len(PALETTE), 3))
    for verdict, rgb in PALETTE.items():
        lut[verdict.code] = np.array(rgb) / 255.0
    rgb = lut[img.code.astype(np.intp)]
    rgb[img.homoclinic == FOUND] = np.array(HOMOCLINIC_COLOR) / 255.0
    spec = img.spec
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.imshow(rgb, origin="lower", aspect="auto", interpolation="nearest", extent=(*spec.a_range, *spec.b_range))
    names = ("a", "b") if spec.coordinate_system == "ab" else ("c = 1/a", "t = (1 - b)/a")
    ax.set_xlabel(names[0])
    ax.set_ylabel(names[1])
    return fig


def curves_figure(curves: dict[str, np.ndarray], window: bool = True):
    """Scatter each ``(N, 2)`` array of (a, b) points, optionally with the window lines."""
    fig, ax = plt.subplots(figsize=(6, 6))
    for name, pts in curves.items():
        pts = np.asarray(pts).reshape(-1, 2)
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=2, label=name)
    if window:
        b = np.linspace(0.0, 1.0, 2)
        ax.plot(1.0 - b, b, "k-", lw=0.8)
        ax.plot(1.0 + b, b, "k-", lw=0.8)
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.legend(loc="best", fontsize="small")
    return fig


def manifold_figure(unstable: Sequence[Polyline], stable: Sequence[Polyline], limits=None):
    fig, ax = plt.subplots(figsize=(6, 6))
    for poly in unstable:
        ax.plot(poly.vertices[:, 0], poly.vertices[:, 1], "-", color="tab:blue", lw=0.6)
    for poly in stable:
        ax.plot(poly.vertices[:, 0], poly.vertices[:, 1], "-", color="goldenrod", lw=0.8)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.axvline(0.0, color="k", lw=0.5)
    if limits is not None:
        ax.set_xlim(limits[0], limits[1])
        ax.set_ylim(limits[2], limits[3])
    ax.set_aspect("equal", adjustable="datalim")
    return fig


def scaling_figure(rows: Sequence[tuple[int, float, float]]):
    """Plot 2k a_2k against k with the limit 7 pi / 4 for reference."""
    k = np.array([r[0] for r in rows])
    v = np.array([r[2] for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(k, v, "o-", ms=3, label="2k a_2k")
    ax.axhline(7.0 * math.pi / 4.0, color="k", ls="--", lw=0.8, label="7 pi / 4")
    ax.set_xlabel("k")
    ax.legend(loc="best")
    return fig
