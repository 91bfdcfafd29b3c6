"""Zero-entropy locus of the Lozi map family.

Modules: :mod:`core` (map, fixed points, period-two orbit), :mod:`region`
(classifier, periodic orbits), :mod:`curves` (boundary curves, minima,
scaling), :mod:`spiral` (small-a asymptotics), :mod:`manifolds` (invariant
manifolds of X, homoclinic test) and :mod:`scan` (rasters and PPM output).
"""
from .core import Params, Point, fixed_points, inverse_step, iterate, period_two, point_Z, step
from .errors import (
    BudgetError,
    DegenerateParameterError,
    DivergenceError,
    LoziDomainError,
    LoziError,
    NotFoundError,
    OnKinkError,
    PreconditionError,
)
from .region import ClassifierConfig, RegionClass, Verdict, classify, find_periodic_orbits

__version__ = "0.1.0"

__all__ = [
    "Params",
    "Point",
    "step",
    "inverse_step",
    "iterate",
    "fixed_points",
    "period_two",
    "point_Z",
    "classify",
    "find_periodic_orbits",
    "ClassifierConfig",
    "RegionClass",
    "Verdict",
    "LoziError",
    "DegenerateParameterError",
    "OnKinkError",
    "LoziDomainError",
    "PreconditionError",
    "BudgetError",
    "NotFoundError",
    "DivergenceError",
]
