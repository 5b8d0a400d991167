"""Discretized input spaces: quadrature grids, L^p function samples,
Euclidean points, metrics, and finitely supported signed measures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, ShapeError

__all__ = [
    "QuadratureGrid",
    "FunctionSample",
    "Euclidean",
    "FuncLp",
    "MeasurePoints",
    "PointSpace",
    "EuclideanMetric",
    "LpMetric",
    "MetricSpec",
    "DiscreteMeasure",
    "trapezoid_grid",
    "lp_norm",
    "sq_dist_l2",
    "metric_dist",
    "measure_difference",
    "dirac",
]


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and positive weights discretizing integration over [a, b]."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise ShapeError("nodes and weights must be 1-D arrays of equal length")
        if nodes.size < 2:
            raise DomainError("a grid needs at least 2 nodes")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise DomainError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))

    def __len__(self):
        return self.nodes.size

    def __eq__(self, other):
        return (
            isinstance(other, QuadratureGrid)
            and self.domain == other.domain
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.domain, self.nodes.tobytes(), self.weights.tobytes()))


def trapezoid_grid(m: int, a: float = 0.0, b: float = 1.0) -> QuadratureGrid:
    """Uniform m-node trapezoid rule on [a, b]; weights sum to b - a."""
    if m < 2:
        raise DomainError("trapezoid grid needs at least 2 nodes")
    nodes = np.linspace(a, b, m)
    h = (b - a) / (m - 1)
    weights = np.full(m, h)
    weights[0] = weights[-1] = h / 2
    return QuadratureGrid(nodes, weights, (a, b))


@dataclass(frozen=True)
class FunctionSample:
    """An element of L^p(lambda) represented by its values on a grid."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ShapeError(
                f"values length {values.shape} does not match grid ({len(self.grid)} nodes)"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        return (
            isinstance(other, FunctionSample)
            and self.grid == other.grid
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.grid, self.values.tobytes()))


@dataclass(frozen=True)
class Euclidean:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dimension must be positive")

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and bool(np.all(np.isfinite(x)))


@dataclass(frozen=True)
class FuncLp:
    grid: QuadratureGrid
    p: float = 2.0

    def __post_init__(self):
        if not (1.0 < self.p < np.inf):
            raise DomainError(f"p must lie in (1, inf), got {self.p}")

    def contains(self, x) -> bool:
        return isinstance(x, FunctionSample) and x.grid == self.grid


@dataclass(frozen=True)
class MeasurePoints:
    """Space whose points are discrete measures over a base space."""

    base: "PointSpace"

    def __post_init__(self):
        if isinstance(self.base, MeasurePoints):
            raise DomainError("measure spaces may not be nested")

    def contains(self, x) -> bool:
        return isinstance(x, DiscreteMeasure) and x.space == self.base


PointSpace = Union[Euclidean, FuncLp, MeasurePoints]


def as_point(space: PointSpace, x):
    """Coerce and validate a raw point for the given space."""
    if isinstance(space, Euclidean):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (space.dim,):
            raise ShapeError(f"expected a point in R^{space.dim}, got shape {x.shape}")
        return x
    if not space.contains(x):
        raise ShapeError(f"point {type(x).__name__} does not belong to {space}")
    return x


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported signed measure; duplicate support points allowed."""

    space: PointSpace
    points: tuple
    weights: np.ndarray

    def __post_init__(self):
        points = tuple(as_point(self.space, p) for p in self.points)
        weights = np.asarray(self.weights, dtype=float)
        if len(points) < 1:
            raise DomainError("a measure needs at least one support point")
        if weights.shape != (len(points),):
            raise ShapeError("weights must match the number of support points")
        if not np.all(np.isfinite(weights)):
            raise DomainError("weights must be finite")
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __eq__(self, other):
        return (
            isinstance(other, DiscreteMeasure)
            and self.space == other.space
            and len(self.points) == len(other.points)
            and all(np.array_equal(np.asarray(p), np.asarray(q)) if not isinstance(p, FunctionSample) else p == q
                    for p, q in zip(self.points, other.points))
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.space, len(self.points), self.weights.tobytes()))

    @property
    def total_mass(self) -> float:
        cached = getattr(self, "_mass_override", None)
        if cached is not None:
            return cached
        # left-to-right order fixed for reproducibility
        total = 0.0
        for w in self.weights:
            total += w
        return total

    @property
    def is_probability(self) -> bool:
        return bool(np.all(self.weights > 0)) and abs(self.total_mass - 1.0) <= 1e-12

    @property
    def is_zero_mass(self) -> bool:
        return abs(self.total_mass) <= 1e-12

    def points_array(self) -> np.ndarray:
        """Support as a (n, d) array; Euclidean base only."""
        if not isinstance(self.space, Euclidean):
            raise ShapeError("points_array is defined for Euclidean support only")
        return np.stack(self.points)


def dirac(space: PointSpace, x) -> DiscreteMeasure:
    return DiscreteMeasure(space, (x,), np.array([1.0]))


def lp_norm(f: FunctionSample, p: float) -> float:
    """Quadrature value of ||f||_{L^p}, p >= 1."""
    if p < 1:
        raise DomainError(f"lp_norm needs p >= 1, got {p}")
    w = f.grid.weights
    return float(np.sum(w * np.abs(f.values) ** p) ** (1.0 / p))


def sq_dist_l2(f: FunctionSample, g: FunctionSample) -> float:
    """Squared L^2(lambda) distance between two samples on the same grid."""
    if f.grid != g.grid:
        raise ShapeError("function samples live on different grids")
    d = f.values - g.values
    return float(np.sum(f.grid.weights * d * d))


@dataclass(frozen=True)
class EuclideanMetric:
    dim: int

    def space(self) -> PointSpace:
        return Euclidean(self.dim)

    def __call__(self, x, y) -> float:
        return metric_dist(self, x, y)


@dataclass(frozen=True)
class LpMetric:
    """L^p metric on function samples; restricted to 1 < p <= 2.

    Separable L^p with 1 < p <= 2 is of strong negative type, which is
    what the metric-based kernel constructions require; other exponents
    are rejected at construction.
    """

    grid: QuadratureGrid
    p: float = 2.0

    def __post_init__(self):
        if not (1.0 < self.p <= 2.0):
            raise DomainError(f"LpMetric requires 1 < p <= 2, got {self.p}")

    def space(self) -> PointSpace:
        return FuncLp(self.grid, self.p)

    def __call__(self, x, y) -> float:
        return metric_dist(self, x, y)


MetricSpec = Union[EuclideanMetric, LpMetric]


def metric_dist(m: MetricSpec, x, y) -> float:
    """Distance under the metric; symmetric and triangle-inequality safe."""
    if isinstance(m, EuclideanMetric):
        x = as_point(Euclidean(m.dim), x)
        y = as_point(Euclidean(m.dim), y)
        return float(np.linalg.norm(x - y))
    if f_mismatch(m, x) or f_mismatch(m, y):
        raise ShapeError("function sample does not match the metric's grid")
    diff = FunctionSample(m.grid, x.values - y.values)
    return lp_norm(diff, m.p)


def f_mismatch(m: LpMetric, x) -> bool:
    return not isinstance(x, FunctionSample) or x.grid != m.grid


def measure_difference(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """The signed measure mu - nu on the concatenated support.

    The total mass is fixed to ``mu.total_mass - nu.total_mass`` exactly,
    rather than re-summed over the concatenated weights, so the mass
    identity holds without roundoff.
    """
    if mu.space != nu.space:
        raise ShapeError("measures live on different spaces")
    diff = DiscreteMeasure(
        mu.space,
        mu.points + nu.points,
        np.concatenate([mu.weights, -nu.weights]),
    )
    object.__setattr__(diff, "_mass_override", mu.total_mass - nu.total_mass)
    return diff
