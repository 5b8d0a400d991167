"""Kernel constructions: radial kernels on Hilbert spaces, operator-based
kernels on L^p, metric kernels on spaces of strong negative type, distance
kernels, mixtures, and kernels on spaces of discrete measures.

Every kernel is an immutable evaluation rule ``k(x, y)`` over a point
space; evaluation is pure and symmetric by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DegeneracyError,
    DomainError,
    InjectivityError,
    ProfileClassError,
    ShapeError,
)
from .profiles import PhiProfile, is_strictly_pd_class
from .spaces import (
    DiscreteMeasure,
    Euclidean,
    EuclideanMetric,
    FuncLp,
    FunctionSample,
    LpMetric,
    MeasurePoints,
    MetricSpec,
    PointSpace,
    QuadratureGrid,
    as_point,
    measure_difference,
    metric_dist,
    sq_dist_l2,
)

__all__ = [
    "KernelSpec",
    "Identity",
    "DiagonalScale",
    "LinearGridMap",
    "MapSpec",
    "make_radial_hilbert",
    "make_tee_radial",
    "make_lp_operator",
    "make_metric_phi",
    "make_distance_kernel",
    "make_mixture",
    "make_kme_measure",
    "make_fourier_measure",
    "make_quantile_monge",
    "check_kernelqint",
    "check_lp_nondegeneracy",
    "gaussian_frequencies",
    "quantile_sq_w2",
]


class KernelSpec:
    """Base class: a symmetric positive definite evaluation rule."""

    space: PointSpace
    #: value of k(x, x) where constant (phi(0)); None for distance kernels
    diag_value: Optional[float] = None

    def __call__(self, x, y) -> float:
        raise NotImplementedError

    def _check(self, x):
        return as_point(self.space, x)


def _require_strict(phi: PhiProfile):
    if not is_strictly_pd_class(phi):
        raise ProfileClassError(
            "profile has mixing measure supported on {0}; the induced radial "
            "kernel is constant and not strictly positive definite"
        )


def _sq_dist(space: PointSpace, x, y) -> float:
    if isinstance(space, Euclidean):
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return float(d @ d)
    return sq_dist_l2(x, y)


# ---------------------------------------------------------------------------
# maps for composed radial kernels


@dataclass(frozen=True)
class Identity:
    def apply(self, space: PointSpace, x):
        return x


@dataclass(frozen=True)
class DiagonalScale:
    factors: tuple

    def __post_init__(self):
        factors = tuple(float(f) for f in self.factors)
        if any(f == 0.0 for f in factors):
            raise InjectivityError("diagonal scaling with a zero factor is not injective")
        object.__setattr__(self, "factors", factors)

    def apply(self, space: PointSpace, x):
        f = np.asarray(self.factors)
        if isinstance(space, Euclidean):
            if f.size != space.dim:
                raise ShapeError("scale factors do not match the space dimension")
            return np.asarray(x) * f
        if f.size != len(space.grid):
            raise ShapeError("scale factors do not match the grid size")
        return FunctionSample(space.grid, x.values * f)


@dataclass(frozen=True)
class LinearGridMap:
    """Square matrix applied to a sample's values; must be numerically injective."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.ndim != 2:
            raise ShapeError("matrix must be 2-D")
        s = np.linalg.svd(a, compute_uv=False)
        if s[-1] <= 1e-10 * s[0]:
            raise InjectivityError(
                f"matrix is numerically rank deficient (sigma_min/sigma_max = {s[-1] / s[0]:.2e})"
            )
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def apply(self, space: PointSpace, x):
        if isinstance(space, Euclidean):
            return self.matrix @ np.asarray(x, dtype=float)
        return FunctionSample(space.grid, self.matrix @ x.values)


MapSpec = Union[Identity, DiagonalScale, LinearGridMap]


# ---------------------------------------------------------------------------
# kernel rules


@dataclass(frozen=True)
class _RadialHilbert(KernelSpec):
    phi: PhiProfile
    space: PointSpace

    @property
    def diag_value(self):
        return self.phi(0.0)

    def __call__(self, x, y) -> float:
        x, y = self._check(x), self._check(y)
        return self.phi(_sq_dist(self.space, x, y))

    def pairwise(self, xs, ys) -> np.ndarray:
        """Gram block for stacked Euclidean points (n, d) x (m, d)."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        sq = _pairwise_sq_dists(xs, ys)
        return _phi_array(self.phi, sq)


@dataclass(frozen=True)
class _TeeRadial(KernelSpec):
    phi: PhiProfile
    tee: MapSpec
    space: PointSpace

    @property
    def diag_value(self):
        return self.phi(0.0)

    def __call__(self, x, y) -> float:
        x, y = self._check(x), self._check(y)
        tx = self.tee.apply(self.space, x)
        ty = self.tee.apply(self.space, y)
        return self.phi(_sq_dist(self.space, tx, ty))


@dataclass(frozen=True)
class _LpOperator(KernelSpec):
    """k2(f, g) = phi(Q(f - g)) with Q the double quadrature form over k1."""

    phi: PhiProfile
    k1: KernelSpec
    grid: QuadratureGrid
    p: float
    space: PointSpace
    form: np.ndarray  # diag(w) K1 diag(w), precomputed

    @property
    def diag_value(self):
        return self.phi(0.0)

    def __call__(self, x, y) -> float:
        x, y = self._check(x), self._check(y)
        h = x.values - y.values
        q = float(h @ (self.form @ h))
        return self.phi(max(q, 0.0))


@dataclass(frozen=True)
class _MetricPhi(KernelSpec):
    """k(x, y) = phi(rho(x, y)); the metric enters unsquared."""

    phi: PhiProfile
    metric: MetricSpec
    space: PointSpace

    @property
    def diag_value(self):
        return self.phi(0.0)

    def __call__(self, x, y) -> float:
        x, y = self._check(x), self._check(y)
        return self.phi(metric_dist(self.metric, x, y))


@dataclass(frozen=True)
class _DistanceKernel(KernelSpec):
    """k(x, y) = rho(x, z0) + rho(y, z0) - rho(x, y)."""

    metric: MetricSpec
    z0: object
    space: PointSpace

    def __call__(self, x, y) -> float:
        x, y = self._check(x), self._check(y)
        return (
            metric_dist(self.metric, x, self.z0)
            + metric_dist(self.metric, y, self.z0)
            - metric_dist(self.metric, x, y)
        )


@dataclass(frozen=True)
class _Mixture(KernelSpec):
    components: tuple  # of (KernelSpec, weight)
    space: PointSpace

    @property
    def diag_value(self):
        vals = [k.diag_value for k, _ in self.components]
        if any(v is None for v in vals):
            return None
        return float(sum(w * v for (_, w), v in zip(self.components, vals)))

    def __call__(self, x, y) -> float:
        return float(sum(w * k(x, y) for k, w in self.components))


@dataclass(frozen=True)
class _KmeMeasure(KernelSpec):
    """k2(mu, nu) = phi(||Phi_{k1}(mu) - Phi_{k1}(nu)||^2)."""

    phi: PhiProfile
    k1: KernelSpec
    space: PointSpace

    @property
    def diag_value(self):
        return self.phi(0.0)

    def embedding_sq_dist(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
        if mu is nu or mu == nu:
            return 0.0
        # canonical order, so the value is bitwise symmetric in (mu, nu)
        if _measure_key(nu) < _measure_key(mu):
            mu, nu = nu, mu
        diff = measure_difference(mu, nu)
        g = _base_gram(self.k1, diff.points)
        a = diff.weights
        return float(a @ (g @ a))

    def __call__(self, mu, nu) -> float:
        mu, nu = self._check(mu), self._check(nu)
        return self.phi(max(self.embedding_sq_dist(mu, nu), 0.0))


@dataclass(frozen=True)
class _FourierMeasure(KernelSpec):
    """k(mu, nu) = phi(sum_s w_s |mu_hat(s) - nu_hat(s)|^2)."""

    phi: PhiProfile
    freqs: np.ndarray  # (n_freq, d)
    freq_weights: np.ndarray
    space: PointSpace

    @property
    def diag_value(self):
        return self.phi(0.0)

    def char_function(self, mu: DiscreteMeasure) -> np.ndarray:
        pts = mu.points_array()  # (n, d)
        phase = pts @ self.freqs.T  # (n, n_freq)
        return mu.weights @ np.exp(1j * phase)

    def fourier_sq_dist(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
        d = self.char_function(mu) - self.char_function(nu)
        return float(np.sum(self.freq_weights * (d.real**2 + d.imag**2)))

    def __call__(self, mu, nu) -> float:
        mu, nu = self._check(mu), self._check(nu)
        return self.phi(self.fourier_sq_dist(mu, nu))


@dataclass(frozen=True)
class _QuantileMonge(KernelSpec):
    """k(mu, nu) = phi(W2~^2) where W2~ is the L^2 distance of quantile maps."""

    phi: PhiProfile
    u_grid: QuadratureGrid
    space: PointSpace

    @property
    def diag_value(self):
        return self.phi(0.0)

    def __call__(self, mu, nu) -> float:
        mu, nu = self._check(mu), self._check(nu)
        return self.phi(quantile_sq_w2(mu, nu))


# ---------------------------------------------------------------------------
# constructors (validation lives here)


def make_radial_hilbert(phi: PhiProfile, space: PointSpace) -> KernelSpec:
    """Radial kernel k(x, y) = phi(||x - y||^2) on a Hilbert point space."""
    _require_strict(phi)
    if isinstance(space, FuncLp) and space.p != 2.0:
        raise DomainError(
            f"radial kernels need a Hilbert norm; L^p with p = {space.p} is not one"
        )
    if isinstance(space, MeasurePoints):
        raise ShapeError("use make_kme_measure for kernels on measure points")
    return _RadialHilbert(phi, space)


def make_tee_radial(phi: PhiProfile, tee: MapSpec, space: PointSpace) -> KernelSpec:
    """k(x, y) = phi(||T(x) - T(y)||^2) for an injective map T."""
    _require_strict(phi)
    if isinstance(space, FuncLp) and space.p != 2.0:
        raise DomainError("the image space norm must be Hilbert (p = 2)")
    if isinstance(space, MeasurePoints):
        raise ShapeError("tee-radial kernels are defined on Euclidean or L^2 spaces")
    return _TeeRadial(phi, tee, space)


def make_lp_operator(
    phi: PhiProfile, k1: KernelSpec, grid: QuadratureGrid, p: float
) -> KernelSpec:
    """Operator kernel on L^p(lambda) built from a base kernel on the grid line."""
    if not (1.0 < p < np.inf):
        raise DomainError(f"cases p in {{1, inf}} are excluded; got p = {p}")
    _require_strict(phi)
    if not isinstance(k1.space, Euclidean) or k1.space.dim != 1:
        raise ShapeError("the base kernel must live on the 1-D point space of the grid")
    if not check_lp_nondegeneracy(k1, grid):
        raise DegeneracyError(
            "base kernel is degenerate on the grid: the weighted Gram form "
            "annihilates some nonzero function"
        )
    w = grid.weights
    g1 = _base_gram(k1, [np.array([t]) for t in grid.nodes])
    form = (w[:, None] * g1) * w[None, :]
    form.setflags(write=False)
    return _LpOperator(phi, k1, grid, float(p), FuncLp(grid, float(p)), form)


def check_kernelqint(k1: KernelSpec, q: float, grid: QuadratureGrid) -> float:
    """Quadrature value of the integral of k1(x, x)^(q/2); finite on any grid.

    Reported for documentation and overflow detection; q is the conjugate
    exponent of the target L^p space.
    """
    if not (1.0 < q < np.inf):
        raise DomainError(f"q must lie in (1, inf), got {q}")
    diag = np.array([k1(np.array([t]), np.array([t])) for t in grid.nodes])
    with np.errstate(over="raise"):
        try:
            val = float(np.sum(grid.weights * diag ** (q / 2.0)))
        except FloatingPointError as exc:
            raise DomainError("overflow while evaluating the diagonal integral") from exc
    if not np.isfinite(val):
        raise DomainError("diagonal integral overflowed")
    return val


def check_lp_nondegeneracy(k1: KernelSpec, grid: QuadratureGrid) -> bool:
    """Discrete surrogate of the strict quadratic-form condition.

    Builds M[i, j] = w_i k1(x_i, x_j) w_j and requires its smallest
    eigenvalue to exceed 1e-10 * trace(M).
    """
    pts = [np.array([t]) for t in grid.nodes]
    g = _base_gram(k1, pts)
    w = grid.weights
    m = (w[:, None] * g) * w[None, :]
    eigs = np.linalg.eigvalsh(m)
    return bool(eigs[0] > 1e-10 * np.trace(m))


def make_metric_phi(phi: PhiProfile, metric: MetricSpec) -> KernelSpec:
    """k(x, y) = phi(rho(x, y)) over a metric of strong negative type."""
    _require_strict(phi)
    # LpMetric enforces 1 < p <= 2 at construction; EuclideanMetric is whitelisted
    return _MetricPhi(phi, metric, metric.space())


def make_distance_kernel(metric: MetricSpec, z0) -> KernelSpec:
    """Distance kernel k(x, y) = rho(x, z0) + rho(y, z0) - rho(x, y)."""
    space = metric.space()
    z0 = as_point(space, z0)
    return _DistanceKernel(metric, z0, space)


def make_mixture(components: Sequence[Tuple[KernelSpec, float]]) -> KernelSpec:
    """Convex (positively weighted) combination of kernels on one space."""
    components = tuple((k, float(w)) for k, w in components)
    if not components:
        raise DomainError("a mixture needs at least one component")
    space = components[0][0].space
    for k, w in components:
        if w <= 0:
            raise DomainError(f"mixture weights must be positive, got {w}")
        if k.space != space:
            raise ShapeError("all mixture components must share one point space")
    return _Mixture(components, space)


def make_kme_measure(phi: PhiProfile, k1: KernelSpec) -> KernelSpec:
    """Kernel on discrete measures through the mean embedding of k1."""
    _require_strict(phi)
    if isinstance(k1.space, MeasurePoints):
        raise ShapeError("the base kernel must live on the base point space")
    base_phi = getattr(k1, "phi", None)
    if base_phi is not None:
        _require_strict(base_phi)
    return _KmeMeasure(phi, k1, MeasurePoints(k1.space))


def gaussian_frequencies(n: int, dim: int, seed: int) -> tuple:
    """n standard-Gaussian frequency atoms with uniform weights 1/n."""
    if n < 1:
        raise DomainError("need at least one frequency atom")
    rng = np.random.default_rng(seed)
    freqs = rng.standard_normal((n, dim))
    weights = np.full(n, 1.0 / n)
    return freqs, weights


def make_fourier_measure(
    phi: PhiProfile, freqs, freq_weights=None
) -> KernelSpec:
    """Kernel on probability measures over R^d comparing Fourier transforms.

    Frequency atoms discretize the L^2(lambda) norm of the difference of
    characteristic functions; ``freqs`` may be a list of (vector, weight)
    pairs or an array combined with ``freq_weights``.
    """
    _require_strict(phi)
    if freq_weights is None:
        pairs = list(freqs)
        fr = np.atleast_2d(np.asarray([np.atleast_1d(v) for v, _ in pairs], dtype=float))
        fw = np.asarray([w for _, w in pairs], dtype=float)
    else:
        fr = np.atleast_2d(np.asarray(freqs, dtype=float))
        fw = np.asarray(freq_weights, dtype=float)
    if fr.shape[0] != fw.shape[0]:
        raise ShapeError("frequency atoms and weights disagree in length")
    if np.any(fw <= 0):
        raise DomainError("frequency weights must be positive")
    if abs(float(np.sum(fw)) - 1.0) > 1e-12:
        raise DomainError(f"frequency weights must sum to 1, got {np.sum(fw)}")
    fr.setflags(write=False)
    fw.setflags(write=False)
    return _FourierMeasure(phi, fr, fw, MeasurePoints(Euclidean(fr.shape[1])))


def make_quantile_monge(phi: PhiProfile, u_grid: QuadratureGrid) -> KernelSpec:
    """Kernel on 1-D probability measures through the quantile embedding."""
    _require_strict(phi)
    a, b = u_grid.domain
    if not (a >= 0.0 and b <= 1.0):
        raise DomainError("u_grid must discretize [0, 1]")
    return _QuantileMonge(phi, u_grid, MeasurePoints(Euclidean(1)))


# ---------------------------------------------------------------------------
# helpers


def _measure_key(m: DiscreteMeasure) -> bytes:
    parts = [m.weights.tobytes()]
    for p in m.points:
        if isinstance(p, FunctionSample):
            parts.append(p.values.tobytes())
        else:
            parts.append(np.asarray(p, dtype=float).tobytes())
    return b"".join(parts)


def _phi_array(phi: PhiProfile, t: np.ndarray) -> np.ndarray:
    flat = t.ravel()
    return np.array([phi(v) for v in flat]).reshape(t.shape)


def _pairwise_sq_dists(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    diff = xs[:, None, :] - ys[None, :, :]
    return np.clip(np.einsum("ijk,ijk->ij", diff, diff), 0.0, None)


def _base_gram(k: KernelSpec, points) -> np.ndarray:
    """Symmetric Gram matrix of a kernel on a list of points (fast paths inside)."""
    pts = list(points)
    n = len(pts)
    if (
        isinstance(k, _RadialHilbert)
        and isinstance(k.space, Euclidean)
        and n > 2
    ):
        xs = np.stack([np.asarray(p, dtype=float) for p in pts])
        g = k.pairwise(xs, xs)
        return 0.5 * (g + g.T)
    g = np.empty((n, n))
    for i in range(n):
        g[i, i] = k(pts[i], pts[i])
        for j in range(i + 1, n):
            v = k(pts[i], pts[j])
            g[i, j] = v
            g[j, i] = v
    return g


def _quantile_breaks(mu: DiscreteMeasure):
    xs = mu.points_array().ravel()
    order = np.argsort(xs, kind="stable")
    xs = xs[order]
    cum = np.cumsum(mu.weights[order])
    cum[-1] = 1.0  # guard the top breakpoint against roundoff
    return xs, cum


def quantile_sq_w2(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Exact squared L^2([0,1]) distance of the two quantile functions.

    Integrates the piecewise-constant quantile functions over the merged
    breakpoint partition; for 1-D measures this equals the squared
    2-Wasserstein distance.
    """
    for m in (mu, nu):
        if not m.is_probability:
            raise DomainError("quantile embedding requires probability measures")
    xs_mu, cum_mu = _quantile_breaks(mu)
    xs_nu, cum_nu = _quantile_breaks(nu)
    breaks = np.union1d(cum_mu, cum_nu)
    breaks = breaks[(breaks > 0.0) & (breaks <= 1.0)]
    lo = 0.0
    total = 0.0
    for hi in breaks:
        width = hi - lo
        if width <= 0:
            lo = hi
            continue
        u = 0.5 * (lo + hi)
        q_mu = xs_mu[np.searchsorted(cum_mu, u, side="left")]
        q_nu = xs_nu[np.searchsorted(cum_nu, u, side="left")]
        total += width * (q_mu - q_nu) ** 2
        lo = hi
    return float(total)
