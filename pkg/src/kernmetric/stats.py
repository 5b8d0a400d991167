"""MMD, kernel scores, divergences, sample estimators, permutation
two-sample tests, and the energy distance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import kme_sq_norm
from .errors import DomainError, ShapeError
from .kernels import KernelSpec, _base_gram
from .spaces import DiscreteMeasure, MetricSpec, measure_difference, metric_dist

__all__ = [
    "TestResult",
    "mmd",
    "kernel_score",
    "expected_score",
    "divergence",
    "mmd_u_statistic",
    "permutation_test",
    "energy_distance",
]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n_permutations: int
    seed: int
    estimator: str = "u_statistic"

    def to_json(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n_permutations": self.n_permutations,
            "seed": self.seed,
            "estimator": self.estimator,
        }


def _require_probability(m: DiscreteMeasure, name: str = "measure"):
    if not m.is_probability:
        raise DomainError(f"{name} must be a probability measure")


def _canonical_key(m: DiscreteMeasure) -> bytes:
    parts = [m.weights.tobytes()]
    for p in m.points:
        if hasattr(p, "values"):
            parts.append(p.values.tobytes())
        elif isinstance(p, DiscreteMeasure):
            parts.append(_canonical_key(p))
        else:
            parts.append(np.asarray(p, dtype=float).tobytes())
    return b"".join(parts)


def mmd(k: KernelSpec, p: DiscreteMeasure, q: DiscreteMeasure) -> float:
    """Maximum mean discrepancy: RKHS norm of the embedded difference.

    The argument order is canonicalized before evaluation so that
    mmd(P, Q) == mmd(Q, P) bit for bit.
    """
    _require_probability(p, "P")
    _require_probability(q, "Q")
    if _canonical_key(q) < _canonical_key(p):
        p, q = q, p
    return float(np.sqrt(kme_sq_norm(k, measure_difference(p, q))))


def kernel_score(k: KernelSpec, p: DiscreteMeasure, x) -> float:
    """Kernel score of forecast p at outcome x (nonnegative convention).

    S(p, x) = -sum_i w_i k(z_i, x) + 0.5 sum_ij w_i w_j k(z_i, z_j)
              + 0.5 k(x, x).
    The half-diagonal term makes the score equal to half the squared MMD
    between p and the point mass at x, hence nonnegative.
    """
    _require_probability(p, "forecast")
    cross = float(sum(w * k(z, x) for z, w in zip(p.points, p.weights)))
    self_term = 0.5 * kme_sq_norm(k, p)
    val = -cross + self_term + 0.5 * k(x, x)
    if val < 0:
        if val < -1e-10:
            raise DomainError(f"kernel score is negative beyond roundoff ({val})")
        val = 0.0
    return val


def expected_score(k: KernelSpec, q: DiscreteMeasure, p: DiscreteMeasure) -> float:
    """Expected kernel score of forecast q under outcome distribution p."""
    _require_probability(q, "forecast")
    _require_probability(p, "outcome distribution")
    return float(
        sum(w * kernel_score(k, q, x) for x, w in zip(p.points, p.weights))
    )


def divergence(k: KernelSpec, p: DiscreteMeasure, q: DiscreteMeasure) -> float:
    """Score divergence d(P, Q) = S(Q, P) - S(P, P); equals half the squared MMD."""
    val = expected_score(k, q, p) - expected_score(k, p, p)
    if val < 0:
        if val < -1e-10:
            raise DomainError(f"divergence is negative beyond roundoff ({val})")
        val = 0.0
    return val


def _u_statistic_from_gram(g: np.ndarray, n: int, m: int) -> float:
    gxx = g[:n, :n]
    gyy = g[n:, n:]
    gxy = g[:n, n:]
    sxx = (gxx.sum() - np.trace(gxx)) / (n * (n - 1))
    syy = (gyy.sum() - np.trace(gyy)) / (m * (m - 1))
    sxy = gxy.sum() * 2.0 / (n * m)
    return float(sxx + syy - sxy)


def mmd_u_statistic(k: KernelSpec, xs: Sequence, ys: Sequence) -> float:
    """Unbiased estimator of the squared MMD between two samples."""
    xs, ys = list(xs), list(ys)
    n, m = len(xs), len(ys)
    if n < 2 or m < 2:
        raise DomainError("both samples need at least 2 points")
    g = _base_gram(k, xs + ys)
    return _u_statistic_from_gram(g, n, m)


def permutation_test(
    k: KernelSpec, xs: Sequence, ys: Sequence, n_perm: int = 999, seed: int = 0
) -> TestResult:
    """Two-sample permutation test with the MMD U-statistic.

    The p-value uses the (1 + count) / (B + 1) convention, which is exactly
    valid under exchangeability.  Each replicate draws its permutation from
    an independent stream spawned from the seed, so results do not depend
    on evaluation order.
    """
    xs, ys = list(xs), list(ys)
    n, m = len(xs), len(ys)
    if n < 2 or m < 2:
        raise DomainError("both samples need at least 2 points")
    if n_perm < 1:
        raise DomainError("n_perm must be positive")
    g = _base_gram(k, xs + ys)
    observed = _u_statistic_from_gram(g, n, m)

    streams = np.random.SeedSequence(seed).spawn(n_perm)
    count = 0
    for stream in streams:
        perm = np.random.default_rng(stream).permutation(n + m)
        gp = g[np.ix_(perm, perm)]
        if _u_statistic_from_gram(gp, n, m) >= observed:
            count += 1
    p_value = (1.0 + count) / (n_perm + 1.0)
    return TestResult(observed, p_value, n_perm, seed)


def energy_distance(metric: MetricSpec, p: DiscreteMeasure, q: DiscreteMeasure) -> float:
    """Energy distance 2 E rho(X, Y) - E rho(X, X') - E rho(Y, Y')."""
    _require_probability(p, "P")
    _require_probability(q, "Q")
    space = metric.space()
    if p.space != space or q.space != space:
        raise ShapeError("measures do not live on the metric's space")

    def form(a: DiscreteMeasure, b: DiscreteMeasure) -> float:
        total = 0.0
        for x, wx in zip(a.points, a.weights):
            for y, wy in zip(b.points, b.weights):
                total += wx * wy * metric_dist(metric, x, y)
        return total

    return 2.0 * form(p, q) - form(p, p) - form(q, q)
