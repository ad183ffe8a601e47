"""Spherical sample containers and first/second moment summaries.

Samples are ordered collections of unit vectors in R^d; discrete
measures attach nonnegative weights summing to one.  Construction
normalizes nearly-unit rows (acceptance tolerance 1e-6, then exact
renormalization) so that CSV rounding cannot corrupt the unit-norm
invariant, and rejects zero vectors and mixed dimensions outright.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DomainError

#: How far from unit length an input vector may be before it is
#: rejected rather than silently renormalized.
UNIT_ACCEPT_TOL = 1e-6

#: Below this resultant length the mean direction of a sample is
#: considered undefined (the polar split of the mean degenerates).
DIRECTION_EPS = 1e-14

_WEIGHT_SUM_TOL = 1e-12


def as_unit_rows(points, what="points"):
    """Validate and exactly renormalize an (n, d) array of unit vectors.

    Accepts any array-like whose rows are within ``UNIT_ACCEPT_TOL`` of
    unit length; returns a fresh float64 array with rows of exactly
    computed unit norm.
    """
    try:
        arr = np.asarray(points, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{what} are not a rectangular numeric array: {exc}")
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DomainError(f"{what} must form a nonempty 2-D array of vectors")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} contain non-finite entries")
    norms = np.sqrt(np.einsum("ij,ij->i", arr, arr))
    bad = np.abs(norms - 1.0) > UNIT_ACCEPT_TOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError(
            f"{what}[{i}] has norm {norms[i]:.6g}, outside the unit "
            f"acceptance tolerance {UNIT_ACCEPT_TOL:g}"
        )
    return arr / norms[:, None]


def as_unit_vector(v, what="vector"):
    """Validate and renormalize a single d-dimensional unit vector."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{what} must be a 1-D vector")
    return as_unit_rows(arr[None, :], what=what)[0]


class SampleSet:
    """An ordered sample of unit vectors on S^(d-1).

    Parameters
    ----------
    points : array-like, shape (n, d)
        Sample points; rows are normalized on construction.
    """

    __slots__ = ("points",)

    def __init__(self, points):
        pts = as_unit_rows(points, what="sample points")
        pts.setflags(write=False)
        self.points = pts

    @classmethod
    def from_angles(cls, angles):
        """Planar sample from angles in radians (directional, on S^1)."""
        theta = np.asarray(angles, dtype=np.float64).ravel()
        if theta.size == 0:
            raise DomainError("angle list is empty")
        return cls(np.column_stack([np.cos(theta), np.sin(theta)]))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"SampleSet(n={self.n}, dim={self.dim})"


class DiscreteMeasure:
    """Weighted point masses on the sphere, weights summing to one."""

    __slots__ = ("points", "weights")

    def __init__(self, points, weights):
        pts = as_unit_rows(points, what="measure atoms")
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.shape[0] != pts.shape[0]:
            raise DomainError(
                f"got {pts.shape[0]} atoms but {w.shape[0]} weights"
            )
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise DomainError("weights must be finite and nonnegative")
        if abs(float(np.sum(w)) - 1.0) > _WEIGHT_SUM_TOL:
            raise DomainError(
                f"weights sum to {float(np.sum(w))!r}, not 1 within "
                f"{_WEIGHT_SUM_TOL:g}; use DiscreteMeasure.normalized"
            )
        pts.setflags(write=False)
        w = w.copy()
        w.setflags(write=False)
        self.points = pts
        self.weights = w

    @classmethod
    def counting(cls, points):
        """Equal-weight (counting) measure on a point list."""
        pts = as_unit_rows(points, what="measure atoms")
        n = pts.shape[0]
        return cls(pts, np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, points, weights):
        """Measure from nonnegative weights of any positive total mass."""
        w = np.asarray(weights, dtype=np.float64).ravel()
        total = float(np.sum(w))
        if not total > 0.0:
            raise DomainError("weights must have positive total mass")
        return cls(points, w / total)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def __repr__(self):
        return f"DiscreteMeasure(n={self.n}, dim={self.dim})"


@dataclass(frozen=True)
class MomentSummary:
    """First and second moments of a sample or measure.

    Attributes
    ----------
    mean : ndarray, shape (d,)
        The (weighted) mean vector.
    resultant_length : float
        Norm of the mean; 0 for balanced data, 1 for a point mass.
    mean_direction : ndarray or None
        Unit vector mean / resultant_length, or None when the resultant
        length is below ``DIRECTION_EPS`` (polar split undefined).
    scatter : ndarray, shape (d, d)
        Second-moment (Fisher/scatter) matrix; symmetric PSD, trace 1.
    """

    mean: np.ndarray
    resultant_length: float
    mean_direction: Optional[np.ndarray]
    scatter: np.ndarray

    @property
    def dim(self):
        return self.mean.shape[0]


def _moments(pts, w):
    """Weighted moments of unit rows; shared by both public routes so
    that equal weights reproduce the sample summary bit for bit."""
    mean = w @ pts
    m = (pts * w[:, None]).T @ pts
    scatter = 0.5 * (m + m.T)
    r = float(np.linalg.norm(mean))
    direction = mean / r if r >= DIRECTION_EPS else None
    return MomentSummary(
        mean=mean,
        resultant_length=r,
        mean_direction=direction,
        scatter=scatter,
    )


def measure_moments(mu):
    """Moment summary of a discrete measure.

    mean = sum_i w_i x_i and scatter = sum_i w_i x_i x_i^T (explicitly
    symmetrized so that antisymmetric rounding cannot leak through).
    """
    return _moments(mu.points, mu.weights)


def moment_summary(sample):
    """Moment summary of a sample (the equal-weight special case)."""
    if isinstance(sample, SampleSet):
        pts = sample.points
    else:
        pts = as_unit_rows(sample, what="sample points")
    n = pts.shape[0]
    return _moments(pts, np.full(n, 1.0 / n))


def moment_deviation(mu):
    """Frobenius distance of the second-moment matrix from I/d.

    Zero exactly when the measure is a probabilistic unit norm tight
    frame candidate by second moments.
    """
    if isinstance(mu, DiscreteMeasure):
        scatter = measure_moments(mu).scatter
    else:
        scatter = moment_summary(mu).scatter
    d = scatter.shape[0]
    return float(np.linalg.norm(scatter - np.eye(d) / d))
