"""Planar nematic order analysis: Q2 matrix, order parameter, director.

For rod orientations x_i on the unit circle the traceless symmetric
matrix

    Q2 = (2/n) sum_i x_i x_i^T - I

has eigenvalues +lambda and -lambda; the nonnegative eigenvalue is the
order parameter (0 isotropic, 1 perfectly aligned) and its eigenvector
the director.  Because x_i enters quadratically, a rod rotated by 180
degrees contributes identically: orientations are stored axially, as
angles reduced mod pi.

``local_order_field`` evaluates the same analysis in a disk
neighborhood around each cell of a regular grid, which is what reveals
multidirectional patterning whose global order parameter is near zero.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .core import SampleSet, moment_summary
from .exceptions import DomainError
from .uniformity import bingham_test

#: Below this order parameter the director is reported absent (the
#: eigenvector of a numerically zero matrix is meaningless).
ORDER_EPS = 1e-14


@dataclass(frozen=True)
class Rod:
    """A rod at planar position (x, y) with axial orientation theta.

    The orientation is reduced mod pi at construction.
    """

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise DomainError("rod coordinates must be finite")
        object.__setattr__(self, "theta", float(np.mod(self.theta, np.pi)))

    @property
    def axis(self):
        return np.array([math.cos(self.theta), math.sin(self.theta)])


@dataclass(frozen=True)
class OrderResult:
    """Order parameter, director and the underlying Q2 matrix."""

    q2: np.ndarray
    order_parameter: float
    director: Optional[np.ndarray]

    @property
    def director_angle(self):
        """Director angle in [0, pi), or None in the isotropic state."""
        if self.director is None:
            return None
        return float(np.mod(math.atan2(self.director[1], self.director[0]), np.pi))


@dataclass(frozen=True)
class OrderField:
    """Local order analysis on a regular grid of disk neighborhoods.

    Cells whose neighborhood holds fewer than `min_count` rods carry
    NaN order parameters and director angles.
    """

    cx: np.ndarray
    cy: np.ndarray
    order_parameter: np.ndarray
    director_angle: np.ndarray
    count: np.ndarray
    radius: float
    cell_size: float
    min_count: int

    def cells(self):
        """Iterate (cx, cy, lambda-or-None, angle-or-None, count) rows."""
        ny, nx = self.count.shape
        for iy in range(ny):
            for ix in range(nx):
                lam = self.order_parameter[iy, ix]
                ang = self.director_angle[iy, ix]
                yield (
                    float(self.cx[ix]),
                    float(self.cy[iy]),
                    None if np.isnan(lam) else float(lam),
                    None if np.isnan(ang) else float(ang),
                    int(self.count[iy, ix]),
                )


def _planar_sample(sample):
    sample = sample if isinstance(sample, SampleSet) else SampleSet(sample)
    if sample.dim != 2:
        raise DomainError(f"order analysis is planar (d = 2), got d={sample.dim}")
    return sample


def q2_matrix(sample):
    """The traceless covariance-type matrix (2/n) sum x_i x_i^T - I."""
    sample = _planar_sample(sample)
    scatter = moment_summary(sample).scatter
    return 2.0 * scatter - np.eye(2)


def order_parameter(sample):
    """Order parameter and director from the eigensystem of Q2.

    The director is the unit eigenvector of the nonnegative eigenvalue,
    reported with a deterministic sign (nonnegative first component,
    ties broken toward a nonnegative second); it is None when the
    order parameter is numerically zero.
    """
    sample = _planar_sample(sample)
    q2 = q2_matrix(sample)
    eigvals, eigvecs = np.linalg.eigh(q2)
    lam = float(eigvals[-1])
    if lam < ORDER_EPS:
        return OrderResult(q2=q2, order_parameter=max(lam, 0.0), director=None)
    vec = eigvecs[:, -1]
    if vec[0] < 0.0 or (vec[0] == 0.0 and vec[1] < 0.0):
        vec = -vec
    return OrderResult(q2=q2, order_parameter=lam, director=vec)


def local_order_field(rods, radius, cell_size, min_count=5):
    """Order parameter and director in a disk around each grid cell.

    Parameters
    ----------
    rods : sequence of Rod
        Rod positions and axial orientations.
    radius : float
        Neighborhood radius (same length units as the positions);
        "less than one rod length" in the imaging setting.
    cell_size : float
        Grid spacing; cell centers tile the rod bounding box.
    min_count : int
        Cells with fewer rods than this are reported absent.

    Returns
    -------
    OrderField
    """
    rods = list(rods)
    if not rods:
        raise DomainError("rod list is empty")
    if not radius > 0.0 or not cell_size > 0.0:
        raise DomainError("radius and cell_size must be positive")
    if min_count < 2:
        raise DomainError(f"min_count must be at least 2, got {min_count}")
    pos = np.array([[r.x, r.y] for r in rods])
    theta = np.array([r.theta for r in rods])
    axes = np.column_stack([np.cos(theta), np.sin(theta)])

    lo = pos.min(axis=0)
    hi = pos.max(axis=0)
    nx = max(1, int(np.ceil((hi[0] - lo[0]) / cell_size)))
    ny = max(1, int(np.ceil((hi[1] - lo[1]) / cell_size)))
    # center the grid on the bounding box so degenerate extents still
    # place a cell on the data
    x0 = lo[0] - 0.5 * (nx * cell_size - (hi[0] - lo[0]))
    y0 = lo[1] - 0.5 * (ny * cell_size - (hi[1] - lo[1]))
    cx = x0 + (np.arange(nx) + 0.5) * cell_size
    cy = y0 + (np.arange(ny) + 0.5) * cell_size

    tree = cKDTree(pos)
    lam = np.full((ny, nx), np.nan)
    ang = np.full((ny, nx), np.nan)
    count = np.zeros((ny, nx), dtype=np.intp)
    gx, gy = np.meshgrid(cx, cy)
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    neighborhoods = tree.query_ball_point(centers, r=radius)
    flat = 0
    for iy in range(ny):
        for ix in range(nx):
            members = neighborhoods[flat]
            flat += 1
            count[iy, ix] = len(members)
            if len(members) < min_count:
                continue
            res = order_parameter(SampleSet(axes[members]))
            lam[iy, ix] = res.order_parameter
            if res.director is not None:
                ang[iy, ix] = res.director_angle
    return OrderField(
        cx=cx,
        cy=cy,
        order_parameter=lam,
        director_angle=ang,
        count=count,
        radius=float(radius),
        cell_size=float(cell_size),
        min_count=int(min_count),
    )


def fisher_vs_q2_bridge(sample):
    """Order parameter and Bingham statistic of the same planar sample.

    Both derive from the scatter matrix: with Q2 eigenvalues +/-lambda,
    trace(T^2) - 1/2 = lambda^2 / 2, so the Bingham statistic equals
    2 n lambda^2 in the plane.  The two values returned here are
    computed through their independent code paths.
    """
    sample = _planar_sample(sample)
    lam = order_parameter(sample).order_parameter
    stat = bingham_test(sample).statistic
    return lam, stat
