"""Finite and probabilistic frame machinery.

A finite frame is a spanning family of vectors; a finite unit norm
tight frame (FNTF) is a unit-norm family whose frame operator
S = sum_i x_i x_i^T equals (n/d) I, equivalently whose scatter matrix
is I/d.  For probability measures on the sphere the same role is
played by three potentials:

* frame potential  ``sum_ij w_i w_j <x_i, x_j>^2``  (minimum 1/d,
  attained exactly by probabilistic unit norm tight frames),
* Riesz-2 potential ``sum_ij w_i w_j ||x_i - x_j||^2``  (maximum 2,
  attained exactly by zero-mean measures),
* their ratio, the fractional potential (1/(2d) at zero-mean tight
  frames).

``gradient_tighten`` descends the frame potential along the sphere's
tangent directions to push an arbitrary spanning family toward
directional equilibrium, i.e. toward an FNTF.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .core import DiscreteMeasure, as_unit_rows, as_unit_vector, moment_deviation
from .exceptions import DimensionError, DomainError

#: Scale-aware tightness threshold: bounds closer than this (relative
#: to max(1, B)) classify a frame as tight.
TIGHT_RTOL = 1e-10

#: Riesz potential below this means the measure is numerically a point
#: mass and the fractional potential is undefined.
_POINT_MASS_EPS = 1e-14


@dataclass(frozen=True)
class FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of the frame operator."""

    lower: float
    upper: float

    @property
    def is_frame(self):
        return self.lower > 0.0

    @property
    def is_tight(self):
        return (self.upper - self.lower) <= TIGHT_RTOL * max(1.0, self.upper)


@dataclass(frozen=True)
class PotentialReport:
    """The three potentials plus the second-moment deviation of a measure.

    `fractional` is None when the Riesz potential vanishes (point
    mass), where the ratio is undefined.
    """

    frame_potential: float
    riesz_potential: float
    fractional: Optional[float]
    moment_deviation: float


def frame_bounds(vectors):
    """Optimal frame bounds of a unit-norm family.

    Returns the extreme eigenvalues of S = sum_i x_i x_i^T.  A
    non-spanning family yields lower = 0 (correctly "not a frame").
    """
    pts = as_unit_rows(vectors, what="frame vectors")
    s = pts.T @ pts
    eig = np.linalg.eigvalsh(0.5 * (s + s.T))
    return FrameBounds(lower=max(0.0, float(eig[0])), upper=float(eig[-1]))


def is_fntf(vectors, tol):
    """Whether unit vectors form a finite unit norm tight frame.

    True iff the scatter matrix (1/n) S is within Frobenius distance
    `tol` of I/d.
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    pts = as_unit_rows(vectors, what="frame vectors")
    return moment_deviation(DiscreteMeasure.counting(pts)) <= tol


def harmonic_fntf_r2(n):
    """The n equally spaced half-circle directions, an FNTF for R^2.

    Angles k*pi/n for k = 0..n-1; their doubled phases are the n-th
    roots of unity and cancel, which is the planar tight-frame
    condition.
    """
    if n < 2:
        raise DomainError(
            f"a single unit vector cannot be a tight frame for R^2 (n={n})"
        )
    angles = np.arange(n) * (np.pi / n)
    return np.column_stack([np.cos(angles), np.sin(angles)])


def fntf_defect_r2(angles):
    """Magnitude of sum_k exp(2i a_k); zero iff the planar FNTF condition holds."""
    a = np.asarray(angles, dtype=np.float64).ravel()
    if a.size == 0:
        raise DomainError("angle list is empty")
    return float(np.abs(np.sum(np.exp(2j * a))))


def _as_measure(mu):
    if isinstance(mu, DiscreteMeasure):
        return mu
    raise DomainError(f"expected a DiscreteMeasure, got {type(mu).__name__}")


def frame_potential(mu):
    """Probabilistic frame potential: double sum of w_i w_j <x_i, x_j>^2."""
    mu = _as_measure(mu)
    return kernels.pair_frame_potential(mu.points, mu.weights)


def riesz_potential(mu):
    """Probabilistic Riesz-2 potential: double sum of w_i w_j ||x_i - x_j||^2."""
    mu = _as_measure(mu)
    return kernels.pair_riesz_potential(mu.points, mu.weights)


def fractional_potential(mu):
    """Frame potential over Riesz potential; undefined at a point mass."""
    mu = _as_measure(mu)
    riesz = riesz_potential(mu)
    if riesz <= _POINT_MASS_EPS:
        raise DomainError(
            "fractional potential is undefined for a point-mass measure "
            "(Riesz potential vanishes)"
        )
    return frame_potential(mu) / riesz


def potential_report(mu):
    """Evaluate all potentials and the moment deviation of a measure."""
    mu = _as_measure(mu)
    fp = frame_potential(mu)
    riesz = riesz_potential(mu)
    fractional = fp / riesz if riesz > _POINT_MASS_EPS else None
    return PotentialReport(
        frame_potential=fp,
        riesz_potential=riesz,
        fractional=fractional,
        moment_deviation=moment_deviation(mu),
    )


def directional_force(a, b):
    """Directional force 2 |<a, b>| (a - b) between two unit vectors."""
    a = as_unit_vector(a, what="a")
    b = as_unit_vector(b, what="b")
    if a.shape != b.shape:
        raise DimensionError(
            f"force endpoints live in different dimensions: {a.size} vs {b.size}"
        )
    return 2.0 * abs(float(a @ b)) * (a - b)


@dataclass(frozen=True)
class TightenResult:
    """Outcome of gradient tightening.

    `trace` holds the frame potential of the counting measure after
    every accepted step (starting value first) and is nonincreasing;
    `converged` records whether the tolerance was reached within the
    step budget (failure to converge is reported, not raised).
    """

    points: np.ndarray
    trace: np.ndarray
    converged: bool

    @property
    def final_potential(self):
        return float(self.trace[-1])


def _counting_pfp(pts):
    """Frame potential of the counting measure via the moment route."""
    n = pts.shape[0]
    m = pts.T @ pts / n
    return float(np.sum(m * m))


def _normalize_rows(pts):
    return pts / np.sqrt(np.einsum("ij,ij->i", pts, pts))[:, None]


def gradient_tighten(vectors, max_steps=10_000, step_size=0.5, tol=1e-10):
    """Descend the frame potential to push vectors toward an FNTF.

    Each step moves every vector against the tangential component of
    the summed pairwise potential gradient and renormalizes to the
    sphere.  A backtracking line search (halve the step until the
    potential does not increase) keeps the trace monotone; a step is
    grown again after acceptance.  Configurations trapped at a
    symmetric saddle (tangential force ~0 while the potential is not
    minimal) receive a deterministic seeded perturbation of size 1e-8.

    Parameters
    ----------
    vectors : array-like, shape (n, d)
        At least d unit vectors spanning R^d.
    max_steps : int
        Accepted-step budget.
    step_size : float
        Initial (and maximal) line-search step.
    tol : float
        Stop once the potential is within `tol` of the minimum 1/d.

    Returns
    -------
    TightenResult
    """
    if not step_size > 0.0:
        raise DomainError(f"step_size must be positive, got {step_size!r}")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    pts = as_unit_rows(vectors, what="frame vectors")
    n, d = pts.shape
    if n < d or np.linalg.matrix_rank(pts, tol=1e-12) < d:
        raise DomainError("vectors must span R^d to admit tightening")

    target = 1.0 / d
    pfp = _counting_pfp(pts)
    trace = [pfp]
    if pfp - target <= tol:
        return TightenResult(pts, np.asarray(trace), True)

    step = step_size
    perturbations = 0
    for _ in range(max_steps):
        moment = pts.T @ pts / n
        force = pts @ moment
        radial = np.einsum("ij,ij->i", force, pts)
        tangent = force - radial[:, None] * pts

        if float(np.max(np.abs(tangent))) < 1e-14:
            # Symmetric saddle: nudge deterministically and retry.  The
            # pre-perturbation potential stays the line-search reference
            # (the nudge changes it by O(1e-16)), keeping the trace
            # monotone.
            noise = kernels.sample_uniform_sphere(
                perturbations, kernels.TAG_TIGHTEN, np.arange(n, dtype=np.uint64), d
            )
            perturbations += 1
            pts = _normalize_rows(pts + 1e-8 * noise)
            continue

        eta = step
        accepted = False
        while eta > 1e-18:
            cand = _normalize_rows(pts - eta * tangent)
            cand_pfp = _counting_pfp(cand)
            if cand_pfp <= pfp:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            return TightenResult(pts, np.asarray(trace), pfp - target <= tol)

        pts = cand
        pfp = cand_pfp
        trace.append(pfp)
        step = min(step_size, 2.0 * eta)
        if pfp - target <= tol:
            return TightenResult(pts, np.asarray(trace), True)

    return TightenResult(pts, np.asarray(trace), False)
