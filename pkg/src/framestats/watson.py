"""Watson axial distributions and FNTF-director mixtures.

The Watson density with respect to the surface measure on S^(d-1) is

    f(x) = c_d(kappa) * exp(kappa * <z0, x>^2),
    c_d(kappa) = Gamma(d/2) / (2 pi^(d/2) M(1/2, d/2, kappa)),

with M Kummer's confluent hypergeometric function.  kappa > 0
concentrates mass around the axis +/- z0 (bipolar); kappa < 0
concentrates around the orthogonal great circle (girdle).  The density
is even in x, matching axial (rod-like) data.

Mixtures with equal weights and a shared kappa are the generative
model of interest: when the directors form a tight frame for R^2 the
mixture's second-moment matrix is exactly I/2 for every kappa, making
the mixture a Bingham-alternative no amount of data can separate from
uniformity through second moments alone.

Fitting uses expectation-maximization on the mixture likelihood with
closed-form director updates (leading eigenvector of the
responsibility-weighted scatter) and a one-dimensional root solve for
kappa through the exact moment function m(kappa) = d/dkappa ln M.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import kernels
from .core import SampleSet, as_unit_rows, as_unit_vector
from .exceptions import DimensionError, DomainError
from .numerics import KUMMER_MAX_ABS_X, kummer_m, kummer_m_dx, ln_gamma

logger = logging.getLogger(__name__)

#: Smallest |kappa| the fitter reports; below this the director is
#: unidentifiable and the component is flagged near-uniform.
KAPPA_FLOOR = 1e-6

#: Largest |kappa| reachable by the fitter's root solve (the supported
#: range of the Kummer series).
KAPPA_CAP = KUMMER_MAX_ABS_X

_SAMPLING_DIMS = (2, 3)


@dataclass(frozen=True)
class WatsonParams:
    """Single Watson component: unit `director` and concentration != 0."""

    director: np.ndarray
    concentration: float

    def __post_init__(self):
        object.__setattr__(
            self, "director", as_unit_vector(self.director, what="director")
        )
        if self.concentration == 0.0 or not np.isfinite(self.concentration):
            raise DomainError(
                "concentration must be finite and nonzero (the uniform case "
                "is served by the uniform sampler)"
            )

    @property
    def dim(self):
        return self.director.shape[0]


class WatsonMixture:
    """Mixture of Watson components sharing an ambient dimension.

    Parameters
    ----------
    directors : array-like, shape (N, d)
        Component axes (unit rows).
    concentrations : float or array-like, shape (N,)
        Shared or per-component kappa, all nonzero.
    weights : array-like, shape (N,), optional
        Mixing weights, nonnegative and summing to 1.  Defaults to the
        equal-weight form 1/N.
    """

    __slots__ = ("directors", "concentrations", "weights")

    def __init__(self, directors, concentrations, weights=None):
        dirs = as_unit_rows(directors, what="directors")
        n = dirs.shape[0]
        kap = np.broadcast_to(
            np.asarray(concentrations, dtype=np.float64), (n,)
        ).copy()
        if np.any(kap == 0.0) or not np.all(np.isfinite(kap)):
            raise DomainError("all concentrations must be finite and nonzero")
        if weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(weights, dtype=np.float64).ravel()
            if w.shape[0] != n:
                raise DomainError(f"got {n} directors but {w.shape[0]} weights")
            if np.any(w < 0.0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
                raise DomainError("weights must be nonnegative and sum to 1")
        for arr in (dirs, kap, w):
            arr.setflags(write=False)
        self.directors = dirs
        self.concentrations = kap
        self.weights = w

    @property
    def n_components(self):
        return self.directors.shape[0]

    @property
    def dim(self):
        return self.directors.shape[1]

    @property
    def shared_concentration(self):
        """The common kappa, or None if components differ."""
        k = self.concentrations
        return float(k[0]) if np.all(k == k[0]) else None

    def __repr__(self):
        return (
            f"WatsonMixture(N={self.n_components}, dim={self.dim}, "
            f"kappa={np.array2string(self.concentrations, precision=4)})"
        )


def watson_log_normalizer(kappa, d):
    """ln c_d(kappa) for the density against the surface measure."""
    if d < 2:
        raise DomainError(f"need ambient dimension d >= 2, got {d}")
    half_d = 0.5 * d
    return (
        ln_gamma(half_d)
        - np.log(2.0)
        - half_d * np.log(np.pi)
        - np.log(kummer_m(0.5, half_d, kappa))
    )


def watson_normalizer(kappa, d):
    """Normalizing constant c_d(kappa); kappa = 0 is allowed here."""
    return float(np.exp(watson_log_normalizer(kappa, d)))


def watson_log_density(x, params):
    """Log density ln c_d(kappa) + kappa <z0, x>^2 (surface measure)."""
    x = as_unit_vector(x, what="x")
    if x.shape[0] != params.dim:
        raise DimensionError(
            f"point has dimension {x.shape[0]}, director {params.dim}"
        )
    t = float(x @ params.director)
    return watson_log_normalizer(params.concentration, params.dim) + (
        params.concentration * t * t
    )


def watson_cos2_moment(kappa, d):
    """Moment function m(kappa) = E[<z0, X>^2] = d/dkappa ln M(1/2, d/2, kappa).

    Computed from the term-wise series derivative
    M'(a, b, x) = (a/b) M(a+1, b+1, x); strictly increasing in kappa
    with m(0) = 1/d.
    """
    half_d = 0.5 * d
    return kummer_m_dx(0.5, half_d, kappa) / kummer_m(0.5, half_d, kappa)


def solve_concentration(target, d):
    """Invert the moment function: kappa with m(kappa) = target.

    Returns (kappa, capped) where `capped` records that the target sat
    outside the supported kappa range [-KAPPA_CAP, KAPPA_CAP] and the
    bound was returned instead.
    """
    if not 0.0 < target < 1.0:
        raise DomainError(f"moment target must be in (0, 1), got {target!r}")
    lo, hi = -KAPPA_CAP, KAPPA_CAP
    if target <= watson_cos2_moment(lo, d):
        return lo, True
    if target >= watson_cos2_moment(hi, d):
        return hi, True
    kappa = brentq(
        lambda k: watson_cos2_moment(k, d) - target,
        lo,
        hi,
        xtol=1e-10,
        rtol=1e-12,
    )
    return float(kappa), False


def sample_watson(params, n, seed, threads=1):
    """Draw n points from a Watson distribution (d in {2, 3}).

    Acceptance-rejection from the uniform proposal with envelope
    exp(max(kappa, 0)); deterministic given `seed` and independent of
    `threads` (draw k owns stream (seed, k)).
    """
    if params.dim not in _SAMPLING_DIMS:
        raise DomainError(
            f"Watson sampling supports d in {_SAMPLING_DIMS}, got d={params.dim}"
        )
    if n < 1:
        raise DomainError(f"need n >= 1 draws, got {n}")
    z = params.director
    kap = params.concentration
    pts = kernels.run_chunked(
        lambda idx: kernels.sample_watson(seed, kernels.TAG_WATSON, idx, z, kap),
        n,
        params.dim,
        threads,
    )
    return SampleSet(pts)


def sample_mixture(mix, n, seed, threads=1):
    """Draw n points from a Watson mixture (d in {2, 3}).

    Draw k first picks its component from the weight vector using the
    component stream, then samples that component's Watson law from
    the Watson stream; a one-component mixture therefore reproduces
    ``sample_watson`` exactly for the same seed.
    """
    if mix.dim not in _SAMPLING_DIMS:
        raise DomainError(
            f"Watson sampling supports d in {_SAMPLING_DIMS}, got d={mix.dim}"
        )
    if n < 1:
        raise DomainError(f"need n >= 1 draws, got {n}")
    cum = np.cumsum(mix.weights)

    def draw_block(idx):
        out = np.empty((idx.size, mix.dim))
        if mix.n_components == 1:
            comp = np.zeros(idx.size, dtype=np.intp)
        else:
            u = kernels.uniform_column(seed, kernels.TAG_COMPONENT, idx)
            comp = np.minimum(
                np.searchsorted(cum, u, side="right"), mix.n_components - 1
            )
        for c in range(mix.n_components):
            members = idx[comp == c]
            if members.size:
                out[comp == c] = kernels.sample_watson(
                    seed,
                    kernels.TAG_WATSON,
                    members,
                    mix.directors[c],
                    float(mix.concentrations[c]),
                )
        return out

    pts = kernels.run_chunked(draw_block, n, mix.dim, threads)
    return SampleSet(pts)


def _mixture_density_factory(mix):
    """Vectorized mixture density against the surface measure."""
    log_c = np.array(
        [watson_log_normalizer(k, mix.dim) for k in mix.concentrations]
    )
    log_w = np.where(mix.weights > 0.0, np.log(np.maximum(mix.weights, 1e-300)), -np.inf)

    def density(points):
        t = points @ mix.directors.T
        logs = log_w[None, :] + log_c[None, :] + mix.concentrations[None, :] * t * t
        peak = np.max(logs, axis=1)
        return np.exp(peak) * np.sum(np.exp(logs - peak[:, None]), axis=1)

    return density


def mixture_second_moments(mix):
    """Second-moment matrix of a Watson mixture by quadrature.

    d=2 uses adaptive quadrature over the angle; d=3 uses a
    Gauss-Legendre x trapezoid product rule over the sphere, doubling
    the order until the entries stabilize.  Entrywise error <= 1e-9 on
    the supported kappa range.
    """
    if mix.dim == 2:
        return _second_moments_circle(mix)
    if mix.dim == 3:
        return _second_moments_sphere(mix)
    raise DomainError(
        f"second moments support d in {_SAMPLING_DIMS}, got d={mix.dim}"
    )


def _second_moments_circle(mix):
    density = _mixture_density_factory(mix)

    def f(theta, a, b):
        x = np.array([[np.cos(theta), np.sin(theta)]])
        return float(density(x)[0]) * x[0, a] * x[0, b]

    m = np.empty((2, 2))
    for a, b in ((0, 0), (0, 1), (1, 1)):
        val, _ = quad(
            f, 0.0, 2.0 * np.pi, args=(a, b), epsabs=1e-12, epsrel=1e-12, limit=400
        )
        m[a, b] = m[b, a] = val
    return m


def _second_moments_sphere(mix, start_order=64, max_order=1024):
    density = _mixture_density_factory(mix)
    prev = None
    order = start_order
    while order <= max_order:
        t, gl_w = np.polynomial.legendre.leggauss(order)
        psi = np.arange(2 * order) * (np.pi / order)
        rho = np.sqrt(np.maximum(0.0, 1.0 - t * t))
        x = np.empty((order * 2 * order, 3))
        x[:, 0] = np.outer(rho, np.cos(psi)).ravel()
        x[:, 1] = np.outer(rho, np.sin(psi)).ravel()
        x[:, 2] = np.repeat(t, 2 * order)
        w = np.repeat(gl_w, 2 * order) * (np.pi / order)
        fw = density(x) * w
        m = x.T @ (x * fw[:, None])
        m = 0.5 * (m + m.T)
        if prev is not None and float(np.max(np.abs(m - prev))) < 1e-11:
            return m
        prev = m
        order *= 2
    return prev


def mode_widths(mix):
    """Directional modes and axial widths of a mixture.

    The width of a bipolar component is the axial standard deviation
    arccos(sqrt(m(kappa))), decreasing in kappa; girdle components
    (kappa < 0) have no mode width and report None.
    """
    out = []
    for c in range(mix.n_components):
        kap = float(mix.concentrations[c])
        if kap > 0.0:
            width = float(np.arccos(np.sqrt(watson_cos2_moment(kap, mix.dim))))
        else:
            width = None
        out.append((mix.directors[c], width))
    return out


@dataclass(frozen=True)
class EMFit:
    """Result of mixture fitting.

    `trace` is the log-likelihood after every accepted iteration
    (initial value first); it is nondecreasing except across recorded
    `reinit_steps`, where an emptied component was reseeded from the
    lowest-likelihood datum.  `degenerate` flags components whose
    concentration hit the identifiability floor (near-uniform), and
    `capped` those that hit the supported kappa bound.
    """

    mixture: WatsonMixture
    log_likelihood: float
    trace: np.ndarray
    n_iter: int
    converged: bool
    degenerate: tuple
    capped: tuple
    reinit_steps: tuple


def _axial_log_densities(x_dot_dirs, kappas, log_norms, log_weights):
    return (
        log_weights[None, :]
        + log_norms[None, :]
        + kappas[None, :] * x_dot_dirs * x_dot_dirs
    )


def _log_likelihood_and_resp(pts, directors, kappas, weights):
    t = pts @ directors.T
    log_norms = np.array([watson_log_normalizer(k, 2) for k in kappas])
    log_w = np.log(np.maximum(weights, 1e-300))
    logs = _axial_log_densities(t, kappas, log_norms, log_w)
    peak = np.max(logs, axis=1)
    lse = peak + np.log(np.sum(np.exp(logs - peak[:, None]), axis=1))
    resp = np.exp(logs - lse[:, None])
    return float(np.sum(lse)), resp, lse


def _seeded_axial_kmeans(psi, n_components, seed, sweeps=20):
    """k-means++ style seeding plus Lloyd sweeps on the doubled circle."""
    n = psi.shape[0]
    u = kernels.uniform_doubles(seed, kernels.TAG_EM_INIT, 0, n_components)
    centers = [float(psi[min(int(u[0] * n), n - 1)])]
    mindist = 1.0 - np.cos(psi - centers[0])
    for c in range(1, n_components):
        cum = np.cumsum(mindist)
        if cum[-1] <= 0.0:
            pick = min(int(u[c] * n), n - 1)
        else:
            pick = min(int(np.searchsorted(cum, u[c] * cum[-1], side="right")), n - 1)
        centers.append(float(psi[pick]))
        mindist = np.minimum(mindist, 1.0 - np.cos(psi - centers[-1]))
    centers = np.asarray(centers)
    for _ in range(sweeps):
        dist = 1.0 - np.cos(psi[:, None] - centers[None, :])
        labels = np.argmin(dist, axis=1)
        for c in range(n_components):
            members = psi[labels == c]
            if members.size:
                centers[c] = np.arctan2(
                    np.sum(np.sin(members)), np.sum(np.cos(members))
                )
    return centers, labels


def _directors_from_trig(c2, s2):
    """Axial director (angle in [0, pi)) from responsibility-weighted
    doubled-angle sums."""
    phi = 0.5 * np.arctan2(s2, c2)
    phi = np.mod(phi, np.pi)
    return np.column_stack([np.cos(phi), np.sin(phi)])


def fit_watson_mixture_em(
    sample,
    n_components,
    shared_kappa=True,
    equal_weights=False,
    max_iters=200,
    tol=1e-8,
    seed=0,
):
    """Fit a planar Watson mixture by expectation-maximization.

    Parameters
    ----------
    sample : SampleSet
        Planar sample (d = 2), treated axially.
    n_components : int
        Number of Watson components N; requires n >= 10 N.
    shared_kappa : bool
        Fit one concentration for all components (the faithful
        equal-kappa mixture form) or one per component.
    equal_weights : bool
        Pin the weights at 1/N instead of fitting them.
    max_iters, tol : int, float
        Stop after `max_iters` accepted iterations or once the
        log-likelihood gain drops below `tol` (the sub-tol update is
        not applied, keeping the reported trace monotone).
    seed : int
        Seeds the doubled-angle k-means initialization.

    Returns
    -------
    EMFit
    """
    sample = sample if isinstance(sample, SampleSet) else SampleSet(sample)
    if sample.dim != 2:
        raise DomainError(f"EM fitting supports d = 2 only, got d={sample.dim}")
    if n_components < 1:
        raise DomainError(f"need at least one component, got {n_components}")
    n = sample.n
    if n < 10 * n_components:
        raise DomainError(
            f"need n >= 10 N data points to fit N={n_components} components, got n={n}"
        )
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")

    pts = sample.points
    cos2 = pts[:, 0] * pts[:, 0] - pts[:, 1] * pts[:, 1]
    sin2 = 2.0 * pts[:, 0] * pts[:, 1]
    psi = np.arctan2(sin2, cos2)

    centers, labels = _seeded_axial_kmeans(psi, n_components, seed)
    onehot = np.zeros((n, n_components))
    onehot[np.arange(n), labels] = 1.0
    directors, kappas, weights, deg, cap = _m_step(
        pts, cos2, sin2, onehot, shared_kappa, equal_weights
    )

    loglik, resp, lse = _log_likelihood_and_resp(pts, directors, kappas, weights)
    trace = [loglik]
    reinit_steps = []
    converged = False
    n_iter = 0

    for it in range(max_iters):
        # Empty-component rescue: reseed from the worst-explained datum.
        counts = np.sum(resp, axis=0)
        needy = np.nonzero(counts < 1e-8)[0]
        if needy.size:
            worst = int(np.argmin(lse))
            for c in needy:
                directors = directors.copy()
                directors[c] = pts[worst]
                logger.warning(
                    "EM component %d emptied at iteration %d; reseeding from "
                    "lowest-likelihood datum",
                    c,
                    it,
                )
            loglik, resp, lse = _log_likelihood_and_resp(
                pts, directors, kappas, weights
            )
            trace.append(loglik)
            reinit_steps.append(it)
            n_iter = it + 1
            continue

        new_dirs, new_kaps, new_w, deg, cap = _m_step(
            pts, cos2, sin2, resp, shared_kappa, equal_weights
        )
        new_ll, new_resp, new_lse = _log_likelihood_and_resp(
            pts, new_dirs, new_kaps, new_w
        )
        gain = new_ll - loglik
        if gain < tol:
            if gain > 0.0:
                directors, kappas, weights = new_dirs, new_kaps, new_w
                loglik, resp, lse = new_ll, new_resp, new_lse
                trace.append(new_ll)
                n_iter = it + 1
            converged = True
            break
        directors, kappas, weights = new_dirs, new_kaps, new_w
        loglik, resp, lse = new_ll, new_resp, new_lse
        trace.append(new_ll)
        n_iter = it + 1

    mixture = WatsonMixture(directors, kappas, weights)
    return EMFit(
        mixture=mixture,
        log_likelihood=loglik,
        trace=np.asarray(trace),
        n_iter=n_iter,
        converged=converged,
        degenerate=tuple(deg),
        capped=tuple(cap),
        reinit_steps=tuple(reinit_steps),
    )


def _m_step(pts, cos2, sin2, resp, shared_kappa, equal_weights):
    n, n_components = resp.shape
    totals = np.sum(resp, axis=0)
    totals = np.maximum(totals, 1e-300)
    c2 = resp.T @ cos2
    s2 = resp.T @ sin2
    directors = _directors_from_trig(c2, s2)
    rho = np.sqrt(c2 * c2 + s2 * s2) / totals
    targets = 0.5 * (1.0 + np.minimum(rho, 1.0))

    deg = [False] * n_components
    cap = [False] * n_components
    if shared_kappa:
        pooled = float(np.sum(totals * targets) / np.sum(totals))
        kappa, capped = _solve_kappa_floor(pooled)
        kappas = np.full(n_components, kappa)
        deg = [kappa <= KAPPA_FLOOR] * n_components
        cap = [capped] * n_components
    else:
        kappas = np.empty(n_components)
        for c in range(n_components):
            kappas[c], capped = _solve_kappa_floor(float(targets[c]))
            deg[c] = kappas[c] <= KAPPA_FLOOR
            cap[c] = capped
    if equal_weights:
        weights = np.full(n_components, 1.0 / n_components)
    else:
        weights = totals / float(np.sum(totals))
    return directors, kappas, weights, deg, cap


def _solve_kappa_floor(target):
    """Concentration update with the identifiability floor applied."""
    target = min(max(target, 1e-12), 1.0 - 1e-16)
    if target <= watson_cos2_moment(KAPPA_FLOOR, 2):
        return KAPPA_FLOOR, False
    kappa, capped = solve_concentration(target, 2)
    if capped:
        warnings.warn(
            f"concentration update hit the supported bound |kappa| <= {KAPPA_CAP:g}",
            RuntimeWarning,
            stacklevel=3,
        )
    return max(kappa, KAPPA_FLOOR), capped
