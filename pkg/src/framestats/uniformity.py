"""Rayleigh, modified Rayleigh and Bingham tests for spherical uniformity.

Each test reduces a sample on S^(d-1) to a statistic whose asymptotic
null distribution is chi-squared:

* Rayleigh: ``d n rbar^2`` with d degrees of freedom (sensitive to a
  nonzero mean direction).
* Modified Rayleigh: ``(1 - 1/(2n)) d n rbar^2
  + d^2 n^2 rbar^4 / (2 n (d+2))``, same degrees of freedom but with an
  O(n^-2) distributional error instead of O(n^-1).
* Bingham: ``(d (d+2) / 2) n (trace(T^2) - 1/d)`` for the scatter
  matrix T, with (d-1)(d+2)/2 degrees of freedom (sensitive to the
  second moments only; blind to antipodally balanced structure).

p-values use the asymptotic chi-squared reference for every n; the
returned :class:`TestResult` carries n so callers can judge how much
to trust the asymptotics.  A seeded Monte Carlo harness
(:func:`monte_carlo_null`) estimates the actual null distribution.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import SampleSet, moment_summary
from .exceptions import DomainError
from .numerics import chi2_sf

RAYLEIGH = "rayleigh"
MODIFIED_RAYLEIGH = "modified-rayleigh"
BINGHAM = "bingham"

METHODS = (RAYLEIGH, MODIFIED_RAYLEIGH, BINGHAM)


@dataclass(frozen=True)
class TestResult:
    """Outcome of a uniformity test.

    `df` matches the method and dimension (Rayleigh variants: d;
    Bingham: (d-1)(d+2)/2), and `n` is carried so the asymptotic
    p-value can be weighed against the sample size.
    """

    statistic: float
    df: int
    p_value: float
    method: str
    n: int
    dim: int

    def reject(self, level):
        """True when uniformity is rejected at significance `level`."""
        if not 0.0 < level < 1.0:
            raise DomainError(f"level must be in (0, 1), got {level!r}")
        return self.p_value < level


def _as_sample(sample):
    return sample if isinstance(sample, SampleSet) else SampleSet(sample)


def rayleigh_test(sample):
    """Rayleigh test: rejects when the mean resultant length is large."""
    sample = _as_sample(sample)
    d, n = sample.dim, sample.n
    rbar = moment_summary(sample).resultant_length
    stat = d * n * rbar * rbar
    return TestResult(stat, d, chi2_sf(stat, d), RAYLEIGH, n, d)


def modified_rayleigh_test(sample):
    """Rayleigh test with the O(n^-2) accurate modified statistic."""
    sample = _as_sample(sample)
    d, n = sample.dim, sample.n
    rbar = moment_summary(sample).resultant_length
    s = d * n * rbar * rbar
    stat = (1.0 - 0.5 / n) * s + s * s / (2.0 * n * (d + 2.0))
    return TestResult(stat, d, chi2_sf(stat, d), MODIFIED_RAYLEIGH, n, d)


def bingham_test(sample):
    """Bingham test: rejects when the scatter matrix is far from I/d."""
    sample = _as_sample(sample)
    d, n = sample.dim, sample.n
    t = moment_summary(sample).scatter
    # trace(T^2) = ||T||_F^2 since T is symmetric; never below 1/d in
    # exact arithmetic, so clamp away negative rounding residue.
    excess = float(np.sum(t * t)) - 1.0 / d
    stat = max(0.0, 0.5 * d * (d + 2.0) * n * excess)
    df = (d - 1) * (d + 2) // 2
    return TestResult(stat, df, chi2_sf(stat, df), BINGHAM, n, d)


_TEST_FNS = {
    RAYLEIGH: rayleigh_test,
    MODIFIED_RAYLEIGH: modified_rayleigh_test,
    BINGHAM: bingham_test,
}


def run_test(sample, method):
    """Dispatch a uniformity test by method name."""
    try:
        fn = _TEST_FNS[method]
    except KeyError:
        raise DomainError(
            f"unknown method {method!r}; expected one of {METHODS}"
        ) from None
    return fn(sample)


def sample_uniform(n, d, seed, threads=1):
    """Uniform sample on S^(d-1): normalized Gaussian draws.

    Deterministic given `seed`; draw k has its own child stream, so the
    output is identical for any `threads` count.
    """
    if n < 1:
        raise DomainError(f"need n >= 1 draws, got {n}")
    pts = kernels.run_chunked(
        lambda idx: kernels.sample_uniform_sphere(seed, kernels.TAG_UNIFORM, idx, d),
        n,
        d,
        threads,
    )
    return SampleSet(pts)


def monte_carlo_null(n, d, trials, method, seed, threads=1):
    """Null distribution of a test statistic under uniformity.

    Runs `trials` independent uniform samples of size `n` on S^(d-1)
    and returns the statistic of each, in trial order.  Trial t draws
    from the child seed derived from (seed, t), so results are
    reproducible and independent of the thread count.

    Parameters
    ----------
    n, d : int
        Sample size and ambient dimension of each trial.
    trials : int
        Number of Monte Carlo trials.
    method : str
        One of 'rayleigh', 'modified-rayleigh', 'bingham'.
    seed : int
        Base seed (64-bit).
    threads : int
        Worker threads; output is identical for any value.

    Returns
    -------
    ndarray, shape (trials,)
        Statistic values by trial index.
    """
    if n < 1 or trials < 1:
        raise DomainError("need n >= 1 and trials >= 1")
    fn = _TEST_FNS.get(method)
    if fn is None:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    draws = np.arange(n, dtype=np.uint64)

    def one_trial(t):
        child = kernels.child_seed(seed, t)
        pts = kernels.sample_uniform_sphere(child, kernels.TAG_UNIFORM, draws, d)
        return fn(SampleSet(pts)).statistic

    if threads <= 1:
        return np.array([one_trial(t) for t in range(trials)])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(one_trial, range(trials))))
