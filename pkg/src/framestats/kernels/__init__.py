"""Kernel backends for the hot numerical loops.

Two interchangeable implementations of the same draw-level protocol live
here: ``pykernels`` (vectorized NumPy, always available) and ``_native``
(Cython, built by ``setup.py`` when a C toolchain is present).  The
fastest available backend is selected at import time; ``set_backend``
switches explicitly, e.g. for the benchmark in
``framestats.benchmark``.

Stream protocol
---------------
All random draws come from counter-based splitmix64 streams so that
results are reproducible and independent of execution order:

* ``fin`` is the splitmix64 finalizer (xor-shift/multiply mixing).
* A sampler context is keyed by ``(seed, tag)`` with
  ``h = fin(seed ^ tag + GOLDEN)``.
* Draw ``k`` owns the private stream ``base_k = fin(h + (k+1)*GOLDEN)``
  whose ``j``-th uniform is ``fin(base_k + (j+1)*GOLDEN) >> 11``
  scaled by ``2**-53``.
* Gaussians are produced from consecutive uniform pairs by Box-Muller;
  a rejection-sampling round for dimension ``d`` consumes a fixed block
  of ``2*ceil(d/2) + 1`` uniforms (proposal + acceptance variate).

Because draw ``k`` touches only its own stream, splitting the draws
across threads or processing them in any order cannot change the
output.  Both backends implement the identical uniform streams
bit-for-bit; sample values agree to floating-point accuracy (the NumPy
and libm transcendentals may differ in the last ulp).

Pair-potential sums use a fixed row-blocked topology (documented in
each backend) and are deterministic for a given backend.
"""

from . import pykernels

try:  # compiled core is optional
    from . import _native
except ImportError:  # pragma: no cover - depends on build host
    _native = None

_BACKENDS = {"python": pykernels}
if _native is not None:
    _BACKENDS["compiled"] = _native

_active = _BACKENDS.get("compiled", pykernels)

# Context tags keying the independent stream families (frozen protocol).
TAG_UNIFORM = pykernels.TAG_UNIFORM
TAG_WATSON = pykernels.TAG_WATSON
TAG_COMPONENT = pykernels.TAG_COMPONENT
TAG_CHILD = pykernels.TAG_CHILD
TAG_EM_INIT = pykernels.TAG_EM_INIT
TAG_TIGHTEN = pykernels.TAG_TIGHTEN


def available_backends():
    """Names of the importable backends ('python' is always present)."""
    return sorted(_BACKENDS)


def get_backend():
    """Name of the backend currently answering kernel calls."""
    return "compiled" if _active is _BACKENDS.get("compiled") else "python"


def set_backend(name):
    """Select a kernel backend by name ('auto', 'python' or 'compiled')."""
    global _active
    if name == "auto":
        _active = _BACKENDS.get("compiled", pykernels)
        return
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None


def backend_module(name=None):
    """Return a backend module (the active one when `name` is None)."""
    if name is None:
        return _active
    return _BACKENDS[name]


def child_seed(seed, index):
    """Derive the splittable child seed for sub-stream `index`.

    Used to give Monte Carlo trial `t` (or any other nested sampling
    context) its own independent 64-bit seed, order-independently.
    """
    return pykernels.child_seed(seed, index)


def uniform_doubles(seed, tag, draw, count, offset=0):
    """First `count` uniforms of one draw stream (protocol inspection)."""
    return _active.uniform_doubles(seed, tag, draw, count, offset)


def uniform_column(seed, tag, draws):
    """First uniform of each stream in `draws` (component selection)."""
    return _active.uniform_column(seed, tag, draws)


def run_chunked(draw_fn, n, dim, threads=1):
    """Evaluate per-draw streams for draws 0..n-1, optionally threaded.

    `draw_fn` maps a uint64 index array to the corresponding output
    rows.  Because every draw owns a private stream, splitting into
    chunks cannot change the result: output is identical for any
    thread count.
    """
    import numpy as _np

    idx = _np.arange(n, dtype=_np.uint64)
    if threads <= 1 or n < 1024:
        return draw_fn(idx)
    from concurrent.futures import ThreadPoolExecutor

    out = _np.empty((n, dim))
    chunks = _np.array_split(idx, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for chunk, block in zip(chunks, pool.map(draw_fn, chunks)):
            out[chunk.astype(_np.intp)] = block
    return out


def sample_uniform_sphere(seed, tag, draws, dim):
    """Uniform points on S^(dim-1), one per entry of `draws`."""
    return _active.sample_uniform_sphere(seed, tag, draws, dim)


def sample_watson(seed, tag, draws, axis, kappa):
    """Watson(axis, kappa) points, one per entry of `draws`."""
    return _active.sample_watson(seed, tag, draws, axis, kappa)


def pair_frame_potential(points, weights):
    """Double sum of w_i w_j <x_i, x_j>^2 over all ordered pairs."""
    return _active.pair_frame_potential(points, weights)


def pair_riesz_potential(points, weights):
    """Double sum of w_i w_j ||x_i - x_j||^2 over all ordered pairs."""
    return _active.pair_riesz_potential(points, weights)
