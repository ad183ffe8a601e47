"""NumPy implementation of the kernel protocol (reference backend).

Everything here is vectorized over draws.  The Cython backend in
``_native.pyx`` mirrors this file draw for draw; keep the two in sync
(the uniform streams are compared bit-for-bit in the test suite).
"""

import numpy as np

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(GOLDEN)
_U_MIX1 = np.uint64(_MIX1)
_U_MIX2 = np.uint64(_MIX2)
_TO_UNIT = 2.0 ** -53

TAG_UNIFORM = 0x55AA10
TAG_WATSON = 0x55AA20
TAG_COMPONENT = 0x55AA30
TAG_CHILD = 0x55AA40
TAG_EM_INIT = 0x55AA50
TAG_TIGHTEN = 0x55AA60

# A proposal whose Gaussian vector has norm below this is discarded
# (probability ~2**-53 per round; kept for exactness of the contract).
_TINY_NORM = 1e-150
_MAX_ROUNDS = 200_000


def _fin(z):
    """splitmix64 finalizer, elementwise on uint64 arrays."""
    z = z ^ (z >> np.uint64(30))
    z = z * _U_MIX1
    z = z ^ (z >> np.uint64(27))
    z = z * _U_MIX2
    return z ^ (z >> np.uint64(31))


def _fin_int(z):
    """splitmix64 finalizer on a Python int (mod 2**64)."""
    z &= _MASK
    z = (z ^ (z >> 30)) * _MIX1 & _MASK
    z = (z ^ (z >> 27)) * _MIX2 & _MASK
    return z ^ (z >> 31)


def _context(seed, tag):
    return _fin_int(((seed & _MASK) ^ tag) + GOLDEN)


def child_seed(seed, index):
    h = _context(seed, TAG_CHILD)
    return _fin_int(h + (index + 1) * GOLDEN)


def _stream_bases(seed, tag, draws):
    ks = np.asarray(draws, dtype=np.uint64)
    h = np.uint64(_context(seed, tag))
    return _fin(h + (ks + np.uint64(1)) * _U_GOLDEN)


def _uniform_block(bases, j0, count):
    """Uniforms j0 .. j0+count-1 of each stream in `bases`, shape (p, count)."""
    js = np.arange(j0 + 1, j0 + 1 + count, dtype=np.uint64) * _U_GOLDEN
    bits = _fin(bases[:, None] + js[None, :])
    return (bits >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def uniform_doubles(seed, tag, draw, count, offset=0):
    bases = _stream_bases(seed, tag, np.array([draw], dtype=np.uint64))
    return _uniform_block(bases, offset, count)[0]


def uniform_column(seed, tag, draws):
    """First uniform of each draw stream (e.g. mixture component picks)."""
    bases = _stream_bases(seed, tag, draws)
    return _uniform_block(bases, 0, 1)[:, 0]


def _gaussians(u):
    """Box-Muller on consecutive uniform pairs; u has an even column count."""
    u1 = u[:, 0::2]
    u2 = u[:, 1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))
    ang = (2.0 * np.pi) * u2
    g = np.empty_like(u)
    g[:, 0::2] = r * np.cos(ang)
    g[:, 1::2] = r * np.sin(ang)
    return g


def _check_dim(dim):
    if not 1 <= dim <= 16:
        raise ValueError(f"sampler supports 1 <= dim <= 16, got {dim}")


def sample_uniform_sphere(seed, tag, draws, dim):
    _check_dim(dim)
    ks = np.asarray(draws, dtype=np.uint64)
    n = ks.size
    width = 2 * ((dim + 1) // 2)
    out = np.empty((n, dim))
    alive = np.arange(n)
    bases = _stream_bases(seed, tag, ks)
    for rnd in range(_MAX_ROUNDS):
        if alive.size == 0:
            return out
        u = _uniform_block(bases, rnd * width, width)
        v = _gaussians(u)[:, :dim]
        nrm = np.sqrt(np.einsum("ij,ij->i", v, v))
        ok = nrm > _TINY_NORM
        out[alive[ok]] = v[ok] / nrm[ok, None]
        alive = alive[~ok]
        bases = bases[~ok]
    raise RuntimeError("degenerate Gaussian proposals persisted; RNG fault")


def sample_watson(seed, tag, draws, axis, kappa):
    axis = np.asarray(axis, dtype=np.float64)
    dim = axis.size
    _check_dim(dim)
    ks = np.asarray(draws, dtype=np.uint64)
    n = ks.size
    width = 2 * ((dim + 1) // 2)
    stride = width + 1
    shift = kappa if kappa > 0.0 else 0.0
    out = np.empty((n, dim))
    alive = np.arange(n)
    bases = _stream_bases(seed, tag, ks)
    for rnd in range(_MAX_ROUNDS):
        if alive.size == 0:
            return out
        u = _uniform_block(bases, rnd * stride, stride)
        v = _gaussians(u[:, :width])[:, :dim]
        nrm = np.sqrt(np.einsum("ij,ij->i", v, v))
        ok = nrm > _TINY_NORM
        x = v / np.where(ok, nrm, 1.0)[:, None]
        t = x @ axis
        accept = ok & (u[:, width] < np.exp(kappa * t * t - shift))
        out[alive[accept]] = x[accept]
        keep = ~accept
        alive = alive[keep]
        bases = bases[keep]
    raise RuntimeError(
        f"rejection sampler exceeded {_MAX_ROUNDS} rounds (kappa={kappa!r})"
    )


# Pair potentials: row-blocked double sums.  Topology is fixed: rows are
# processed in index order in blocks of _BLOCK, each row reduced by
# NumPy's pairwise summation, then block totals accumulated in order.
_BLOCK = 512


def pair_frame_potential(points, weights):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    n = pts.shape[0]
    total = 0.0
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        gram = pts[i0:i1] @ pts.T
        rows = np.sum(gram * gram * w[None, :], axis=1)
        total += float(np.sum(w[i0:i1] * rows))
    return total


def pair_riesz_potential(points, weights):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    n = pts.shape[0]
    total = 0.0
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        diff = pts[i0:i1, None, :] - pts[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        rows = np.sum(sq * w[None, :], axis=1)
        total += float(np.sum(w[i0:i1] * rows))
    return total
