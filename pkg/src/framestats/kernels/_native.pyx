# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython implementation of the kernel protocol.

Draw-for-draw twin of ``pykernels``: identical uniform bit streams,
per-draw rejection loops written out scalar-style.  Pair potentials use
an i-outer / j-inner loop with a per-row accumulator.
"""

import numpy as np

cimport cython
from libc.math cimport cos, exp, log1p, sin, sqrt

cdef extern from *:
    """
    #include <stdint.h>
    """
    ctypedef unsigned long long uint64_t

cdef uint64_t GOLDEN_C = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double TO_UNIT = 2.0 ** -53
cdef double TWO_PI = 6.283185307179586476925287
cdef double TINY_NORM = 1e-150
cdef int MAX_ROUNDS = 200000

TAG_UNIFORM = 0x55AA10
TAG_WATSON = 0x55AA20
TAG_COMPONENT = 0x55AA30
TAG_CHILD = 0x55AA40
TAG_EM_INIT = 0x55AA50
TAG_TIGHTEN = 0x55AA60


cdef inline uint64_t _fin(uint64_t z) nogil:
    z = z ^ (z >> 30)
    z = z * MIX1
    z = z ^ (z >> 27)
    z = z * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t _context(uint64_t seed, uint64_t tag) nogil:
    return _fin((seed ^ tag) + GOLDEN_C)


cdef inline double _uniform(uint64_t base, uint64_t j) nogil:
    return <double>(_fin(base + (j + 1) * GOLDEN_C) >> 11) * TO_UNIT


def child_seed(seed, index):
    cdef uint64_t h = _context(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF),
                               <uint64_t>TAG_CHILD)
    return int(_fin(h + (<uint64_t>(index + 1)) * GOLDEN_C))


def uniform_doubles(seed, tag, draw, count, offset=0):
    cdef uint64_t h = _context(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF),
                               <uint64_t>tag)
    cdef uint64_t base = _fin(h + (<uint64_t>draw + 1) * GOLDEN_C)
    cdef Py_ssize_t m = count, i
    cdef uint64_t j0 = <uint64_t>offset
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(m):
        o[i] = _uniform(base, j0 + <uint64_t>i)
    return out


def uniform_column(seed, tag, draws):
    cdef uint64_t h = _context(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF),
                               <uint64_t>tag)
    ks = np.ascontiguousarray(draws, dtype=np.uint64)
    cdef const uint64_t[::1] kv = ks
    cdef Py_ssize_t n = kv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _uniform(_fin(h + (kv[i] + 1) * GOLDEN_C), 0)
    return out


cdef inline int _proposal(uint64_t base, uint64_t j0, int dim,
                          double *x) nogil:
    """Fill x[0:dim] with a unit proposal from uniforms j0..; 1 on success."""
    cdef int width = 2 * ((dim + 1) // 2)
    cdef int p, i
    cdef double u1, u2, r, ang, g0, g1, nrm2
    cdef double g[16]
    for p in range(width // 2):
        u1 = _uniform(base, j0 + <uint64_t>(2 * p))
        u2 = _uniform(base, j0 + <uint64_t>(2 * p + 1))
        r = sqrt(-2.0 * log1p(-u1))
        ang = TWO_PI * u2
        g0 = r * cos(ang)
        g1 = r * sin(ang)
        g[2 * p] = g0
        g[2 * p + 1] = g1
    nrm2 = 0.0
    for i in range(dim):
        nrm2 += g[i] * g[i]
    nrm2 = sqrt(nrm2)
    if nrm2 <= TINY_NORM:
        return 0
    for i in range(dim):
        x[i] = g[i] / nrm2
    return 1


def sample_uniform_sphere(seed, tag, draws, dim):
    if not 1 <= dim <= 16:
        raise ValueError(f"sampler supports 1 <= dim <= 16, got {dim}")
    cdef uint64_t useed = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t h = _context(useed, <uint64_t>tag)
    ks = np.ascontiguousarray(draws, dtype=np.uint64)
    cdef const uint64_t[::1] kv = ks
    cdef Py_ssize_t n = kv.shape[0], i
    cdef int d = dim, rnd, okflag
    cdef int width = 2 * ((d + 1) // 2)
    out = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef uint64_t base
    cdef double x[16]
    with nogil:
        for i in range(n):
            base = _fin(h + (kv[i] + 1) * GOLDEN_C)
            okflag = 0
            for rnd in range(MAX_ROUNDS):
                okflag = _proposal(base, <uint64_t>(rnd * width), d, x)
                if okflag:
                    break
            if not okflag:
                with gil:
                    raise RuntimeError("degenerate Gaussian proposals persisted")
            for rnd in range(d):
                o[i, rnd] = x[rnd]
    return out


def sample_watson(seed, tag, draws, axis, kappa):
    ax = np.ascontiguousarray(axis, dtype=np.float64)
    if not 1 <= ax.shape[0] <= 16:
        raise ValueError(f"sampler supports 1 <= dim <= 16, got {ax.shape[0]}")
    cdef uint64_t useed = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t h = _context(useed, <uint64_t>tag)
    ks = np.ascontiguousarray(draws, dtype=np.uint64)
    cdef const uint64_t[::1] kv = ks
    cdef const double[::1] av = ax
    cdef Py_ssize_t n = kv.shape[0], i
    cdef int d = av.shape[0], rnd, j, done
    cdef int width = 2 * ((d + 1) // 2)
    cdef int stride = width + 1
    cdef double kap = kappa
    cdef double shift = kap if kap > 0.0 else 0.0
    out = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef uint64_t base, j0
    cdef double x[16]
    cdef double t, uacc
    with nogil:
        for i in range(n):
            base = _fin(h + (kv[i] + 1) * GOLDEN_C)
            done = 0
            for rnd in range(MAX_ROUNDS):
                j0 = <uint64_t>rnd * <uint64_t>stride
                uacc = _uniform(base, j0 + <uint64_t>width)
                if not _proposal(base, j0, d, x):
                    continue
                t = 0.0
                for j in range(d):
                    t += x[j] * av[j]
                if uacc < exp(kap * t * t - shift):
                    done = 1
                    break
            if not done:
                with gil:
                    raise RuntimeError("rejection sampler exceeded round cap")
            for j in range(d):
                o[i, j] = x[j]
    return out


def pair_frame_potential(points, weights):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:, ::1] p = pts
    cdef const double[::1] wv = w
    cdef Py_ssize_t n = p.shape[0], i, j
    cdef int d = p.shape[1], k
    cdef double total = 0.0, row, dot
    with nogil:
        for i in range(n):
            row = 0.0
            for j in range(n):
                dot = 0.0
                for k in range(d):
                    dot += p[i, k] * p[j, k]
                row += wv[j] * dot * dot
            total += wv[i] * row
    return total


def pair_riesz_potential(points, weights):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:, ::1] p = pts
    cdef const double[::1] wv = w
    cdef Py_ssize_t n = p.shape[0], i, j
    cdef int d = p.shape[1], k
    cdef double total = 0.0, row, sq, diff
    with nogil:
        for i in range(n):
            row = 0.0
            for j in range(n):
                sq = 0.0
                for k in range(d):
                    diff = p[i, k] - p[j, k]
                    sq += diff * diff
                row += wv[j] * sq
            total += wv[i] * row
    return total
