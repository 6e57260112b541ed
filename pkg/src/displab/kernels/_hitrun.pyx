# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Hit-and-run chain stepping over an H-polytope (compiled hot loop).

Semantics must match ``displab.kernels.py_fallback.advance_chains`` exactly:
both consume the same pre-drawn direction/uniform arrays, so either backend
can replay the other's walk (up to floating-point rounding order).
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def advance_chains(
    const double[:, ::1] normals_A,
    const double[::1] offsets_b,
    double[:, ::1] X,
    const double[:, :, ::1] step_dirs,
    const double[:, ::1] step_unifs,
):
    """Advance every chain in ``X`` (in place) by ``step_dirs.shape[0]`` steps.

    ``step_dirs[t, c]`` is the (unnormalized Gaussian) direction for chain c
    at step t; ``step_unifs[t, c]`` the uniform chord position. A chain whose
    chord comes back empty (numerically infeasible) stays put for that step.
    """
    cdef Py_ssize_t n_steps = step_dirs.shape[0]
    cdef Py_ssize_t n_chains = X.shape[0]
    cdef Py_ssize_t n_dim = X.shape[1]
    cdef Py_ssize_t n_facets = normals_A.shape[0]
    cdef Py_ssize_t t, c, i, k
    cdef double ad, ax, slack, ratio, lo, hi, step
    cdef double inf = np.inf

    for t in range(n_steps):
        for c in range(n_chains):
            lo = -inf
            hi = inf
            for i in range(n_facets):
                ad = 0.0
                ax = 0.0
                for k in range(n_dim):
                    ad += normals_A[i, k] * step_dirs[t, c, k]
                    ax += normals_A[i, k] * X[c, k]
                slack = offsets_b[i] - ax
                if ad > 0.0:
                    ratio = slack / ad
                    if ratio < hi:
                        hi = ratio
                elif ad < 0.0:
                    ratio = slack / ad
                    if ratio > lo:
                        lo = ratio
            if hi < lo or lo == -inf or hi == inf:
                continue
            step = lo + step_unifs[t, c] * (hi - lo)
            for k in range(n_dim):
                X[c, k] += step * step_dirs[t, c, k]
