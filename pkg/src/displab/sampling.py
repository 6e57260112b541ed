"""Seeded random generation of points, matrices and polytope samples.

All samplers take an explicit ``numpy.random.Generator`` (mint one from an
:class:`displab.rng.RngStream`) and are pure functions of it: a fixed
(seed, path) reproduces byte-identical draws.

Matrix distributions follow the two ensembles used throughout the package:
``D`` draws each row independently and uniformly from the ball of radius
sqrt(n); ``D'`` draws every entry independently and uniformly from [-1, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geom import HPolytope

__all__ = [
    "SamplerConfig",
    "RejectionCapExceeded",
    "uniform_ball",
    "uniform_sphere",
    "uniform_cube",
    "sample_matrix_D",
    "sample_matrix_Dprime",
    "sample_gaussian_matrix",
    "random_rotation",
    "random_rotation_many",
    "chebyshev_center",
    "sample_polytope",
    "sample_polytope_auto",
    "hit_and_run_table",
]

_BURNIN_BLOCK = 64  # steps drawn per block during burn-in (memory bound)


class RejectionCapExceeded(RuntimeError):
    """Rejection sampling exhausted its proposal budget; switch to hit-and-run."""


@dataclass(frozen=True)
class SamplerConfig:
    """Polytope-sampler settings.

    ``burn_in`` and ``thinning`` default (when None) to 100*n and n steps,
    the package-wide hit-and-run defaults. ``cap`` bounds the total number
    of rejection proposals before :class:`RejectionCapExceeded` is raised.
    """

    method: str = "rejection"
    burn_in: int | None = None
    thinning: int | None = None
    cap: int = 1_000_000

    def __post_init__(self) -> None:
        if self.method not in ("rejection", "hit-and-run"):
            raise ValueError("method must be 'rejection' or 'hit-and-run'")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thinning is not None and self.thinning < 0:
            raise ValueError("thinning must be >= 0")
        if self.cap < 1:
            raise ValueError("cap must be >= 1")


def uniform_ball(n: int, r: float, rng: np.random.Generator, size: int | None = None):
    """Uniform point(s) in the n-ball of radius r.

    Exact construction: Gaussian direction times an inverse-CDF radius
    r * U^(1/n), valid at every dimension.
    """
    if r < 0:
        raise ValueError("radius must be >= 0")
    m = 1 if size is None else int(size)
    g = rng.standard_normal((m, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radii = r * rng.random((m, 1)) ** (1.0 / n)
    pts = g / norms * radii
    return pts[0] if size is None else pts


def uniform_sphere(n: int, rng: np.random.Generator, size: int | None = None):
    """Uniform unit vector(s) on the sphere S^{n-1}."""
    m = 1 if size is None else int(size)
    g = rng.standard_normal((m, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    pts = g / norms
    return pts[0] if size is None else pts


def uniform_cube(n: int, rng: np.random.Generator, size: int | None = None):
    """Point(s) with every coordinate uniform in [-1, 1]."""
    m = 1 if size is None else int(size)
    pts = rng.uniform(-1.0, 1.0, size=(m, n))
    return pts[0] if size is None else pts


def sample_matrix_D(n: int, rng: np.random.Generator, size: int | None = None):
    """Matrix (or stack) with rows independent uniform in the sqrt(n)-ball."""
    m = 1 if size is None else int(size)
    rows = uniform_ball(n, math.sqrt(n), rng, size=m * n)
    mats = rows.reshape(m, n, n)
    return mats[0] if size is None else mats


def sample_matrix_Dprime(n: int, rng: np.random.Generator, size: int | None = None):
    """Matrix (or stack) with iid entries uniform in [-1, 1]."""
    m = 1 if size is None else int(size)
    mats = rng.uniform(-1.0, 1.0, size=(m, n, n))
    return mats[0] if size is None else mats


def sample_gaussian_matrix(n: int, rng: np.random.Generator, size: int | None = None):
    """Matrix (or stack) with iid standard normal entries."""
    m = 1 if size is None else int(size)
    mats = rng.standard_normal((m, n, n))
    return mats[0] if size is None else mats


def _qr_haar_fixup(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    d = np.sign(np.einsum("...ii->...i", r))
    d[d == 0.0] = 1.0
    q = q * d[..., None, :]
    # restrict from O(n) to SO(n): flip the last column of reflections
    det_neg = np.linalg.det(q) < 0
    q[det_neg, :, -1] *= -1.0
    return q


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed rotation (orthogonal, det +1) via Gaussian QR."""
    return random_rotation_many(n, rng, 1)[0]


def random_rotation_many(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    g = rng.standard_normal((int(size), n, n))
    q, r = np.linalg.qr(g)
    return _qr_haar_fixup(q, r)


def chebyshev_center(p: HPolytope) -> np.ndarray:
    """Center of the largest inscribed ball, by linear programming."""
    from scipy.optimize import linprog

    norms = np.linalg.norm(p.normals, axis=1)
    a_ub = np.hstack([p.normals, norms[:, None]])
    c = np.zeros(p.n + 1)
    c[-1] = -1.0
    if p.bounding_box is not None:
        bounds = [(lo, hi) for lo, hi in p.bounding_box.T] + [(0.0, None)]
    elif p.bounding_radius is not None:
        r = p.bounding_radius
        bounds = [(-r, r)] * p.n + [(0.0, None)]
    else:
        bounds = [(None, None)] * p.n + [(0.0, None)]
    res = linprog(c, A_ub=a_ub, b_ub=p.offsets, bounds=bounds, method="highs")
    if not res.success or res.x[-1] <= 0:
        raise ValueError("could not find an interior point (polytope empty or degenerate)")
    return res.x[:-1]


def _rejection_proposals(p: HPolytope, rng: np.random.Generator, m: int) -> tuple[np.ndarray, str]:
    if p.bounding_box is not None:
        lo, hi = p.bounding_box
        return rng.uniform(lo, hi, size=(m, p.n)), "box"
    if p.bounding_radius is not None:
        return uniform_ball(p.n, p.bounding_radius, rng, size=m), "ball"
    raise ValueError("rejection sampling needs a bounding box or bounding radius")


def _interior_start(p: HPolytope, start) -> np.ndarray:
    if start is not None:
        x0 = np.asarray(start, dtype=np.float64)
    elif p.interior_point is not None:
        x0 = np.asarray(p.interior_point, dtype=np.float64)
    else:
        x0 = chebyshev_center(p)
    if not p.contains(x0):
        raise ValueError("hit-and-run start point is not inside the polytope")
    return x0


def hit_and_run_table(
    p: HPolytope,
    rng: np.random.Generator,
    rounds: int,
    chains: int,
    burn_in: int,
    thin: int,
    start=None,
    starts: np.ndarray | None = None,
) -> np.ndarray:
    """Hit-and-run samples laid out as (rounds, chains, n).

    All chains run in lockstep: burn-in, then one sample per chain every
    ``max(thin, 1)`` steps. Distinct chains use independent direction draws,
    so row-c statistics across rounds are a single correlated walk while
    column statistics across chains are independent. ``starts`` (chains, n)
    overrides the single ``start`` point when given.
    """
    a = np.ascontiguousarray(p.normals)
    b = np.ascontiguousarray(p.offsets)
    if starts is not None:
        x = np.array(starts, dtype=np.float64, order="C")
        if x.shape != (chains, p.n):
            raise ValueError("starts must have shape (chains, n)")
        if not np.all(p.contains_many(x)):
            raise ValueError("all start points must be inside the polytope")
    else:
        x0 = _interior_start(p, start)
        x = np.tile(x0, (chains, 1))
    remaining = burn_in
    while remaining > 0:
        block = min(remaining, _BURNIN_BLOCK)
        dirs = rng.standard_normal((block, chains, p.n))
        unifs = rng.random((block, chains))
        kernels.advance_chains(a, b, x, dirs, unifs)
        remaining -= block
    step = max(thin, 1)
    out = np.empty((rounds, chains, p.n))
    for r in range(rounds):
        dirs = rng.standard_normal((step, chains, p.n))
        unifs = rng.random((step, chains))
        kernels.advance_chains(a, b, x, dirs, unifs)
        out[r] = x
    return out


def sample_polytope(
    p: HPolytope,
    cfg: SamplerConfig,
    rng: np.random.Generator,
    size: int | None = None,
    chains: int | None = None,
    start=None,
):
    """Uniform(ish) point(s) from a bounded H-polytope.

    Rejection mode draws proposals from the bounding box (or ball) and is
    exactly uniform; it raises :class:`RejectionCapExceeded` once ``cfg.cap``
    proposals fail, signalling the caller to switch methods. Hit-and-run mode
    is approximately uniform after burn-in (defaults 100n / thinning n).
    """
    m = 1 if size is None else int(size)
    if m < 1:
        raise ValueError("size must be >= 1")
    if cfg.method == "rejection":
        collected: list[np.ndarray] = []
        got = 0
        budget = cfg.cap
        while got < m:
            block = min(max(4 * (m - got), 1024), budget, 262_144)
            if block <= 0:
                raise RejectionCapExceeded(
                    f"rejection cap {cfg.cap} hit with {got}/{m} accepted"
                )
            pts, _ = _rejection_proposals(p, rng, block)
            budget -= block
            keep = pts[p.contains_many(pts)]
            if keep.shape[0]:
                collected.append(keep[: m - got])
                got += min(keep.shape[0], m - got)
            elif budget <= 0:
                raise RejectionCapExceeded(
                    f"rejection cap {cfg.cap} hit with {got}/{m} accepted"
                )
        samples = np.vstack(collected)
    else:
        n = p.n
        burn_in = 100 * n if cfg.burn_in is None else cfg.burn_in
        thin = n if cfg.thinning is None else cfg.thinning
        c = chains if chains is not None else min(m, 256)
        c = max(1, min(c, m))
        rounds = -(-m // c)
        table = hit_and_run_table(p, rng, rounds, c, burn_in, thin, start=start)
        samples = table.reshape(rounds * c, n)[:m]
    return samples[0] if size is None else samples


def sample_polytope_auto(
    p: HPolytope,
    cfg: SamplerConfig,
    rng: np.random.Generator,
    size: int | None = None,
    chains: int | None = None,
    start=None,
):
    """``sample_polytope`` that falls back to hit-and-run on a rejection cap."""
    try:
        return sample_polytope(p, cfg, rng, size=size, chains=chains, start=start)
    except RejectionCapExceeded:
        fallback = SamplerConfig(
            method="hit-and-run", burn_in=cfg.burn_in, thinning=cfg.thinning, cap=cfg.cap
        )
        return sample_polytope(p, fallback, rng, size=size, chains=chains, start=start)
