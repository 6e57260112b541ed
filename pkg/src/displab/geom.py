"""Exact linear-algebra primitives and convex bodies.

Everything here is deterministic, pure and small-n oriented (n up to a few
hundred). Scalars are 64-bit floats throughout; quantities smaller than
``DEGENERACY_RTOL`` times the matrix scale are reported as exact zeros so
that degenerate inputs behave deterministically in tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEGENERACY_RTOL",
    "DegenerateMatrixError",
    "UnboundedBodyError",
    "as_matrix",
    "as_vector",
    "determinant",
    "determinant_many",
    "gram_schmidt_residuals",
    "row_projection_residual",
    "normalized_determinant",
    "min_singular_value",
    "parallelopiped_volume",
    "ball_volume",
    "Parallelopiped",
    "HPolytope",
    "Ball",
]

#: Residuals and singular values below this fraction of the Frobenius norm
#: are reported as zero.
DEGENERACY_RTOL = 1e-12


class DegenerateMatrixError(ValueError):
    """Raised when an operation requires nondegenerate input (e.g. a zero row)."""


class UnboundedBodyError(ValueError):
    """Raised when a body that must be bounded is not (singular defining matrix)."""


def as_vector(x, n: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise ValueError(f"expected length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_matrix(m, square: bool = True) -> np.ndarray:
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix must have at least one row")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def determinant(m) -> float:
    """Determinant by Gaussian elimination with partial pivoting.

    Sign-preserving; exact up to floating round-off at the n <= few hundred
    scale this package targets.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    sign = 1.0
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            sign = -sign
        a[k + 1 :, k :] -= np.outer(a[k + 1 :, k] / a[k, k], a[k, k:])
    return float(sign * np.prod(np.diag(a)))


def determinant_many(ms: np.ndarray) -> np.ndarray:
    """Batched determinants (LAPACK LU) for (m, n, n) stacks of matrices."""
    a = np.asarray(ms, dtype=np.float64)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {a.shape}")
    return np.linalg.det(a)


def gram_schmidt_residuals(m) -> np.ndarray:
    """Norms of the Gram-Schmidt residuals of the rows, in row order.

    Entry ``i`` is the norm of row ``i`` projected orthogonally to the span
    of rows ``0..i-1``; the product of the entries equals ``|det|``.
    Residuals below the degeneracy threshold are reported as exact zeros.
    """
    a = as_matrix(m)
    n = a.shape[0]
    floor = DEGENERACY_RTOL * np.linalg.norm(a)
    basis: list[np.ndarray] = []
    out = np.zeros(n)
    for i in range(n):
        r = a[i].copy()
        for q in basis:
            r -= (r @ q) * q
        nrm = float(np.linalg.norm(r))
        if nrm <= floor:
            out[i] = 0.0
            continue
        # one reorthogonalization pass keeps the product accurate
        for q in basis:
            r -= (r @ q) * q
        nrm = float(np.linalg.norm(r))
        out[i] = nrm
        basis.append(r / nrm)
    return out


def row_projection_residual(m, i: int) -> float:
    """Norm of row ``i`` (1-based) projected orthogonally to all other rows.

    Zero iff row ``i`` lies in the span of the others.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if not 1 <= i <= n:
        raise ValueError(f"row index {i} out of range 1..{n}")
    others = np.delete(a, i - 1, axis=0)
    r = a[i - 1].copy()
    if others.shape[0]:
        q, _ = np.linalg.qr(others.T)
        r = r - q @ (q.T @ r)
    nrm = float(np.linalg.norm(r))
    if nrm <= DEGENERACY_RTOL * np.linalg.norm(a):
        return 0.0
    return nrm


def normalized_determinant(m) -> float:
    """|det| of the matrix with rows normalized to unit length; in [0, 1]."""
    a = as_matrix(m)
    norms = np.linalg.norm(a, axis=1)
    if np.any(norms <= DEGENERACY_RTOL * max(np.linalg.norm(a), 1.0)):
        raise DegenerateMatrixError("normalized_determinant: zero row")
    val = abs(determinant(a / norms[:, None]))
    return float(min(val, 1.0))


def min_singular_value(m) -> float:
    """Smallest singular value, via the eigen-decomposition of M^T M.

    Values below the degeneracy threshold are reported as exact zeros.
    """
    a = as_matrix(m)
    w = np.linalg.eigvalsh(a.T @ a)
    sigma = math.sqrt(max(float(w[0]), 0.0))
    if sigma <= DEGENERACY_RTOL * np.linalg.norm(a):
        return 0.0
    return sigma


def min_singular_value_many(ms: np.ndarray) -> np.ndarray:
    """Batched smallest singular values for (m, n, n) stacks."""
    a = np.asarray(ms, dtype=np.float64)
    w = np.linalg.eigvalsh(np.einsum("mji,mjk->mik", a, a))
    return np.sqrt(np.maximum(w[:, 0], 0.0))


def parallelopiped_volume(a) -> float:
    """Volume 2^n / |det A| of the body {x : ||Ax||_inf <= 1}."""
    m = as_matrix(a)
    n = m.shape[0]
    d = abs(determinant(m))
    if d <= DEGENERACY_RTOL * np.linalg.norm(m) ** n:
        raise UnboundedBodyError("singular matrix defines an unbounded parallelopiped")
    return float(2.0**n / d)


def ball_volume(n: int, r: float) -> float:
    """Volume of the n-dimensional Euclidean ball of radius r."""
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1)) * r**n


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Parallelopiped:
    """The symmetric body {x : ||Ax||_inf <= 1}; bounded iff A is nonsingular."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _freeze(as_matrix(self.matrix)))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def contains(self, q) -> bool:
        q = as_vector(q, self.n)
        return bool(np.max(np.abs(self.matrix @ q)) <= 1.0)

    def contains_many(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.float64)
        return np.max(np.abs(qs @ self.matrix.T), axis=-1) <= 1.0

    def volume(self) -> float:
        return parallelopiped_volume(self.matrix)


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces ``normals @ x <= offsets``.

    ``bounding_radius`` (the body fits in that origin-centered ball) and
    ``bounding_box`` (per-coordinate [lo, hi], shape (2, n)) are optional
    hints used by the samplers; ``interior_point`` seeds hit-and-run walks.
    """

    normals: np.ndarray
    offsets: np.ndarray
    bounding_radius: float | None = None
    bounding_box: np.ndarray | None = None
    interior_point: np.ndarray | None = None

    def __post_init__(self) -> None:
        normals = as_matrix(self.normals, square=False) if np.size(self.normals) else np.zeros((0, 1))
        offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
        if normals.shape[0] != offsets.shape[0]:
            raise ValueError("normals and offsets must have matching facet counts")
        object.__setattr__(self, "normals", _freeze(normals))
        object.__setattr__(self, "offsets", _freeze(offsets))
        if self.bounding_box is not None:
            box = np.asarray(self.bounding_box, dtype=np.float64)
            if box.shape != (2, self.n):
                raise ValueError("bounding_box must have shape (2, n)")
            object.__setattr__(self, "bounding_box", _freeze(box.copy()))
        if self.interior_point is not None:
            object.__setattr__(
                self, "interior_point", _freeze(as_vector(self.interior_point, self.n).copy())
            )

    @classmethod
    def cube(cls, n: int, half_width: float = 1.0) -> "HPolytope":
        """The cube [-w, w]^n as 2n facets, with exact box and radius hints."""
        normals = np.vstack([np.eye(n), -np.eye(n)])
        offsets = np.full(2 * n, float(half_width))
        box = np.vstack([np.full(n, -half_width), np.full(n, half_width)])
        return cls(
            normals,
            offsets,
            bounding_radius=half_width * math.sqrt(n),
            bounding_box=box,
            interior_point=np.zeros(n),
        )

    def with_halfspaces(self, normals, offsets, interior_point=None) -> "HPolytope":
        """New polytope with extra facets; bounding hints are inherited."""
        extra_n = as_matrix(normals, square=False)
        extra_o = np.asarray(offsets, dtype=np.float64).reshape(-1)
        return HPolytope(
            np.vstack([self.normals, extra_n]),
            np.concatenate([self.offsets, extra_o]),
            bounding_radius=self.bounding_radius,
            bounding_box=self.bounding_box,
            interior_point=self.interior_point if interior_point is None else interior_point,
        )

    @property
    def n(self) -> int:
        return self.normals.shape[1]

    @property
    def num_facets(self) -> int:
        return self.normals.shape[0]

    def contains(self, q) -> bool:
        q = as_vector(q, self.n)
        if self.num_facets == 0:
            return True
        return bool(np.all(self.normals @ q <= self.offsets))

    def contains_many(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.float64)
        if self.num_facets == 0:
            return np.ones(qs.shape[:-1], dtype=bool)
        return np.all(qs @ self.normals.T <= self.offsets, axis=-1)

    def certify_bounding_radius(self, points: np.ndarray, rtol: float = 1e-9) -> bool:
        """Check the radius hint against points known to lie in the body."""
        if self.bounding_radius is None:
            raise ValueError("no bounding radius to certify")
        pts = np.asarray(points, dtype=np.float64)
        if not np.all(self.contains_many(pts)):
            raise ValueError("certification points must lie in the body")
        return bool(np.all(np.linalg.norm(pts, axis=-1) <= self.bounding_radius * (1 + rtol)))


@dataclass(frozen=True)
class Ball:
    """Euclidean ball of radius r centered at ``center`` (origin by default)."""

    n: int
    r: float
    center: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("radius must be nonnegative")
        c = np.zeros(self.n) if self.center is None else as_vector(self.center, self.n).copy()
        object.__setattr__(self, "center", _freeze(c))

    def contains(self, q) -> bool:
        q = as_vector(q, self.n)
        return bool(np.linalg.norm(q - self.center) <= self.r)

    def contains_many(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.float64)
        return np.linalg.norm(qs - self.center, axis=-1) <= self.r

    def volume(self) -> float:
        return ball_volume(self.n, self.r)
