"""Sketched query algorithms and adversarial constructions.

Upper-bound side: binary search along a line recovers the projection of a
hidden halfspace normal onto a direction; averaging squared projections
over random directions estimates its length; entrywise bisection through a
threshold oracle recovers a whole matrix and hence the volume of the
parallelopiped it defines.

Lower-bound side: the rotated brick / double-brick pair, whose membership
answers differ only on queries falling in a thin rotated slab-shell, which
is what defeats nonadaptive algorithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .geom import as_matrix, determinant
from .oracle import EntryOracle
from .rng import RngStream
from .sampling import random_rotation, uniform_sphere

__all__ = [
    "ExtentResult",
    "LengthEstimate",
    "VolumeRecovery",
    "AdversarialBody",
    "TrialResult",
    "DEFAULT_T_MAX",
    "directional_extent",
    "estimate_length",
    "recovery_steps",
    "recover_matrix",
    "recovery_epsilon",
    "estimate_volume_via_recovery",
    "make_adversarial_body",
    "nonadaptive_trial",
    "bayes_optimal_classifier",
]

#: Default cap on the binary-search ray length; projections smaller than
#: 1/DEFAULT_T_MAX in magnitude are reported as below resolution.
DEFAULT_T_MAX = float(2**20)


class ExtentResult(NamedTuple):
    value: float
    below_resolution: bool
    queries: int


def directional_extent(
    oracle: Callable[[np.ndarray], bool],
    direction: np.ndarray,
    eps: float,
    t_max: float = DEFAULT_T_MAX,
) -> ExtentResult:
    """Estimate a . direction for a hidden halfspace {x : a . x <= 1}.

    Binary search along t * direction for the boundary crossing at
    t* = 1/(a . direction); the search keeps going until the reciprocal
    bracket is narrower than 2 * eps, so the returned value is within eps
    of the true projection. The opposite ray is searched when the positive
    one never leaves the halfspace; if both rays stay inside up to t_max
    the projection is below resolution (|a . b| <= 1/t_max) and 0 is
    returned with the flag set.
    """
    if eps <= 0 or t_max <= 0:
        raise ValueError("eps and t_max must be positive")
    b = np.asarray(direction, dtype=np.float64)
    queries = 0
    for sign in (1.0, -1.0):
        queries += 1
        if oracle(sign * t_max * b):
            continue  # no boundary on this ray within t_max
        t_in, t_out = 0.0, t_max
        for _ in range(500):
            half_gap = math.inf if t_in == 0.0 else 0.5 * (1.0 / t_in - 1.0 / t_out)
            if half_gap <= eps:
                break
            mid = 0.5 * (t_in + t_out)
            if mid <= t_in or mid >= t_out:
                break  # float resolution exhausted
            queries += 1
            if oracle(sign * mid * b):
                t_in = mid
            else:
                t_out = mid
        estimate = 0.5 * (1.0 / t_in + 1.0 / t_out)
        return ExtentResult(sign * estimate, False, queries)
    return ExtentResult(0.0, True, queries)


@dataclass(frozen=True)
class LengthEstimate:
    """Norm estimate from averaged squared random projections."""

    value: float
    projections: int
    queries: int
    eps: float


def estimate_length(
    oracle: Callable[[np.ndarray], bool],
    n: int,
    k: int,
    eps: float,
    rng: np.random.Generator,
    t_max: float = DEFAULT_T_MAX,
) -> LengthEstimate:
    """Estimate ||a|| via sqrt(n * mean of squared projections).

    Uses k random unit directions; E (a . b)^2 = ||a||^2 / n makes the mean
    an unbiased estimator of ||a||^2 / n up to the per-projection tolerance.
    """
    if k < 1:
        raise ValueError("need at least one projection")
    dirs = uniform_sphere(n, rng, size=k)
    total_queries = 0
    sq_sum = 0.0
    for j in range(k):
        res = directional_extent(oracle, dirs[j], eps, t_max=t_max)
        total_queries += res.queries
        sq_sum += res.value**2
    return LengthEstimate(
        value=math.sqrt(n * sq_sum / k), projections=k, queries=total_queries, eps=eps
    )


def recovery_steps(eps: float) -> int:
    """Bisection steps per entry to localize a [-1, 1] value within eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return max(0, math.ceil(math.log2(2.0 / eps)))


def recover_matrix(entry_oracle: Callable[[int, int, float], bool], n: int, eps: float) -> np.ndarray:
    """Recover an entries-in-[-1,1] matrix to entrywise error <= eps.

    Runs exactly ceil(log2(2/eps)) threshold queries per entry (no early
    exit), so the total query count is exactly n^2 ceil(log2(2/eps)).
    """
    steps = recovery_steps(eps)
    out = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            lo, hi = -1.0, 1.0
            for _ in range(steps):
                mid = 0.5 * (lo + hi)
                if entry_oracle(i, j, mid):
                    hi = mid
                else:
                    lo = mid
            out[i - 1, j - 1] = 0.5 * (lo + hi)
    return out


def recovery_epsilon(n: int, sigma_min_floor: float, target_rel_error: float) -> float:
    """Entry tolerance making the recovered volume accurate to the target.

    Chosen so n^{3/2} eps / sigma_min_floor <= target/2; with the recovered
    perturbation E satisfying ||E||_2 <= sqrt(n) * n * eps entrywise bounds,
    the determinant ratio (1 +- ||E||_2/sigma_min)^n stays within the target.
    """
    if sigma_min_floor <= 0 or target_rel_error <= 0:
        raise ValueError("sigma_min_floor and target_rel_error must be positive")
    return target_rel_error * sigma_min_floor / (2.0 * n**1.5)


class VolumeRecovery(NamedTuple):
    volume: float
    queries: int
    eps: float
    matrix: np.ndarray


def estimate_volume_via_recovery(
    entry_oracle: EntryOracle,
    n: int,
    sigma_min_floor: float,
    target_rel_error: float = 0.05,
) -> VolumeRecovery:
    """Volume 2^n / |det A| through full matrix recovery.

    Valid under the roundness promise min-singular-value(A) >= the floor;
    a singular recovered matrix means the promise was violated.
    """
    eps = recovery_epsilon(n, sigma_min_floor, target_rel_error)
    before = entry_oracle.transcript.count
    recovered = recover_matrix(entry_oracle, n, eps)
    queries = entry_oracle.transcript.count - before
    d = abs(determinant(recovered))
    if d <= 0.0:
        raise ValueError("recovered matrix is singular: roundness promise violated")
    return VolumeRecovery(volume=2.0**n / d, queries=queries, eps=eps, matrix=recovered)


# --- brick / double brick ----------------------------------------------------

BRICK = "brick"
DOUBLE_BRICK = "double_brick"


@dataclass(frozen=True)
class AdversarialBody:
    """A rotated slab-ball intersection: {|x_i| <= 1, i >= 2} within a ball.

    The ball radius is n for the brick and 2n for the double brick; the
    whole body is rotated by ``rotation``. Membership tests the unrotated
    coordinates of the query.
    """

    variant: str
    n: int
    rotation: np.ndarray

    def __post_init__(self) -> None:
        if self.variant not in (BRICK, DOUBLE_BRICK):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.n < 2:
            raise ValueError("adversarial bodies need n >= 2")
        object.__setattr__(self, "rotation", as_matrix(self.rotation))

    @property
    def radius(self) -> float:
        return float(self.n if self.variant == BRICK else 2 * self.n)

    def contains(self, q) -> bool:
        return bool(self.contains_many(np.asarray(q, dtype=np.float64)[None, :])[0])

    def contains_many(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.float64)
        y = qs @ self.rotation  # rows of y are U^T q
        in_slab = np.all(np.abs(y[..., 1:]) <= 1.0, axis=-1)
        in_ball = np.einsum("...i,...i->...", qs, qs) <= self.radius**2
        return in_slab & in_ball

    def twin(self) -> "AdversarialBody":
        """The other variant with the same rotation."""
        other = DOUBLE_BRICK if self.variant == BRICK else BRICK
        return AdversarialBody(other, self.n, self.rotation)


def make_adversarial_body(variant: str, n: int, rng: np.random.Generator) -> AdversarialBody:
    """Brick or double brick under a fresh Haar rotation."""
    return AdversarialBody(variant, n, random_rotation(n, rng))


class TrialResult(NamedTuple):
    truth: str
    guess: str
    hits: int


def nonadaptive_trial(
    queries: np.ndarray,
    classifier: Callable[[np.ndarray, np.random.Generator], str],
    n: int,
    rng: np.random.Generator,
) -> TrialResult:
    """One nonadaptive distinguishing trial.

    Fixed draw order from ``rng``: the coin for the true variant, then the
    rotation, then any tie-break the classifier needs. ``hits`` counts the
    queries falling in the symmetric difference of the brick/double-brick
    pair sharing the trial's rotation, the only queries whose answer
    depends on the truth.
    """
    queries = np.asarray(queries, dtype=np.float64).reshape(-1, n)
    truth = BRICK if rng.random() < 0.5 else DOUBLE_BRICK
    body = make_adversarial_body(truth, n, rng)
    answers = body.contains_many(queries)
    hits = int(np.sum(answers != body.twin().contains_many(queries)))
    guess = classifier(answers, rng)
    return TrialResult(truth=truth, guess=guess, hits=hits)


def bayes_optimal_classifier(
    queries: np.ndarray, n: int, pilot_stream: RngStream, pilot_trials: int = 4096
) -> Callable[[np.ndarray, np.random.Generator], str]:
    """Bayes rule on the answer vector, learned from pilot simulations.

    Estimates P(answer vector | variant) for both variants over fresh
    rotations, then classifies by the larger likelihood; ties (including
    never-seen vectors) fall to a fair coin from the trial's generator.
    """
    queries = np.asarray(queries, dtype=np.float64).reshape(-1, n)
    counts: dict[bytes, np.ndarray] = {}
    for v_idx, variant in enumerate((BRICK, DOUBLE_BRICK)):
        for t in range(pilot_trials):
            gen = pilot_stream.child(v_idx, t).generator()
            body = make_adversarial_body(variant, n, gen)
            key = np.packbits(body.contains_many(queries)).tobytes()
            counts.setdefault(key, np.zeros(2))[v_idx] += 1

    def classify(answers: np.ndarray, rng: np.random.Generator) -> str:
        key = np.packbits(np.asarray(answers, dtype=bool)).tobytes()
        c = counts.get(key)
        if c is None or c[0] == c[1]:
            return BRICK if rng.random() < 0.5 else DOUBLE_BRICK
        return BRICK if c[0] > c[1] else DOUBLE_BRICK

    return classify
