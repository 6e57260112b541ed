"""Dispersion and variance statistics over scalar samples.

The central object is the p-dispersion of a distribution: the smallest
width of a closed interval carrying at least 1-p of the mass. On an
empirical measure with m sorted atoms that infimum is attained by a window
of k = ceil((1-p) m) consecutive order statistics, which is what
:func:`p_dispersion` scans for; the scan is exact, not an approximation.

The module also houses the normalized norm variance sigma_K^2, variance /
dispersion lower-bound formulas, and the constructive decomposition of a
density with logconcave distribution function into a uniform part plus a
remainder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ScalarSampleSet",
    "DispersionEstimate",
    "PiecewiseConstantDensity",
    "MomentSummary",
    "UniformPart",
    "NotLogconcaveError",
    "DegenerateDensityError",
    "p_dispersion",
    "variance",
    "norm_sq_samples",
    "sigma_k_sq",
    "norm_sq_summary",
    "disp_lower_bound_from_variance",
    "mixture_dispersion_check",
    "uniform_part_decomposition",
    "uniform_part_width_ratio",
    "dispersion_csv_rows",
]


class NotLogconcaveError(ValueError):
    """The density's distribution function failed the logconcavity check."""


class DegenerateDensityError(ValueError):
    """The density has (numerically) zero variance or an empty right tail."""


@dataclass(frozen=True)
class ScalarSampleSet:
    """Sorted empirical samples of a scalar statistic."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.sort(np.asarray(self.values, dtype=np.float64).ravel())
        if v.size < 1:
            raise ValueError("sample set must be nonempty")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return int(self.values.size)


def norm_sq_samples(points: np.ndarray) -> ScalarSampleSet:
    """Squared Euclidean norms of a (m, n) point cloud, as a sample set."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must be a (m, n) array")
    return ScalarSampleSet(np.einsum("ij,ij->i", pts, pts))


@dataclass(frozen=True)
class DispersionEstimate:
    """Minimum window [lo, hi] capturing >= 1-p of the empirical mass."""

    p: float
    width: float
    lo: float
    hi: float


def _window_count(m: int, p: float) -> int:
    """Smallest k with k/m >= 1-p, robust to float rounding of (1-p)*m."""
    k = math.ceil((1.0 - p) * m)
    k = min(max(k, 1), m)
    while k > 1 and (k - 1) / m >= 1.0 - p:
        k -= 1
    while k < m and k / m < 1.0 - p:
        k += 1
    return k


def p_dispersion(s: ScalarSampleSet, p: float) -> DispersionEstimate:
    """Exact p-dispersion of the empirical measure carried by ``s``.

    Scans windows of k = ceil((1-p) m) consecutive order statistics and
    returns the narrowest; ties resolve to the leftmost window.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    x = s.values
    m = x.size
    k = _window_count(m, p)
    widths = x[k - 1 :] - x[: m - k + 1]
    i = int(np.argmin(widths))
    return DispersionEstimate(p=p, width=float(widths[i]), lo=float(x[i]), hi=float(x[i + k - 1]))


def variance(s: ScalarSampleSet) -> float:
    """Unbiased sample variance; requires at least two samples."""
    if s.count < 2:
        raise ValueError("variance needs at least 2 samples")
    return float(np.var(s.values, ddof=1))


def sigma_k_sq(points: np.ndarray) -> float:
    """The normalized norm variance n * var(|X|^2) / (E |X|^2)^2."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need a (m, n) array with m >= 2")
    n = pts.shape[1]
    y = np.einsum("ij,ij->i", pts, pts)
    mean = float(np.mean(y))
    if mean == 0.0:
        raise ValueError("sigma_K is undefined for zero mean squared norm")
    return n * float(np.var(y, ddof=1)) / mean**2


class MomentSummary(NamedTuple):
    """Mean/variance/sigma_K^2 of |X|^2 with delta-method standard errors."""

    mean: float
    mean_se: float
    var: float
    var_se: float
    sigma_k_sq: float
    sigma_k_se: float
    units: int


def norm_sq_summary(y: np.ndarray, n: int) -> MomentSummary:
    """Moment summary of squared norms with standard errors.

    ``y`` is either a flat array of iid squared norms, or a (rounds, chains)
    table from a multi-chain MCMC run. In the second case the chains are the
    iid units: per-chain averages of (Y, Y^2) feed a delta method, which
    stays valid under arbitrary within-chain correlation.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        a, b = y, y * y
    elif y.ndim == 2:
        a, b = y.mean(axis=0), (y * y).mean(axis=0)
    else:
        raise ValueError("y must be 1-D (iid) or 2-D (rounds x chains)")
    units = a.size
    if units < 2:
        raise ValueError("need at least 2 units")
    mu1 = float(np.mean(a))
    mu2 = float(np.mean(b))
    cov = np.cov(np.vstack([a, b]), ddof=1)
    s11, s12, s22 = float(cov[0, 0]), float(cov[0, 1]), float(cov[1, 1])
    # unbiased-through-units variance: correct the mu1^2 plug-in bias
    var = mu2 - mu1 * mu1 + s11 / units
    mean_se = math.sqrt(max(s11, 0.0) / units)
    g_var = np.array([-2.0 * mu1, 1.0])
    var_var = g_var @ cov @ g_var / units
    var_se = math.sqrt(max(float(var_var), 0.0))
    if mu1 == 0.0:
        raise ValueError("sigma_K is undefined for zero mean squared norm")
    sk = n * var / mu1**2
    g_sk = np.array([-2.0 * n * mu2 / mu1**3, n / mu1**2])
    sk_var = g_sk @ cov @ g_sk / units
    sk_se = math.sqrt(max(float(sk_var), 0.0))
    return MomentSummary(mu1, mean_se, var, var_se, sk, sk_se, units)


def disp_lower_bound_from_variance(
    sigma_sq: float, support_length: float, logconcave: bool = False, p: float | None = None
) -> tuple[float, float]:
    """Dispersion guaranteed by a variance, as a (p, bound) pair.

    Bounded support of length M: at p* = 3 sigma^2 / (4 M^2) the dispersion
    is at least sigma. With ``logconcave=True`` and an explicit ``p``, the
    bound is (1-p) sigma instead.
    """
    if sigma_sq <= 0 or support_length <= 0:
        raise ValueError("sigma_sq and support_length must be positive")
    sigma = math.sqrt(sigma_sq)
    if sigma > support_length:
        raise ValueError("standard deviation cannot exceed the support length")
    if logconcave:
        if p is None or not 0.0 < p < 1.0:
            raise ValueError("logconcave bound needs p in (0, 1)")
        return p, (1.0 - p) * sigma
    return 0.75 * sigma_sq / support_length**2, sigma


def mixture_dispersion_check(
    s_x: ScalarSampleSet, s_z: ScalarSampleSet, alpha: float, p: float, slack: float = 0.0
) -> bool:
    """Empirical check of disp_Z(alpha p) >= disp_X(p) for an alpha-mixture Z.

    ``slack`` absorbs Monte Carlo noise in the two empirical dispersions.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    lhs = p_dispersion(s_z, alpha * p).width
    rhs = p_dispersion(s_x, p).width
    return lhs >= rhs - slack


# --- piecewise-constant densities and the uniform-part decomposition ---------


@dataclass(frozen=True)
class PiecewiseConstantDensity:
    """Density on [0, M] that is constant between consecutive breakpoints.

    ``breakpoints`` has length k+1 starting at 0.0; ``levels`` has length k,
    all nonnegative, and the total integral must be 1 within 1e-9. Treated
    as right-continuous: f(x) = levels[j] on [b_j, b_{j+1}), and 0 at x >= M.
    """

    breakpoints: np.ndarray
    levels: np.ndarray

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=np.float64).ravel()
        lv = np.asarray(self.levels, dtype=np.float64).ravel()
        if bp.size < 2 or lv.size != bp.size - 1:
            raise ValueError("need k+1 breakpoints and k levels")
        if bp[0] != 0.0:
            raise ValueError("support must start at 0")
        if not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(lv < 0):
            raise ValueError("levels must be nonnegative")
        total = float(np.sum(lv * np.diff(bp)))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"density must integrate to 1 (got {total})")
        bp.flags.writeable = False
        lv.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "levels", lv)

    @property
    def support_length(self) -> float:
        return float(self.breakpoints[-1])

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (x >= 0) & (x < self.breakpoints[-1]) & (idx >= 0)
        return np.where(inside, self.levels[np.clip(idx, 0, self.levels.size - 1)], 0.0)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        widths = np.diff(self.breakpoints)
        cum = np.concatenate([[0.0], np.cumsum(self.levels * widths)])
        idx = np.clip(np.searchsorted(self.breakpoints, x, side="right") - 1, 0, self.levels.size - 1)
        partial = cum[idx] + self.levels[idx] * (x - self.breakpoints[idx])
        return np.clip(np.where(x <= 0, 0.0, np.where(x >= self.breakpoints[-1], 1.0, partial)), 0.0, 1.0)

    def mean(self) -> float:
        b = self.breakpoints
        return float(np.sum(self.levels * (b[1:] ** 2 - b[:-1] ** 2) / 2.0))

    def variance(self) -> float:
        b = self.breakpoints
        m2 = float(np.sum(self.levels * (b[1:] ** 3 - b[:-1] ** 3) / 3.0))
        return m2 - self.mean() ** 2

    def second_moment_about(self, c: float, lo: float, hi: float) -> float:
        """Exact integral of (x-c)^2 f(x) over [lo, hi]."""
        lo = max(lo, 0.0)
        hi = min(hi, self.support_length)
        if hi <= lo:
            return 0.0
        total = 0.0
        b = self.breakpoints
        for j in range(self.levels.size):
            u, v = max(b[j], lo), min(b[j + 1], hi)
            if v > u:
                total += self.levels[j] * ((v - c) ** 3 - (u - c) ** 3) / 3.0
        return total

    def min_level_on(self, lo: float, hi: float) -> float:
        """Infimum of f over [lo, hi) (right-continuous pieces)."""
        if hi <= lo:
            raise ValueError("empty interval")
        b = self.breakpoints
        out = math.inf
        for j in range(self.levels.size):
            if b[j] < hi and b[j + 1] > lo:
                out = min(out, float(self.levels[j]))
        if hi > self.support_length:
            out = min(out, 0.0)
        return out

    def logconcave_cdf_ok(self, slack: float = 1e-9) -> bool:
        """Grid certificate: chord slopes of log F nonincreasing on breakpoints."""
        f_vals = self.cdf(self.breakpoints)
        keep = f_vals > 0.0
        xs = self.breakpoints[keep]
        ls = np.log(f_vals[keep])
        if xs.size < 3:
            return True
        slopes = np.diff(ls) / np.diff(xs)
        return bool(np.all(np.diff(slopes) <= slack))


class UniformPart(NamedTuple):
    """Decomposition f = alpha * uniform[a, b] + (1 - alpha) * h."""

    alpha: float
    a: float
    b: float
    h: PiecewiseConstantDensity


def _first_point_at_or_below(f: PiecewiseConstantDensity, start: float, threshold: float) -> float:
    """Smallest x >= start with f(x) <= threshold (f is 0 beyond the support)."""
    if float(f.pdf(start)) <= threshold:
        return start
    for j in range(f.levels.size):
        x = float(f.breakpoints[j])
        if x > start and f.levels[j] <= threshold:
            return x
    return f.support_length


def uniform_part_decomposition(f: PiecewiseConstantDensity) -> UniformPart:
    """Extract a uniform component starting at the mean.

    Requires a logconcave distribution function (grid-certified). Scans the
    dyadic level-crossing points x_i to the right of the mean -- the first
    points where f drops below 1/(sigma 2^i) -- and returns the candidate
    interval maximizing alpha (b - a)^2, with alpha the largest weight
    keeping the remainder h nonnegative. The remainder is exact:
    f = alpha g + (1 - alpha) h pointwise.
    """
    if not f.logconcave_cdf_ok():
        raise NotLogconcaveError("distribution function is not logconcave on the grid")
    sigma_sq = f.variance()
    big_m = f.support_length
    if sigma_sq <= 1e-18 * big_m**2:
        raise DegenerateDensityError("zero variance")
    sigma = math.sqrt(sigma_sq)
    mu = f.mean()

    m_steps = math.ceil(3.0 * max(math.log2(big_m / sigma), 0.0)) + 14
    candidates: list[tuple[float, float]] = []  # (a, b)
    x0 = _first_point_at_or_below(f, mu, 1.0 / sigma)
    if x0 > mu + sigma / 64.0:
        candidates.append((mu, mu + sigma / 64.0))
    seen: set[float] = set()
    for i in range(1, m_steps + 1):
        xi = _first_point_at_or_below(f, mu, 1.0 / (sigma * 2.0**i))
        if xi > mu and xi not in seen:
            seen.add(xi)
            candidates.append((mu, xi))

    best: tuple[float, float, float] | None = None  # (objective, a, b)
    for a, b in candidates:
        alpha = (b - a) * f.min_level_on(a, b)
        if alpha <= 0.0:
            continue
        objective = alpha * (b - a) ** 2
        if best is None or objective > best[0]:
            best = (objective, a, b)
    if best is None:
        raise DegenerateDensityError("no uniform component with positive mass found")
    _, a, b = best
    alpha = (b - a) * f.min_level_on(a, b)
    if alpha >= 1.0 - 1e-12:
        raise DegenerateDensityError("density is (numerically) entirely uniform on [a, b]")

    g_level = 1.0 / (b - a)
    new_bp = np.unique(np.concatenate([f.breakpoints, [a, b]]))
    new_bp = new_bp[(new_bp >= 0.0) & (new_bp <= f.support_length)]
    mids = 0.5 * (new_bp[:-1] + new_bp[1:])
    f_lv = f.pdf(mids)
    g_lv = np.where((mids >= a) & (mids < b), g_level, 0.0)
    h_lv = (f_lv - alpha * g_lv) / (1.0 - alpha)
    if np.any(h_lv < -1e-9):
        raise DegenerateDensityError("remainder density went negative")
    h_lv = np.maximum(h_lv, 0.0)
    # exact renormalization only fixes float dust; the construction is exact
    total = float(np.sum(h_lv * np.diff(new_bp)))
    h = PiecewiseConstantDensity(new_bp, h_lv / total)
    return UniformPart(alpha=float(alpha), a=float(a), b=float(b), h=h)


def uniform_part_width_ratio(f: PiecewiseConstantDensity, part: UniformPart) -> float:
    """The achieved ratio alpha (b-a)^2 * log2(M / sigma) / sigma^2.

    The log factor is floored at 1 so the ratio stays finite for densities
    whose spread is comparable to their support.
    """
    sigma_sq = f.variance()
    log_term = max(math.log2(f.support_length / math.sqrt(sigma_sq)), 1.0)
    return part.alpha * (part.b - part.a) ** 2 * log_term / sigma_sq


def dispersion_csv_rows(entries: list[tuple[str, DispersionEstimate, int]]) -> str:
    """CSV serialization of dispersion estimates (statistic,p,width,lo,hi,m)."""
    lines = ["statistic,p,width,lo,hi,m"]
    for label, est, m in entries:
        lines.append(f"{label},{est.p!r},{est.width!r},{est.lo!r},{est.hi!r},{m}")
    return "\n".join(lines) + "\n"
