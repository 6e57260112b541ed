"""The experiment catalog.

Each entry reproduces one desk-scale-checkable claim: a moment identity,
a tail or singular-value bound, a variance lower bound with a calibrated
constant, a query-algorithm guarantee, or a dispersion measurement.
Entries with a bound report pass/fail with three standard errors of Monte
Carlo slack; calibration-style entries are informational.

Randomness discipline: experiment ``name`` at seed ``s`` draws everything
from ``RngStream(s).child(catalog index)``, and independent work units use
``child(unit)`` sub-streams, so results are identical no matter how many
worker threads execute the units.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import sampling, stats
from ..geom import HPolytope, ball_volume, determinant_many, min_singular_value
from ..algorithms import (
    DEFAULT_T_MAX,
    bayes_optimal_classifier,
    estimate_length,
    estimate_volume_via_recovery,
    nonadaptive_trial,
    recovery_epsilon,
    recovery_steps,
)
from ..oracle import (
    EntryOracle,
    ProductPart,
    answer_from_code,
    modified_query_codes,
    refine_product_part,
)
from ..rng import RngStream
from .constants import load_constants
from .reports import ExperimentConfig, ReportRecord, StatRow

__all__ = [
    "CATALOG",
    "ExperimentConfig",
    "ReportRecord",
    "StatRow",
    "UnknownExperimentError",
    "run_experiment",
    "finite_yao_check",
    "det_dispersion_queries",
    "leaf_polytope",
]


class UnknownExperimentError(KeyError):
    def __init__(self, name: str):
        valid = ", ".join(CATALOG)
        super().__init__(f"unknown experiment {name!r}; valid names: {valid}")


# --- small shared helpers -----------------------------------------------------


def _map_units(fn, n_units: int, workers: int) -> list:
    """Run fn(0..n_units-1), in index order, optionally on a thread pool."""
    if workers <= 1 or n_units <= 1:
        return [fn(i) for i in range(n_units)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(n_units)))


def _chunk_counts(total: int, size: int) -> list[int]:
    full, rem = divmod(total, size)
    return [size] * full + ([rem] if rem else [])


def _mean_se(sum1: float, sum2: float, m: int) -> tuple[float, float]:
    mean = sum1 / m
    if m < 2:
        return mean, 0.0
    var = max((sum2 - sum1 * sum1 / m) / (m - 1), 0.0)
    return mean, math.sqrt(var / m)


def _binom_se(p_hat: float, m: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / m)


# --- catalog entries ----------------------------------------------------------


def _ball_moments(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n, r = cfg.n, float(cfg.params.get("r", 1.0))
    counts = _chunk_counts(cfg.trials, 20_000)

    def unit(i: int) -> np.ndarray:
        gen = stream.child(i).generator()
        x = sampling.uniform_ball(n, r, gen, size=counts[i])
        y = sampling.uniform_sphere(n, gen, size=counts[i])
        ns = np.einsum("ij,ij->i", x, x)
        pr = np.einsum("ij,ij->i", x, y) ** 2
        return np.array([ns.sum(), (ns * ns).sum(), pr.sum(), (pr * pr).sum()])

    acc = np.sum(_map_units(unit, len(counts), workers), axis=0)
    m = cfg.trials
    ns_mean, ns_se = _mean_se(acc[0], acc[1], m)
    pr_mean, pr_se = _mean_se(acc[2], acc[3], m)
    return [
        StatRow.checked("norm_sq_mean", ns_mean, ns_se, n * r * r / (n + 2), "two-sided"),
        StatRow.checked("proj_sq_mean", pr_mean, pr_se, r * r / (n + 2), "two-sided"),
    ]


def _gaussian_tails(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n, eps = cfg.n, float(cfg.params.get("eps", 1.0))
    if eps <= 0:
        raise ValueError("eps must be positive")
    counts = _chunk_counts(cfg.trials, 20_000)

    def unit(i: int) -> np.ndarray:
        gen = stream.child(i).generator()
        g = gen.standard_normal((counts[i], n))
        s = np.einsum("ij,ij->i", g, g)
        return np.array([np.sum(s >= (1 + eps) * n), np.sum(s <= (1 - eps) * n)])

    acc = np.sum(_map_units(unit, len(counts), workers), axis=0)
    m = cfg.trials
    up_hat, lo_hat = acc[0] / m, acc[1] / m
    up_bound = ((1 + eps) * math.exp(-eps)) ** (n / 2)
    lo_bound = ((1 - eps) * math.exp(eps)) ** (n / 2) if eps < 1 else 0.0
    return [
        StatRow.checked("upper_tail_prob", up_hat, _binom_se(up_hat, m), up_bound, "upper"),
        StatRow.checked("lower_tail_prob", lo_hat, _binom_se(lo_hat, m), lo_bound, "upper"),
    ]


def _parse_thresholds(value) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, str):
        return [float(v) for v in value.split(",") if v.strip()]
    return [float(v) for v in value]


def _min_singular(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    thresholds = _parse_thresholds(cfg.params.get("t", [0.1, 0.2, 0.5]))
    counts = _chunk_counts(cfg.trials, 1000)

    def unit(i: int) -> np.ndarray:
        gen = stream.child(i).generator()
        mats = sampling.sample_gaussian_matrix(n, gen, size=counts[i])
        w = np.linalg.eigvalsh(np.einsum("mji,mjk->mik", mats, mats))
        scaled = np.sqrt(np.maximum(w[:, 0], 0.0)) * math.sqrt(n)
        return np.array([np.sum(scaled <= t) for t in thresholds], dtype=np.float64)

    acc = np.sum(_map_units(unit, len(counts), workers), axis=0)
    m = cfg.trials
    rows = []
    for t, hits in zip(thresholds, acc):
        p_hat = hits / m
        rows.append(
            StatRow.checked(f"pr_scaled_sigma_le_{t:g}", p_hat, _binom_se(p_hat, m), t, "upper")
        )
    return rows


def _expectation_volume(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    c = load_constants()["expectation_volume_c"]
    bodies: list[tuple[str, str, float, float]] = []  # label, kind, size, volume
    for s in (0.5, 1.0, 2.0):
        bodies.append((f"cube_hw_{s:g}", "cube", s, (2 * s) ** n))
    for r in (1.0, math.sqrt(n)):
        bodies.append((f"ball_r_{r:.6g}", "ball", r, ball_volume(n, r)))

    def unit(i: int) -> tuple[float, float]:
        label, kind, size, _ = bodies[i]
        gen = stream.child(i).generator()
        if kind == "cube":
            pts = size * sampling.uniform_cube(n, gen, size=cfg.trials)
        else:
            pts = sampling.uniform_ball(n, size, gen, size=cfg.trials)
        ns = np.einsum("ij,ij->i", pts, pts)
        return float(ns.sum()), float((ns * ns).sum())

    sums = _map_units(unit, len(bodies), workers)
    rows = []
    for (label, _, _, vol), (s1, s2) in zip(bodies, sums):
        mean, se = _mean_se(s1, s2, cfg.trials)
        bound = c * vol ** (2.0 / n) * n
        rows.append(StatRow.checked(f"norm_sq_mean_{label}", mean, se, bound, "lower"))
    return rows


def leaf_polytope(
    n: int, stream: RngStream, query_norm: float = 1.0, check_samples: int = 4096, max_attempts: int = 200
) -> tuple[HPolytope, np.ndarray]:
    """A decision-tree leaf over the cube of inputs, with volume >= 1.

    The hidden halfspace normal a* is drawn uniform in [-1, 1]^n; n-1 query
    points produce halfspace constraints on the input space (the side of
    each cut is the one containing a*). Leaves whose Monte Carlo volume
    estimate falls below 1 are redrawn. Returns (polytope, a*); a* is a
    certified interior point.
    """
    for attempt in range(max_attempts):
        gen = stream.child(attempt).generator()
        a_star = sampling.uniform_cube(n, gen)
        qs = query_norm * sampling.uniform_sphere(n, gen, size=n - 1)
        answers = qs @ a_star <= 1.0
        normals = np.where(answers[:, None], qs, -qs)
        offsets = np.where(answers, 1.0, -1.0)
        poly = HPolytope.cube(n).with_halfspaces(normals, offsets, interior_point=a_star)
        probe = sampling.uniform_cube(n, gen, size=check_samples)
        hits = int(np.sum(poly.contains_many(probe)))
        need = max(8, math.ceil(check_samples * 2.0**-n))
        if hits >= need:
            return poly, a_star
    raise RuntimeError(f"no leaf polytope with volume >= 1 found in {max_attempts} attempts")


def _variance_polytope(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    kind = str(cfg.params.get("kind", "cube"))
    chains = int(cfg.params.get("chains", 1024 if kind == "cube" else 256))
    var_exact = 4.0 * n / 45.0
    if kind == "cube":
        cube = HPolytope.cube(n)
        gen_hr = stream.child(0).generator()
        gen_rej = stream.child(1).generator()
        c = min(chains, cfg.trials)
        rounds = -(-cfg.trials // c)
        table = sampling.hit_and_run_table(cube, gen_hr, rounds, c, burn_in=100 * n, thin=n)
        hr = stats.norm_sq_summary(np.einsum("rci,rci->rc", table, table), n)
        rej = sampling.sample_polytope(
            cube, sampling.SamplerConfig(method="rejection", cap=10 * cfg.trials), gen_rej, size=cfg.trials
        )
        rj = stats.norm_sq_summary(np.einsum("ij,ij->i", rej, rej), n)
        diff_se = math.hypot(hr.mean_se, rj.mean_se)
        return [
            StatRow.checked("hit_and_run_var", hr.var, hr.var_se, var_exact, "two-sided"),
            StatRow.checked("hit_and_run_sigma_k_sq", hr.sigma_k_sq, hr.sigma_k_se, 0.8, "two-sided"),
            StatRow.checked("rejection_var", rj.var, rj.var_se, var_exact, "two-sided"),
            StatRow.checked("rejection_sigma_k_sq", rj.sigma_k_sq, rj.sigma_k_se, 0.8, "two-sided"),
            StatRow.checked("sampler_mean_gap", hr.mean - rj.mean, diff_se, 0.0, "two-sided"),
        ]

    samples = int(cfg.params.get("samples", 10_000))
    if kind == "leaf":
        threshold = load_constants()["leaf_variance_c"]
        query_norm = float(cfg.params.get("query_norm", 1.0))

        def unit(i: int) -> tuple[float, float]:
            sub = stream.child(i)
            poly, a_star = leaf_polytope(n, sub.child(0), query_norm=query_norm)
            gen = sub.child(1).generator()
            c = min(chains, samples)
            rounds = -(-samples // c)
            table = sampling.hit_and_run_table(
                poly, gen, rounds, c, burn_in=100 * n, thin=n, start=a_star
            )
            summ = stats.norm_sq_summary(np.einsum("rci,rci->rc", table, table), n)
            return summ.var * math.log2(n) / n, summ.sigma_k_sq

        results = _map_units(unit, cfg.trials, workers)
        scaled = np.array([r[0] for r in results])
        sk = np.array([r[1] for r in results])
        frac = float(np.mean(scaled >= threshold))
        return [
            StatRow.checked(
                "frac_scaled_var_above_c", frac, _binom_se(frac, cfg.trials), 0.9, "lower"
            ),
            StatRow.info("scaled_var_min", float(np.min(scaled))),
            StatRow.info("scaled_var_median", float(np.median(scaled))),
            StatRow.info("sigma_k_sq_median", float(np.median(sk))),
        ]

    if kind == "facets":
        k = float(cfg.params.get("facet_power", 2.0))
        n_facets = max(int(round(n**k)), 2 * n)

        def unit(i: int) -> tuple[float, float]:
            sub = stream.child(i)
            gen = sub.generator()
            normals = sampling.uniform_sphere(n, gen, size=n_facets)
            box = HPolytope.cube(n, half_width=float(n))
            poly = box.with_halfspaces(normals, np.ones(n_facets), interior_point=np.zeros(n))
            c = min(chains, samples)
            rounds = -(-samples // c)
            table = sampling.hit_and_run_table(poly, gen, rounds, c, burn_in=100 * n, thin=n)
            summ = stats.norm_sq_summary(np.einsum("rci,rci->rc", table, table), n)
            return summ.var * math.log2(n) / n, summ.sigma_k_sq

        results = _map_units(unit, cfg.trials, workers)
        scaled = np.array([r[0] for r in results])
        sk = np.array([r[1] for r in results])
        return [
            StatRow.info("scaled_var_min", float(np.min(scaled))),
            StatRow.info("scaled_var_median", float(np.median(scaled))),
            StatRow.info("sigma_k_sq_median", float(np.median(sk))),
        ]

    raise ValueError(f"unknown variance-polytope kind {kind!r}")


def _p1_p2(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    alpha = float(cfg.params.get("alpha", 2.0))
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    beta = cfg.params.get("beta")
    counts = _chunk_counts(cfg.trials, 2000)

    def unit(i: int) -> tuple[int, np.ndarray]:
        gen = stream.child(i).generator()
        mats = sampling.sample_matrix_D(n, gen, size=counts[i])
        dets = np.abs(determinant_many(mats))
        inv = np.linalg.inv(mats)
        residuals = 1.0 / np.linalg.norm(inv, axis=1)  # column norms of the inverse
        prod_res = np.prod(residuals, axis=1)
        row_norms = np.linalg.norm(mats, axis=2)
        norm_dets = dets / np.prod(row_norms, axis=1)
        p1_hits = int(np.sum(prod_res <= alpha**n))
        return p1_hits, norm_dets

    results = _map_units(unit, len(counts), workers)
    m = cfg.trials
    p1_hat = sum(r[0] for r in results) / m
    norm_dets = np.concatenate([r[1] for r in results])
    q_level = n ** (-alpha)
    beta_hat = float(np.quantile(norm_dets, q_level) ** (-1.0 / n))
    rows = [
        StatRow.checked("p1_prob", p1_hat, _binom_se(p1_hat, m), 1.0 - 1.0 / alpha**2, "lower"),
        StatRow.info("p2_beta_hat", beta_hat),
    ]
    if beta is not None:
        beta = float(beta)
        p2_hat = float(np.mean(norm_dets >= beta**-n))
        rows.append(
            StatRow.checked("p2_prob", p2_hat, _binom_se(p2_hat, m), 1.0 - q_level, "lower")
        )
    return rows


def det_dispersion_queries(n: int, scale: float = 1.0) -> tuple[int, np.ndarray]:
    """Height and query points of the fixed axis-probing strategy.

    The strategy asks h = floor((n^2 - 2) / log2(2n + 1)) modified-oracle
    queries, walking the cyclic list +e_1 .. +e_n, -e_1 .. -e_n; h keeps
    the realized partition within the 2^(n^2 - 2) parts the dispersion
    lemma quantifies over. Unit scale is the default: probes shorter than
    1/sqrt(n) are answered YES on all of D's support and partition nothing.
    """
    h = int((n * n - 2) / math.log2(2 * n + 1))
    qs = np.zeros((h, n))
    for j in range(h):
        sign = 1.0 if (j // n) % 2 == 0 else -1.0
        qs[j, j % n] = sign * scale
    return h, qs


def _det_dispersion(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    p = float(cfg.params.get("p", 0.1))
    scale = float(cfg.params.get("scale", 1.0))
    h, queries = det_dispersion_queries(n, scale=scale)
    radix = 2 * n + 1
    counts = _chunk_counts(cfg.trials, 100_000)

    def unit(i: int) -> tuple[np.ndarray, np.ndarray]:
        gen = stream.child(i).generator()
        mats = sampling.sample_matrix_D(n, gen, size=counts[i])
        keys = np.zeros(counts[i], dtype=np.int64)
        for q in queries:
            keys = keys * radix + modified_query_codes(mats, q)
        return keys, np.abs(determinant_many(mats))

    results = _map_units(unit, len(counts), workers)
    keys = np.concatenate([r[0] for r in results])
    dets = np.concatenate([r[1] for r in results])
    leaves, inverse, leaf_counts = np.unique(keys, return_inverse=True, return_counts=True)
    heavy_cut = cfg.trials / (4.0 * leaves.size)
    heavy = np.flatnonzero(leaf_counts >= heavy_cut)
    rel_disps = []
    for leaf_idx in heavy:
        vals = dets[inverse == leaf_idx]
        vals = vals[vals > 0.0]
        if vals.size < 2:
            continue
        width = stats.p_dispersion(stats.ScalarSampleSet(np.log(vals)), p).width
        rel_disps.append(math.expm1(width))
    rel = np.array(rel_disps) if rel_disps else np.array([0.0])
    return [
        StatRow.info("strategy_height", float(h)),
        StatRow.info("realized_leaves", float(leaves.size)),
        StatRow.info("heavy_leaves", float(heavy.size)),
        StatRow.info("heavy_mass_fraction", float(leaf_counts[heavy].sum() / cfg.trials)),
        StatRow.info("rel_disp_min", float(np.min(rel))),
        StatRow.info("rel_disp_median", float(np.median(rel))),
    ]


def _length_estimation(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    log2n = math.log2(n)
    k = int(cfg.params.get("k", n * math.ceil(log2n)))
    eps = float(cfg.params.get("eps", 1.0 / n))
    target = float(cfg.params.get("target", 1.0 / math.sqrt(log2n)))
    threshold = float(cfg.params.get("success_rate", 0.75))
    t_max = float(cfg.params.get("t_max", DEFAULT_T_MAX))
    norm_floor = max(math.sqrt(n) - 4.0 * math.sqrt(log2n), 0.0)

    def unit(i: int) -> tuple[bool, int]:
        gen = stream.child(i).generator()
        while True:
            a = sampling.uniform_cube(n, gen)
            if np.linalg.norm(a) >= norm_floor:
                break
        est = estimate_length(lambda x: float(a @ x) <= 1.0, n, k, eps, gen, t_max=t_max)
        return abs(est.value - float(np.linalg.norm(a))) <= target, est.queries

    results = _map_units(unit, cfg.trials, workers)
    m = cfg.trials
    rate = sum(1 for ok, _ in results if ok) / m
    return [
        StatRow.checked("success_rate", rate, _binom_se(rate, m), threshold, "lower"),
        StatRow.info("target_error", target),
        StatRow.info("mean_queries", float(np.mean([q for _, q in results]))),
    ]


def _volume_recovery(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    floor = float(cfg.params.get("sigma_floor", 0.1))
    target = float(cfg.params.get("target", 0.05))
    expected_queries = n * n * recovery_steps(recovery_epsilon(n, floor, target))

    def unit(i: int) -> tuple[float, bool]:
        gen = stream.child(i).generator()
        while True:
            hidden = sampling.sample_matrix_Dprime(n, gen)
            if min_singular_value(hidden) >= floor:
                break
        oracle = EntryOracle(hidden)
        res = estimate_volume_via_recovery(oracle, n, floor, target_rel_error=target)
        true_vol = 2.0**n / abs(np.linalg.det(hidden))
        rel = abs(res.volume - true_vol) / true_vol
        return rel, res.queries == expected_queries

    results = _map_units(unit, cfg.trials, workers)
    rels = np.array([r[0] for r in results])
    exact = all(r[1] for r in results)
    return [
        StatRow.checked("rel_error_max", float(np.max(rels)), 0.0, target, "upper"),
        StatRow.checked(
            "frac_within_target", float(np.mean(rels <= target)), 0.0, 1.0, "two-sided"
        ),
        StatRow.checked("query_count_exact", 1.0 if exact else 0.0, 0.0, 1.0, "two-sided"),
        StatRow.info("expected_queries", float(expected_queries)),
        StatRow.info("rel_error_median", float(np.median(rels))),
    ]


def _nonadaptive(cfg: ExperimentConfig, stream: RngStream, workers: int) -> list[StatRow]:
    n = cfg.n
    radius_factor = float(cfg.params.get("radius_factor", 1.5))
    pilot_trials = int(cfg.params.get("pilot", 4096))
    query = np.zeros((1, n))
    query[0, 0] = radius_factor * n
    classifier = bayes_optimal_classifier(query, n, stream.child(0), pilot_trials=pilot_trials)
    counts = _chunk_counts(cfg.trials, 2048)
    offsets = np.concatenate([[0], np.cumsum(counts)])

    def unit(i: int) -> np.ndarray:
        hits = wins = 0
        for t in range(offsets[i], offsets[i + 1]):
            res = nonadaptive_trial(query, classifier, n, stream.child(1, t).generator())
            hits += res.hits
            wins += res.truth == res.guess
        return np.array([hits, wins], dtype=np.float64)

    acc = np.sum(_map_units(unit, len(counts), workers), axis=0)
    m = cfg.trials
    hit_rate, success = acc[0] / m, acc[1] / m
    hit_bound = n * (2.0 / (n * math.pi)) ** (n / 2)
    hit_se = _binom_se(hit_rate, m)
    success_se = math.hypot(_binom_se(success, m), hit_se)
    return [
        StatRow.checked("hit_rate", hit_rate, hit_se, hit_bound, "upper"),
        StatRow.checked("classifier_success", success, success_se, 0.5 + hit_rate, "upper"),
    ]


CATALOG: dict[str, tuple] = {
    "ball-moments": (_ball_moments, {"r"}, "moments of a uniform point in a ball"),
    "gaussian-tails": (_gaussian_tails, {"eps"}, "norm tails of a Gaussian vector"),
    "min-singular": (_min_singular, {"t"}, "smallest singular value of Gaussian matrices"),
    "expectation-volume": (
        _expectation_volume,
        set(),
        "E|X|^2 against the calibrated volume lower bound",
    ),
    "variance-polytope": (
        _variance_polytope,
        {"kind", "chains", "samples", "facet_power", "query_norm"},
        "norm variance and sigma_K^2 of cubes, leaf polytopes and random polytopes",
    ),
    "p1-p2-properties": (
        _p1_p2,
        {"alpha", "beta"},
        "short projections and row angles of random matrices",
    ),
    "det-dispersion": (
        _det_dispersion,
        {"p", "scale"},
        "determinant dispersion inside heavy leaves of a fixed strategy",
    ),
    "length-estimation": (
        _length_estimation,
        {"k", "eps", "target", "success_rate", "t_max"},
        "norm estimation by random projections and binary search",
    ),
    "volume-recovery": (
        _volume_recovery,
        {"sigma_floor", "target"},
        "entry-oracle volume recovery with query audit",
    ),
    "nonadaptive": (
        _nonadaptive,
        {"radius_factor", "pilot"},
        "brick vs double-brick nonadaptive distinguishing",
    ),
}

_EXP_INDEX = {name: i for i, name in enumerate(CATALOG)}


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ReportRecord:
    """Dispatch a configuration to its catalog entry.

    Deterministic for a fixed config: the worker count only spreads the
    work units over threads.
    """
    if cfg.name not in CATALOG:
        raise UnknownExperimentError(cfg.name)
    runner, allowed, _ = CATALOG[cfg.name]
    unknown = set(cfg.params) - allowed
    if unknown:
        raise ValueError(
            f"unknown parameter(s) {sorted(unknown)} for {cfg.name}; allowed: {sorted(allowed)}"
        )
    stream = RngStream(cfg.seed).child(_EXP_INDEX[cfg.name])
    t0 = time.perf_counter()
    rows = runner(cfg, stream, workers)
    return ReportRecord(config=cfg, statistics=rows, wall_time_s=time.perf_counter() - t0)


def finite_yao_check(costs, mu, nu, tol: float = 1e-12) -> tuple[float, float, bool]:
    """Finite minimax check: inf_a E_mu C <= sup_i E_nu C.

    ``costs`` is inputs x algorithms; ``mu`` weights inputs (rows), ``nu``
    weights algorithms (columns). Returns (lhs, rhs, holds).
    """
    c = np.asarray(costs, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    if c.ndim != 2 or mu.shape != (c.shape[0],) or nu.shape != (c.shape[1],):
        raise ValueError("shape mismatch between costs and the two distributions")
    for w in (mu, nu):
        if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > 1e-9:
            raise ValueError("distributions must be nonnegative and sum to 1")
    lhs = float(np.min(mu @ c))
    rhs = float(np.max(c @ nu))
    return lhs, rhs, lhs <= rhs + tol


def det_dispersion_crosscheck(n: int, trials: int, stream: RngStream) -> bool:
    """Leaf grouping vs ProductPart membership equivalence (small n).

    Samples matrices from D, groups them by the fixed strategy's transcript,
    folds each realized leaf's constraints into a ProductPart and verifies
    the part accepts exactly its own leaf's samples.
    """
    _, queries = det_dispersion_queries(n)
    gen = stream.generator()
    mats = sampling.sample_matrix_D(n, gen, size=trials)
    radix = 2 * n + 1
    keys = np.zeros(trials, dtype=np.int64)
    per_query_codes = []
    for q in queries:
        codes = modified_query_codes(mats, q)
        per_query_codes.append(codes)
        keys = keys * radix + codes
    for leaf in np.unique(keys):
        idx = np.flatnonzero(keys == leaf)
        part = ProductPart.full(n, "ball")
        for q, codes in zip(queries, per_query_codes):
            part = refine_product_part(part, q, answer_from_code(int(codes[idx[0]])))
        member = part.contains_many(mats)
        if not np.array_equal(member, keys == leaf):
            return False
    return True
