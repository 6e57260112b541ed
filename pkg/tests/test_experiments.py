"""Catalog dispatch, reports, CLI and the finite minimax checker."""
import json
import math
import os

import numpy as np
import pytest

from displab.experiments import (
    CATALOG,
    ExperimentConfig,
    UnknownExperimentError,
    finite_yao_check,
    run_experiment,
    write_report,
)
from displab.experiments.catalog import det_dispersion_crosscheck, det_dispersion_queries, leaf_polytope
from displab.experiments.cli import main as cli_main
from displab.experiments.reports import CSV_HEADER, StatRow, render_csv, render_json, roundtrip_json
from displab.rng import RngStream

SMOKE_CONFIGS = {
    "ball-moments": dict(n=5, trials=4000),
    "gaussian-tails": dict(n=12, trials=4000),
    "min-singular": dict(n=6, trials=400),
    "expectation-volume": dict(n=6, trials=4000),
    "variance-polytope": dict(n=6, trials=4000, params={"kind": "cube", "chains": 64}),
    "p1-p2-properties": dict(n=6, trials=500),
    "det-dispersion": dict(n=3, trials=20_000),
    "length-estimation": dict(n=16, trials=8),
    "volume-recovery": dict(n=4, trials=4),
    "nonadaptive": dict(n=5, trials=400, params={"pilot": 256}),
}


class TestCatalogDispatch:
    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_every_entry_runs(self, name):
        spec = SMOKE_CONFIGS[name]
        cfg = ExperimentConfig(
            name=name, n=spec["n"], trials=spec["trials"], seed=7, params=spec.get("params", {})
        )
        rec = run_experiment(cfg)
        assert rec.statistics
        assert rec.wall_time_s >= 0.0
        assert rec.verdict_label() in ("pass", "fail", "informational")

    def test_unknown_name_lists_catalog(self):
        cfg = ExperimentConfig(name="nonsense", n=4, trials=10, seed=0)
        with pytest.raises(UnknownExperimentError, match="ball-moments"):
            run_experiment(cfg)

    def test_unknown_param_rejected(self):
        cfg = ExperimentConfig(name="ball-moments", n=4, trials=10, seed=0, params={"zzz": 1})
        with pytest.raises(ValueError, match="zzz"):
            run_experiment(cfg)

    def test_leaf_and_facets_kinds(self):
        rec = run_experiment(
            ExperimentConfig(
                "variance-polytope", n=8, trials=2, seed=3,
                params={"kind": "leaf", "samples": 2000, "chains": 64},
            )
        )
        assert any(r.label == "frac_scaled_var_above_c" for r in rec.statistics)
        rec2 = run_experiment(
            ExperimentConfig(
                "variance-polytope", n=6, trials=2, seed=3,
                params={"kind": "facets", "samples": 2000, "chains": 64},
            )
        )
        assert rec2.passed is None  # informational


class TestFiniteYao:
    def test_symmetric_example(self):
        lhs, rhs, holds = finite_yao_check([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5])
        assert (lhs, rhs, holds) == (0.5, 0.5, True)

    def test_single_input_equality_case(self):
        costs = [[0.2, 0.7, 0.4]]
        nu = [0.0, 0.0, 1.0]
        lhs, rhs, holds = finite_yao_check(costs, [1.0], nu)
        assert holds
        best = [0.0, 0.0, 0.0]
        best[int(np.argmin(costs[0]))] = 1.0
        lhs2, rhs2, _ = finite_yao_check(costs, [1.0], best)
        assert lhs2 <= rhs2
        assert rhs2 == pytest.approx(min(costs[0]))

    def test_random_instances(self):
        gen = RngStream(95).generator()
        for _ in range(100):
            c = gen.uniform(0, 1, size=(5, 7))
            mu = gen.random(5)
            mu /= mu.sum()
            nu = gen.random(7)
            nu /= nu.sum()
            _, _, holds = finite_yao_check(c, mu, nu)
            assert holds

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            finite_yao_check(np.zeros((2, 2)), [1.0], [0.5, 0.5])


class TestReports:
    def _record(self, seed=11):
        cfg = ExperimentConfig("ball-moments", n=5, trials=3000, seed=seed)
        return run_experiment(cfg)

    def test_csv_schema(self, tmp_path):
        rec = self._record()
        path = tmp_path / "r.csv"
        write_report(rec, "csv", path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == CSV_HEADER == "experiment,n,trials,seed,label,value,stderr,bound,pass"
        assert len(lines) == 1 + len(rec.statistics)
        assert lines[1].startswith("ball-moments,5,3000,11,norm_sq_mean,")

    def test_json_roundtrip(self, tmp_path):
        rec = self._record()
        path = tmp_path / "r.json"
        write_report(rec, "json", path)
        objs = roundtrip_json(path.read_text())
        assert len(objs) == 1
        obj = objs[0]
        assert obj["experiment"] == "ball-moments"
        assert obj["n"] == 5 and obj["trials"] == 3000 and obj["seed"] == 11
        assert len(obj["statistics"]) == len(rec.statistics)
        assert obj["pass"] in ("pass", "fail", "informational")

    def test_rerun_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_report(self._record(), "csv", p1)
        write_report(self._record(), "csv", p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_workers_do_not_change_bytes(self, tmp_path):
        cfg = ExperimentConfig("min-singular", n=5, trials=2500, seed=4)
        rec1 = run_experiment(cfg, workers=1)
        rec8 = run_experiment(cfg, workers=8)
        p1, p8 = tmp_path / "w1.json", tmp_path / "w8.json"
        write_report(rec1, "json", p1)
        write_report(rec8, "json", p8)
        assert p1.read_bytes() == p8.read_bytes()

    def test_informational_rows_have_no_verdict(self):
        row = StatRow.info("x", 1.0)
        assert row.passed is None and row.bound is None
        checked = StatRow.checked("y", 1.0, 0.1, 1.2, "two-sided")
        assert checked.passed is True
        with pytest.raises(ValueError):
            StatRow.checked("z", 1.0, 0.1, 1.0, "sideways")

    def test_render_multiple_records(self):
        recs = [self._record(seed=1), self._record(seed=2)]
        csv_text = render_csv(recs)
        assert csv_text.count("\n") == 1 + 2 * len(recs[0].statistics)
        objs = roundtrip_json(render_json(recs))
        assert [o["seed"] for o in objs] == [1, 2]


class TestCli:
    def test_list(self, capsys):
        assert cli_main(["list"]) == 0
        out = capsys.readouterr().out
        for name in CATALOG:
            assert name in out

    def test_run_writes_outputs(self, tmp_path, capsys):
        out_csv = tmp_path / "out.csv"
        plot = tmp_path / "out.svg"
        code = cli_main(
            [
                "run", "ball-moments", "--n", "4,6", "--trials", "3000", "--seed", "2",
                "--param", "r=1.0", "--out", str(out_csv), "--format", "csv",
                "--plot", str(plot),
            ]
        )
        assert code == 0
        text = out_csv.read_text()
        assert text.startswith(CSV_HEADER)
        assert ",4,3000,2," in text and ",6,3000,2," in text
        assert plot.exists() and plot.stat().st_size > 0
        assert "[pass]" in capsys.readouterr().out

    def test_unknown_experiment_is_usage_error(self, capsys):
        assert cli_main(["run", "bogus", "--n", "4"]) == 2
        assert "valid names" in capsys.readouterr().err

    def test_bad_param_is_usage_error(self, capsys):
        assert cli_main(["run", "ball-moments", "--n", "4", "--param", "zzz=1"]) == 2

    def test_failing_bound_gives_exit_one(self, tmp_path):
        # beta close to 1 makes the P2 threshold nearly 1: certain failure
        code = cli_main(
            [
                "run", "p1-p2-properties", "--n", "8", "--trials", "400",
                "--seed", "3", "--param", "beta=1.0001",
            ]
        )
        assert code == 1

    def test_json_output(self, tmp_path):
        out = tmp_path / "r.json"
        code = cli_main(
            ["run", "gaussian-tails", "--n", "10", "--trials", "2000", "--seed", "5",
             "--out", str(out), "--format", "json"]
        )
        assert code == 0
        assert json.loads(out.read_text())["experiment"] == "gaussian-tails"


class TestDetDispersionMachinery:
    def test_height_formula(self):
        for n, expected in [(2, 0), (3, 2), (4, 4)]:
            h, qs = det_dispersion_queries(n)
            assert h == expected == int((n * n - 2) / math.log2(2 * n + 1))
            assert qs.shape == (h, n)

    def test_query_pattern(self):
        _, qs = det_dispersion_queries(4)
        assert np.array_equal(qs[0], [1, 0, 0, 0])
        assert np.array_equal(qs[3], [0, 0, 0, 1])

    def test_leaf_grouping_matches_product_parts(self):
        assert det_dispersion_crosscheck(3, 4000, RngStream(96))


class TestLeafPolytope:
    def test_construction(self):
        poly, a_star = leaf_polytope(8, RngStream(97))
        assert poly.num_facets == 2 * 8 + 7
        assert poly.contains(a_star)
        assert np.all(np.abs(a_star) <= 1.0)
