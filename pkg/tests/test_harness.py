"""Tests for the experiment runner, verification, reports, and the CLI."""

import numpy as np
import pytest

from dsom import (DeterminismError, ExperimentConfig, MatrixFile, Strategy,
                  UniformPoints, WordListFile, compare_traces, gen_uniform,
                  load_matrix, read_report, run_dsom, run_experiment,
                  save_matrix, sq_euclidean_matrix, verify_equivalence,
                  write_report, build_grid)
from dsom.cli import main as cli_main
from dsom.harness import load_dataset


class TestGenUniform:
    def test_deterministic(self):
        assert np.array_equal(gen_uniform(50, seed=3), gen_uniform(50, seed=3))
        assert not np.array_equal(gen_uniform(50, seed=3), gen_uniform(50, seed=4))

    def test_range_and_shape(self):
        pts = gen_uniform(500, seed=0)
        assert pts.shape == (500, 2)
        assert (pts >= 0.0).all() and (pts < 1.0).all()

    def test_matrix_from_500_points(self):
        m = sq_euclidean_matrix(gen_uniform(500, seed=1))
        assert m.n == 500

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            gen_uniform(0, seed=0)


class TestConfig:
    def test_requires_strategies(self):
        with pytest.raises(ValueError):
            ExperimentConfig(dataset=UniformPoints(10), rows=2, cols=2,
                             strategies=())

    def test_requires_iterations(self):
        with pytest.raises(ValueError):
            ExperimentConfig(dataset=UniformPoints(10), rows=2, cols=2,
                             iterations=0, strategies=("naive",))

    def test_strategy_strings_parsed(self):
        cfg = ExperimentConfig(dataset=UniformPoints(10), rows=2, cols=2,
                               strategies=("naive", "bnb-sc+memo"))
        assert cfg.strategies[0] == Strategy("naive")
        assert cfg.strategies[1].memoize

    def test_dataset_loaders(self, tmp_path):
        m = load_dataset(UniformPoints(30, seed=2))
        assert m.n == 30
        p = tmp_path / "m.txt"
        save_matrix(m, p)
        assert np.array_equal(load_dataset(MatrixFile(str(p))).values, m.values)


class TestVerifyEquivalence:
    def test_naive_vs_partial_sums_uniform(self):
        cfg = ExperimentConfig(
            dataset=UniformPoints(200, seed=6), rows=7, cols=7,
            iterations=40, strategies=("naive", "partial-sums"), seed=11)
        verdict = verify_equivalence(cfg)
        assert verdict.identical, str(verdict)

    def test_all_strategies_small_word_sample(self, tmp_path):
        from dsom import bundled_words
        words = bundled_words()[::8]  # ~300 words
        p = tmp_path / "w.txt"
        p.write_text("\n".join(words) + "\n")
        cfg = ExperimentConfig(
            dataset=WordListFile(str(p)), rows=7, cols=7, iterations=30,
            strategies=tuple(s.id for s in __import__("dsom").all_strategies()),
            seed=4)
        verdict = verify_equivalence(cfg)
        assert verdict.identical, str(verdict)

    def test_perturbed_strategy_divergence_located(self):
        # negative control: a strategy with inflated bounds must be flagged,
        # with the first divergent iteration and node reported
        rng = np.random.default_rng(20)
        matrix = sq_euclidean_matrix(rng.random((80, 2)))
        graph = build_grid(3, 3, "hexagonal")
        _, honest = run_dsom(matrix, graph, None, "bnb-full", seed=3,
                             iterations=25)
        _, rigged = run_dsom(matrix, graph, None, "bnb-full", seed=3,
                             iterations=25, _bound_offset=1e9)
        div = compare_traces(honest, rigged, "bnb-full", "bnb-full(rigged)")
        assert div is not None
        assert div.kind in ("prototypes", "assignment")
        assert div.iteration >= 0 and div.index >= 0
        assert "bnb-full(rigged)" in str(div)

    def test_needs_two_strategies(self):
        cfg = ExperimentConfig(dataset=UniformPoints(10), rows=2, cols=2,
                               strategies=("naive",))
        with pytest.raises(ValueError):
            verify_equivalence(cfg)


class TestRunExperiment:
    def make_config(self, strategies, n=80, iters=10):
        return ExperimentConfig(dataset=UniformPoints(n, seed=9), rows=3,
                                cols=3, iterations=iters,
                                strategies=strategies, seed=2)

    def test_single_strategy_report(self):
        report = run_experiment(self.make_config(("partial-sums",)),
                                timed_runs=3)
        assert len(report.results) == 1
        r = report.results[0]
        assert r.strategy_id == "partial-sums"
        assert len(r.cpu_seconds) == 3
        assert r.speedup_vs_reference == pytest.approx(1.0)
        assert r.mean_counters["score_evaluations"] == 80 * 9

    def test_speedup_against_reference(self):
        report = run_experiment(
            self.make_config(("partial-sums", "bnb-sc-ordered+memo")),
            timed_runs=3)
        assert report.reference_id == "partial-sums"
        by_id = {r.strategy_id: r for r in report.results}
        assert by_id["bnb-sc-ordered+memo"].speedup_vs_reference is not None

    def test_no_reference_no_speedup(self):
        report = run_experiment(self.make_config(("bnb-full",)), timed_runs=2)
        assert report.reference_id is None
        assert report.results[0].speedup_vs_reference is None

    def test_counters_averaged(self):
        report = run_experiment(self.make_config(("bnb-full",), iters=8),
                                timed_runs=2)
        c = report.results[0].mean_counters
        assert c["exhaustive_searches"] + c["pruned_classes"] == 9 * 8
        assert c["home_searches"] == 9

    def test_determinism_gate(self, monkeypatch):
        # doctor the comparison to simulate a nondeterministic strategy
        import dsom.harness as hmod
        real = hmod.compare_traces
        calls = {"n": 0}

        def flaky(a, b, ia="a", ib="b"):
            calls["n"] += 1
            if calls["n"] == 2:
                return hmod.TraceDivergence(ia, ib, 0, "prototypes", 0)
            return real(a, b, ia, ib)

        monkeypatch.setattr(hmod, "compare_traces", flaky)
        with pytest.raises(DeterminismError):
            run_experiment(self.make_config(("naive",)), timed_runs=3)


class TestReportIO:
    def test_round_trip(self, tmp_path):
        cfg = ExperimentConfig(dataset=UniformPoints(60, seed=1), rows=2,
                               cols=2, iterations=6,
                               strategies=("partial-sums", "bnb-sc"), seed=8)
        report = run_experiment(cfg, timed_runs=2)
        path = tmp_path / "report.csv"
        write_report(report, path)
        header, rows = read_report(path)
        assert header["iterations"] == "6"
        assert header["seed"] == "8"
        assert "t0" in header and "tf" in header
        assert [r["strategy"] for r in rows] == ["partial-sums", "bnb-sc"]
        assert rows[0]["n"] == "60" and rows[0]["m"] == "4"
        # full-precision fields survive the round trip
        assert float(rows[0]["final_energy"]) == report.results[0].final_energy
        assert float(rows[0]["median_cpu_s"]) == report.results[0].median_cpu_seconds


class TestCli:
    def test_pipeline(self, tmp_path, capsys):
        pts = tmp_path / "pts.txt"
        mat = tmp_path / "mat.txt"
        rep = tmp_path / "report.csv"
        assert cli_main(["gen-uniform", "--n", "40", "--seed", "3",
                         "--out", str(pts)]) == 0
        assert cli_main(["matrix", "--from-points", str(pts),
                         "--out", str(mat)]) == 0
        assert load_matrix(mat).n == 40
        assert cli_main(["run", "--matrix", str(mat), "--rows", "2", "--cols",
                         "2", "--iters", "5", "--strategies",
                         "partial-sums,bnb-full", "--seed", "1",
                         "--report", str(rep)]) == 0
        header, rows = read_report(rep)
        assert len(rows) == 2
        out = capsys.readouterr().out
        assert "speedup" in out

    def test_verify_ok(self, tmp_path):
        pts = tmp_path / "pts.txt"
        mat = tmp_path / "mat.txt"
        cli_main(["gen-uniform", "--n", "50", "--seed", "2", "--out", str(pts)])
        cli_main(["matrix", "--from-points", str(pts), "--out", str(mat)])
        rc = cli_main(["verify", "--matrix", str(mat), "--rows", "2", "--cols",
                       "3", "--iters", "8", "--strategies", "all", "--seed", "5"])
        assert rc == 0

    def test_matrix_from_words(self, tmp_path, capsys):
        w = tmp_path / "w.txt"
        w.write_text("love\nlover\nglove\n")
        mat = tmp_path / "m.txt"
        assert cli_main(["matrix", "--from-words", str(w), "--out", str(mat)]) == 0
        m = load_matrix(mat)
        assert m.values[0, 1] == 0.2

    def test_error_paths_nonzero(self, tmp_path, capsys):
        rc = cli_main(["matrix", "--from-points", str(tmp_path / "nope.txt"),
                       "--out", str(tmp_path / "m.txt")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err
        rc = cli_main(["run", "--matrix", str(tmp_path / "nope.txt"),
                       "--rows", "2", "--cols", "2", "--strategies", "naive",
                       "--report", str(tmp_path / "r.csv")])
        assert rc == 1
