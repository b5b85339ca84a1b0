import numpy as np
import pytest

from alist.cli import main
from alist.io import read_evolution_report, read_potential, read_scattering, write_potential
from alist.lattice import Potential


def potential_file(tmp_path, values, n_min=0, name="q.json"):
    path = tmp_path / name
    write_potential(Potential(n_min, np.asarray(values, dtype=complex)), path)
    return path


class TestScatterCommand:
    def test_single_site(self, tmp_path, capsys):
        inp = potential_file(tmp_path, [0.5])
        out = tmp_path / "scat.json"
        code = main(["scatter", "--input", str(inp), "--output", str(out), "--grid", "64"])
        assert code == 0
        data = read_scattering(out)
        np.testing.assert_allclose(data.r.samples, 0.5 * data.grid.z, atol=1e-13)
        assert data.c_inf == pytest.approx(0.75)
        printed = capsys.readouterr().out
        assert "c_inf" in printed and "sup|r|" in printed and "hk_norm(r, 3)" in printed

    def test_empty_potential(self, tmp_path):
        inp = potential_file(tmp_path, [])
        out = tmp_path / "scat.json"
        assert main(["scatter", "--input", str(inp), "--output", str(out), "--grid", "64"]) == 0
        data = read_scattering(out)
        np.testing.assert_allclose(data.r.samples, 0.0, atol=1e-15)

    def test_schema_violation_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"oops": 1}')
        assert main(["scatter", "--input", str(bad)]) == 2

    def test_invariant_violation_exits_3(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n_min": 0, "q": [[1.0, 0.0]]}')
        assert main(["scatter", "--input", str(bad)]) == 3


class TestReconstructCommand:
    def test_zero_reflection(self, tmp_path):
        inp = potential_file(tmp_path, [])
        scat = tmp_path / "scat.json"
        main(["scatter", "--input", str(inp), "--output", str(scat), "--grid", "64"])
        out = tmp_path / "rec.json"
        code = main([
            "reconstruct", "--input", str(scat), "--output", str(out),
            "--window", "-3", "3", "--grid", "64",
        ])
        assert code == 0
        q = read_potential(out)
        np.testing.assert_allclose(q.values, 0.0, atol=1e-12)

    def test_single_site_round_trip_with_csv(self, tmp_path):
        inp = potential_file(tmp_path, [0.5])
        scat = tmp_path / "scat.json"
        main(["scatter", "--input", str(inp), "--output", str(scat), "--grid", "128"])
        out = tmp_path / "rec.json"
        code = main([
            "reconstruct", "--input", str(scat), "--output", str(out),
            "--window", "-2", "2", "--grid", "128",
        ])
        assert code == 0
        q = read_potential(out)
        assert q.at(0) == pytest.approx(0.5, abs=1e-10)
        assert abs(q.at(1)) <= 1e-10
        csv_text = (tmp_path / "rec.sites.csv").read_text()
        assert csv_text.splitlines()[0] == "n,re_q,im_q,residual,iterations"
        assert len(csv_text.strip().splitlines()) == 6

    def test_missing_window_exits_2(self, tmp_path):
        inp = potential_file(tmp_path, [0.5])
        scat = tmp_path / "scat.json"
        main(["scatter", "--input", str(inp), "--output", str(scat), "--grid", "64"])
        assert main(["reconstruct", "--input", str(scat)]) == 2

    def test_nonconvergence_exits_4(self, tmp_path):
        inp = potential_file(tmp_path, [0.5])
        scat = tmp_path / "scat.json"
        main(["scatter", "--input", str(inp), "--output", str(scat), "--grid", "64"])
        code = main([
            "reconstruct", "--input", str(scat), "--window", "-1", "-1",
            "--grid", "64", "--max-iter", "1", "--tol", "1e-12",
        ])
        assert code == 4


class TestRoundtripCommand:
    def test_single_site_passes(self, tmp_path, capsys):
        inp = potential_file(tmp_path, [0.5])
        code = main(["roundtrip", "--input", str(inp), "--grid", "128"])
        out = capsys.readouterr().out
        assert code == 0
        assert "FAIL" not in out
        assert "round-trip relative l2 error" in out
        assert "stage timings" in out

    def test_seeded_random_passes(self, capsys):
        code = main(["roundtrip", "--seed", "3", "--sites", "8", "--grid", "256"])
        assert code == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_all_zero_potential_passes(self, tmp_path, capsys):
        inp = potential_file(tmp_path, [0.0, 0.0])
        code = main(["roundtrip", "--input", str(inp), "--grid", "64"])
        assert code == 0
        assert "FAIL" not in capsys.readouterr().out


class TestEvolveCommand:
    def test_zero_time_both(self, tmp_path):
        inp = potential_file(tmp_path, [0.3])
        out = tmp_path / "report.json"
        code = main([
            "evolve", "--input", str(inp), "--t", "0", "--method", "both",
            "--output", str(out), "--grid", "128", "--window", "-8", "8",
        ])
        assert code == 0
        doc = read_evolution_report(out)
        assert doc["sup_error"] <= 1e-8
        assert doc["q_rk4"] is not None

    def test_zero_potential(self, tmp_path):
        inp = potential_file(tmp_path, [])
        out = tmp_path / "report.json"
        code = main([
            "evolve", "--input", str(inp), "--t", "0.3", "--method", "both",
            "--output", str(out), "--grid", "64", "--window", "-6", "6", "--dt", "0.01",
        ])
        assert code == 0
        doc = read_evolution_report(out)
        assert doc["sup_error"] == pytest.approx(0.0, abs=1e-12)
        assert all(abs(re) < 1e-12 and abs(im) < 1e-12 for re, im in doc["q_ist"]["q"])

    def test_window_breach_exits_5(self, tmp_path):
        inp = potential_file(tmp_path, [0.3])
        with pytest.warns(RuntimeWarning):
            code = main([
                "evolve", "--input", str(inp), "--t", "2.0", "--method", "ist",
                "--grid", "128", "--window", "-2", "2",
            ])
        assert code == 5

    def test_multiple_times_emit_series_csv(self, tmp_path):
        inp = potential_file(tmp_path, [0.3])
        out = tmp_path / "report.json"
        code = main([
            "evolve", "--input", str(inp), "--t", "0.1", "0.2", "0.3",
            "--method", "ist", "--output", str(out),
            "--grid", "128", "--window", "-16", "16",
        ])
        assert code == 0
        lines = (tmp_path / "report.series.csv").read_text().strip().splitlines()
        assert lines[0] == "t,sup_error,l2_error,c_inf_drift,c_inf_drift_rk4"
        assert len(lines) == 4
        assert [float(l.split(",")[0]) for l in lines[1:]] == [0.1, 0.2, 0.3]
        doc = read_evolution_report(out)
        assert doc["t"] == 0.3

    def test_plot_emission(self, tmp_path):
        pytest.importorskip("matplotlib")
        inp = potential_file(tmp_path, [0.3])
        prefix = str(tmp_path / "fig")
        code = main([
            "evolve", "--input", str(inp), "--t", "0.2", "--method", "both",
            "--grid", "128", "--window", "-12", "12", "--dt", "0.005",
            "--plot", prefix,
        ])
        assert code == 0
        assert (tmp_path / "fig_potential.png").exists()
        assert (tmp_path / "fig_reflection.png").exists()


class TestThreadsEnv:
    def test_thread_env_respected(self, tmp_path, monkeypatch):
        inp = potential_file(tmp_path, [0.4])
        scat = tmp_path / "scat.json"
        main(["scatter", "--input", str(inp), "--output", str(scat), "--grid", "64"])
        results = {}
        for threads in ("1", "2"):
            monkeypatch.setenv("ALIST_THREADS", threads)
            out = tmp_path / f"rec{threads}.json"
            assert main([
                "reconstruct", "--input", str(scat), "--output", str(out),
                "--window", "-2", "2", "--grid", "64",
            ]) == 0
            results[threads] = read_potential(out).values
        np.testing.assert_array_equal(results["1"], results["2"])


class TestConfigValidation:
    def test_bad_grid_rejected(self, tmp_path):
        inp = potential_file(tmp_path, [0.1])
        assert main(["scatter", "--input", str(inp), "--grid", "10"]) == 3

    def test_bad_tol_rejected(self, tmp_path):
        inp = potential_file(tmp_path, [0.1])
        assert main(["scatter", "--input", str(inp), "--tol", "0.5"]) == 3
