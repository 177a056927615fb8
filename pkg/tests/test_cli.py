import json

from nocldpc.cli import main


def run(argv):
    return main(argv)


class TestInspect:
    def test_bundled_code_summary(self, tmp_path, capsys):
        rc = run(["inspect", "--code", "wimax_2304_1152", "--out", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "7296" in out
        data = json.loads((tmp_path / "inspect.json").read_text())
        assert data["messages_per_iteration"] == 7296
        assert data["n_cols"] == 2304 and data["n_rows"] == 1152
        assert "manifest_hash" in data

    def test_toy_alist_file(self, tmp_path, capsys):
        alist = tmp_path / "toy.alist"
        alist.write_text(
            "6 3\n2 3\n2 2 2 1 1 1\n3 3 3\n1 3\n1 2\n2 3\n1\n2\n3\n1 2 4\n2 3 5\n1 3 6\n"
        )
        rc = run(["inspect", "--code", str(alist), "--format", "alist"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "6 x 3" in out

    def test_missing_file(self, capsys):
        rc = run(["inspect", "--code", "no_such_code_xyz"])
        assert rc != 0
        assert "error" in capsys.readouterr().err


class TestPartitionAndSimulate:
    def test_partition_writes_mapping(self, tmp_path):
        rc = run([
            "partition", "--code", "wimax_576_288", "--torus-n", "5",
            "--seed", "3", "--rp-baseline", "10", "--out", str(tmp_path),
        ])
        assert rc == 0
        summary = json.loads((tmp_path / "partition.json").read_text())
        assert summary["cutset_messages"] < summary["rp_baseline_mean"]
        assert (tmp_path / "mapping.json").exists()

    def test_simulate_and_genconfig(self, tmp_path, capsys):
        rc = run([
            "simulate", "--code", "wimax_576_288", "--torus-n", "5",
            "--seed", "2", "--out", str(tmp_path),
        ])
        assert rc == 0
        rc = run([
            "genconfig", "--code", "wimax_576_288",
            "--mapping", str(tmp_path / "mapping.json"),
            "--trace", str(tmp_path / "trace.json"),
            "--binary", "--out", str(tmp_path),
        ])
        assert rc == 0
        assert (tmp_path / "config.json").exists()
        assert (tmp_path / "config_rm.bin").exists()
        summary = json.loads((tmp_path / "simulate.json").read_text())
        assert summary["k_i"] > 0


class TestSwitch:
    def test_worked_case_passes(self, tmp_path, capsys):
        rc = run(["switch", "--k1", "491", "--k2", "466", "--torus-n", "5",
                  "--out", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "minimum 766" in out
        assert "PASS" in out

    def test_forced_tiny_buffer_fails(self, capsys):
        rc = run(["switch", "--k1", "491", "--k2", "466", "--torus-n", "5",
                  "--buffer-size", "700"])
        assert rc == 1
        out = capsys.readouterr().out
        assert "FAIL" in out

    def test_same_code_to_itself(self, capsys):
        rc = run(["switch", "--k1", "300", "--k2", "300", "--torus-n", "5"])
        assert rc == 0


class TestBerAndThroughput:
    def test_ber_csv(self, tmp_path, capsys):
        rc = run([
            "ber", "--code", "wimax_576_288", "--snr", "1.5,2.5",
            "--min-errors", "30", "--max-frames", "64", "--itmax", "4",
            "--seed", "5", "--out", str(tmp_path),
        ])
        assert rc == 0
        lines = (tmp_path / "ber.csv").read_text().strip().splitlines()
        assert lines[0].startswith("snr_db,")
        assert len(lines) == 3
        data = json.loads((tmp_path / "ber.json").read_text())
        assert len(data["points"]) == 2

    def test_throughput_formula(self, capsys):
        rc = run(["throughput", "--k-i", "843", "--f-clk", "300e6",
                  "--itmax", "10", "--block-length", "2304"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "82.0 Mb/s" in out

    def test_throughput_scales(self, capsys):
        run(["throughput", "--k-i", "843", "--f-clk", "300e6",
             "--itmax", "5", "--block-length", "2304"])
        out = capsys.readouterr().out
        assert "164.0 Mb/s" in out


class TestPipeline:
    def test_end_to_end_small_code(self, tmp_path, capsys):
        rc = run([
            "pipeline", "--code", "wimax_576_288", "--torus-n", "5",
            "--seed", "1", "--check-frames", "3", "--rp-baseline", "5",
            "--out", str(tmp_path),
        ])
        assert rc == 0
        out = capsys.readouterr().out
        assert "replay      PASS" in out
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["replay_matches_golden"] is True
        assert report["cut_below_random_baseline"] is True
        for name in ("mapping.json", "trace.json", "config.json"):
            assert (tmp_path / name).exists()

    def test_single_pe_degenerate(self, tmp_path, capsys):
        rc = run([
            "pipeline", "--code", "wimax_576_288", "--torus-n", "1",
            "--seed", "1", "--check-frames", "2", "--rp-baseline", "2",
            "--out", str(tmp_path),
        ])
        assert rc == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["network_messages"] == 0
        assert report["k_i"] == 0
        assert report["replay_matches_golden"] is True
        # with one PE there is no traffic to beat, so only replay gates
        assert "PASS" in capsys.readouterr().out
