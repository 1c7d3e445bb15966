"""CLI behavior: commands, config handling, exit codes, determinism."""

import etlab.checks as checks
import etlab.cli as cli


def run_cli(args):
    return cli.main(args)


class TestPerturbativeCommand:
    def test_worked_values(self, capsys):
        code = run_cli(
            ["perturbative", "--n", "3", "--gamma", "1e-3", "--omega", "1", "--delta", "10", "--k", "3"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "0.01" in out  # omega_k
        assert "0.03" in out  # p'
        assert "does not reduce" in out

    def test_breakeven_true_case(self, capsys):
        code = run_cli(
            ["perturbative", "--n", "3", "--gamma", "1e-6", "--omega", "1", "--delta", "10", "--k", "3"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "reduces" in out

    def test_invalid_params_exit_1(self, capsys):
        code = run_cli(
            ["perturbative", "--n", "0", "--gamma", "1e-3", "--omega", "1", "--delta", "10", "--k", "3"]
        )
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestEthInspectCommand:
    def test_steane_report_shows_counterexample(self, capsys):
        code = run_cli(["eth", "inspect", "--code", "steane7"])
        out = capsys.readouterr().out
        assert code == 0
        assert "sign -1" in out
        assert "True" in out

    def test_bitflip_report(self, capsys):
        code = run_cli(["eth", "inspect", "--code", "bitflip3"])
        out = capsys.readouterr().out
        assert code == 0
        assert "body-ness:           3" in out
        assert "controlled body-ness: 4" in out

    def test_unknown_code_exit_1(self, capsys):
        assert run_cli(["eth", "inspect", "--code", "shor9"]) == 1

    def test_bad_kinds_exit_1(self, capsys):
        assert run_cli(["eth", "inspect", "--code", "perfect5", "--kinds", "XQ"]) == 1
        assert "error" in capsys.readouterr().err


class TestSweepCommand:
    def test_tiny_fig1a_sweep(self, tmp_path, capsys):
        out = tmp_path / "res"
        code = run_cli(
            ["sweep", "fig1a", "--gamma-points", "2", "--out", str(out), "--plot"]
        )
        assert code == 0
        csv_path = out / "fig1a-lindblad.csv"
        svg_path = out / "fig1a-lindblad.svg"
        assert csv_path.exists() and svg_path.exists()
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "gamma_over_omega,scenario,probability,stderr,method"
        assert len(lines) == 1 + 3 * 4  # (2 log points + zero) x 4 scenarios

    def test_seeded_mc_sweep_byte_identical(self, tmp_path):
        args = [
            "sweep", "fig1a", "--method", "mc", "--traj", "40", "--seed", "42",
            "--gamma-points", "2", "--gamma-min", "0.05", "--gamma-max", "0.1",
        ]
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli(args + ["--out", str(out)]) == 0
            outs.append((out / "fig1a-mc.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_config_file_applies(self, tmp_path):
        cfg = tmp_path / "sweep.ini"
        cfg.write_text("[sweep]\ngamma_points = 2\nmethod = lindblad\nout = %s\n" % (tmp_path / "r"))
        assert run_cli(["sweep", "fig1a", "--config", str(cfg)]) == 0
        assert (tmp_path / "r" / "fig1a-lindblad.csv").exists()

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "sweep.ini"
        cfg.write_text("[sweep]\ngamma_points = 5\n")
        out = tmp_path / "r"
        assert run_cli(
            ["sweep", "fig1a", "--config", str(cfg), "--gamma-points", "1", "--out", str(out)]
        ) == 0
        lines = (out / "fig1a-lindblad.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 4  # zero + one log point

    def test_unknown_config_key_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "sweep.ini"
        cfg.write_text("[sweep]\ngamma_pionts = 5\n")
        assert run_cli(["sweep", "fig1a", "--config", str(cfg)]) == 1
        assert "gamma_pionts" in capsys.readouterr().err

    def test_bad_config_value_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "sweep.ini"
        cfg.write_text("[sweep]\ntraj = many\n")
        assert run_cli(["sweep", "fig1a", "--config", str(cfg)]) == 1
        assert "traj" in capsys.readouterr().err

    def test_missing_config_file_exit_1(self, capsys):
        assert run_cli(["sweep", "fig1a", "--config", "/no/such.ini"]) == 1

    def test_bad_flag_exit_1(self, capsys):
        assert run_cli(["sweep", "fig1c"]) == 1

    def test_bad_method_exit_1(self, capsys):
        assert run_cli(["sweep", "fig1a", "--method", "exact"]) == 1

    def test_numerical_failure_exit_2(self, tmp_path, capsys):
        # enormous gamma with a huge step blows up the integrator
        code = run_cli(
            [
                "sweep", "fig1a", "--dt", "0.5", "--gamma-min", "30", "--gamma-max", "50",
                "--gamma-points", "1", "--out", str(tmp_path / "r"),
            ]
        )
        assert code == 2
        assert "numerical failure" in capsys.readouterr().err


class TestVerifyCommand:
    def test_exit_0_when_all_pass(self, monkeypatch, capsys):
        monkeypatch.setattr(checks, "CHECKS", [("fake.pass", lambda: "ok")])
        assert run_cli(["verify"]) == 0
        out = capsys.readouterr().out
        assert "[PASS] fake.pass" in out
        assert "1/1" in out

    def test_exit_3_on_invariant_failure(self, monkeypatch, capsys):
        def boom():
            raise checks.CheckFailure("broken")

        monkeypatch.setattr(
            checks, "CHECKS", [("fake.pass", lambda: "ok"), ("fake.fail", boom)]
        )
        assert run_cli(["verify"]) == 3
        out = capsys.readouterr().out
        assert "[FAIL] fake.fail" in out
        assert "1/2" in out


class TestConfigValidation:
    def test_gamma_range_validation(self, capsys):
        assert run_cli(["sweep", "fig1a", "--gamma-min", "-1"]) == 1

    def test_negative_seed(self, capsys):
        assert run_cli(["sweep", "fig1a", "--seed", "-2"]) == 1

    def test_zero_traj(self, capsys):
        assert run_cli(["sweep", "fig1a", "--method", "mc", "--traj", "0"]) == 1
