from __future__ import annotations

import json
import math

import pytest

pytestmark = pytest.mark.e2e


class TestCommandLine:
    """End-to-end runs of every subcommand through a real process"""

    def test_spectrum_output_is_byte_stable(self, run_cli, cornell_config):
        first = run_cli("spectrum", "--config", cornell_config)
        second = run_cli("spectrum", "--config", cornell_config)

        assert first.returncode == 0, first.stderr
        assert first.stdout == second.stdout
        energies = [float(line.split(",")[1]) for line in first.stdout.splitlines()[1:]]
        expected = math.sqrt((13 + math.sqrt(189)) / 2)
        assert energies == pytest.approx([-expected, expected], abs=1e-10)

    def test_json_output_file(self, run_cli, cornell_config, tmp_path):
        out = tmp_path / "states.json"
        result = run_cli("spectrum", "--config", cornell_config, "--format", "json", "--out", str(out))

        assert result.returncode == 0, result.stderr
        assert result.stdout == ""
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["n"] == [0, 0]

    def test_exit_codes(self, run_cli, cornell_config):
        assert run_cli("spectrum", "--config", cornell_config, "--e-min", "0.1", "--e-max", "1").returncode == 3
        assert run_cli("spectrum", "--kind", "cornell", "--mass", "1").returncode == 2
        assert run_cli("wavefunction", "--config", cornell_config, "--samples", "8").returncode == 2
        assert (
            run_cli(
                "scan", "--config", cornell_config, "--param", "alpha", "--from", "0", "--to", "1", "--steps", "0"
            ).returncode
            == 2
        )

    def test_verify_ground_state(self, run_cli, cornell_config):
        result = run_cli("verify", "--config", cornell_config)
        assert result.returncode == 0, result.stderr

    def test_joint_without_solution(self, run_cli, cornell_config):
        result = run_cli(
            "joint", "--config", cornell_config, "--l", "1", "--free", "B", "--max-iter", "10", "--guess-energy", "3"
        )
        assert result.returncode == 4
        assert "did not converge" in result.stderr

    @pytest.mark.slow
    def test_selftest(self, run_cli):
        result = run_cli("selftest")
        assert result.returncode == 0, result.stdout + result.stderr
        assert result.stdout.count(",True,") == 4
