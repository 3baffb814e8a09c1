from __future__ import annotations

from unittest import mock

import pytest

import app
from src.common.constants import EXIT_CONFIG_ERROR, EXIT_NO_ROOT, EXIT_OK

CORNELL_FLAGS = ["--kind", "cornell", "--mass", "1", "--omega-osc", "1", "--alpha", "1", "--A", "1"]


def test_spectrum_to_stdout(capsys):
    assert app.main(["spectrum", *CORNELL_FLAGS]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,E,residual_energy,residual_coeff"
    assert len(lines) == 3


def test_spectrum_is_deterministic(capsys):
    app.main(["spectrum", *CORNELL_FLAGS, "--format", "json"])
    first = capsys.readouterr().out
    app.main(["spectrum", *CORNELL_FLAGS, "--format", "json"])
    assert capsys.readouterr().out == first


def test_missing_required_key(capsys):
    assert app.main(["spectrum", "--kind", "cornell", "--omega-osc", "1", "--A", "1"]) == EXIT_CONFIG_ERROR
    assert "mass" in capsys.readouterr().err


def test_no_root_exit_code():
    assert app.main(["spectrum", *CORNELL_FLAGS, "--e-min", "0.1", "--e-max", "1"]) == EXIT_NO_ROOT


@pytest.mark.parametrize(
    "argv",
    [
        ["scan", *CORNELL_FLAGS, "--param", "alpha", "--from", "0", "--to", "1", "--steps", "0"],
        ["wavefunction", *CORNELL_FLAGS, "--samples", "8"],
        ["joint", *CORNELL_FLAGS],
        ["nonsense"],
    ],
)
def test_argument_errors(argv):
    assert app.main(argv) == EXIT_CONFIG_ERROR


def test_selftest_dispatch(capsys):
    check = mock.Mock(passed=True, detail="ok")
    check.name = "minkowski_ladder"
    with mock.patch("src.workflow.commands.run_selftest", return_value=[check]):
        assert app.main(["selftest"]) == EXIT_OK
    assert "minkowski_ladder,True,ok" in capsys.readouterr().out


def test_logger_is_released_after_run():
    with mock.patch("app.cleanup_session_logger") as cleanup:
        app.main(["spectrum", *CORNELL_FLAGS])
    cleanup.assert_called_once()
