from __future__ import annotations

import io
import math
from unittest import mock

import pandas as pd
import pytest

from src.common.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_NO_CONVERGENCE,
    EXIT_NO_ROOT,
    EXIT_OK,
    EXIT_VERIFY_FAILED,
)
from src.common.exceptions import (
    ConfigError,
    DegenerateIndicial,
    EvalError,
    NoConvergence,
    NoRootFound,
)
from src.physics.oracle import GridSpec, OracleResult
from src.workflow.commands import (
    cmd_joint,
    cmd_scan,
    cmd_spectrum,
    cmd_verify,
    cmd_wavefunction,
    exit_code_for,
)
from src.workflow.config import RunConfig

CORNELL = RunConfig(kind="cornell", mass=1.0, omega_osc=1.0, alpha=1.0, A=1.0)


def read_csv(path) -> pd.DataFrame:
    with open(path, encoding="utf-8") as f:
        return pd.read_csv(io.StringIO(f.read()))


@pytest.mark.parametrize(
    "error, code",
    [
        (ConfigError("x"), EXIT_CONFIG_ERROR),
        (DegenerateIndicial("x"), EXIT_CONFIG_ERROR),
        (NoRootFound("x"), EXIT_NO_ROOT),
        (NoConvergence("x"), EXIT_NO_CONVERGENCE),
        (EvalError("x"), EXIT_NO_CONVERGENCE),
    ],
)
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_exit_code_reraises_foreign_errors():
    with pytest.raises(KeyError):
        exit_code_for(KeyError("x"))


def test_spectrum_writes_both_branches(tmp_path):
    out = tmp_path / "spectrum.csv"
    cfg = RunConfig(**{**CORNELL.__dict__, "out": str(out)})

    assert cmd_spectrum(cfg) == EXIT_OK
    table = read_csv(out)
    assert list(table.columns) == ["n", "E", "residual_energy", "residual_coeff"]
    assert table["E"].tolist() == pytest.approx(
        [-math.sqrt((13 + math.sqrt(189)) / 2), math.sqrt((13 + math.sqrt(189)) / 2)], abs=1e-10
    )


def test_spectrum_without_root():
    cfg = RunConfig(**{**CORNELL.__dict__, "e_min": 0.1, "e_max": 1.0})
    with pytest.raises(NoRootFound):
        cmd_spectrum(cfg)
    assert exit_code_for(NoRootFound("x")) == EXIT_NO_ROOT


def test_joint_writes_free_parameter(tmp_path):
    out = tmp_path / "joint.json"
    cfg = RunConfig(
        kind="cornell", mass=1.0, omega_osc=1.0, alpha=0.3, A=1.0, l=1.0, format="json", out=str(out)
    )
    assert cmd_joint(cfg, "alpha", guess_energy=2.5) == EXIT_OK
    content = out.read_text(encoding="utf-8")
    assert '"free": [\n    "alpha"\n  ]' in content


def test_wavefunction_is_normalized(tmp_path):
    out = tmp_path / "psi.csv"
    cfg = RunConfig(**{**CORNELL.__dict__, "samples": 501, "out": str(out)})

    assert cmd_wavefunction(cfg) == EXIT_OK
    table = read_csv(out)
    assert list(table.columns) == ["x", "psi"]
    assert len(table) == 501
    assert (table["x"] > 0).all()


def test_verify_passes_for_ground_state(tmp_path):
    cfg = RunConfig(**{**CORNELL.__dict__, "out": str(tmp_path / "verify.csv")})
    assert cmd_verify(cfg) == EXIT_OK


def test_verify_failure_exit_code(tmp_path):
    cfg = RunConfig(**{**CORNELL.__dict__, "out": str(tmp_path / "verify.csv")})
    bad = OracleResult(
        energy=3.0,
        eig_index=1,
        mismatch=1.0,
        overlap=0.5,
        grid=GridSpec(x_min=1e-4, x_max=5.0),
        target=10.0,
    )
    with mock.patch("src.workflow.commands.verify", return_value=bad):
        assert cmd_verify(cfg) == EXIT_VERIFY_FAILED


def test_verify_accepts_mismatch_at_the_tolerance(tmp_path):
    cfg = RunConfig(**{**CORNELL.__dict__, "out": str(tmp_path / "verify.csv")})
    borderline = OracleResult(
        energy=3.0,
        eig_index=0,
        mismatch=0.002,
        overlap=0.999,
        grid=GridSpec(x_min=1e-4, x_max=5.0),
        target=2.0,
    )
    assert borderline.relative_mismatch == 1e-3
    with mock.patch("src.workflow.commands.verify", return_value=borderline):
        assert cmd_verify(cfg) == EXIT_OK


def test_scan_rows(tmp_path):
    out = tmp_path / "scan.csv"
    cfg = RunConfig(kind="cornell", mass=1.0, omega_osc=1.0, A=1.0, out=str(out))

    assert cmd_scan(cfg, "alpha", 0.0, 1.0, 3, [0]) == EXIT_OK
    table = read_csv(out)
    assert list(table.columns) == ["alpha", "n", "E", "residual_coeff"]
    positive = table[table["E"] > 0]
    assert positive["alpha"].tolist() == [0.0, 0.5, 1.0]
    assert positive["E"].is_monotonic_increasing


@pytest.mark.parametrize(
    "param, steps, levels",
    [("alpha", 0, [0]), ("vorticity", 3, [0]), ("alpha", 3, [-1])],
)
def test_scan_argument_errors(param, steps, levels):
    with pytest.raises(ConfigError):
        cmd_scan(CORNELL, param, 0.0, 1.0, steps, levels)
