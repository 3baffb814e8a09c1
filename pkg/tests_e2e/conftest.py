import subprocess
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def run_cli():
    """
    Run app.py in a subprocess the way a user would and return the completed process.
    """

    def _run(*args: str, timeout: int = 600) -> subprocess.CompletedProcess:
        return subprocess.run(
            [sys.executable, str(PROJECT_ROOT / "app.py"), *args],
            cwd=PROJECT_ROOT,
            capture_output=True,
            text=True,
            timeout=timeout,
        )

    return _run


@pytest.fixture
def cornell_config(tmp_path):
    """Fixture to provide a config file for the Cornell ground state."""
    path = tmp_path / "cornell.env"
    path.write_text("kind=cornell\nmass=1\nomega_osc=1\nalpha=1\nA=1\n", encoding="utf-8")
    return str(path)
