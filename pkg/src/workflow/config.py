from __future__ import annotations

import argparse
import os
from dataclasses import dataclass, fields

from dotenv import dotenv_values

from src.common.constants import (
    DEFAULT_FD_POINTS,
    DEFAULT_GRID_POINTS,
    DEFAULT_MAX_ITER,
    DEFAULT_SAMPLES,
    DEFAULT_TOL,
    MIN_SAMPLES,
)
from src.common.exceptions import ConfigError, InvalidParams
from src.physics.oracle import GridSpec
from src.physics.params import Scenario, ScenarioKind
from src.physics.spectrum import SolveConfig


@dataclass(frozen=True)
class RunConfig:
    """
    Flat run configuration shared by every subcommand.

    Values come from a KEY=VALUE config file (read with python-dotenv) and are
    overridden by command-line flags of the same name.
    """

    kind: str
    mass: float
    omega_osc: float
    alpha: float = 0.0
    A: float | None = None
    B: float = 0.0
    xi: float | None = None
    kc: float = 0.0
    n: int = 0
    l: float = 0.0
    k: float = 0.0
    e_min: float | None = None
    e_max: float | None = None
    grid_points: int = DEFAULT_GRID_POINTS
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    x_max: float | None = None
    samples: int = DEFAULT_SAMPLES
    fd_points: int = DEFAULT_FD_POINTS
    format: str = "csv"
    out: str | None = None

    def scenario(self) -> Scenario:
        """
        Build the radial problem described by this configuration.

        Raises:
            ConfigError: If a value violates a parameter invariant, or a
                parameter of the other kind is set.
        """
        if self.kind == ScenarioKind.CORNELL.value:
            foreign = {"xi": self.xi is not None, "kc": self.kc != 0.0}
        else:
            foreign = {"A": self.A is not None, "B": self.B != 0.0}
        unused = [key for key, is_set in foreign.items() if is_set]
        if unused:
            raise ConfigError(f"{', '.join(unused)} has no meaning for kind '{self.kind}'")
        try:
            if self.kind == ScenarioKind.CORNELL.value:
                return Scenario.cornell(self.alpha, self.mass, self.omega_osc, self.A, self.B, self.n, self.l, self.k)
            return Scenario.pdm_linear(self.alpha, self.mass, self.omega_osc, self.xi, self.kc, self.n, self.l, self.k)
        except InvalidParams as e:
            raise ConfigError(str(e)) from e

    def solve_config(self) -> SolveConfig:
        try:
            return SolveConfig(
                e_min=self.e_min,
                e_max=self.e_max,
                grid_points=self.grid_points,
                tol=self.tol,
                max_iter=self.max_iter,
            )
        except InvalidParams as e:
            raise ConfigError(str(e)) from e

    def grid_for(self, reduced) -> GridSpec:
        try:
            return GridSpec.for_reduced(reduced, points=self.fd_points, x_max=self.x_max)
        except InvalidParams as e:
            raise ConfigError(str(e)) from e


_INT_KEYS = {"n", "grid_points", "max_iter", "samples", "fd_points"}
_STR_KEYS = {"kind", "format", "out"}
_KEY_ALIASES = {"out_path": "out"}
CONFIG_KEYS = tuple(f.name for f in fields(RunConfig))


def _convert(key: str, raw) -> object:
    if raw is None or raw == "":
        return None
    if key in _STR_KEYS:
        return str(raw)
    try:
        return int(raw) if key in _INT_KEYS else float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for '{key}': {raw!r}") from e


def read_config_file(path: str) -> dict[str, object]:
    """
    Parse a KEY=VALUE config file.

    Args:
        path (str): Path to the file.

    Returns:
        dict[str, object]: Converted values of the keys present in the file.

    Raises:
        ConfigError: If the file is missing or names an unknown key.
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for key, raw in dotenv_values(path).items():
        key = _KEY_ALIASES.get(key, key)
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key '{key}' in {path}")
        values[key] = _convert(key, raw)
    return values


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """Register --config and one flag per RunConfig key."""
    parser.add_argument("--config", help="KEY=VALUE file with run parameters")
    parser.add_argument("--kind", choices=[k.value for k in ScenarioKind])
    for key in CONFIG_KEYS:
        if key in ("kind", "format"):
            continue
        flags = ["--" + key.replace("_", "-")]
        flags += ["--" + alias.replace("_", "-") for alias, target in _KEY_ALIASES.items() if target == key]
        kind = int if key in _INT_KEYS else str if key in _STR_KEYS else float
        parser.add_argument(*flags, dest=key, type=kind, default=None)
    parser.add_argument("--format", choices=["csv", "json"], default=None)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the config file (if any) and command-line flags into a RunConfig.

    Raises:
        ConfigError: On unknown keys, missing required keys or bad values.
    """
    values: dict[str, object] = {}
    if getattr(args, "config", None):
        values.update({k: v for k, v in read_config_file(args.config).items() if v is not None})
    for key in CONFIG_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value

    for key in ("kind", "mass", "omega_osc"):
        if values.get(key) is None:
            raise ConfigError(f"missing required key '{key}'")
    kind = values["kind"]
    if kind not in [k.value for k in ScenarioKind]:
        raise ConfigError(f"kind must be 'cornell' or 'pdm', got {kind!r}")
    required = "A" if kind == ScenarioKind.CORNELL.value else "xi"
    if values.get(required) is None:
        raise ConfigError(f"missing required key '{required}' for kind '{kind}'")
    if values.get("format", "csv") not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {values['format']!r}")
    if values.get("samples", DEFAULT_SAMPLES) < MIN_SAMPLES:
        raise ConfigError(f"samples must be >= {MIN_SAMPLES}, got {values['samples']}")
    if values.get("n", 0) < 0:
        raise ConfigError(f"n must be >= 0, got {values['n']}")

    return RunConfig(**values)
