from __future__ import annotations

import sys

import numpy as np
import pandas as pd

from src.common.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_NO_CONVERGENCE,
    EXIT_NO_ROOT,
    EXIT_OK,
    EXIT_VERIFY_FAILED,
    VERIFY_MISMATCH_TOL,
    VERIFY_OVERLAP_TOL,
)
from src.common.exceptions import (
    ConfigError,
    DegenerateIndicial,
    DiscretizationError,
    DomainError,
    EvalError,
    InvalidParams,
    NegativeDiscriminant,
    NoConvergence,
    NoRootFound,
    NotConverged,
    ZeroFrequency,
    ZeroNorm,
)
from src.physics.oracle import verify
from src.physics.params import FREE_PARAMETERS, SWEEP_PARAMETERS, Scenario
from src.physics.spectrum import BoundState, scan, solve_energy, solve_joint
from src.physics.wavefunction import assemble, normalize
from src.utils.logging_config import run_logger
from src.workflow.config import RunConfig
from src.workflow.save import emit_table, joint_table, scan_table, states_table, wave_table
from src.workflow.selftest import run_selftest

_EXIT_CODES = (
    ((ConfigError, InvalidParams, DomainError, DegenerateIndicial, ZeroFrequency, NegativeDiscriminant), EXIT_CONFIG_ERROR),
    ((NoRootFound,), EXIT_NO_ROOT),
    ((NoConvergence, NotConverged, EvalError, ZeroNorm, DiscretizationError), EXIT_NO_CONVERGENCE),
)


def exit_code_for(error: Exception) -> int:
    """Process exit code of an error raised by a subcommand."""
    for types, code in _EXIT_CODES:
        if isinstance(error, types):
            return code
    raise error


def _ground_state(states: list[BoundState]) -> BoundState:
    positive = [s for s in states if s.energy > 0]
    return min(positive or states, key=lambda s: abs(s.energy))


def _bound_state(
    cfg: RunConfig,
    sc: Scenario,
    free: str | None,
    guess_energy: float | None,
    guess_value: float | None,
) -> BoundState:
    """The state a wavefunction or verify run works on."""
    solve_cfg = cfg.solve_config()
    if free is None:
        return _ground_state(solve_energy(sc, solve_cfg))
    if free not in FREE_PARAMETERS:
        raise ConfigError(f"--free must be one of {', '.join(FREE_PARAMETERS)}, got '{free}'")
    if guess_energy is None:
        guess_energy = _ground_state(solve_energy(sc, solve_cfg)).energy
    if guess_value is None:
        guess_value = sc.param_value(free)
    return solve_joint(sc, free, solve_cfg, (guess_energy, guess_value))


def cmd_spectrum(cfg: RunConfig) -> int:
    """Every root of the first quantization condition, both branches."""
    states = solve_energy(cfg.scenario(), cfg.solve_config())
    emit_table(states_table(states), cfg.format, cfg.out)
    return EXIT_OK


def cmd_joint(
    cfg: RunConfig,
    free: str,
    guess_energy: float | None = None,
    guess_value: float | None = None,
) -> int:
    """Solve both conditions for E and the free parameter."""
    sc = cfg.scenario()
    state = _bound_state(cfg, sc, free, guess_energy, guess_value)
    emit_table(joint_table(state), cfg.format, cfg.out)
    return EXIT_OK


def cmd_wavefunction(
    cfg: RunConfig,
    free: str | None = None,
    guess_energy: float | None = None,
    guess_value: float | None = None,
) -> int:
    """Normalized ψ of the lowest positive-energy state (or of the joint solution)."""
    logger = run_logger()
    sc = cfg.scenario()
    state = _bound_state(cfg, sc, free, guess_energy, guess_value)
    table = normalize(assemble(state, state.applied_to(sc), cfg.x_max, cfg.samples))
    logger.info(f"Wave function at E={state.energy:.12g} has {table.nodes} node(s)")
    emit_table(wave_table(table), cfg.format, cfg.out)
    return EXIT_OK


def cmd_verify(
    cfg: RunConfig,
    free: str | None = None,
    guess_energy: float | None = None,
    guess_value: float | None = None,
) -> int:
    """Cross-check one state against the finite-difference spectrum."""
    sc = cfg.scenario()
    state = _bound_state(cfg, sc, free, guess_energy, guess_value)
    result = verify(state, sc, cfg.grid_for(state.reduced))
    table = pd.DataFrame(
        {
            "E": [result.energy],
            "eig_index": [result.eig_index],
            "target": [result.target],
            "mismatch": [result.mismatch],
            "relative_mismatch": [result.relative_mismatch],
            "overlap": [result.overlap],
        }
    )
    emit_table(table, cfg.format, cfg.out)
    passed = result.relative_mismatch <= VERIFY_MISMATCH_TOL and result.overlap >= VERIFY_OVERLAP_TOL
    if not passed:
        run_logger().error(
            f"Verification failed: relative mismatch {result.relative_mismatch:.3g}, overlap {result.overlap:.6f}"
        )
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_scan(
    cfg: RunConfig,
    param: str,
    start: float,
    stop: float,
    steps: int,
    levels: list[int] | None = None,
) -> int:
    """Sweep `param` over `steps` evenly spaced values; failed rows hold NaN."""
    if steps < 1:
        raise ConfigError(f"--steps must be >= 1, got {steps}")
    if param not in SWEEP_PARAMETERS:
        raise ConfigError(f"--param must be one of {', '.join(SWEEP_PARAMETERS)}, got '{param}'")
    levels = [cfg.n] if levels is None else levels
    if any(n < 0 for n in levels):
        raise ConfigError(f"levels must be >= 0, got {levels}")
    values = np.linspace(start, stop, steps)
    rows = scan(cfg.scenario(), param, values, levels, cfg.solve_config())
    emit_table(scan_table(param, rows), cfg.format, cfg.out)
    return EXIT_OK


def cmd_selftest(fmt: str = "csv", out: str | None = None, seed: int = 0) -> int:
    checks = run_selftest(seed)
    table = pd.DataFrame(
        {
            "check": [c.name for c in checks],
            "passed": [c.passed for c in checks],
            "detail": [c.detail for c in checks],
        }
    )
    emit_table(table, fmt, out)
    if not all(c.passed for c in checks):
        print("selftest failed", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK
