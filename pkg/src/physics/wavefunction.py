"""
Radial wave functions ψ(x) = r^exponent · exp(-(b r + r²)/2) · H(r), r = √freq·x,
sampled on (0, x_max].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from src.common.constants import DEFAULT_SAMPLES, MIN_SAMPLES
from src.common.exceptions import EvalError, InvalidParams, NotConverged, ZeroNorm
from src.physics.heun import converged_series, evaluate
from src.physics.params import ReducedProblem, Scenario
from src.physics.spectrum import BoundState
from src.utils.logging_config import run_logger

# Samples below this fraction of max|ψ| are ignored when counting nodes.
NODE_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class WaveTable:
    """
    A sampled radial wave function.

    Attributes:
        xs (np.ndarray): Strictly increasing grid on (0, x_max].
        psi (np.ndarray): ψ at xs.
        norm (float): L² norm of the samples before any scaling.
        nodes (int): Sign changes of ψ in (0, x_max).
        x_max (float): Right end of the grid.
        bound_state (BoundState): The state the table belongs to.
    """

    xs: np.ndarray
    psi: np.ndarray
    norm: float
    nodes: int
    x_max: float
    bound_state: BoundState


def default_x_max(reduced: ReducedProblem) -> float:
    """
    Six Gaussian widths past the classical turning point, in units of x.

    r_turn = |b|/2 + √(|β₀|/freq + |c| + 1); x_max = max(3·r_turn, 6)/√freq.
    """
    r_turn = abs(reduced.b_heun) / 2.0 + math.sqrt(abs(reduced.beta0) / reduced.freq + abs(reduced.c_heun) + 1.0)
    return max(3.0 * r_turn, 6.0) / math.sqrt(reduced.freq)


def radial_values(reduced: ReducedProblem, xs: np.ndarray) -> np.ndarray:
    """
    Unnormalized ψ at positive xs.

    Raises:
        EvalError: If the Heun series does not converge on the grid or ψ is not finite.
    """
    xs = np.asarray(xs, dtype=float)
    r = math.sqrt(reduced.freq) * xs
    try:
        hs = converged_series(reduced.heun_params, float(np.max(r)))
        heun = evaluate(hs, r)
    except NotConverged as e:
        raise EvalError(f"Heun series diverges on the grid: {e}") from e

    log_envelope = reduced.exponent * np.log(r) - 0.5 * (reduced.b_heun * r + r * r)
    with np.errstate(over="ignore", invalid="ignore"):
        psi = np.exp(log_envelope) * heun
    if not np.all(np.isfinite(psi)):
        raise EvalError("wave function overflows on the grid")
    return psi


def _l2_norm(xs: np.ndarray, psi: np.ndarray) -> float:
    # ψ(0) = 0 since the exponent is > 1/2
    return math.sqrt(simpson(np.concatenate(([0.0], psi * psi)), x=np.concatenate(([0.0], xs))))


def count_nodes(wt: WaveTable) -> int:
    """Sign changes of ψ, ignoring samples below NODE_THRESHOLD·max|ψ|."""
    return _count_sign_changes(wt.psi)


def _count_sign_changes(psi: np.ndarray) -> int:
    peak = float(np.max(np.abs(psi))) if psi.size else 0.0
    if peak == 0.0:
        return 0
    kept = psi[np.abs(psi) > NODE_THRESHOLD * peak]
    return int(np.count_nonzero(np.signbit(kept[1:]) != np.signbit(kept[:-1])))


def assemble(
    bs: BoundState,
    sc: Scenario,
    x_max: float | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> WaveTable:
    """
    Sample the (unnormalized) wave function of a bound state.

    Args:
        bs (BoundState): Energy root with its reduction.
        sc (Scenario): Scenario the state was solved for.
        x_max (float, optional): Right end of the grid; defaults to default_x_max.
        samples (int, optional): Number of grid points, at least 16.

    Returns:
        WaveTable: Samples with their norm and node count.

    Raises:
        InvalidParams: If samples < 16 or x_max <= 0.
        EvalError: If ψ cannot be evaluated on the grid.
    """
    logger = run_logger()
    if samples < MIN_SAMPLES:
        raise InvalidParams(f"samples must be >= {MIN_SAMPLES}, got {samples}")
    reduced = bs.reduced
    if x_max is None:
        x_max = default_x_max(reduced)
    if not (math.isfinite(x_max) and x_max > 0):
        raise InvalidParams(f"x_max must be > 0, got {x_max}")

    xs = x_max * np.arange(1, samples + 1) / samples
    psi = radial_values(reduced, xs)
    norm = _l2_norm(xs, psi)
    nodes = _count_sign_changes(psi)
    if nodes != bs.n:
        logger.warning(f"{sc.kind.value} state E={bs.energy:.12g}: {nodes} node(s) for n={bs.n}")
    logger.info(f"Assembled {samples} samples on (0, {x_max:.6g}], norm={norm:.6g}, nodes={nodes}")
    return WaveTable(xs=xs, psi=psi, norm=norm, nodes=nodes, x_max=float(x_max), bound_state=bs)


def normalize(wt: WaveTable) -> WaveTable:
    """
    Scale ψ to unit L² norm on the grid.

    The returned table keeps the norm of `wt` in its norm field.

    Raises:
        ZeroNorm: If the norm is zero or not finite.
    """
    norm = _l2_norm(wt.xs, wt.psi)
    if not (math.isfinite(norm) and norm > 0.0):
        raise ZeroNorm(f"cannot normalize a table with norm {norm}")
    return replace(wt, psi=wt.psi / norm, norm=norm)
