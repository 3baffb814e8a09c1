"""
Finite-difference cross-check of the analytic spectra.

The radial equation ψ'' - V_E ψ = β₀ψ is the eigenproblem of -D² + V_E with
eigenvalue -β₀(E). For a generic potential the operator on a uniform grid with
Dirichlet ends is a symmetric tridiagonal matrix. For a scenario, V_E carries a
γ/x² term and the regular solution starts like x^η; writing ψ = x^η u removes
the singular term and leaves the Sturm–Liouville problem

    -(x^{2η} u')' + x^{2η} W u = λ x^{2η} u,

W being V_E without γ/x², which is discretized as finite volumes with no flux
at x_min and u = 0 at x_max. Only the lowest few eigenpairs are computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.optimize import brentq

from src.common.constants import DEFAULT_FD_POINTS, MIN_FD_POINTS
from src.common.exceptions import (
    DiscretizationError,
    InvalidParams,
    KgoError,
    NoRootFound,
)
from src.physics.params import (
    ReducedProblem,
    Scenario,
    inverse_square_coefficient,
    regular_potential,
)
from src.physics.spectrum import BoundState
from src.physics.wavefunction import default_x_max, radial_values
from src.utils.logging_config import run_logger


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid x_min = x_0 < ... < x_{points-1} = x_max."""

    x_min: float
    x_max: float
    points: int = DEFAULT_FD_POINTS

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and self.x_min > 0):
            raise InvalidParams(f"x_min must be > 0, got {self.x_min}")
        if not (math.isfinite(self.x_max) and self.x_max > self.x_min):
            raise InvalidParams(f"x_max must be > x_min, got [{self.x_min}, {self.x_max}]")
        if self.points < MIN_FD_POINTS:
            raise InvalidParams(f"points must be >= {MIN_FD_POINTS}, got {self.points}")

    @classmethod
    def for_reduced(cls, reduced: ReducedProblem, points: int = DEFAULT_FD_POINTS, x_max: float | None = None) -> GridSpec:
        scale = 1.0 / math.sqrt(reduced.freq)
        return cls(x_min=1e-4 * scale, x_max=x_max or default_x_max(reduced), points=points)

    @property
    def step(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]


@dataclass(frozen=True)
class OracleResult:
    """
    Attributes:
        energy (float): Energy the operator was built at.
        eig_index (int): Index j of the matched finite-difference eigenvalue.
        mismatch (float): |eig_j - (-β₀(E))|.
        overlap (float): |<u_j, ψ>| / (‖u_j‖ ‖ψ‖) in [0, 1]; NaN if ψ cannot be evaluated.
        grid (GridSpec): The discretization used.
        target (float): -β₀(E).
    """

    energy: float
    eig_index: int
    mismatch: float
    overlap: float
    grid: GridSpec
    target: float = math.nan

    @property
    def relative_mismatch(self) -> float:
        scale = abs(self.target)
        return self.mismatch / scale if scale > 0 else math.inf


def _check_count(grid: GridSpec, count: int) -> None:
    if count < 1 or count > grid.points // 10:
        raise InvalidParams(f"count must be in [1, {grid.points // 10}], got {count}")


def _potential_values(V, xs: np.ndarray) -> np.ndarray:
    values = np.asarray(V(xs), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DiscretizationError("potential is not finite on the grid")
    return values


def _operator(V, grid: GridSpec, count: int) -> tuple[np.ndarray, np.ndarray]:
    _check_count(grid, count)
    values = _potential_values(V, grid.interior)
    h2 = grid.step**2
    diag = 2.0 / h2 + values
    off = np.full(len(values) - 1, -1.0 / h2)
    return diag, off


def fd_eigs(V, grid: GridSpec, count: int) -> np.ndarray:
    """
    Lowest `count` eigenvalues of -D² + V on the grid, ascending.

    Args:
        V (Callable[[np.ndarray], np.ndarray]): Potential on x > 0.
        grid (GridSpec): Discretization; ψ vanishes at both ends.
        count (int): Number of eigenvalues, at most points/10.

    Raises:
        DiscretizationError: If V is not finite at a grid point.
    """
    diag, off = _operator(V, grid, count)
    return eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))


def regular_exponent(gamma: float) -> float:
    """η with η(η - 1) = γ, the power of the solution regular at the origin."""
    return 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 + 4.0 * gamma)))


def _factored_operator(W, grid: GridSpec, exponent: float, count: int):
    # Unknowns on nodes 0..points-2; node 0 owns half a cell. Weights x^{2η}
    # enter only as ratios, taken in log space.
    _check_count(grid, count)
    h = grid.step
    xs = grid.nodes[:-1]
    volume = np.full(len(xs), h)
    volume[0] = 0.5 * h
    values = _potential_values(W, xs)

    two_eta = 2.0 * exponent
    log_x = np.log(xs)
    log_face = np.log(xs + 0.5 * h)
    right = np.exp(two_eta * (log_face - log_x)) / (h * volume)
    left = np.zeros_like(xs)
    left[1:] = np.exp(two_eta * (log_face[:-1] - log_x[1:])) / (h * volume[1:])
    diag = left + right + values
    off = -np.exp(two_eta * log_face[:-1] - exponent * (log_x[:-1] + log_x[1:])) / (
        h * np.sqrt(volume[:-1] * volume[1:])
    )
    return diag, off, volume


def fd_factored_eigpairs(W, grid: GridSpec, exponent: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Lowest eigenpairs of -D² + η(η - 1)/x² + W with the factor x^η divided out.

    Args:
        W (Callable[[np.ndarray], np.ndarray]): Potential without its inverse-square term.
        grid (GridSpec): Discretization.
        exponent (float): η > 0.
        count (int): Number of eigenpairs, at most points/10.

    Returns:
        tuple[np.ndarray, np.ndarray]: Ascending eigenvalues, and ψ sampled on
            grid.nodes[:-1] as columns (unit norm in the discrete L² sense).
    """
    diag, off, volume = _factored_operator(W, grid, exponent, count)
    values, vectors = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    return values, vectors / np.sqrt(volume)[:, None]


def scenario_eigs(sc: Scenario, E: float, grid: GridSpec, count: int) -> np.ndarray:
    """Lowest eigenvalues of -D² + V_E for the scenario."""
    diag, off, _ = _factored_operator(
        lambda x: regular_potential(sc, E, x), grid, regular_exponent(inverse_square_coefficient(sc)), count
    )
    return eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))


def scenario_eigpairs(sc: Scenario, E: float, grid: GridSpec, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Like scenario_eigs, with ψ on grid.nodes[:-1] as columns."""
    exponent = regular_exponent(inverse_square_coefficient(sc))
    return fd_factored_eigpairs(lambda x: regular_potential(sc, E, x), grid, exponent, count)


def spectral_parameter(sc: Scenario, E: float) -> float:
    """The eigenvalue -β₀(E) a bound state at E must reproduce."""
    return -sc.beta0(E)


def _overlap(reduced: ReducedProblem, xs: np.ndarray, vector: np.ndarray) -> float:
    try:
        psi = radial_values(reduced, xs)
    except KgoError:
        return math.nan
    denom = np.linalg.norm(psi) * np.linalg.norm(vector)
    if denom == 0.0:
        return math.nan
    return float(min(1.0, abs(np.dot(psi, vector)) / denom))


def verify(bs: BoundState, sc: Scenario, grid: GridSpec | None = None) -> OracleResult:
    """
    Compare a bound state against the finite-difference spectrum at its energy.

    Args:
        bs (BoundState): State from solve_energy or solve_joint.
        sc (Scenario): Scenario the state was solved for (free parameter applied internally).
        grid (GridSpec, optional): Discretization; defaults to GridSpec.for_reduced.

    Returns:
        OracleResult: Nearest eigenvalue, mismatch and overlap with ψ.
    """
    logger = run_logger()
    scenario = bs.applied_to(sc)
    grid = grid or GridSpec.for_reduced(bs.reduced)
    energy = bs.energy
    target = spectral_parameter(scenario, energy)

    count = min(bs.n + 3, grid.points // 10)
    values, vectors = scenario_eigpairs(scenario, energy, grid, count)
    j = int(np.argmin(np.abs(values - target)))
    result = OracleResult(
        energy=energy,
        eig_index=j,
        mismatch=float(abs(values[j] - target)),
        overlap=_overlap(bs.reduced, grid.nodes[:-1], vectors[:, j]),
        grid=grid,
        target=target,
    )
    logger.info(
        f"Oracle at E={energy:.12g}: eig[{j}]={values[j]:.12g}, target={target:.12g}, "
        f"relative mismatch={result.relative_mismatch:.3g}, overlap={result.overlap:.6f}"
    )
    return result


def self_consistent_energy(
    sc: Scenario,
    n: int,
    e_range: tuple[float, float],
    grid: GridSpec,
    scan_points: int = 64,
) -> list[OracleResult]:
    """
    Energies at which the n-th finite-difference eigenvalue equals -β₀(E).

    Independent of the Heun reduction; the scan over e_range looks for sign
    changes of eig_n(E) + β₀(E), refined with Brent's method.

    Args:
        sc (Scenario): The radial problem.
        n (int): Eigenvalue index j (ground state 0).
        e_range (tuple[float, float]): Energy window.
        grid (GridSpec): Discretization.
        scan_points (int, optional): Energies sampled before refinement.

    Returns:
        list[OracleResult]: One result per root, ascending in energy; overlap is
            NaN since there is no analytic state at these energies.

    Raises:
        NoRootFound: If there is no sign change in e_range.
    """
    logger = run_logger()
    lo, hi = e_range
    if not lo < hi:
        raise InvalidParams(f"e_range must be increasing, got {e_range}")

    def gap(E: float) -> float:
        eig = scenario_eigs(sc, E, grid, n + 1)[n]
        return float(eig - spectral_parameter(sc, E))

    energies = np.linspace(lo, hi, scan_points)
    gaps = np.array([gap(float(E)) for E in energies])
    roots = []
    for i in range(scan_points - 1):
        if gaps[i] == 0.0:
            roots.append(float(energies[i]))
        elif gaps[i] * gaps[i + 1] < 0.0:
            roots.append(float(brentq(gap, energies[i], energies[i + 1], xtol=1e-12, rtol=1e-13)))
    if gaps[-1] == 0.0:
        roots.append(float(energies[-1]))
    if not roots:
        raise NoRootFound(f"eigenvalue {n} never meets -β₀(E) in [{lo}, {hi}]")

    results = []
    for E in roots:
        target = spectral_parameter(sc, E)
        values = scenario_eigs(sc, E, grid, n + 1)
        results.append(
            OracleResult(
                energy=E,
                eig_index=n,
                mismatch=float(abs(values[n] - target)),
                overlap=math.nan,
                grid=grid,
                target=target,
            )
        )
    logger.info(f"Self-consistent energies for eigenvalue {n}: {[round(r.energy, 10) for r in results]}")
    return results
