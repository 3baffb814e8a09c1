"""
Quantization of the generalized KG oscillator.

The first condition c - a - 2 = 2n is an implicit equation for E (the printed
spectra); the second, A_{n+1} = 0, fixes one further parameter chosen by the
caller. Both energy branches are reported.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from src.common.constants import (
    DEFAULT_GRID_POINTS,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    MIN_GRID_POINTS,
)
from src.common.exceptions import (
    InvalidParams,
    KgoError,
    NegativeDiscriminant,
    NoConvergence,
    NoRootFound,
    ZeroFrequency,
)
from src.physics.heun import coefficient_condition, truncation_residual
from src.physics.params import (
    FREE_PARAMETERS,
    CornellPotential,
    LinearPotential,
    ParticleParams,
    PdmParams,
    QuantumNumbers,
    ReducedProblem,
    Scenario,
    ScenarioKind,
)
from src.utils.logging_config import get_request_id, get_session_logger, set_request_id
from src.utils.settings import get_int_setting

_EPS = np.finfo(float).eps
# Lower bounds a free parameter is clamped to during Newton steps.
_LOWER_BOUNDS = {"alpha": 0.0, "omega_osc": 0.0, "kc": 0.0, "xi": 1e-12}


@dataclass(frozen=True)
class SolveConfig:
    """
    Root search settings.

    Attributes:
        e_min (float | None): Lower end of the energy bracket; None for the default.
        e_max (float | None): Upper end of the energy bracket; None for the default.
        grid_points (int): Bracketing grid size, at least 100.
        tol (float): Root tolerance.
        max_iter (int): Iteration cap for bisection and Newton.
    """

    e_min: float | None = None
    e_max: float | None = None
    grid_points: int = DEFAULT_GRID_POINTS
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.grid_points < MIN_GRID_POINTS:
            raise InvalidParams(f"grid_points must be >= {MIN_GRID_POINTS}, got {self.grid_points}")
        if not self.tol > 0:
            raise InvalidParams(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidParams(f"max_iter must be >= 1, got {self.max_iter}")
        if self.e_min is not None and self.e_max is not None and not self.e_min < self.e_max:
            raise InvalidParams(f"e_min must be < e_max, got [{self.e_min}, {self.e_max}]")

    def bracket(self, sc: Scenario) -> tuple[float, float]:
        bound = default_energy_bound(sc)
        lo = -bound if self.e_min is None else self.e_min
        hi = bound if self.e_max is None else self.e_max
        if not lo < hi:
            raise InvalidParams(f"empty energy bracket [{lo}, {hi}]")
        return lo, hi


@dataclass(frozen=True)
class BoundState:
    """
    One energy root with its quantization residuals.

    Attributes:
        energy (float): E.
        n (int): Heun polynomial degree.
        residual_energy (float): freq·(c - a - 2 - 2n).
        residual_coeff (float): A_{n+1} with A_0 = 1.
        reduced (ReducedProblem): Reduction at E (with the free parameter applied).
        free_param (tuple[str, float] | None): Parameter fixed by a joint solve.
    """

    energy: float
    n: int
    residual_energy: float
    residual_coeff: float
    reduced: ReducedProblem
    free_param: tuple[str, float] | None = None

    @property
    def branch(self) -> str:
        return "positive" if self.energy >= 0 else "negative"

    def applied_to(self, sc: Scenario) -> Scenario:
        """The scenario this state belongs to (free parameter substituted)."""
        if self.free_param is None:
            return sc
        return sc.with_param(*self.free_param)


@dataclass(frozen=True)
class ScanRow:
    param_value: float
    n: int
    energy: float
    residual_coeff: float
    error: str | None = None


def default_energy_bound(sc: Scenario) -> float:
    """10·(m + mΩ(|A| + |B| + Ξ + 1) + |l| + |k| + 1)."""
    m, omega = sc.p.mass, sc.p.omega_osc
    if sc.kind is ScenarioKind.CORNELL:
        couplings = abs(sc.pot.a_lin) + abs(sc.pot.b_coul)
    else:
        couplings = sc.pot.xi
    return 10.0 * (m + m * omega * (couplings + 1.0) + abs(sc.qn.l) + abs(sc.qn.k) + 1.0)


def energy_residual(sc: Scenario, E: float) -> float:
    """
    Signed residual of the first quantization condition at E.

    Equals freq·(c - a - 2 - 2n); for Cornell this is
    α²l²E²/ω² - (m²+l²+k²-E²+mΩA+2ABm²Ω²) - (2+ξ)ω - 2nω.
    """
    red = sc.reduce(E)
    return red.freq * red.level_gap(sc.qn.n)


def bound_state_at(sc: Scenario, E: float, free_param: tuple[str, float] | None = None) -> BoundState:
    """Package the reduction and both residuals at energy E."""
    red = sc.reduce(E)
    coeff, _ = truncation_residual(red.heun_params, sc.qn.n)
    return BoundState(
        energy=float(E),
        n=sc.qn.n,
        residual_energy=red.freq * red.level_gap(sc.qn.n),
        residual_coeff=coeff,
        reduced=red,
        free_param=free_param,
    )


def _residual_grid(sc: Scenario, grid: np.ndarray, logger) -> np.ndarray:
    values = np.full(len(grid), np.nan)
    last_error: ZeroFrequency | None = None
    for i, E in enumerate(grid):
        try:
            values[i] = energy_residual(sc, float(E))
        except ZeroFrequency as e:
            last_error = e
    skipped = int(np.isnan(values).sum())
    if skipped == len(grid) and last_error is not None:
        raise last_error
    if skipped:
        logger.warning(f"Skipped {skipped} grid energies with vanishing frequency")
    return values


def solve_energy(sc: Scenario, cfg: SolveConfig | None = None) -> list[BoundState]:
    """
    All roots of the first quantization condition inside the bracket.

    Sign changes on a uniform energy grid are refined by bisection. A_{n+1}
    is reported for every root but not enforced.

    Args:
        sc (Scenario): The radial problem.
        cfg (SolveConfig, optional): Bracket and tolerances.

    Returns:
        list[BoundState]: Roots in ascending energy.

    Raises:
        NoRootFound: If the residual has no sign change in the bracket.
    """
    cfg = cfg or SolveConfig()
    logger = get_session_logger(get_request_id())
    lo, hi = cfg.bracket(sc)
    grid = np.linspace(lo, hi, cfg.grid_points)
    values = _residual_grid(sc, grid, logger)

    def f(E: float) -> float:
        return energy_residual(sc, E)

    roots: list[float] = []
    for i in range(len(grid)):
        if values[i] == 0.0:
            roots.append(float(grid[i]))
            continue
        if i + 1 < len(grid) and values[i] * values[i + 1] < 0.0:
            try:
                root = bisect(
                    f,
                    grid[i],
                    grid[i + 1],
                    xtol=cfg.tol * 1e-2,
                    rtol=4 * _EPS,
                    maxiter=max(cfg.max_iter, 200),
                )
            except ZeroFrequency:
                logger.warning(f"Dropped bracket [{grid[i]}, {grid[i + 1]}]: frequency vanishes inside")
                continue
            roots.append(float(root))

    if not roots:
        raise NoRootFound(f"no sign change of the energy residual in [{lo}, {hi}] for n={sc.qn.n}")

    states = [bound_state_at(sc, E) for E in sorted(roots)]
    logger.info(
        f"{sc.kind.value} n={sc.qn.n}: {len(states)} root(s) in [{lo:.6g}, {hi:.6g}]: "
        + ", ".join(f"{s.energy:.12g}" for s in states)
    )
    return states


def level_energies(sc: Scenario, levels, cfg: SolveConfig | None = None) -> dict[int, list[BoundState]]:
    """First-condition roots for several levels n; levels without roots map to []."""
    ladder: dict[int, list[BoundState]] = {}
    for n in levels:
        try:
            ladder[int(n)] = solve_energy(sc.with_level(n), cfg)
        except NoRootFound:
            ladder[int(n)] = []
    return ladder


def minkowski_energy(
    p: ParticleParams,
    lin: LinearPotential,
    pdm: PdmParams,
    qn: QuantumNumbers,
) -> tuple[float, float]:
    """
    α = 0 closed form of the PDM/linear spectrum:
    E² = m₀² + l² + k² + m₀ΩΞ[2n + 3 + √(1 + 4m₀²kc²)].

    Returns:
        tuple[float, float]: (-|E|, +|E|).

    Raises:
        NegativeDiscriminant: If the right-hand side is negative.
    """
    m0 = p.mass
    rhs = m0 * m0 + qn.l**2 + qn.k**2 + m0 * p.omega_osc * lin.xi * (
        2 * qn.n + 3 + math.hypot(1.0, 2.0 * m0 * pdm.kc)
    )
    if rhs < 0:
        raise NegativeDiscriminant(f"E² = {rhs} < 0")
    energy = math.sqrt(rhs)
    return -energy, energy


def cornell_minkowski_energy(
    p: ParticleParams,
    pot: CornellPotential,
    qn: QuantumNumbers,
) -> tuple[float, float]:
    """
    α = 0 closed form of the Cornell spectrum:
    E² = m² + l² + k² + mΩA + 2ABm²Ω² + (2 + 2n + |2mΩB - 1|)·mΩ|A|.

    Raises:
        ZeroFrequency: If mΩA = 0.
        NegativeDiscriminant: If the right-hand side is negative.
    """
    m = p.mass
    coupling = m * p.omega_osc
    freq = abs(coupling * pot.a_lin)
    if freq == 0.0:
        raise ZeroFrequency("Cornell Minkowski limit needs mΩA != 0")
    root_index = abs(2.0 * coupling * pot.b_coul - 1.0)
    rhs = (
        m * m
        + qn.l**2
        + qn.k**2
        + coupling * pot.a_lin
        + 2.0 * pot.a_lin * pot.b_coul * coupling**2
        + (2.0 + 2.0 * qn.n + root_index) * freq
    )
    if rhs < 0:
        raise NegativeDiscriminant(f"E² = {rhs} < 0")
    energy = math.sqrt(rhs)
    return -energy, energy


def _joint_residuals(sc: Scenario, free: str, E: float, value: float) -> np.ndarray:
    red = sc.with_param(free, value).reduce(E)
    return np.array([red.level_gap(sc.qn.n), coefficient_condition(red.heun_params, sc.qn.n)])


def _clamp(free: str, value: float) -> float:
    lower = _LOWER_BOUNDS.get(free)
    return value if lower is None else max(lower, value)


def _newton(sc: Scenario, free: str, cfg: SolveConfig, guess: tuple[float, float], logger):
    """Damped Newton on (scaled energy residual, scaled A_{n+1}); None on failure."""
    x = np.array([float(guess[0]), _clamp(free, float(guess[1]))])
    try:
        F = _joint_residuals(sc, free, *x)
    except KgoError as e:
        logger.warning(f"Newton start rejected at {tuple(x)}: {e}")
        return None, None

    best = (x.copy(), F.copy())
    for iteration in range(cfg.max_iter):
        if np.max(np.abs(F)) <= cfg.tol:
            logger.info(f"Newton converged in {iteration} iteration(s)")
            return x, F
        J = np.empty((2, 2))
        try:
            for i in range(2):
                h = 1e-7 * max(1.0, abs(x[i]))
                shifted = x.copy()
                shifted[i] += h
                J[:, i] = (_joint_residuals(sc, free, *shifted) - F) / h
        except KgoError as e:
            logger.warning(f"Jacobian failed at {tuple(x)}: {e}")
            break
        step = np.linalg.lstsq(J, -F, rcond=None)[0]

        damping, accepted = 1.0, False
        while damping >= 1.0 / 1024:
            trial = x + damping * step
            trial[1] = _clamp(free, trial[1])
            try:
                F_trial = _joint_residuals(sc, free, *trial)
            except KgoError:
                damping /= 2
                continue
            if np.linalg.norm(F_trial) < np.linalg.norm(F):
                x, F, accepted = trial, F_trial, True
                break
            damping /= 2
        if not accepted:
            logger.warning(f"Newton stalled at iteration {iteration} with residuals {tuple(F)}")
            break
        if np.linalg.norm(F) < np.linalg.norm(best[1]):
            best = (x.copy(), F.copy())

    if np.max(np.abs(best[1])) <= cfg.tol:
        return best
    return None, best[1]


def _scan_windows(free: str, p0: float):
    """Free-parameter grids tried in turn: a local window, then wider ones."""
    span = 0.5 * max(abs(p0), 1.0)
    lower = _LOWER_BOUNDS.get(free)
    if free == "xi":
        lower = span * 1e-3
    start = p0 - span if lower is None else max(lower, p0 - span)
    yield np.linspace(start, p0 + span, 41)
    if lower is None:
        for factor in (4.0, 16.0, 64.0):
            yield np.linspace(p0 - factor * span, p0 + factor * span, 81)
    else:
        centre = max(abs(p0), 1.0)
        yield np.geomspace(max(centre * 1e-3, lower, _EPS), centre * 1e3, 121)


def _nested_scan(sc: Scenario, free: str, cfg: SolveConfig, guess: tuple[float, float], logger):
    """Outer grid over the free parameter, inner solve_energy; bisection on A_{n+1}."""
    E0, p0 = guess

    def tracked(value: float, reference: float) -> tuple[float, float]:
        trial = sc.with_param(free, value)
        states = solve_energy(trial, cfg)
        same_sign = [s for s in states if np.sign(s.energy) == np.sign(E0)] or states
        state = min(same_sign, key=lambda s: abs(s.energy - reference))
        return state.energy, coefficient_condition(state.reduced.heun_params, sc.qn.n)

    for values in _scan_windows(free, p0):
        energies, samples = [], []
        reference = E0
        for value in values:
            try:
                energy, coeff = tracked(float(value), reference)
                reference = energy
            except KgoError:
                energy, coeff = np.nan, np.nan
            energies.append(energy)
            samples.append(coeff)

        brackets = [
            i
            for i in range(len(values) - 1)
            if np.isfinite(samples[i]) and np.isfinite(samples[i + 1]) and samples[i] * samples[i + 1] <= 0
        ]
        for i in sorted(brackets, key=lambda i: abs(values[i] - p0)):
            start_energy = energies[i]
            try:
                root = bisect(
                    lambda v: tracked(v, start_energy)[1],
                    values[i],
                    values[i + 1],
                    xtol=cfg.tol * 1e-2,
                    rtol=4 * _EPS,
                    maxiter=max(cfg.max_iter, 200),
                )
                energy, _ = tracked(root, start_energy)
                residuals = _joint_residuals(sc, free, energy, root)
            except (KgoError, ValueError) as e:
                logger.warning(f"Nested scan bracket [{values[i]}, {values[i + 1]}] failed: {e}")
                continue
            if np.max(np.abs(residuals)) > cfg.tol:
                logger.warning(f"Nested scan bracket [{values[i]}, {values[i + 1]}] has no root (jump in the tracked level)")
                continue
            return np.array([energy, root])
        logger.info(f"Nested scan found no root of A_{sc.qn.n + 1} on [{values[0]:.6g}, {values[-1]:.6g}]")
    return None


def solve_joint(
    sc: Scenario,
    free: str,
    cfg: SolveConfig | None = None,
    guess: tuple[float, float] | None = None,
) -> BoundState:
    """
    Solve both quantization conditions for (E, free parameter).

    Damped Newton with a finite-difference Jacobian on
    (energy residual / freq, A_{n+1} / max|A_0..A_n|); on failure a nested scan
    (outer grid on the free parameter, inner solve_energy) takes over.

    Args:
        sc (Scenario): The radial problem; its value of `free` is the default guess.
        free (str): One of omega_osc, alpha, A, B, xi, kc.
        cfg (SolveConfig, optional): Tolerances and iteration cap.
        guess (tuple[float, float], optional): Starting (E₀, p₀).

    Returns:
        BoundState: With free_param set and both residuals within tol.

    Raises:
        InvalidParams: If `free` does not apply to the scenario.
        NoConvergence: If neither Newton nor the nested scan meets tol.
    """
    cfg = cfg or SolveConfig()
    logger = get_session_logger(get_request_id())
    if free not in FREE_PARAMETERS:
        raise InvalidParams(f"free parameter must be one of {FREE_PARAMETERS}, got '{free}'")
    current = sc.param_value(free)
    if guess is None:
        guess = (solve_energy(sc, cfg)[-1].energy, current)
    if not all(math.isfinite(v) for v in guess):
        raise InvalidParams(f"guess must be finite, got {guess}")

    logger.info(f"Joint solve n={sc.qn.n} free={free} from guess {guess}")
    x, residuals = _newton(sc, free, cfg, guess, logger)
    if x is None:
        logger.warning("Newton failed; falling back to nested scan")
        x = _nested_scan(sc, free, cfg, guess, logger)
        if x is not None:
            residuals = _joint_residuals(sc, free, *x)

    if x is None or np.max(np.abs(residuals)) > cfg.tol:
        best = None if residuals is None else (float(residuals[0]), float(residuals[1]))
        raise NoConvergence(f"joint solve for {free} did not converge (best residuals {best})", best=best)

    energy, value = float(x[0]), float(x[1])
    state = bound_state_at(sc.with_param(free, value), energy, free_param=(free, value))
    logger.info(f"Joint solution E={energy:.15g}, {free}={value:.15g}")
    return state


def _scan_task(template: Scenario, param: str, value: float, n: int, cfg: SolveConfig, request_id: str) -> list[ScanRow]:
    # worker threads start without the caller's request id
    set_request_id(request_id)
    logger = get_session_logger(request_id)
    try:
        sc = template.with_param(param, value).with_level(n)
        states = solve_energy(sc, cfg)
    except KgoError as e:
        logger.warning(f"Scan row {param}={value}, n={n} failed: {e}")
        return [ScanRow(param_value=value, n=n, energy=np.nan, residual_coeff=np.nan, error=str(e))]
    return [ScanRow(value, n, s.energy, s.residual_coeff) for s in states]


def scan(
    template: Scenario,
    param: str,
    values,
    levels,
    cfg: SolveConfig | None = None,
    threads: int | None = None,
) -> list[ScanRow]:
    """
    Sweep one parameter over `values` for every level in `levels`.

    Rows come in sweep order (value-major, then level, then ascending energy);
    a failing (value, n) pair yields one row with NaN energy. Pairs are solved
    on up to `threads` workers (default: the KGO_THREADS setting).

    Raises:
        InvalidParams: If `values` is empty.
    """
    cfg = cfg or SolveConfig()
    values = [float(v) for v in values]
    levels = [int(n) for n in levels]
    if not values:
        raise InvalidParams("scan needs at least one parameter value")
    template.param_value(param)

    request_id = get_request_id()
    logger = get_session_logger(request_id)
    tasks = [(value, n) for value in values for n in levels]
    if not tasks:
        return []

    workers = threads or get_int_setting("KGO_THREADS", 1)
    logger.info(f"Scanning {param} over {len(values)} value(s), levels {levels}, {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        chunks = pool.map(lambda task: _scan_task(template, param, task[0], task[1], cfg, request_id), tasks)
        return [row for chunk in chunks for row in chunk]
