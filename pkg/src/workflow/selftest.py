"""Built-in consistency checks of the solver against its closed forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.common.exceptions import DegenerateIndicial, KgoError
from src.physics.heun import HeunParams, continuant, continuant_roots, series_coefficients
from src.physics.params import Scenario
from src.physics.spectrum import minkowski_energy, solve_energy
from src.utils.logging_config import run_logger


@dataclass(frozen=True)
class SelfTestCheck:
    name: str
    passed: bool
    detail: str


def check_minkowski_ladder(levels: int = 4) -> SelfTestCheck:
    """α = 0 PDM roots against E² = m₀² + l² + k² + m₀ΩΞ(2n + 3 + √(1 + 4m₀²kc²))."""
    worst = 0.0
    for n in range(levels):
        sc = Scenario.pdm_linear(alpha=0.0, mass=1.0, omega_osc=1.0, xi=1.0, n=n)
        found = solve_energy(sc)[-1].energy
        expected = minkowski_energy(sc.p, sc.pot, sc.pdm, sc.qn)[1]
        worst = max(worst, abs(found - expected))
    return SelfTestCheck("minkowski_ladder", worst <= 1e-10, f"max |ΔE| = {worst:.3g} over n < {levels}")


def check_cornell_pdm_equivalence(rng: np.random.Generator, draws: int = 5) -> SelfTestCheck:
    """Cornell with B = 0 and PDM with kc = 0 share A = Ξ and must agree."""
    worst = 0.0
    for _ in range(draws):
        alpha, mass, omega, coupling = rng.uniform([0.1, 0.5, 0.5, 0.5], [1.0, 2.0, 2.0, 2.0])
        l = float(rng.uniform(-2.0, 2.0))
        n = int(rng.integers(0, 3))
        cornell = solve_energy(Scenario.cornell(alpha, mass, omega, coupling, n=n, l=l))
        pdm = solve_energy(Scenario.pdm_linear(alpha, mass, omega, coupling, n=n, l=l))
        if len(cornell) != len(pdm):
            return SelfTestCheck("cornell_pdm_equivalence", False, "different root counts")
        for a, b in zip(cornell, pdm):
            worst = max(worst, abs(a.energy - b.energy) / max(1.0, abs(a.energy)))
    return SelfTestCheck("cornell_pdm_equivalence", worst <= 1e-10, f"max relative ΔE = {worst:.3g}")


def check_root_index_identity(rng: np.random.Generator, draws: int = 1000) -> SelfTestCheck:
    """ξ² = 1 + 4γ with γ = m²Ω²B² - mΩB."""
    failures = 0
    for mass, omega, B in rng.uniform([0.1, 0.0, -5.0], [3.0, 3.0, 5.0], size=(draws, 3)):
        try:
            root = Scenario.cornell(0.5, mass, omega, 1.0, B).reduce(1.0).root_index
        except DegenerateIndicial:
            continue
        gamma = (mass * omega * B) ** 2 - mass * omega * B
        if abs(root**2 - (1.0 + 4.0 * gamma)) > 1e-12 * (1.0 + 4.0 * abs(gamma) + root**2):
            failures += 1
    return SelfTestCheck("root_index_identity", failures == 0, f"{failures} failure(s) in {draws} draws")


def check_termination(rng: np.random.Generator, draws: int = 20) -> SelfTestCheck:
    """At a continuant root with c - a - 2 = 2n every coefficient past A_n vanishes."""
    worst = 0.0
    for _ in range(draws):
        a, d = rng.uniform([0.0, 0.0], [3.0, 2.0])
        n = int(rng.integers(0, 5))
        for b in continuant_roots(a, d, n):
            hp = HeunParams(a=a, b=b, c=a + 2.0 + 2.0 * n, d=d)
            coeffs = series_coefficients(hp, n + 8).coeffs
            scale = np.max(np.abs(coeffs[: n + 1]))
            worst = max(worst, float(np.max(np.abs(coeffs[n + 1 :])) / scale))
            weight = np.prod([i * (i - 1 + 2.0 * hp.eta_star) for i in range(1, n + 2)])
            worst = max(worst, abs(continuant(hp, n)) / (weight * scale))
    return SelfTestCheck("termination", worst <= 1e-8, f"max |A_k|/scale past n = {worst:.3g}")


def run_selftest(seed: int = 0) -> list[SelfTestCheck]:
    """
    Run every check; a check that raises is reported as failed.

    Args:
        seed (int, optional): Seed of the random draws. Defaults to 0.

    Returns:
        list[SelfTestCheck]: One entry per check.
    """
    logger = run_logger()
    rng = np.random.default_rng(seed)
    checks = [
        ("minkowski_ladder", lambda: check_minkowski_ladder()),
        ("cornell_pdm_equivalence", lambda: check_cornell_pdm_equivalence(rng)),
        ("root_index_identity", lambda: check_root_index_identity(rng)),
        ("termination", lambda: check_termination(rng)),
    ]
    results = []
    for name, check in checks:
        try:
            result = check()
        except KgoError as e:
            result = SelfTestCheck(name, False, f"raised {type(e).__name__}: {e}")
        level = logger.info if result.passed else logger.error
        level(f"selftest {result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
        results.append(result)
    return results
