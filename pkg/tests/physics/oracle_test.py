from __future__ import annotations

import math

import numpy as np
import pytest

from src.common.exceptions import DiscretizationError, InvalidParams, NoRootFound
from src.physics.oracle import (
    GridSpec,
    fd_eigs,
    fd_factored_eigpairs,
    regular_exponent,
    scenario_eigs,
    self_consistent_energy,
    spectral_parameter,
    verify,
)
from src.physics.params import Scenario, inverse_square_coefficient
from src.physics.spectrum import BoundState, solve_energy, solve_joint
from tests.physics.cases import (
    cornell_first_excited_case,
    cornell_second_excited_case,
    pdm_first_excited_case,
    pdm_vorticity_case,
)

HARMONIC_GRID = GridSpec(x_min=1e-4, x_max=12.0, points=4000)


def test_half_line_harmonic_well():
    eigs = fd_eigs(lambda x: x**2, HARMONIC_GRID, 3)
    np.testing.assert_allclose(eigs, [3.0, 7.0, 11.0], atol=1e-3)


def test_constant_shift():
    shifted = fd_eigs(lambda x: x**2 + 5.0, HARMONIC_GRID, 3)
    np.testing.assert_allclose(shifted - fd_eigs(lambda x: x**2, HARMONIC_GRID, 3), 5.0, atol=1e-8)


def test_second_order_convergence():
    lowest = [fd_eigs(lambda x: x**2, GridSpec(x_min=1e-4, x_max=12.0, points=points), 1)[0] for points in (2001, 4001, 8001)]

    ratio = (lowest[0] - lowest[1]) / (lowest[1] - lowest[2])

    assert ratio == pytest.approx(4.0, abs=0.5)
    assert lowest[-1] == pytest.approx(3.0, abs=1e-3)
    assert np.all(np.diff(fd_eigs(lambda x: x**2, HARMONIC_GRID, 5)) > 0)


def test_free_box():
    grid = GridSpec(x_min=1e-3, x_max=5.0, points=2000)
    lowest = fd_eigs(lambda x: np.zeros_like(x), grid, 1)[0]
    assert lowest == pytest.approx(math.pi**2 / (grid.x_max - grid.x_min) ** 2, rel=1e-4)


def test_non_finite_potential_is_rejected():
    with pytest.raises(DiscretizationError):
        fd_eigs(lambda x: np.where(x > 1.0, np.inf, x), HARMONIC_GRID, 2)
    with pytest.raises(DiscretizationError):
        fd_factored_eigpairs(lambda x: np.where(x > 1.0, np.nan, x), HARMONIC_GRID, 0.7, 2)


def test_grid_and_count_validation():
    with pytest.raises(InvalidParams):
        GridSpec(x_min=0.0, x_max=1.0)
    with pytest.raises(InvalidParams):
        GridSpec(x_min=2.0, x_max=1.0)
    with pytest.raises(InvalidParams):
        GridSpec(x_min=0.1, x_max=1.0, points=50)
    with pytest.raises(InvalidParams):
        fd_eigs(lambda x: x**2, HARMONIC_GRID, 401)


def test_regular_exponent_solves_indicial_equation():
    for gamma in (-0.25, -0.21, 0.0, 0.75, 2.0):
        eta = regular_exponent(gamma)
        assert eta * (eta - 1) == pytest.approx(gamma, abs=1e-14)
        assert eta >= 0.5
    sc = Scenario.cornell(alpha=0.7, mass=1.0, omega_osc=1.0, A=1.0, B=0.3)
    assert regular_exponent(inverse_square_coefficient(sc)) == pytest.approx(sc.reduce(3.0).exponent, abs=1e-14)


def test_factored_scheme_resolves_attractive_inverse_square():
    # x² + η(η-1)/x² on the half-line: eigenvalues 4j + 2η + 1, ground state x^η e^{-x²/2}
    eta = 0.7
    values, vectors = fd_factored_eigpairs(lambda x: x**2, HARMONIC_GRID, eta, 3)

    np.testing.assert_allclose(values, [2 * eta + 1, 2 * eta + 5, 2 * eta + 9], atol=5e-4)
    xs = HARMONIC_GRID.nodes[:-1]
    exact = xs**eta * np.exp(-(xs**2) / 2)
    overlap = abs(np.dot(exact, vectors[:, 0])) / (np.linalg.norm(exact) * np.linalg.norm(vectors[:, 0]))
    assert overlap > 1 - 1e-6


def test_factored_scheme_matches_dirichlet_scheme_without_singular_term():
    values, _ = fd_factored_eigpairs(lambda x: x**2, HARMONIC_GRID, 1.0, 3)
    np.testing.assert_allclose(values, fd_eigs(lambda x: x**2, HARMONIC_GRID, 3), atol=1e-3)


def test_spectral_parameter_is_minus_beta0():
    sc = Scenario.cornell(alpha=0.3, mass=1.0, omega_osc=2.0, A=0.5, l=1.0, k=0.5)
    assert spectral_parameter(sc, 2.0) == pytest.approx(-sc.beta0(2.0))


@pytest.mark.parametrize(
    "B",
    [0.0, 0.3, 0.45, -0.5, 2.0],
    ids=["no-coulomb", "attractive-inverse-square", "near-degenerate", "negative-coulomb", "strong-coulomb"],
)
def test_verify_cornell_ground_states(B):
    # l = 0 and d = 0 make A_1 vanish, so every first-condition root truncates
    sc = Scenario.cornell(alpha=0.7, mass=1.0, omega_osc=1.0, A=1.0, B=B, k=0.4)
    state = solve_energy(sc)[-1]

    result = verify(state, sc)

    assert result.eig_index == 0
    assert result.relative_mismatch <= 1e-3
    assert result.overlap >= 0.999


def test_verify_worked_root():
    sc = Scenario.cornell(alpha=1.0, mass=1.0, omega_osc=1.0, A=1.0)
    state = solve_energy(sc)[-1]

    result = verify(state, sc)

    assert state.energy == pytest.approx(3.6570, abs=1e-4)
    assert result.eig_index == 0
    assert result.relative_mismatch <= 1e-3
    assert result.overlap >= 0.999


def joint_states():
    energy, omega_osc, alpha = cornell_first_excited_case()
    yield Scenario.cornell(alpha=alpha, mass=1.0, omega_osc=omega_osc, A=1.0, n=1, l=-1.0), (energy, omega_osc)
    energy, omega_osc, alpha = cornell_second_excited_case()
    yield Scenario.cornell(alpha=alpha, mass=1.0, omega_osc=omega_osc, A=1.0, n=2, l=-3.0), (energy, omega_osc)
    energy, omega_osc, alpha = pdm_first_excited_case()
    yield (
        Scenario.pdm_linear(alpha=alpha, mass=1.0, omega_osc=omega_osc, xi=1.0, kc=0.1, n=1, l=-2.0),
        (energy, omega_osc),
    )
    energy, omega_osc = pdm_vorticity_case()
    yield (
        Scenario.pdm_linear(alpha=1.0, mass=1.0, omega_osc=omega_osc, xi=1.0, kc=0.1, n=1, l=1.0),
        (energy, omega_osc),
    )


@pytest.mark.parametrize("sc, guess", list(joint_states()), ids=["cornell-n1", "cornell-n2", "pdm-n1", "pdm-vorticity"])
def test_verify_joint_solutions(sc, guess):
    state = solve_joint(sc, "omega_osc", guess=guess)

    result = verify(state, sc)

    assert result.eig_index == sc.qn.n
    assert result.relative_mismatch <= 1e-3
    assert result.overlap >= 0.999


def test_detuned_energy_is_detected():
    sc = Scenario.cornell(alpha=1.0, mass=1.0, omega_osc=1.0, A=1.0)
    state = solve_energy(sc)[-1]
    detuned = BoundState(
        energy=state.energy + 0.1,
        n=state.n,
        residual_energy=state.residual_energy,
        residual_coeff=state.residual_coeff,
        reduced=sc.reduce(state.energy + 0.1),
    )

    assert verify(detuned, sc).mismatch > 100 * verify(state, sc).mismatch


def test_scenario_eigs_handle_the_coulomb_singularity():
    sc = Scenario.cornell(alpha=0.7, mass=1.0, omega_osc=1.0, A=1.0, B=0.3, k=0.4)
    state = solve_energy(sc)[-1]
    lowest = scenario_eigs(sc, state.energy, GridSpec.for_reduced(state.reduced), 1)[0]
    assert lowest == pytest.approx(spectral_parameter(sc, state.energy), rel=1e-3)


@pytest.mark.slow
def test_self_consistent_energy_matches_closed_forms():
    cornell = Scenario.cornell(alpha=0.0, mass=1.0, omega_osc=1.0, A=1.0)
    results = self_consistent_energy(cornell, 0, (1.0, 4.0), HARMONIC_GRID)
    assert [r.energy for r in results] == pytest.approx([math.sqrt(5.0)], rel=1e-3)

    pdm = Scenario.pdm_linear(alpha=0.0, mass=1.0, omega_osc=1.0, xi=1.0)
    results = self_consistent_energy(pdm, 1, (1.0, 4.0), HARMONIC_GRID)
    assert [r.energy for r in results] == pytest.approx([3.0], rel=1e-3)
    assert results[0].eig_index == 1
    assert math.isnan(results[0].overlap)


def test_self_consistent_energy_without_root():
    sc = Scenario.cornell(alpha=0.0, mass=1.0, omega_osc=1.0, A=1.0)
    with pytest.raises(NoRootFound):
        self_consistent_energy(sc, 0, (0.1, 1.0), HARMONIC_GRID, scan_points=8)
