"""
Physical parameters of the generalized Klein-Gordon oscillator in the
Gödel-type space-time ds² = -(dt + αx dy)² + dx² + dy² + dz², and the
algebraic reduction of a radial problem to biconfluent Heun form.

Natural units (ħ = c = 1). The radial equation reads ψ'' - V_E(x)ψ = β₀ψ on
x ∈ (0, ∞); the reduction rescales x by √freq and peels off the regular
behaviour x^exponent at the origin and the Gaussian tail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from src.common.constants import INDICIAL_TOL
from src.common.exceptions import (
    DegenerateIndicial,
    DomainError,
    InvalidParams,
    ZeroFrequency,
)
from src.physics.heun import HeunParams

# Parameters a joint solve may adjust to satisfy the coefficient condition.
FREE_PARAMETERS = ("omega_osc", "alpha", "A", "B", "xi", "kc")
# Parameters a scan may sweep.
SWEEP_PARAMETERS = FREE_PARAMETERS + ("mass", "l", "k")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidParams(message)


@dataclass(frozen=True)
class SpacetimeParams:
    """Gödel-type space-time; alpha = 0 is the Minkowski limit."""

    alpha: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.alpha) and self.alpha >= 0, f"alpha must be >= 0, got {self.alpha}")


@dataclass(frozen=True)
class ParticleParams:
    """Scalar particle: rest mass and oscillator frequency Ω."""

    mass: float
    omega_osc: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.mass) and self.mass > 0, f"mass must be > 0, got {self.mass}")
        _require(
            math.isfinite(self.omega_osc) and self.omega_osc >= 0,
            f"omega_osc must be >= 0, got {self.omega_osc}",
        )


@dataclass(frozen=True)
class CornellPotential:
    """Coupling profile f(x) = A x + B / x."""

    a_lin: float
    b_coul: float = 0.0

    def __post_init__(self):
        _require(
            math.isfinite(self.a_lin) and math.isfinite(self.b_coul),
            "Cornell coefficients must be finite",
        )


@dataclass(frozen=True)
class LinearPotential:
    """Coupling profile f(x) = Ξ x."""

    xi: float

    def __post_init__(self):
        _require(math.isfinite(self.xi) and self.xi > 0, f"xi must be > 0, got {self.xi}")


@dataclass(frozen=True)
class PdmParams:
    """Position-dependent mass m(x) = m₀(1 + kc/x); kc = 0 is a constant mass."""

    kc: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.kc) and self.kc >= 0, f"kc must be >= 0, got {self.kc}")


@dataclass(frozen=True)
class QuantumNumbers:
    """Heun polynomial degree n, y-eigenvalue l and z-momentum k."""

    n: int = 0
    l: float = 0.0
    k: float = 0.0

    def __post_init__(self):
        _require(isinstance(self.n, (int, np.integer)) and self.n >= 0, f"n must be an integer >= 0, got {self.n}")
        _require(math.isfinite(self.l) and math.isfinite(self.k), "l and k must be finite")


@dataclass(frozen=True)
class ReducedProblem:
    """
    Dimensionless biconfluent Heun problem of one radial equation at fixed E.

    Attributes:
        freq (float): ω (Cornell) or ω̃ (PDM); the radial variable is √freq·x.
        beta0 (float): β₀ or β̃₀, the right-hand side of the radial equation.
        b_heun (float): Λ₁ or Θ₁.
        exponent (float): η or δ, the regular exponent at the origin.
        root_index (float): ξ or ζ.
        c_heun (float): λ or κ.
        d_heun (float): 0 (Cornell) or 4m₀²kc/√ω̃ (PDM).
        a_heun (float): 2·exponent - 1, equal to root_index.
    """

    freq: float
    beta0: float
    b_heun: float
    exponent: float
    root_index: float
    c_heun: float
    d_heun: float
    a_heun: float

    @property
    def heun_params(self) -> HeunParams:
        return HeunParams(a=self.a_heun, b=self.b_heun, c=self.c_heun, d=self.d_heun)

    def level_gap(self, n: int) -> float:
        """c - a - 2 - 2n; zero when the first quantization condition holds."""
        return self.c_heun - self.a_heun - 2.0 - 2.0 * n


def cornell_reduce(
    st: SpacetimeParams,
    p: ParticleParams,
    pot: CornellPotential,
    qn: QuantumNumbers,
    E: float,
) -> ReducedProblem:
    """
    Reduce the Cornell-coupled radial equation at energy E to Heun form.

    Args:
        st (SpacetimeParams): Space-time parameters.
        p (ParticleParams): Particle mass m and frequency Ω.
        pot (CornellPotential): Linear (A) and Coulomb (B) coefficients.
        qn (QuantumNumbers): Quantum numbers (only l and k enter).
        E (float): Trial energy.

    Returns:
        ReducedProblem: The Heun parameters with a = ξ = |2mΩB - 1|.

    Raises:
        DegenerateIndicial: If mΩB = 1/2 within tolerance.
        ZeroFrequency: If ω = √(α²E² + m²Ω²A²) vanishes.
    """
    m, omega = p.mass, p.omega_osc
    coupling = m * omega
    root_index = abs(2.0 * coupling * pot.b_coul - 1.0)
    if root_index < INDICIAL_TOL:
        raise DegenerateIndicial(
            f"mΩB = {coupling * pot.b_coul} is 1/2: logarithmic Frobenius branch is not supported"
        )

    freq = math.hypot(st.alpha * E, coupling * pot.a_lin)
    if freq == 0.0:
        raise ZeroFrequency(f"ω vanishes at E={E} (alpha={st.alpha}, mΩA={coupling * pot.a_lin})")

    beta0 = m * m + qn.l * qn.l + qn.k * qn.k - E * E + coupling * pot.a_lin
    b_heun = 2.0 * st.alpha * E * qn.l / freq**1.5
    exponent = 0.5 * (1.0 + root_index)
    c_heun = b_heun * b_heun / 4.0 - (2.0 * pot.a_lin * pot.b_coul * coupling * coupling + beta0) / freq
    return ReducedProblem(
        freq=freq,
        beta0=beta0,
        b_heun=b_heun,
        exponent=exponent,
        root_index=root_index,
        c_heun=c_heun,
        d_heun=0.0,
        a_heun=root_index,
    )


def pdm_reduce(
    st: SpacetimeParams,
    p: ParticleParams,
    lin: LinearPotential,
    pdm: PdmParams,
    qn: QuantumNumbers,
    E: float,
) -> ReducedProblem:
    """
    Reduce the position-dependent-mass, linear-coupling radial equation at E.

    The mass m₀ of `p` is the rest mass; ω̃ uses m₀ as well.

    Args:
        st (SpacetimeParams): Space-time parameters.
        p (ParticleParams): Rest mass m₀ and frequency Ω.
        lin (LinearPotential): Linear coefficient Ξ.
        pdm (PdmParams): The product kc of the mass profile.
        qn (QuantumNumbers): Quantum numbers (only l and k enter).
        E (float): Trial energy.

    Returns:
        ReducedProblem: The Heun parameters with a = ζ = √(1 + 4m₀²kc²).

    Raises:
        ZeroFrequency: If ω̃ = √(α²E² + m₀²Ω²Ξ²) vanishes.
    """
    m0, omega, kc = p.mass, p.omega_osc, pdm.kc
    coupling = m0 * omega * lin.xi
    freq = math.hypot(st.alpha * E, coupling)
    if freq == 0.0:
        raise ZeroFrequency(f"ω̃ vanishes at E={E} (alpha={st.alpha}, m₀ΩΞ={coupling})")

    root_index = math.hypot(1.0, 2.0 * m0 * kc)
    beta0 = m0 * m0 + qn.l * qn.l + qn.k * qn.k - E * E + coupling
    b_heun = 2.0 * (st.alpha * E * qn.l + kc * coupling * coupling) / freq**1.5
    exponent = 0.5 * (1.0 + root_index)
    c_heun = b_heun * b_heun / 4.0 - (kc * kc * coupling * coupling + beta0) / freq
    d_heun = 4.0 * m0 * m0 * kc / math.sqrt(freq)
    return ReducedProblem(
        freq=freq,
        beta0=beta0,
        b_heun=b_heun,
        exponent=exponent,
        root_index=root_index,
        c_heun=c_heun,
        d_heun=d_heun,
        a_heun=root_index,
    )


class ScenarioKind(str, enum.Enum):
    CORNELL = "cornell"
    PDM_LINEAR = "pdm"


@dataclass(frozen=True)
class Scenario:
    """
    One radial problem: kind, space-time, particle, coupling and quantum numbers.

    `pot` is a CornellPotential for CORNELL and a LinearPotential for
    PDM_LINEAR; `pdm` is only meaningful for PDM_LINEAR.
    """

    kind: ScenarioKind
    st: SpacetimeParams
    p: ParticleParams
    pot: CornellPotential | LinearPotential
    qn: QuantumNumbers = field(default_factory=QuantumNumbers)
    pdm: PdmParams = field(default_factory=PdmParams)

    def __post_init__(self):
        if self.kind is ScenarioKind.CORNELL:
            _require(isinstance(self.pot, CornellPotential), "cornell scenario needs a CornellPotential")
            _require(
                self.p.omega_osc == 0 or self.pot.a_lin != 0 or self.pot.b_coul != 0,
                "A and B cannot both vanish when omega_osc > 0",
            )
            _require(self.pdm.kc == 0, "kc only applies to the pdm scenario")
        else:
            _require(isinstance(self.pot, LinearPotential), "pdm scenario needs a LinearPotential")

    @classmethod
    def cornell(
        cls,
        alpha: float,
        mass: float,
        omega_osc: float,
        A: float,
        B: float = 0.0,
        n: int = 0,
        l: float = 0.0,
        k: float = 0.0,
    ) -> Scenario:
        return cls(
            kind=ScenarioKind.CORNELL,
            st=SpacetimeParams(alpha),
            p=ParticleParams(mass, omega_osc),
            pot=CornellPotential(A, B),
            qn=QuantumNumbers(n, l, k),
        )

    @classmethod
    def pdm_linear(
        cls,
        alpha: float,
        mass: float,
        omega_osc: float,
        xi: float,
        kc: float = 0.0,
        n: int = 0,
        l: float = 0.0,
        k: float = 0.0,
    ) -> Scenario:
        return cls(
            kind=ScenarioKind.PDM_LINEAR,
            st=SpacetimeParams(alpha),
            p=ParticleParams(mass, omega_osc),
            pot=LinearPotential(xi),
            qn=QuantumNumbers(n, l, k),
            pdm=PdmParams(kc),
        )

    def reduce(self, E: float) -> ReducedProblem:
        """Dispatch to the reduction map of this scenario's kind."""
        if self.kind is ScenarioKind.CORNELL:
            return cornell_reduce(self.st, self.p, self.pot, self.qn, E)
        return pdm_reduce(self.st, self.p, self.pot, self.pdm, self.qn, E)

    def beta0(self, E: float) -> float:
        """β₀(E); defined even where the reduction frequency vanishes."""
        m = self.p.mass
        coupling = m * self.p.omega_osc * (
            self.pot.a_lin if self.kind is ScenarioKind.CORNELL else self.pot.xi
        )
        return m * m + self.qn.l**2 + self.qn.k**2 - E * E + coupling

    def param_value(self, name: str) -> float:
        """Current value of a sweepable parameter."""
        values = {
            "alpha": self.st.alpha,
            "mass": self.p.mass,
            "omega_osc": self.p.omega_osc,
            "l": self.qn.l,
            "k": self.qn.k,
        }
        if self.kind is ScenarioKind.CORNELL:
            values.update(A=self.pot.a_lin, B=self.pot.b_coul)
        else:
            values.update(xi=self.pot.xi, kc=self.pdm.kc)
        if name not in values:
            raise InvalidParams(f"parameter '{name}' does not apply to a {self.kind.value} scenario")
        return float(values[name])

    def with_param(self, name: str, value: float) -> Scenario:
        """Copy of this scenario with one parameter replaced."""
        self.param_value(name)
        value = float(value)
        if name == "alpha":
            return replace(self, st=SpacetimeParams(value))
        if name == "mass":
            return replace(self, p=replace(self.p, mass=value))
        if name == "omega_osc":
            return replace(self, p=replace(self.p, omega_osc=value))
        if name in ("l", "k"):
            return replace(self, qn=replace(self.qn, **{name: value}))
        if name == "A":
            return replace(self, pot=replace(self.pot, a_lin=value))
        if name == "B":
            return replace(self, pot=replace(self.pot, b_coul=value))
        if name == "xi":
            return replace(self, pot=LinearPotential(value))
        return replace(self, pdm=PdmParams(value))

    def with_level(self, n: int) -> Scenario:
        return replace(self, qn=replace(self.qn, n=int(n)))


def inverse_square_coefficient(scenario: Scenario) -> float:
    """γ of the γ/x² term of V_E; E-independent and never below -1/4."""
    m, omega = scenario.p.mass, scenario.p.omega_osc
    if scenario.kind is ScenarioKind.CORNELL:
        coupling = m * omega * scenario.pot.b_coul
        return coupling * coupling - coupling
    return (m * scenario.pdm.kc) ** 2


def _positions(x) -> np.ndarray:
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise DomainError("effective potential is defined on x > 0 only")
    return xs


def regular_potential(scenario: Scenario, E: float, x):
    """V_E(x) without its γ/x² term; see effective_potential."""
    xs = _positions(x)
    alpha, m, omega = scenario.st.alpha, scenario.p.mass, scenario.p.omega_osc
    l = scenario.qn.l
    if scenario.kind is ScenarioKind.CORNELL:
        A, B = scenario.pot.a_lin, scenario.pot.b_coul
        freq2 = (alpha * E) ** 2 + (m * omega * A) ** 2
        values = freq2 * xs**2 + 2.0 * alpha * E * l * xs + 2.0 * A * B * (m * omega) ** 2
    else:
        xi, kc = scenario.pot.xi, scenario.pdm.kc
        coupling = m * omega * xi
        freq2 = (alpha * E) ** 2 + coupling**2
        values = (
            freq2 * xs**2
            + 2.0 * (alpha * E * l + kc * coupling**2) * xs
            + (m * kc * xi * omega) ** 2
            + 2.0 * m * m * kc / xs
        )
    return float(values) if np.ndim(x) == 0 else values


def effective_potential(scenario: Scenario, E: float, x):
    """
    V_E(x) of the radial equation ψ'' - V_E(x)ψ = β₀ψ.

    Args:
        scenario (Scenario): The radial problem.
        E (float): Energy.
        x (float | np.ndarray): Radial position(s), all > 0.

    Returns:
        float | np.ndarray: V_E at x, same shape as x.

    Raises:
        DomainError: If any x <= 0.
    """
    xs = _positions(x)
    values = regular_potential(scenario, E, xs) + inverse_square_coefficient(scenario) / xs**2
    return float(values) if np.ndim(x) == 0 else values
