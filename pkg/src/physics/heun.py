"""
Biconfluent Heun engine.

Solutions H_B(a, b, c, d; z) of

    z H'' + (1 + a - b z - 2 z²) H' + [(c - a - 2) z - (d + b(1 + a))/2] H = 0

regular at the origin, as Frobenius series H = Σ A_j z^j with A_0 = 1. With
η* = (1 + a)/2 and g = d/2 the coefficients obey

    (k+1)(k+2η*) A_{k+1} = [b(k+η*) + g] A_k + [2(k-1) - (c-a-2)] A_{k-1}.

The series truncates to a degree-n polynomial iff c - a - 2 = 2n and
A_{n+1} = 0; the second condition is the vanishing of an (n+1)-dimensional
continuant in b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import eigvalsh_tridiagonal

from src.common.constants import (
    COEFF_ZERO_TOL,
    SERIES_MAX_COUNT,
    SERIES_START_COUNT,
)
from src.common.exceptions import DomainError, InvalidParams, NotConverged


@dataclass(frozen=True)
class HeunParams:
    """The four biconfluent Heun parameters; requires 1 + a > 0."""

    a: float
    b: float
    c: float
    d: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c, self.d)):
            raise InvalidParams(f"Heun parameters must be finite: {self}")
        if 1.0 + self.a <= 0.0:
            raise InvalidParams(f"1 + a must be > 0, got a={self.a}")

    @property
    def eta_star(self) -> float:
        return 0.5 * (1.0 + self.a)

    @property
    def g(self) -> float:
        return 0.5 * self.d

    @property
    def gap(self) -> float:
        """c - a - 2."""
        return self.c - self.a - 2.0


@dataclass(frozen=True, eq=False)
class HeunSeries:
    """
    Frobenius coefficients A_0..A_{M-1} of one Heun solution.

    Attributes:
        coeffs (np.ndarray): Raw recurrence output, coeffs[0] = 1.
        params (HeunParams): Parameters the series was built from.
        truncated_at (int | None): Polynomial degree when the series terminates.
    """

    coeffs: np.ndarray
    params: HeunParams
    truncated_at: int | None = None

    @property
    def count(self) -> int:
        return len(self.coeffs)

    @property
    def polynomial(self) -> np.ndarray:
        """Coefficients that are summed: the polynomial part if truncated."""
        if self.truncated_at is None:
            return self.coeffs
        return self.coeffs[: self.truncated_at + 1]


def _truncation_degree(hp: HeunParams, coeffs: np.ndarray) -> int | None:
    half_gap = hp.gap / 2.0
    n = round(half_gap)
    if n < 0 or abs(half_gap - n) > COEFF_ZERO_TOL * max(1.0, abs(half_gap)):
        return None
    if n + 1 >= len(coeffs):
        return None
    scale = float(np.max(np.abs(coeffs[: n + 1])))
    if abs(coeffs[n + 1]) <= COEFF_ZERO_TOL * scale:
        return n
    return None


def series_coefficients(hp: HeunParams, count: int) -> HeunSeries:
    """
    Run the coefficient recurrence for `count` terms.

    Args:
        hp (HeunParams): Heun parameters.
        count (int): Number of coefficients, at least 2.

    Returns:
        HeunSeries: Coefficients with truncation diagnostics.

    Raises:
        InvalidParams: If count < 2.
    """
    if count < 2:
        raise InvalidParams(f"count must be >= 2, got {count}")

    eta, g, gap, b = hp.eta_star, hp.g, hp.gap, hp.b
    coeffs = np.zeros(count)
    coeffs[0] = 1.0
    coeffs[1] = (b * eta + g) / (2.0 * eta)
    for k in range(1, count - 1):
        coeffs[k + 1] = (
            (b * (k + eta) + g) * coeffs[k] + (2.0 * (k - 1) - gap) * coeffs[k - 1]
        ) / ((k + 1) * (k + 2.0 * eta))

    return HeunSeries(coeffs=coeffs, params=hp, truncated_at=_truncation_degree(hp, coeffs))


def _tail_estimate(coeffs: np.ndarray, z_max: float) -> float:
    """
    Geometric bound on the omitted terms from the decay of the last term pairs.

    Coefficients that underflowed to zero are skipped: the window ends at the
    last nonzero coefficient.
    """
    nonzero = np.flatnonzero(coeffs)
    end = int(nonzero[-1]) + 1 if nonzero.size else 0
    if end < 4 or z_max == 0.0:
        return 0.0
    with np.errstate(divide="ignore"):
        log_terms = np.log(np.abs(coeffs[end - 4 : end])) + np.arange(end - 4, end) * math.log(z_max)
    last = max(log_terms[2], log_terms[3])
    prev = max(log_terms[0], log_terms[1])
    if last == -np.inf:
        return 0.0
    if prev == -np.inf or last >= prev:
        return np.inf
    if last > 700.0:
        return np.inf
    ratio = math.exp(last - prev)
    return 2.0 * math.exp(last) * ratio / (1.0 - ratio)


def evaluate(hs: HeunSeries, z, tol: float = 1e-12):
    """
    Sum the series at z (scalar or array, z >= 0).

    A truncated series is evaluated exactly as a polynomial. Otherwise the
    geometric tail estimate at max(z) must stay below tol relative to the sum.

    Args:
        hs (HeunSeries): Coefficients.
        z (float | np.ndarray): Evaluation point(s).
        tol (float, optional): Relative tail tolerance. Defaults to 1e-12.

    Returns:
        float | np.ndarray: H(z), same shape as z.

    Raises:
        DomainError: If tol <= 0 or any z < 0.
        NotConverged: If the tail estimate exceeds tol.
    """
    if tol <= 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    zs = np.asarray(z, dtype=float)
    if np.any(zs < 0):
        raise DomainError("Heun series are evaluated on z >= 0")

    values = P.polyval(zs, hs.polynomial)
    if hs.truncated_at is None:
        z_max = float(np.max(zs)) if zs.size else 0.0
        tail = _tail_estimate(hs.coeffs, z_max)
        reference = max(1.0, abs(float(P.polyval(z_max, hs.coeffs))))
        if not (math.isfinite(tail) and math.isfinite(reference) and tail <= tol * reference):
            raise NotConverged(
                f"series of {hs.count} terms not converged at z={z_max:.6g} (tail estimate {tail:.3g})"
            )
    return float(values) if zs.ndim == 0 else values


def converged_series(hp: HeunParams, z_max: float, tol: float = 1e-12) -> HeunSeries:
    """
    Build a series long enough to be summed on [0, z_max].

    Doubles the term count from SERIES_START_COUNT up to SERIES_MAX_COUNT.

    Raises:
        NotConverged: If even SERIES_MAX_COUNT terms do not meet tol.
    """
    count = SERIES_START_COUNT
    while True:
        hs = series_coefficients(hp, count)
        try:
            evaluate(hs, z_max, tol)
            return hs
        except NotConverged:
            if count >= SERIES_MAX_COUNT:
                raise
            count *= 2


def truncation_residual(hp: HeunParams, n: int) -> tuple[float, float]:
    """
    The two polynomial conditions at degree n.

    Returns:
        tuple[float, float]: (A_{n+1}, c - a - 2 - 2n).
    """
    if n < 0:
        raise InvalidParams(f"n must be >= 0, got {n}")
    hs = series_coefficients(hp, n + 2)
    return float(hs.coeffs[n + 1]), hp.gap - 2.0 * n


def coefficient_condition(hp: HeunParams, n: int) -> float:
    """A_{n+1} relative to the largest of A_0..A_n."""
    hs = series_coefficients(hp, n + 2)
    return float(hs.coeffs[n + 1] / np.max(np.abs(hs.coeffs[: n + 1])))


def _sigma(j: int, eta: float, n: int) -> float:
    return 2.0 * (j + 1) * (j + 2.0 * eta) * (n - j)


def continuant(hp: HeunParams, n: int) -> float:
    """
    Determinant D_{n+1} of the (n+1)×(n+1) tridiagonal matrix with diagonal
    -(b(η*+j) + g), super-diagonal 1 and sub-diagonal Σ_j = 2(j+1)(j+2η*)(n-j).

    D_{n+1} = (-1)^{n+1} Π_{i=1}^{n+1} i(i-1+2η*) · A_{n+1} when c - a - 2 = 2n,
    so both vanish for the same b.
    """
    if n < 0:
        raise InvalidParams(f"n must be >= 0, got {n}")
    eta, g, b = hp.eta_star, hp.g, hp.b
    prev, current = 1.0, -(b * eta + g)
    for j in range(1, n + 1):
        prev, current = current, -(b * (eta + j) + g) * current - _sigma(j - 1, eta, n) * prev
    return current


def continuant_roots(a: float, d: float, n: int) -> np.ndarray:
    """
    All n+1 values of b that null the continuant, ascending.

    They are the eigenvalues of the symmetric tridiagonal matrix with diagonal
    -g/(η*+j) and off-diagonal √Σ_j / √((η*+j)(η*+j+1)), hence real and simple.
    """
    hp = HeunParams(a=a, b=0.0, c=a + 2.0 + 2.0 * n, d=d)
    eta, g = hp.eta_star, hp.g
    weights = eta + np.arange(n + 1)
    diag = -g / weights
    if n == 0:
        return diag
    sigma = np.array([_sigma(j, eta, n) for j in range(n)])
    off = np.sqrt(sigma) / np.sqrt(weights[:-1] * weights[1:])
    return eigvalsh_tridiagonal(diag, off)


def ode_residual(hs: HeunSeries, z: float) -> float:
    """
    Heun ODE residual of the summed series at z, relative to its largest term.
    """
    hp = hs.params
    coeffs = hs.polynomial
    h0 = P.polyval(z, coeffs)
    h1 = P.polyval(z, P.polyder(coeffs))
    h2 = P.polyval(z, P.polyder(coeffs, 2))
    terms = (
        z * h2,
        (1.0 + hp.a - hp.b * z - 2.0 * z * z) * h1,
        (hp.gap * z - 0.5 * (hp.d + hp.b * (1.0 + hp.a))) * h0,
    )
    scale = max(abs(t) for t in terms)
    return 0.0 if scale == 0.0 else abs(sum(terms)) / scale
