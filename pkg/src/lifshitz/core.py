"""Lifshitz free energy, pressure, entropy and sphere-plate force gradient.

With y = 2 a q_l the free energy per unit area reads

    F = k_B T / (8 pi a^2) * sum'_l int_{y_l}^{inf} y dy sum_alpha ln(1 - r1 r2 e^{-y}),

y_l = 2 a xi_l / c, and the pressure follows from the analytically
differentiated integrand,

    P = -k_B T / (8 pi a^3) * sum'_l int y^2 dy sum_alpha r1 r2 / (e^y - r1 r2).

The primed sum gives the l = 0 term weight 1/2.  Terms are accumulated in
ascending l and the final value is an exactly rounded sum, so results do
not depend on how callers parallelise over grid points.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .constants import C, K_B
from .kernel import FREE_ENERGY, PRESSURE, integrate_term
from .layered import media_stack, stack_reflection
from .materials.models import MaterialModel
from .waves import ReflectionPair, WaveSlot, matsubara_frequency

__all__ = [
    "ConvergenceError", "EntropyStepError", "GeometryThermal", "LifshitzResult",
    "QuadratureSpec", "casimir_entropy", "casimir_pressure", "force_gradient_sphere_plate",
    "free_energy", "fresnel_coefficients", "matsubara_frequency",
]


@dataclass(frozen=True)
class GeometryThermal:
    a: float
    T: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"separation must be positive, got {self.a!r}")
        if not self.T > 0:
            raise ValueError(f"temperature must be positive, got {self.T!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and caps of the y-integral and the Matsubara sum.

    ``max_evals`` caps the integrand evaluations of a single Matsubara term.
    """

    rtol: float = 1e-9
    matsubara_rtol: float = 1e-9
    l_max: int = 1_000_000
    max_evals: int = 20_000

    def __post_init__(self):
        for name in ("rtol", "matsubara_rtol"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
        if self.l_max < 1 or self.max_evals < 75:
            raise ValueError("l_max must be >= 1 and max_evals >= 75")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class LifshitzResult:
    """A computed quantity with the diagnostics of its Matsubara sum."""

    value: float
    l_max: int
    remainder: float
    evals: int
    quantity: str = ""
    unit: str = ""


class ConvergenceError(RuntimeError):
    """Tolerance not reached within the caps; ``partial`` holds what was computed."""

    def __init__(self, message, partial: LifshitzResult):
        super().__init__(message)
        self.partial = partial


class EntropyStepError(ConvergenceError):
    """The two Richardson levels of the temperature derivative disagree."""


def fresnel_coefficients(body: MaterialModel, slot: WaveSlot) -> ReflectionPair:
    """Reflection coefficients of a semispace at imaginary frequency.

    At l = 0 the zero-frequency class of the material selects the limit.
    """
    if slot.l == 0 and slot.xi != 0:
        raise ValueError("a slot with l = 0 must have xi = 0")
    if slot.l > 0 and slot.xi <= 0:
        raise ValueError("a slot with l > 0 must have xi > 0")
    media = media_stack(body, slot.l, slot.T, slot.xi)
    r_tm, r_te = stack_reflection(media, slot.q, slot.k_perp**2)
    return ReflectionPair(float(r_tm), float(r_te))


def _matsubara_sum(quantity, body1, body2, g: GeometryThermal, q: QuadratureSpec, backend=None):
    """Primed Matsubara sum of the dimensionless y-integrals.

    Returns ``(sum, last_l, remainder_estimate, evals)``.  The loop stops once
    the geometric estimate of the neglected tail stays below
    ``matsubara_rtol * |sum|`` for three consecutive terms.
    """
    two_a = 2.0 * g.a
    terms = []
    running = 0.0
    evals = 0
    calm = 0
    prev = None
    remainder = math.inf
    for l in range(q.l_max + 1):
        xi = matsubara_frequency(l, g.T)
        y_lo = two_a * xi / C
        value, _, n, ok = integrate_term(quantity, y_lo, two_a, body1, body2, l, g.T, xi,
                                         q.rtol, q.max_evals, backend=backend)
        evals += n
        if not ok:
            raise ConvergenceError(
                f"y-integral of Matsubara term l={l} did not reach rtol={q.rtol} "
                f"within {q.max_evals} evaluations",
                LifshitzResult(math.fsum(terms), l, math.inf, evals))
        term = 0.5 * value if l == 0 else value
        terms.append(term)
        running += term
        if l >= 2:
            if prev == 0:
                ratio = 0.0 if term == 0 else math.inf
            else:
                ratio = abs(term / prev)
            remainder = abs(term) * ratio / (1.0 - ratio) if ratio < 1 else math.inf
            calm = calm + 1 if remainder <= q.matsubara_rtol * abs(running) else 0
            if calm >= 3:
                return math.fsum(terms), l, remainder, evals
        prev = term
    raise ConvergenceError(
        f"Matsubara sum not converged by l_max={q.l_max}",
        LifshitzResult(math.fsum(terms), q.l_max, remainder, evals))


def _scaled(quantity, body1, body2, g, q, factor, name, unit, backend):
    try:
        total, l_used, rem, evals = _matsubara_sum(quantity, body1, body2, g, q, backend)
    except ConvergenceError as exc:
        p = exc.partial
        exc.partial = LifshitzResult(factor * p.value, p.l_max, abs(factor) * p.remainder,
                                     p.evals, name, unit)
        raise
    return LifshitzResult(factor * total, l_used, abs(factor) * rem, evals, name, unit)


def free_energy(body1, body2, g: GeometryThermal, q: QuadratureSpec = DEFAULT_QUADRATURE,
                backend=None) -> LifshitzResult:
    """Casimir free energy per unit area (J/m^2) between two plates."""
    factor = K_B * g.T / (8.0 * math.pi * g.a**2)
    return _scaled(FREE_ENERGY, body1, body2, g, q, factor, "free_energy", "J/m^2", backend)


def casimir_pressure(body1, body2, g: GeometryThermal, q: QuadratureSpec = DEFAULT_QUADRATURE,
                     backend=None) -> LifshitzResult:
    """Casimir pressure P = -dF/da (N/m^2); negative means attraction."""
    factor = -K_B * g.T / (8.0 * math.pi * g.a**3)
    return _scaled(PRESSURE, body1, body2, g, q, factor, "pressure", "N/m^2", backend)


def force_gradient_sphere_plate(body_sphere, body_plate, R: float, g: GeometryThermal,
                                q: QuadratureSpec = DEFAULT_QUADRATURE,
                                backend=None) -> LifshitzResult:
    """Gradient dF/da (N/m) of the sphere-plate force in the proximity force approximation.

    Shares the integrand of the pressure, so dF/da = -2 pi R P exactly.
    """
    if not R > 0:
        raise ValueError("sphere radius must be positive")
    if g.a / R > 0.1:
        warnings.warn(f"a/R = {g.a / R:.3g} exceeds 0.1; the proximity force approximation "
                      "is unreliable", stacklevel=2)
    factor = 2.0 * math.pi * R * K_B * g.T / (8.0 * math.pi * g.a**3)
    return _scaled(PRESSURE, body_sphere, body_plate, g, q, factor, "force_gradient", "N/m",
                   backend)


def casimir_entropy(body1, body2, g: GeometryThermal, q: QuadratureSpec = DEFAULT_QUADRATURE,
                    dT: float | None = None, step_rtol: float = 0.05,
                    backend=None) -> LifshitzResult:
    """Casimir entropy per unit area S = -dF/dT (J/(K m^2)).

    Central differences with steps dT and dT/2 combined by Richardson
    extrapolation; each temperature is a full recomputation.
    """
    if dT is None:
        dT = g.T / 8.0
    if not 0 < dT < g.T / 4.0:
        raise ValueError(f"temperature step must lie in (0, T/4), got {dT!r}")
    results = {}
    for step in (dT, -dT, 0.5 * dT, -0.5 * dT):
        try:
            results[step] = free_energy(body1, body2, replace(g, T=g.T + step), q, backend)
        except ConvergenceError as exc:
            raise ConvergenceError(f"free energy at T={g.T + step} K: {exc}",
                                   replace(exc.partial, quantity="entropy",
                                           unit="J/(K m^2)")) from exc
    d1 = (results[dT].value - results[-dT].value) / (2.0 * dT)
    d2 = (results[0.5 * dT].value - results[-0.5 * dT].value) / dT
    value = -(4.0 * d2 - d1) / 3.0
    noise = sum(abs(r.value) * q.rtol + r.remainder for r in results.values())
    remainder = 2.0 * noise / dT
    result = LifshitzResult(value, max(r.l_max for r in results.values()), remainder,
                            sum(r.evals for r in results.values()), "entropy", "J/(K m^2)")
    if abs(d1 - d2) > max(step_rtol * abs(value), 10.0 * remainder):
        raise EntropyStepError(f"Richardson levels disagree (|D(h) - D(h/2)| = "
                               f"{abs(d1 - d2):.3g}); reduce dT", result)
    return result
