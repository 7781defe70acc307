"""Comparative computations built on the Lifshitz machinery.

Proximity-force conversions, the dynamic-AFM frequency shift, Drude versus
plasma comparisons, differential-force schemes, low-temperature entropy
classification and graphene coating ratios.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

from .core import (
    DEFAULT_QUADRATURE,
    ConvergenceError,
    GeometryThermal,
    QuadratureSpec,
    casimir_entropy,
    casimir_pressure,
    force_gradient_sphere_plate,
    free_energy,
)
from .layered import LayeredBody, PerfectReflector
from .materials import library
from .materials.models import MaterialModel


@dataclass(frozen=True)
class Diagnostics:
    """Convergence record aggregated over the Lifshitz evaluations behind a value."""

    l_max: int = 0
    remainder: float = 0.0
    evals: int = 0

    @classmethod
    def of(cls, *results):
        return cls(max(r.l_max for r in results), math.fsum(r.remainder for r in results),
                   sum(r.evals for r in results))


# --- conversions ---------------------------------------------------------------


@dataclass(frozen=True)
class PFAForce:
    force: float
    rel_error_bound: float | None = None


def pfa_error_bound(a, R):
    """Upper bound on the relative error of the proximity force approximation."""
    return a / R


def pfa_sphere_plate_force(free_energy_per_area, R, a=None) -> PFAForce:
    """Sphere-plate force F = 2 pi R F_pp (N) from the plate-plate free energy."""
    bound = None if a is None else pfa_error_bound(a, R)
    return PFAForce(2.0 * math.pi * R * free_energy_per_area, bound)


def pressure_from_gradient(gradient, R):
    """Plate-plate pressure -(1/(2 pi R)) dF/da from a measured sphere-plate gradient."""
    if not R > 0:
        raise ValueError("sphere radius must be positive")
    return -gradient / (2.0 * math.pi * R)


@dataclass(frozen=True)
class OscillatorProbe:
    omega0: float
    k_spring: float

    def __post_init__(self):
        if not (self.omega0 > 0 and self.k_spring > 0):
            raise ValueError("natural frequency and spring constant must be positive")


def frequency_shift(probe: OscillatorProbe, gradient):
    """Resonance shift (rad/s) of a dynamic AFM cantilever in the linear regime."""
    return -probe.omega0 / (2.0 * probe.k_spring) * gradient


# --- Drude versus plasma ---------------------------------------------------------


@dataclass(frozen=True)
class SpherePlateSetup:
    R: float
    sphere: object
    plate: object
    separations: tuple
    T: float = 300.0
    allow_large_ratio: bool = False

    def __post_init__(self):
        object.__setattr__(self, "separations", tuple(float(a) for a in self.separations))
        if not self.R > 0:
            raise ValueError("sphere radius must be positive")
        if not self.allow_large_ratio:
            for a in self.separations:
                if a / self.R >= 0.1:
                    raise ValueError(f"a/R = {a / self.R:.3g} >= 0.1 at a = {a!r}")


def direction(drude, plasma):
    """Which approach gives the smaller gradient."""
    if drude < plasma:
        return "drude<plasma"
    if plasma < drude:
        return "plasma<drude"
    return "equal"


@dataclass(frozen=True)
class ComparisonPoint:
    a: float
    drude: float | None
    plasma: float | None
    status: str = "ok"
    diagnostics: Diagnostics = field(default=Diagnostics(), compare=False)

    @property
    def direction(self):
        if self.drude is None or self.plasma is None:
            return None
        return direction(self.drude, self.plasma)

    @property
    def rel_diff_percent(self):
        """100 |drude - plasma| / |plasma|."""
        if self.drude is None or self.plasma is None:
            return None
        return 100.0 * abs(self.drude - self.plasma) / abs(self.plasma)


@dataclass(frozen=True)
class ComparisonVerdict:
    points: tuple

    def holds(self, expected):
        return all(p.direction == expected for p in self.points)


def plasma_counterpart(body):
    """Body with every Drude-type permittivity replaced by its plasma-model version."""
    if isinstance(body, MaterialModel):
        return library.to_plasma(body)
    if isinstance(body, LayeredBody):
        return replace(body, substrate=library.to_plasma(body.substrate),
                       layers=tuple((library.to_plasma(m), d) for m, d in body.layers))
    return body


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def drude_plasma_comparison(setup: SpherePlateSetup, q: QuadratureSpec = DEFAULT_QUADRATURE,
                            threads=1) -> ComparisonVerdict:
    """Sphere-plate gradients with the Drude and the plasma model at each separation.

    The bodies of ``setup`` carry the Drude description; the plasma variant is
    derived from them.  A convergence failure is recorded at its separation.
    """
    sphere_p = plasma_counterpart(setup.sphere)
    plate_p = plasma_counterpart(setup.plate)

    def point(a):
        g = GeometryThermal(a, setup.T)
        try:
            d = force_gradient_sphere_plate(setup.sphere, setup.plate, setup.R, g, q)
            p = force_gradient_sphere_plate(sphere_p, plate_p, setup.R, g, q)
        except ConvergenceError as exc:
            return ComparisonPoint(a, None, None, "convergence_failure",
                                   Diagnostics.of(exc.partial))
        return ComparisonPoint(a, d.value, p.value, "ok", Diagnostics.of(d, p))

    return ComparisonVerdict(tuple(_map(point, setup.separations, threads)))


# --- differential forces ---------------------------------------------------------


def _force_difference(sphere, plate1, plate2, R, a, T, q):
    g = GeometryThermal(a, T)
    r1 = free_energy(sphere, plate1, g, q)
    r2 = free_energy(sphere, plate2, g, q)
    value = (pfa_sphere_plate_force(r1.value, R).force - pfa_sphere_plate_force(r2.value, R).force)
    return value, Diagnostics.of(r1, r2)


def optical_modulation_detailed(sphere, plate_metallic, plate_dielectric, R, a, T,
                                q: QuadratureSpec = DEFAULT_QUADRATURE):
    return _force_difference(sphere, plate_metallic, plate_dielectric, R, a, T, q)


def differential_force_optical_modulation(sphere, plate_metallic, plate_dielectric, R, a, T,
                                          q: QuadratureSpec = DEFAULT_QUADRATURE):
    """F_mm - F_dm: force with the illuminated plate minus force with the dark plate (N)."""
    return optical_modulation_detailed(sphere, plate_metallic, plate_dielectric, R, a, T, q)[0]


def magnetic_stripes_detailed(R=150e-6, overlayer_d=30e-9, a=300e-9, T=300.0, approach="drude",
                              gold=None, nickel=None, q: QuadratureSpec = DEFAULT_QUADRATURE):
    if approach not in ("drude", "plasma"):
        raise ValueError(f"approach must be 'drude' or 'plasma', got {approach!r}")
    gold = gold or library.gold_drude()
    nickel = nickel or library.nickel_drude()
    if approach == "plasma":
        gold, nickel = library.to_plasma(gold), library.to_plasma(nickel)
    return _force_difference(nickel, LayeredBody(nickel, ((gold, overlayer_d),)), gold,
                             R, a, T, q)


def differential_force_magnetic_stripes(R=150e-6, overlayer_d=30e-9, a=300e-9, T=300.0,
                                        approach="drude", gold=None, nickel=None,
                                        q: QuadratureSpec = DEFAULT_QUADRATURE):
    """F_NiAuNi - F_NiAu for a Ni sphere above gold-covered Ni and gold stripes (N).

    ``gold`` and ``nickel`` default to the Drude library models; with
    ``approach="plasma"`` their plasma counterparts are used.
    """
    return magnetic_stripes_detailed(R, overlayer_d, a, T, approach, gold, nickel, q)[0]


# --- entropy at low temperature ----------------------------------------------------


class NernstLimit(str, Enum):
    NEGATIVE_NONZERO = "NegativeNonzero"
    ZERO = "Zero"
    POSITIVE_NONZERO = "PositiveNonzero"
    INCONCLUSIVE = "Inconclusive"


def _line_fit(ts, ss):
    """Least-squares line S = S0 + b T; returns (S0, standard error of S0)."""
    n = len(ts)
    mt = sum(ts) / n
    ms = sum(ss) / n
    sxx = sum((t - mt) ** 2 for t in ts)
    slope = sum((t - mt) * (s - ms) for t, s in zip(ts, ss)) / sxx
    s0 = ms - slope * mt
    ssr = sum((s - s0 - slope * t) ** 2 for t, s in zip(ts, ss))
    var = ssr / (n - 2) if n > 2 else 0.0
    return s0, math.sqrt(var * (1.0 / n + mt * mt / sxx))


def _classify(s0, stderr, floor):
    if abs(s0) > 3.0 * stderr and abs(s0) > floor:
        return NernstLimit.NEGATIVE_NONZERO if s0 < 0 else NernstLimit.POSITIVE_NONZERO
    return NernstLimit.ZERO


@dataclass(frozen=True)
class NernstScan:
    temperatures: tuple
    entropies: tuple
    S0: float
    S0_stderr: float
    classification: NernstLimit
    previous: tuple = field(default=())
    diagnostics: Diagnostics = field(default=Diagnostics(), compare=False)


def nernst_entropy_scan(body1, body2, a, temperatures, q: QuadratureSpec | None = None,
                        dT_fraction=0.125, stability=0.2, threads=1) -> NernstScan:
    """Entropy along a descending temperature sequence and its T -> 0 limit.

    The limit is the intercept of a straight-line fit through the three
    lowest temperatures, counted as nonzero when it exceeds three standard
    errors.  The fit through the three points before the last one must
    agree in class and, for a nonzero limit, within ``stability``.
    """
    temps = tuple(float(t) for t in temperatures)
    if len(temps) < 4:
        raise ValueError("at least 4 temperatures are required")
    if any(t2 >= t1 for t1, t2 in zip(temps, temps[1:])):
        raise ValueError("temperatures must be strictly descending")
    q = q or QuadratureSpec(rtol=1e-10, matsubara_rtol=1e-12)

    def entropy(T):
        return casimir_entropy(body1, body2, GeometryThermal(a, T), q, dT=dT_fraction * T)

    results = _map(entropy, temps, threads)
    ss = tuple(r.value for r in results)
    floor = 10.0 * max(r.remainder for r in results)
    s0, se = _line_fit(temps[-3:], ss[-3:])
    p0, pse = _line_fit(temps[-4:-1], ss[-4:-1])
    last, prev = _classify(s0, se, floor), _classify(p0, pse, floor)
    cls = last
    if last != prev:
        cls = NernstLimit.INCONCLUSIVE
    elif last != NernstLimit.ZERO and abs(s0 - p0) > stability * abs(s0):
        cls = NernstLimit.INCONCLUSIVE
    return NernstScan(temps, ss, s0, se, cls, (p0, pse), Diagnostics.of(*results))


# --- graphene coatings -------------------------------------------------------------


def graphene_ratio_detailed(plate_material, provider, a, T=300.0,
                            q: QuadratureSpec = DEFAULT_QUADRATURE):
    bare = plate_material if isinstance(plate_material, LayeredBody) else LayeredBody(plate_material)
    coated = replace(bare, graphene=provider)
    g = GeometryThermal(a, T)
    # same backend for both so that a transparent sheet reproduces the bare value exactly
    p_gg = casimir_pressure(coated, coated, g, q, backend="python")
    p = casimir_pressure(bare, bare, g, q, backend="python")
    return p_gg.value / p.value, Diagnostics.of(p_gg, p)


def graphene_pressure_ratio(plate_material, provider, a, T=300.0,
                            q: QuadratureSpec = DEFAULT_QUADRATURE):
    """P_gg / P: pressure between two graphene-coated plates over the bare-plate pressure."""
    return graphene_ratio_detailed(plate_material, provider, a, T, q)[0]


__all__ = [
    "ComparisonPoint", "ComparisonVerdict", "Diagnostics", "NernstLimit", "NernstScan", "OscillatorProbe",
    "PFAForce", "PerfectReflector", "SpherePlateSetup", "differential_force_magnetic_stripes",
    "differential_force_optical_modulation", "direction", "drude_plasma_comparison",
    "frequency_shift", "graphene_pressure_ratio", "nernst_entropy_scan", "pfa_error_bound",
    "pfa_sphere_plate_force", "plasma_counterpart", "pressure_from_gradient",
]
