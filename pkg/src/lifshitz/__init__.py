"""Lifshitz theory of dispersion forces between material bodies."""
from .core import (
    ConvergenceError,
    EntropyStepError,
    GeometryThermal,
    LifshitzResult,
    QuadratureSpec,
    casimir_entropy,
    casimir_pressure,
    force_gradient_sphere_plate,
    free_energy,
    fresnel_coefficients,
)
from .kernel import BACKEND
from .layered import LayeredBody, PerfectReflector
from .waves import ReflectionPair, WaveSlot, matsubara_frequency

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConvergenceError", "EntropyStepError", "GeometryThermal", "LayeredBody",
    "LifshitzResult", "PerfectReflector", "QuadratureSpec", "ReflectionPair", "WaveSlot",
    "casimir_entropy", "casimir_pressure", "force_gradient_sphere_plate", "free_energy",
    "fresnel_coefficients", "matsubara_frequency",
]
