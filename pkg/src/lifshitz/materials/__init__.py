"""Material response models at imaginary Matsubara frequencies."""
from .kramers_kronig import (
    ConstantEps,
    DrudeTail,
    ExtrapolationError,
    PlasmaTail,
    PowerLawTail,
    SpectralTable,
    SpectralTableError,
    kramers_kronig_transform,
)
from .models import (
    CoreOscillators,
    DcDielectric,
    Drude,
    Finite,
    InverseXi,
    InverseXiSquared,
    LowFrequencyClass,
    MagneticLaw,
    MaterialModel,
    Oscillator,
    Plasma,
    RelaxationLaw,
    Tabulated,
    Vacuum,
    ZeroFrequencyError,
    eval_core_permittivity,
    eval_permittivity,
    low_frequency_class,
    matsubara_response,
)

__all__ = [
    "ConstantEps", "CoreOscillators", "DcDielectric", "Drude", "DrudeTail",
    "ExtrapolationError", "Finite", "InverseXi", "InverseXiSquared", "LowFrequencyClass",
    "MagneticLaw", "MaterialModel", "Oscillator", "Plasma", "PlasmaTail", "PowerLawTail",
    "RelaxationLaw", "SpectralTable", "SpectralTableError", "Tabulated", "Vacuum",
    "ZeroFrequencyError", "eval_core_permittivity", "eval_permittivity",
    "kramers_kronig_transform", "low_frequency_class", "matsubara_response",
]
