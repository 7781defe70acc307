"""Dielectric response models evaluated at imaginary frequencies.

All frequencies are angular frequencies in rad/s, temperatures in K.  Every
model is an immutable dataclass, so instances can be shared freely between
threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ..constants import C


class ZeroFrequencyError(ValueError):
    """A permittivity that diverges at zero frequency was evaluated at xi = 0.

    The zero-frequency term must be obtained from :func:`low_frequency_class`.
    """


@dataclass(frozen=True)
class Oscillator:
    """Lorentz oscillator of the bound (core) electrons.

    ``strength`` is in rad^2/s^2, ``frequency`` and ``relaxation`` in rad/s.
    """

    strength: float
    frequency: float
    relaxation: float = 0.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"oscillator frequency must be positive, got {self.frequency!r}")
        if self.strength < 0:
            raise ValueError(f"oscillator strength must be non-negative, got {self.strength!r}")
        if self.relaxation < 0:
            raise ValueError(f"oscillator relaxation must be non-negative, got {self.relaxation!r}")

    @classmethod
    def from_static(cls, delta_eps, frequency, relaxation=0.0):
        """Oscillator contributing ``delta_eps`` to the static permittivity."""
        return cls(delta_eps * frequency**2, frequency, relaxation)


@dataclass(frozen=True)
class RelaxationLaw:
    """Power-law temperature dependence gamma(T) = gamma_ref * (T/T_ref)**exponent."""

    gamma_ref: float
    T_ref: float = 300.0
    exponent: float = 1.0

    def __post_init__(self):
        if not self.gamma_ref > 0:
            raise ValueError("gamma_ref must be positive")
        if not self.T_ref > 0:
            raise ValueError("T_ref must be positive")
        if self.exponent < 0:
            raise ValueError("relaxation exponent must be non-negative")

    def __call__(self, T):
        if self.exponent == 0:
            return self.gamma_ref
        return self.gamma_ref * (T / self.T_ref) ** self.exponent


@dataclass(frozen=True)
class MagneticLaw:
    """Static permeability at l = 0, unity at every nonzero Matsubara frequency."""

    mu0: float = 1.0

    def __post_init__(self):
        if self.mu0 < 1:
            raise ValueError(f"static permeability must be >= 1, got {self.mu0!r}")

    def __call__(self, l):
        return self.mu0 if l == 0 else 1.0


NONMAGNETIC = MagneticLaw(1.0)


# --- zero-frequency behaviour -------------------------------------------------


@dataclass(frozen=True)
class Finite:
    """eps(i xi) tends to the finite value ``eps0``."""

    eps0: float


@dataclass(frozen=True)
class InverseXi:
    """eps(i xi) ~ coefficient / xi as xi -> 0 (dc conductivity, Drude)."""

    coefficient: float


@dataclass(frozen=True)
class InverseXiSquared:
    """eps(i xi) ~ omega_p**2 / xi**2 as xi -> 0 (plasma model)."""

    omega_p: float


LowFrequencyClass = Union[Finite, InverseXi, InverseXiSquared]


# --- models --------------------------------------------------------------------


def eval_core_permittivity(oscillators: Sequence[Oscillator], xi):
    """1 + sum_j g_j / (omega_j**2 + xi**2 + gamma_j * xi); finite for xi >= 0."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("imaginary frequency must be non-negative")
    eps = np.ones_like(xi)
    for osc in oscillators:
        if not isinstance(osc, Oscillator):
            raise TypeError(f"expected Oscillator, got {type(osc).__name__}")
        if not osc.frequency > 0:
            raise ValueError("oscillator with zero frequency")
        eps = eps + osc.strength / (osc.frequency**2 + xi * xi + osc.relaxation * xi)
    return eps if eps.ndim else float(eps)


class MaterialModel:
    """Base class of the permittivity models."""

    magnetic: MagneticLaw

    def epsilon(self, xi, T=300.0):  # pragma: no cover - abstract
        raise NotImplementedError

    def low_frequency(self, T=300.0) -> LowFrequencyClass:  # pragma: no cover - abstract
        raise NotImplementedError

    def _check_positive(self, xi):
        xi = np.asarray(xi, dtype=float)
        if np.any(xi <= 0):
            raise ZeroFrequencyError(
                f"{type(self).__name__} diverges at xi = 0; use low_frequency_class()")
        return xi


@dataclass(frozen=True)
class Vacuum(MaterialModel):
    magnetic: MagneticLaw = NONMAGNETIC

    def epsilon(self, xi, T=300.0):
        xi = np.asarray(xi, dtype=float)
        out = np.ones_like(xi)
        return out if out.ndim else 1.0

    def low_frequency(self, T=300.0):
        return Finite(1.0)


@dataclass(frozen=True)
class CoreOscillators(MaterialModel):
    """Insulator described by bound-electron oscillators only."""

    oscillators: tuple = ()
    magnetic: MagneticLaw = NONMAGNETIC

    def __post_init__(self):
        object.__setattr__(self, "oscillators", tuple(self.oscillators))

    def epsilon(self, xi, T=300.0):
        return eval_core_permittivity(self.oscillators, xi)

    def low_frequency(self, T=300.0):
        return Finite(float(eval_core_permittivity(self.oscillators, 0.0)))


VACUUM_CORE = CoreOscillators(())


@dataclass(frozen=True)
class DcDielectric(MaterialModel):
    """Core oscillators plus the dc-conductivity term 4*pi*sigma0/xi.

    ``sigma0`` is in Gaussian frequency units (rad/s).
    """

    core: CoreOscillators = VACUUM_CORE
    sigma0: float = 0.0
    magnetic: MagneticLaw = NONMAGNETIC

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError("dc conductivity must be positive")

    def epsilon(self, xi, T=300.0):
        xi = self._check_positive(xi)
        return self.core.epsilon(xi) + 4.0 * math.pi * self.sigma0 / xi

    def low_frequency(self, T=300.0):
        return InverseXi(4.0 * math.pi * self.sigma0)


@dataclass(frozen=True)
class Drude(MaterialModel):
    core: CoreOscillators = VACUUM_CORE
    omega_p: float = 0.0
    relaxation: RelaxationLaw | None = None
    magnetic: MagneticLaw = NONMAGNETIC

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("plasma frequency must be positive")

    def gamma(self, T):
        return 0.0 if self.relaxation is None else self.relaxation(T)

    def epsilon(self, xi, T=300.0):
        xi = self._check_positive(xi)
        return self.core.epsilon(xi) + self.omega_p**2 / (xi * (xi + self.gamma(T)))

    def low_frequency(self, T=300.0):
        gamma = self.gamma(T)
        if gamma == 0:
            # zero relaxation is the plasma model
            return InverseXiSquared(self.omega_p)
        return InverseXi(self.omega_p**2 / gamma)


@dataclass(frozen=True)
class Plasma(MaterialModel):
    core: CoreOscillators = VACUUM_CORE
    omega_p: float = 0.0
    magnetic: MagneticLaw = NONMAGNETIC

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("plasma frequency must be positive")

    def epsilon(self, xi, T=300.0):
        xi = self._check_positive(xi)
        return self.core.epsilon(xi) + self.omega_p**2 / (xi * xi)

    def low_frequency(self, T=300.0):
        return InverseXiSquared(self.omega_p)


@dataclass(frozen=True)
class Tabulated(MaterialModel):
    """Permittivity obtained from tabulated Im eps(omega) by the Kramers-Kronig relation.

    ``cache`` optionally holds precomputed ``(T, (eps_1, eps_2, ...))`` values at the
    Matsubara frequencies of that temperature.
    """

    table: "SpectralTable" = None
    magnetic: MagneticLaw = NONMAGNETIC
    cache: tuple | None = field(default=None, compare=False)

    def epsilon(self, xi, T=300.0):
        from .kramers_kronig import kramers_kronig_transform

        return kramers_kronig_transform(self.table, xi)

    def low_frequency(self, T=300.0):
        from .kramers_kronig import ConstantEps, DrudeTail, PlasmaTail, kramers_kronig_transform

        low = self.table.low
        if isinstance(low, DrudeTail):
            return InverseXi(low.omega_p**2 / low.gamma)
        if isinstance(low, PlasmaTail):
            return InverseXiSquared(low.omega_p)
        if isinstance(low, ConstantEps) and low.eps0 is not None:
            return Finite(low.eps0)
        return Finite(float(kramers_kronig_transform(self.table, 0.0)))

    def cached_epsilon(self, l, T):
        if self.cache is not None and l >= 1:
            cache_T, values = self.cache
            if cache_T == T and l <= len(values):
                return values[l - 1]
        return None


def eval_permittivity(model: MaterialModel, l: int, T: float, xi=None):
    """Permittivity at the Matsubara frequency of index ``l``.

    Divergent models raise :class:`ZeroFrequencyError` at l = 0; finite models
    return eps(0).
    """
    from ..core import matsubara_frequency

    if l < 0:
        raise ValueError("Matsubara index must be non-negative")
    if xi is None:
        xi = matsubara_frequency(l, T)
    if l == 0 and xi != 0:
        raise ValueError("the l = 0 Matsubara frequency is zero")
    if l == 0:
        lf = model.low_frequency(T)
        if isinstance(lf, Finite):
            return lf.eps0
        raise ZeroFrequencyError(
            f"{type(model).__name__} diverges at xi = 0; use low_frequency_class()")
    if isinstance(model, Tabulated):
        cached = model.cached_epsilon(l, T)
        if cached is not None:
            return cached
    return float(model.epsilon(xi, T))


def low_frequency_class(model: MaterialModel, T: float = 300.0) -> LowFrequencyClass:
    return model.low_frequency(T)


def matsubara_response(model: MaterialModel, l: int, T: float, xi: float):
    """Return ``(eps, mu, kappa2)`` of a medium at Matsubara index ``l``.

    ``kappa2`` is the term eps*mu*xi**2/c**2 entering k_l**2 = k_perp**2 + kappa2.
    At l = 0 a divergent permittivity is reported as ``eps = inf`` with the
    finite zero-frequency limit of ``kappa2``.
    """
    mu = model.magnetic(l)
    if l == 0:
        lf = model.low_frequency(T)
        if isinstance(lf, Finite):
            return lf.eps0, mu, 0.0
        if isinstance(lf, InverseXi):
            return math.inf, mu, 0.0
        return math.inf, mu, mu * lf.omega_p**2 / C**2
    eps = eval_permittivity(model, l, T, xi)
    return eps, mu, eps * mu * xi * xi / C**2
