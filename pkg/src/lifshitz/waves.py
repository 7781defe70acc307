"""Matsubara frequencies and the wave-vector bookkeeping of a single mode."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import C, HBAR, K_B


def matsubara_frequency(l: int, T: float) -> float:
    """xi_l = 2 pi k_B T l / hbar in rad/s."""
    if l < 0:
        raise ValueError("Matsubara index must be non-negative")
    if not T > 0:
        raise ValueError("temperature must be positive")
    return 2.0 * math.pi * K_B * T * l / HBAR


@dataclass(frozen=True)
class WaveSlot:
    """One (l, k_perp) mode at temperature T."""

    l: int
    xi: float
    k_perp: float
    T: float = 300.0

    @classmethod
    def at(cls, l, T, k_perp):
        return cls(l, matsubara_frequency(l, T), k_perp, T)

    @property
    def q(self):
        return math.sqrt(self.k_perp**2 + (self.xi / C) ** 2)

    def k_medium(self, eps, mu):
        if math.isinf(eps):
            raise ValueError("k_l is undefined for a divergent permittivity")
        return math.sqrt(self.k_perp**2 + eps * mu * (self.xi / C) ** 2)


@dataclass(frozen=True)
class ReflectionPair:
    r_tm: float
    r_te: float

    def __iter__(self):
        yield self.r_tm
        yield self.r_te
