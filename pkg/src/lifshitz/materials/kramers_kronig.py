"""Tabulated optical data and its conversion to eps(i xi).

The dispersion relation

    eps(i xi) = 1 + (2/pi) * int_0^inf omega Im eps(omega) / (omega**2 + xi**2) d omega

is integrated over the tabulated range with log-log interpolation of Im eps
between samples; the regions below and above the table are added in closed
form from the declared extrapolation tails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy.special import hyp2f1


class ExtrapolationError(ValueError):
    """The table needs an extrapolation policy that was not supplied."""


class SpectralTableError(ValueError):
    """Tabulated data violate the table invariants."""

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class DrudeTail:
    """Im eps = omega_p**2 gamma / (omega (omega**2 + gamma**2)) below the table."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if not (self.omega_p > 0 and self.gamma > 0):
            raise ValueError("DrudeTail needs positive omega_p and gamma")


@dataclass(frozen=True)
class PlasmaTail:
    """Dissipationless free electrons: a delta function in Im eps at omega = 0."""

    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("PlasmaTail needs positive omega_p")


@dataclass(frozen=True)
class ConstantEps:
    """No absorption below the table; eps(i xi) is constant towards xi -> 0.

    ``eps0`` overrides the static value used for the zero-frequency term; by
    default it is the transform evaluated at xi = 0.
    """

    eps0: float | None = None


@dataclass(frozen=True)
class PowerLawTail:
    """Im eps(omega) = Im eps(omega_max) * (omega/omega_max)**(-exponent) above the table."""

    exponent: float

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValueError("power-law decay exponent must be positive")


LowTail = Union[DrudeTail, PlasmaTail, ConstantEps]

# Im eps below this fraction of the table maximum counts as zero at an edge.
NEGLIGIBLE = 1e-9

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class SpectralTable:
    """Samples of Im eps(omega) (omega in rad/s) with extrapolation policies."""

    omega: tuple
    im_eps: tuple
    low: LowTail | None = None
    high: PowerLawTail | None = None

    def __post_init__(self):
        omega = tuple(float(w) for w in self.omega)
        im_eps = tuple(float(v) for v in self.im_eps)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "im_eps", im_eps)
        if len(omega) != len(im_eps):
            raise SpectralTableError("omega and im_eps differ in length")
        if len(omega) < 2:
            raise SpectralTableError("at least 2 samples are required")
        for i, (w, v) in enumerate(zip(omega, im_eps)):
            if not (math.isfinite(w) and w > 0):
                raise SpectralTableError(f"frequency must be positive and finite, got {w!r}", i)
            if not (math.isfinite(v) and v >= 0):
                raise SpectralTableError(f"Im eps must be non-negative (passivity), got {v!r}", i)
            if i and not w > omega[i - 1]:
                raise SpectralTableError("frequencies must be strictly increasing", i)

    @cached_property
    def _segments(self):
        """Quadrature nodes and weights in ln(omega) for each table segment."""
        w = np.asarray(self.omega)
        v = np.asarray(self.im_eps)
        u = np.log(w)
        half = 0.5 * np.diff(u)
        mid = 0.5 * (u[1:] + u[:-1])
        nodes_u = mid[:, None] + half[:, None] * _GL_X[None, :]
        weights = half[:, None] * _GL_W[None, :]
        t = (nodes_u - u[:-1, None]) / (2 * half[:, None])
        om = np.exp(nodes_u)
        v0, v1 = v[:-1, None], v[1:, None]
        positive = (v0 > 0) & (v1 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            loglog = np.exp(np.log(np.where(positive, v0, 1.0)) * (1 - t)
                            + np.log(np.where(positive, v1, 1.0)) * t)
        w0, w1 = w[:-1, None], w[1:, None]
        linear = v0 + (v1 - v0) * (om - w0) / (w1 - w0)
        im = np.where(positive, loglog, linear)
        # integrand in ln(omega): omega**2 Im eps / (omega**2 + xi**2)
        return om.ravel(), (weights * om * om * im).ravel()

    @property
    def scale(self):
        return max(self.im_eps)


def _drude_below(tail: DrudeTail, w_min, xi):
    """(2/pi) int_0^w_min omega Im eps_D / (omega**2 + xi**2) d omega."""
    g = tail.gamma

    def f(b):
        return math.atan(w_min / b) / b

    if xi == 0:
        raise ExtrapolationError("a Drude tail diverges at xi = 0")
    if abs(xi - g) > 1e-6 * g:
        inner = (f(g) - f(xi)) / (xi * xi - g * g)
    else:
        b = 0.5 * (xi + g)
        df = -math.atan(w_min / b) / b**2 - w_min / (b * (b * b + w_min * w_min))
        inner = -df / (2 * b)
    return (2.0 / math.pi) * tail.omega_p**2 * g * inner


def _high_above(table: SpectralTable, xi):
    w_max, v_max = table.omega[-1], table.im_eps[-1]
    if v_max == 0:
        return 0.0
    if table.high is None:
        if v_max <= NEGLIGIBLE * table.scale:
            return 0.0
        raise ExtrapolationError(
            "Im eps is non-negligible at the top of the table and no high-frequency "
            "extrapolation is configured")
    s = table.high.exponent
    x2 = (xi / w_max) ** 2
    return (2.0 / math.pi) * v_max * float(hyp2f1(1.0, 0.5 * s, 1.0 + 0.5 * s, -x2)) / s


def _low_below(table: SpectralTable, xi):
    low = table.low
    if low is None:
        if table.im_eps[0] <= NEGLIGIBLE * table.scale:
            return 0.0
        raise ExtrapolationError(
            "Im eps is non-negligible at the bottom of the table and no low-frequency "
            "extrapolation is configured")
    if isinstance(low, DrudeTail):
        return _drude_below(low, table.omega[0], xi)
    if isinstance(low, PlasmaTail):
        if xi == 0:
            raise ExtrapolationError("a plasma tail diverges at xi = 0")
        return low.omega_p**2 / (xi * xi)
    return 0.0


def kramers_kronig_transform(table: SpectralTable, xi):
    """eps(i xi) from tabulated Im eps(omega); ``xi`` may be a scalar or an array."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi_arr < 0):
        raise ValueError("imaginary frequency must be non-negative")
    om, wts = table._segments
    out = np.empty_like(xi_arr)
    for i, x in enumerate(xi_arr):
        interior = (2.0 / math.pi) * float(np.sum(wts / (om * om + x * x)))
        out[i] = 1.0 + interior + _low_below(table, x) + _high_above(table, x)
    if np.ndim(xi) == 0:
        return float(out[0])
    return out
