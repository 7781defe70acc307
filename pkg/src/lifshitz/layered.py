"""Reflection coefficients of layered bodies and graphene sheets.

Stacks are combined interface by interface from the substrate outwards,

    r = (r_top + r_below exp(-2 k d)) / (1 + r_top r_below exp(-2 k d)),

at imaginary frequencies.  A graphene sheet enters through a
:class:`PolarizationTensorProvider`, which supplies Pi_00 and Pi_tr (both
carrying a factor hbar, units hbar/m).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .constants import C, HBAR
from .materials.models import MaterialModel, matsubara_response
from .waves import ReflectionPair, WaveSlot


class PolarizationTensorError(ValueError):
    """A provider returned values that would make |r| exceed 1."""


class PolarizationTensorProvider(Protocol):
    """Pi_00 and Pi_tr of a sheet at (l, xi, k_perp, T).

    ``k_perp`` may be an array; implementations return arrays of the same
    shape.  Implementations must be safe to call from several threads.
    """

    metadata: dict

    def __call__(self, l: int, xi: float, k_perp, T: float): ...


@dataclass(frozen=True)
class ZeroProvider:
    """Transparent sheet."""

    metadata: dict = field(default_factory=dict, compare=False)

    def __call__(self, l, xi, k_perp, T):
        z = np.zeros_like(np.asarray(k_perp, dtype=float))
        return z, z


@dataclass(frozen=True)
class ConstantProvider:
    """Fixed Pi_00 and Pi_tr, for testing."""

    pi00: float = 0.0
    pi_tr: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    def __call__(self, l, xi, k_perp, T):
        shape = np.shape(k_perp)
        return np.full(shape, float(self.pi00)), np.full(shape, float(self.pi_tr))


@dataclass(frozen=True)
class ConductivityProvider:
    """Local sheet conductivity written in polarization-tensor form.

    ``sigma`` is the sheet conductivity in Gaussian units (m/s); the default
    is the universal optical value alpha*c/4.  ``omega_c`` (rad/s) keeps
    Pi_00 finite at xi = 0.  This is a passive test model, not the Dirac-model
    tensor.
    """

    sigma: float = 7.2973525693e-3 * C / 4.0
    omega_c: float = 1.0e13
    metadata: dict = field(default_factory=lambda: {"mass_gap": None}, compare=False)

    def __call__(self, l, xi, k_perp, T):
        k2 = np.asarray(k_perp, dtype=float) ** 2
        q2 = k2 + (xi / C) ** 2
        pi00 = 4.0 * math.pi * HBAR * self.sigma * k2 / (xi + self.omega_c)
        with np.errstate(divide="ignore", invalid="ignore"):
            pi_tr = 4.0 * math.pi * HBAR * self.sigma * xi / C**2 + np.where(
                k2 > 0, q2 * pi00 / np.where(k2 > 0, k2, 1.0), 0.0)
        return pi00, pi_tr


_REGISTRY: dict[str, Callable[..., PolarizationTensorProvider]] = {}


def check_provider(provider, T=300.0):
    """Sample the provider on a small grid and validate its invariants."""
    from .waves import matsubara_frequency

    k = np.geomspace(1e4, 1e9, 12)
    for l in (0, 1, 5):
        xi = matsubara_frequency(l, T)
        pi00, pi_tr = provider(l, xi, k, T)
        _normalized(l, xi, k, pi00, pi_tr)
    # the hbar placement: Pi_00 = 2 hbar k^2 / q gives r_TM = 1/2
    slot = WaveSlot.at(1, T, 1e7)
    r = graphene_reflection(ConstantProvider(2 * HBAR * slot.k_perp**2 / slot.q,
                                             2 * HBAR * slot.q), slot)
    if not math.isclose(r.r_tm, 0.5, rel_tol=1e-12):
        raise PolarizationTensorError("unit convention self-test failed")


def register_provider(name, factory, check=True):
    if check:
        check_provider(factory())
    _REGISTRY[name] = factory


def get_provider(name, **params):
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown polarization tensor provider {name!r}; "
                       f"known: {sorted(_REGISTRY)}") from None
    return factory(**params)


def provider_names():
    return sorted(_REGISTRY)


# --- bodies -------------------------------------------------------------------


@dataclass(frozen=True)
class LayeredBody:
    """Semispace substrate with coatings listed from the substrate outwards.

    ``graphene`` is an optional sheet on the outermost surface.
    """

    substrate: MaterialModel
    layers: tuple = ()
    graphene: PolarizationTensorProvider | None = None

    def __post_init__(self):
        layers = tuple((m, float(d)) for m, d in self.layers)
        for _, d in layers:
            if not d > 0:
                raise ValueError(f"layer thickness must be positive, got {d!r}")
        object.__setattr__(self, "layers", layers)


@dataclass(frozen=True)
class PerfectReflector:
    """Ideal metal: r_TM = r_TE = 1 at every frequency."""


STACK, PERFECT = 0, 1


def media_stack(body, l, T, xi):
    """Rows ``[eps, mu, kappa2, d]`` from the outermost medium down to the substrate."""
    if isinstance(body, MaterialModel):
        body = LayeredBody(body)
    rows = [(*matsubara_response(m, l, T, xi), d) for m, d in reversed(body.layers)]
    rows.append((*matsubara_response(body.substrate, l, T, xi), math.inf))
    return np.array(rows, dtype=float)


def encode(body, l, T, xi):
    """(kind, media) for the compiled kernel, or None if a callback is needed."""
    if isinstance(body, PerfectReflector):
        return PERFECT, np.zeros((1, 4))
    if isinstance(body, LayeredBody) and body.graphene is not None:
        return None
    return STACK, media_stack(body, l, T, xi)


def _interface(w_i, k_i, w_j, k_j):
    """(w_j k_i - w_i k_j)/(w_j k_i + w_i k_j) with w = eps (TM) or mu (TE)."""
    inf_i, inf_j = math.isinf(w_i), math.isinf(w_j)
    if inf_j and not inf_i:
        return np.ones_like(k_i)
    if inf_i and not inf_j:
        return -np.ones_like(k_i)
    if inf_i and inf_j:
        # only reached below an interface that already reflects totally
        return np.zeros_like(k_i)
    return (w_j * k_i - w_i * k_j) / (w_j * k_i + w_i * k_j)


def stack_reflection(media, q, kperp2):
    """TM and TE coefficients of a stack for arrays of q and k_perp**2."""
    q = np.asarray(q, dtype=float)
    kperp2 = np.asarray(kperp2, dtype=float)
    n = len(media)
    ks = [np.sqrt(kperp2 + media[j, 2]) for j in range(n)]

    def above(j):
        if j == 0:
            return 1.0, 1.0, q
        return media[j - 1, 0], media[j - 1, 1], ks[j - 1]

    e_a, m_a, k_a = above(n - 1)
    r_tm = _interface(e_a, k_a, media[n - 1, 0], ks[n - 1])
    r_te = _interface(m_a, k_a, media[n - 1, 1], ks[n - 1])
    for j in range(n - 2, -1, -1):
        e_a, m_a, k_a = above(j)
        phase = np.exp(-2.0 * ks[j] * media[j, 3])
        t_tm = _interface(e_a, k_a, media[j, 0], ks[j])
        t_te = _interface(m_a, k_a, media[j, 1], ks[j])
        r_tm = (t_tm + r_tm * phase) / (1.0 + t_tm * r_tm * phase)
        r_te = (t_te + r_te * phase) / (1.0 + t_te * r_te * phase)
    return r_tm, r_te


def _normalized(l, xi, k_perp, pi00, pi_tr):
    """P = q Pi_00/(hbar k^2) and Y = (k^2 Pi_tr - q^2 Pi_00)/(hbar k^2), validated."""
    k_perp = np.asarray(k_perp, dtype=float)
    k2 = k_perp**2
    q2 = k2 + (xi / C) ** 2
    q = np.sqrt(q2)
    pi00 = np.asarray(pi00, dtype=float)
    pi_tr = np.asarray(pi_tr, dtype=float)
    te = k2 * pi_tr - q2 * pi00
    scale = np.abs(k2 * pi_tr) + np.abs(q2 * pi00)
    bad = (pi00 < 0) | (te < -1e-9 * scale) | ~np.isfinite(pi00) | ~np.isfinite(pi_tr)
    if np.any(bad):
        i = int(np.flatnonzero(np.atleast_1d(bad))[0])
        kb = float(np.atleast_1d(k_perp)[i])
        raise PolarizationTensorError(
            f"polarization tensor violates Pi_00 >= 0 and k^2 Pi_tr - q^2 Pi_00 >= 0 "
            f"at l={l}, k_perp={kb:.6g} 1/m")
    te = np.maximum(te, 0.0)
    return q * pi00 / (HBAR * k2), te / (HBAR * k2), q


def _freestanding(l, xi, k_perp, pi00, pi_tr):
    P, Y, q = _normalized(l, xi, k_perp, pi00, pi_tr)
    return P / (2.0 + P), -Y / (2.0 * q + Y)


def _coated(l, xi, k_perp, pi00, pi_tr, eps, k_s):
    P, Y, q = _normalized(l, xi, k_perp, pi00, pi_tr)
    if math.isinf(eps):
        r_tm = np.ones_like(P)
    else:
        r_tm = (eps * q + k_s * (P - 1.0)) / (eps * q + k_s * (P + 1.0))
    r_te = (q - k_s - Y) / (q + k_s + Y)
    return r_tm, r_te


def graphene_reflection(provider, slot: WaveSlot) -> ReflectionPair:
    """Freestanding sheet described by its polarization tensor."""
    if not slot.k_perp > 0:
        raise ValueError("graphene reflection needs k_perp > 0")
    pi00, pi_tr = provider(slot.l, slot.xi, np.array([slot.k_perp]), slot.T)
    r_tm, r_te = _freestanding(slot.l, slot.xi, np.array([slot.k_perp]), pi00, pi_tr)
    return ReflectionPair(float(r_tm[0]), float(r_te[0]))


def graphene_coated_reflection(eps_l: float, provider, slot: WaveSlot) -> ReflectionPair:
    """Sheet on a nonmagnetic semispace of permittivity ``eps_l`` at this slot."""
    if not slot.k_perp > 0:
        raise ValueError("graphene reflection needs k_perp > 0")
    k = np.array([slot.k_perp])
    pi00, pi_tr = provider(slot.l, slot.xi, k, slot.T)
    k_s = k if math.isinf(eps_l) else np.sqrt(k**2 + eps_l * (slot.xi / C) ** 2)
    r_tm, r_te = _coated(slot.l, slot.xi, k, pi00, pi_tr, eps_l, k_s)
    return ReflectionPair(float(r_tm[0]), float(r_te[0]))


def body_reflection(body, l, T, xi, q, kperp2):
    """Reflection coefficients of any body on arrays of (q, k_perp**2)."""
    if isinstance(body, PerfectReflector):
        one = np.ones_like(np.asarray(q, dtype=float))
        return one, one
    media = media_stack(body, l, T, xi)
    graphene = body.graphene if isinstance(body, LayeredBody) else None
    if graphene is None:
        return stack_reflection(media, q, kperp2)
    k_perp = np.sqrt(kperp2)
    pi00, pi_tr = graphene(l, xi, k_perp, T)
    if len(media) == 1 and media[0, 1] == 1.0:
        k_s = np.sqrt(kperp2 + media[0, 2])
        return _coated(l, xi, k_perp, pi00, pi_tr, media[0, 0], k_s)
    # sheet over a general stack: multiple reflections with zero spacing,
    # r_TM = (g + s - 2gs)/(1 - gs) and r_TE = (g + s + 2gs)/(1 - gs)
    P, Y, qq = _normalized(l, xi, k_perp, pi00, pi_tr)
    s_tm, s_te = stack_reflection(media, q, kperp2)
    r_tm = _compose(P / (2.0 + P), 2.0 / (2.0 + P), s_tm, 1.0 - s_tm, 1.0)
    r_te = _compose(-Y / (2.0 * qq + Y), 2.0 * qq / (2.0 * qq + Y), s_te, 1.0 + s_te, -1.0)
    return r_tm, r_te


def _compose(g, g_c, s, s_c, unit):
    """Combine sheet and stack coefficients; ``g_c``, ``s_c`` are their distances to ``unit``.

    Near total reflection the complement form unit*(1 - g_c s_c/(g_c + s_c - g_c s_c))
    avoids cancellation; elsewhere the direct form keeps small values accurate.
    """
    g, g_c, s, s_c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (g, g_c, s, s_c)))
    direct = (g + s - unit * 2.0 * g * s) / (1.0 - g * s)
    den = g_c + s_c - g_c * s_c
    with np.errstate(divide="ignore", invalid="ignore"):
        near = unit * (1.0 - np.where(den > 0, g_c * s_c / den, 0.0))
    return np.where(np.minimum(g_c, s_c) < 0.5, near, direct)


def layer_stack_reflection(body, slot: WaveSlot) -> ReflectionPair:
    """Reflection coefficients of a body without graphene at one mode."""
    if isinstance(body, LayeredBody) and body.graphene is not None:
        raise ValueError("use body_reflection for bodies carrying a graphene sheet")
    media = media_stack(body, slot.l, slot.T, slot.xi)
    r_tm, r_te = stack_reflection(media, slot.q, slot.k_perp**2)
    return ReflectionPair(float(r_tm), float(r_te))


register_provider("zero", ZeroProvider)
register_provider("constant", ConstantProvider)
register_provider("conductivity", ConductivityProvider)
