"""Default material parameter sets and model conversions.

The numbers here are configuration defaults, not measured ground truth:
gold and nickel use conventional Drude parameters, the insulators use a
two-oscillator (infrared + ultraviolet) form whose static value matches the
commonly quoted static permittivity.
"""
from __future__ import annotations

from dataclasses import replace

from ..constants import ev_to_rad_s
from .kramers_kronig import DrudeTail, PlasmaTail, SpectralTable
from .models import (
    CoreOscillators,
    DcDielectric,
    Drude,
    MagneticLaw,
    MaterialModel,
    Oscillator,
    Plasma,
    RelaxationLaw,
    Tabulated,
)

GOLD_OMEGA_P_EV = 9.0
GOLD_GAMMA_EV = 0.035
NICKEL_OMEGA_P_EV = 4.89
NICKEL_GAMMA_EV = 0.0436
NICKEL_MU0 = 110.0


def gold_drude(exponent=1.0, T_ref=300.0, gamma_eV=GOLD_GAMMA_EV, omega_p_eV=GOLD_OMEGA_P_EV):
    return Drude(omega_p=ev_to_rad_s(omega_p_eV),
                 relaxation=RelaxationLaw(ev_to_rad_s(gamma_eV), T_ref, exponent))


def gold_plasma(omega_p_eV=GOLD_OMEGA_P_EV):
    return Plasma(omega_p=ev_to_rad_s(omega_p_eV))


def nickel_drude(exponent=1.0, T_ref=300.0, mu0=NICKEL_MU0):
    return Drude(omega_p=ev_to_rad_s(NICKEL_OMEGA_P_EV),
                 relaxation=RelaxationLaw(ev_to_rad_s(NICKEL_GAMMA_EV), T_ref, exponent),
                 magnetic=MagneticLaw(mu0))


def nickel_plasma(mu0=NICKEL_MU0):
    return Plasma(omega_p=ev_to_rad_s(NICKEL_OMEGA_P_EV), magnetic=MagneticLaw(mu0))


def two_oscillator_dielectric(eps_static, eps_infrared, uv_eV, ir_eV):
    """Insulator with eps(0) = eps_static and eps = eps_infrared above the IR band."""
    oscillators = [Oscillator.from_static(eps_infrared - 1.0, ev_to_rad_s(uv_eV))]
    if eps_static > eps_infrared:
        oscillators.append(Oscillator.from_static(eps_static - eps_infrared, ev_to_rad_s(ir_eV)))
    return CoreOscillators(tuple(oscillators))


# static permittivities 11.7, 10.1, 5.4 and 3.8
def silicon():
    return two_oscillator_dielectric(11.7, 11.7, 4.34, 1.0)


def sapphire():
    return two_oscillator_dielectric(10.1, 3.1, 14.0, 0.07)


def mica():
    return two_oscillator_dielectric(5.4, 2.5, 12.0, 0.1)


def fused_silica():
    return two_oscillator_dielectric(3.8, 2.1, 13.4, 0.13)


def to_plasma(model: MaterialModel) -> MaterialModel:
    """Same core and plasma frequency, relaxation of the free electrons dropped."""
    if isinstance(model, Drude):
        return Plasma(core=model.core, omega_p=model.omega_p, magnetic=model.magnetic)
    if isinstance(model, Tabulated) and isinstance(model.table.low, DrudeTail):
        table = replace(model.table, low=PlasmaTail(model.table.low.omega_p))
        return replace(model, table=table, cache=None)
    return model


def without_carriers(model: MaterialModel) -> MaterialModel:
    """Core-electron part of a model: the free-carrier term is removed."""
    if isinstance(model, (Drude, Plasma, DcDielectric)):
        return replace(model.core, magnetic=model.magnetic)
    return model


def with_dc_conductivity(model: CoreOscillators, sigma0: float) -> DcDielectric:
    return DcDielectric(core=model, sigma0=sigma0, magnetic=model.magnetic)


def drude_table(omega_p, gamma, w_min, w_max, n=2000, high_exponent=3.0):
    """Spectral table sampled from the closed-form Drude Im eps, with matching tails."""
    import numpy as np

    from .kramers_kronig import PowerLawTail

    w = np.geomspace(w_min, w_max, n)
    im = omega_p**2 * gamma / (w * (w * w + gamma * gamma))
    return SpectralTable(tuple(w), tuple(im), low=DrudeTail(omega_p, gamma),
                         high=PowerLawTail(high_exponent))
