import math
import warnings
from concurrent.futures import ThreadPoolExecutor

import pytest

from lifshitz import (
    ConvergenceError,
    EntropyStepError,
    GeometryThermal,
    QuadratureSpec,
    WaveSlot,
    casimir_entropy,
    casimir_pressure,
    force_gradient_sphere_plate,
    free_energy,
    fresnel_coefficients,
    matsubara_frequency,
)
from lifshitz.constants import C, K_B
from lifshitz.kernel import FREE_ENERGY, integrate_term
from lifshitz.layered import PerfectReflector
from lifshitz.materials import Vacuum, library

import oracles

GOLD = library.gold_drude()
GOLD_P = library.gold_plasma()
TIGHT = QuadratureSpec(rtol=1e-12, matsubara_rtol=1e-13)

PAIRS = {
    "gold-drude": (GOLD, GOLD),
    "gold-plasma": (GOLD_P, GOLD_P),
    "silicon": (library.silicon(), library.silicon()),
    "nickel-drude": (library.nickel_drude(), library.nickel_drude()),
}
SEPARATIONS = (100e-9, 200e-9, 500e-9, 1e-6, 3e-6)
TEMPERATURES = (30.0, 100.0, 300.0)


def fd_derivative(f, x, h):
    """Central difference at steps h and h/2, combined by Richardson extrapolation."""
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4 * d2 - d1) / 3


class TestMatsubara:
    def test_static(self):
        assert matsubara_frequency(0, 123.0) == 0.0

    def test_first_frequency_at_room_temperature(self):
        assert matsubara_frequency(1, 300.0) == pytest.approx(2.468e14, rel=1e-3)

    def test_linear_in_l_times_T(self):
        assert matsubara_frequency(2, 150.0) == pytest.approx(matsubara_frequency(1, 300.0),
                                                              rel=1e-15)

    @pytest.mark.parametrize("l, T", [(-1, 300.0), (1, 0.0), (1, -5.0)])
    def test_invalid(self, l, T):
        with pytest.raises(ValueError):
            matsubara_frequency(l, T)


class TestFresnel:
    def test_vacuum(self):
        assert tuple(fresnel_coefficients(Vacuum(), WaveSlot.at(3, 300.0, 1e7))) == (0.0, 0.0)

    @pytest.mark.parametrize("k", [1e3, 1e6, 1e9])
    def test_drude_gold_static(self, k):
        assert tuple(fresnel_coefficients(GOLD, WaveSlot.at(0, 300.0, k))) == (1.0, 0.0)

    def test_plasma_static_te(self):
        k = GOLD_P.omega_p / C
        r = fresnel_coefficients(GOLD_P, WaveSlot.at(0, 300.0, k))
        assert r.r_tm == 1.0
        assert r.r_te == pytest.approx((1 - math.sqrt(2)) / (1 + math.sqrt(2)), rel=1e-14)

    def test_magnetic_drude_static_te(self):
        r = fresnel_coefficients(library.nickel_drude(), WaveSlot.at(0, 300.0, 1e7))
        assert r.r_te == pytest.approx(109.0 / 111.0, rel=1e-14)

    def test_inconsistent_slot(self):
        with pytest.raises(ValueError):
            fresnel_coefficients(GOLD, WaveSlot(0, 1e14, 1e7))


class TestFreeEnergy:
    def test_vacuum(self):
        r = free_energy(Vacuum(), Vacuum(), GeometryThermal(1e-7, 300.0))
        assert r.value == 0.0

    @pytest.mark.parametrize("a", [0.5e-6, 1e-6, 2e-6])
    def test_ideal_metal(self, a):
        r = free_energy(PerfectReflector(), PerfectReflector(), GeometryThermal(a, 1.0))
        assert r.value == pytest.approx(oracles.ideal_metal_free_energy(a), rel=1e-6)

    def test_gold_against_riemann_oracle(self):
        g = GeometryThermal(200e-9, 300.0)
        ref = oracles.brute_force("free_energy", oracles.DrudeMetal(oracles.ev(9.0), oracles.ev(0.035)),
                                  oracles.DrudeMetal(oracles.ev(9.0), oracles.ev(0.035)), g.a, g.T)
        assert free_energy(GOLD, GOLD, g).value == pytest.approx(ref, rel=1e-4)
        # the oracle itself converges to second order; at this grid it is good to ~1e-7
        assert free_energy(GOLD, GOLD, g).value == pytest.approx(ref, rel=1e-6)

    def test_result_metadata(self):
        r = free_energy(GOLD, GOLD, GeometryThermal(300e-9, 300.0))
        assert (r.quantity, r.unit) == ("free_energy", "J/m^2")
        assert r.l_max > 10 and r.evals > 0 and 0 <= r.remainder < 1e-9 * abs(r.value)

    def test_primed_sum_bookkeeping(self):
        g = GeometryThermal(400e-9, 300.0)
        r = free_energy(GOLD, GOLD, g)
        factor = K_B * g.T / (8 * math.pi * g.a**2)
        terms = []
        for l in range(r.l_max + 1):
            xi = matsubara_frequency(l, g.T)
            v, _, _, _ = integrate_term(FREE_ENERGY, 2 * g.a * xi / C, 2 * g.a, GOLD, GOLD, l, g.T,
                                        xi, 1e-9, 20_000)
            terms.append(v)
        assert r.value == factor * math.fsum([0.5 * terms[0]] + terms[1:])
        full_weight = factor * math.fsum(terms)
        assert full_weight - r.value == pytest.approx(factor * 0.5 * terms[0], rel=1e-12)

    def test_monotone_in_separation(self):
        values = [abs(free_energy(GOLD, GOLD, GeometryThermal(a, 300.0)).value) for a in SEPARATIONS]
        assert all(x > y for x, y in zip(values, values[1:]))

    def test_dc_conductivity_increases_magnitude(self):
        si = library.fused_silica()
        doped = library.with_dc_conductivity(si, 1e12)
        for a in (200e-9, 1e-6):
            g = GeometryThermal(a, 300.0)
            assert abs(free_energy(doped, doped, g).value) > abs(free_energy(si, si, g).value)

    def test_deterministic_under_threads(self):
        g = GeometryThermal(250e-9, 300.0)
        ref = free_energy(GOLD, GOLD, g).value
        with ThreadPoolExecutor(4) as pool:
            got = list(pool.map(lambda _: free_energy(GOLD, GOLD, g).value, range(8)))
        assert all(v == ref for v in got)


class TestConvergenceReporting:
    def test_matsubara_cap(self):
        with pytest.raises(ConvergenceError) as info:
            free_energy(GOLD, GOLD, GeometryThermal(200e-9, 300.0), QuadratureSpec(l_max=3))
        p = info.value.partial
        assert p.l_max == 3 and p.unit == "J/m^2" and p.value < 0

    def test_evaluation_cap(self):
        with pytest.raises(ConvergenceError):
            free_energy(GOLD, GOLD, GeometryThermal(200e-9, 300.0),
                        QuadratureSpec(rtol=1e-15, max_evals=75))

    @pytest.mark.parametrize("kwargs", [dict(rtol=0), dict(matsubara_rtol=-1), dict(l_max=0),
                                        dict(max_evals=10)])
    def test_spec_validation(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)

    @pytest.mark.parametrize("a, T", [(0.0, 300.0), (1e-7, 0.0), (-1e-7, 1.0)])
    def test_geometry_validation(self, a, T):
        with pytest.raises(ValueError):
            GeometryThermal(a, T)


class TestPressure:
    def test_vacuum(self):
        assert casimir_pressure(Vacuum(), GOLD, GeometryThermal(1e-7, 300.0)).value == 0.0

    @pytest.mark.parametrize("a", [0.5e-6, 1e-6, 2e-6])
    def test_ideal_metal(self, a):
        r = casimir_pressure(PerfectReflector(), PerfectReflector(), GeometryThermal(a, 1.0))
        assert r.value == pytest.approx(oracles.ideal_metal_pressure(a), rel=1e-6)

    def test_ideal_metal_magnitude_at_one_micron(self):
        r = casimir_pressure(PerfectReflector(), PerfectReflector(), GeometryThermal(1e-6, 1.0))
        assert r.value == pytest.approx(-1.3e-3, rel=0.01)

    def test_plasma_gold_against_riemann_oracle(self):
        g = GeometryThermal(320e-9, 300.0)
        m = oracles.DrudeMetal(oracles.ev(9.0), 0.0)
        ref = oracles.brute_force("pressure", m, m, g.a, g.T)
        assert casimir_pressure(GOLD_P, GOLD_P, g).value == pytest.approx(ref, rel=1e-6)

    @pytest.mark.parametrize("name", sorted(PAIRS))
    def test_finite_difference_of_free_energy(self, name):
        b1, b2 = PAIRS[name]
        worst = 0.0
        for T in TEMPERATURES:
            for a in SEPARATIONS:
                def f(x):
                    return free_energy(b1, b2, GeometryThermal(x, T), TIGHT).value

                p = casimir_pressure(b1, b2, GeometryThermal(a, T), TIGHT).value
                fd = -fd_derivative(f, a, 0.01 * a)
                worst = max(worst, abs(fd / p - 1))
        assert worst < 1e-6


class TestGradient:
    def test_vacuum(self):
        r = force_gradient_sphere_plate(Vacuum(), Vacuum(), 1e-4, GeometryThermal(1e-7, 300.0))
        assert r.value == 0.0

    @pytest.mark.parametrize("a", [200e-9, 746e-9])
    def test_pfa_identity(self, a):
        R = 41.3e-6
        g = GeometryThermal(a, 300.0)
        grad = force_gradient_sphere_plate(GOLD, GOLD, R, g).value
        p = casimir_pressure(GOLD, GOLD, g).value
        assert abs(grad / (2 * math.pi * R) + p) <= 1e-8 * abs(p)

    def test_plasma_gold_against_riemann_oracle(self):
        R, g = 41.3e-6, GeometryThermal(320e-9, 300.0)
        m = oracles.DrudeMetal(oracles.ev(9.0), 0.0)
        ref = -2 * math.pi * R * oracles.brute_force("pressure", m, m, g.a, g.T)
        got = force_gradient_sphere_plate(GOLD_P, GOLD_P, R, g).value
        assert got > 0
        assert got == pytest.approx(ref, rel=1e-4)

    def test_large_ratio_warns(self):
        with pytest.warns(UserWarning):
            force_gradient_sphere_plate(GOLD, GOLD, 1e-6, GeometryThermal(200e-9, 300.0))

    def test_radius_validation(self):
        with pytest.raises(ValueError):
            force_gradient_sphere_plate(GOLD, GOLD, 0.0, GeometryThermal(200e-9, 300.0))


@pytest.mark.parametrize("name", sorted(PAIRS))
def test_sign_chain(name):
    b1, b2 = PAIRS[name]
    for T in TEMPERATURES:
        for a in SEPARATIONS:
            g = GeometryThermal(a, T)
            assert free_energy(b1, b2, g).value < 0
            assert casimir_pressure(b1, b2, g).value < 0
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                assert force_gradient_sphere_plate(b1, b2, 20e-6, g).value > 0


class TestEntropy:
    def test_vacuum(self):
        assert casimir_entropy(Vacuum(), Vacuum(), GeometryThermal(1e-7, 300.0)).value == 0.0

    def test_matches_direct_difference(self):
        g = GeometryThermal(500e-9, 300.0)
        s = casimir_entropy(GOLD_P, GOLD_P, g, TIGHT).value

        def f(T):
            return free_energy(GOLD_P, GOLD_P, GeometryThermal(g.a, T), TIGHT).value

        assert s == pytest.approx(-fd_derivative(f, g.T, 10.0), rel=1e-6)

    def test_step_disagreement_raises(self):
        with pytest.raises(EntropyStepError) as info:
            casimir_entropy(GOLD, GOLD, GeometryThermal(500e-9, 30.0), TIGHT, step_rtol=1e-14)
        assert info.value.partial.unit == "J/(K m^2)"

    @pytest.mark.parametrize("dT", [0.0, -1.0, 100.0])
    def test_step_validation(self, dT):
        with pytest.raises(ValueError):
            casimir_entropy(GOLD, GOLD, GeometryThermal(500e-9, 300.0), dT=dT)

    @pytest.mark.slow
    def test_low_temperature_limits(self):
        q = QuadratureSpec(rtol=1e-10, matsubara_rtol=1e-12)
        plasma, drude = [], []
        for T in (30.0, 10.0, 3.0, 1.0):
            g = GeometryThermal(500e-9, T)
            plasma.append(casimir_entropy(GOLD_P, GOLD_P, g, q).value)
            drude.append(casimir_entropy(GOLD, GOLD, g, q).value)
        assert all(abs(x) > abs(y) for x, y in zip(plasma, plasma[1:]))
        assert abs(plasma[-1]) < 1e-4 * abs(drude[-1])
        assert all(s < 0 for s in drude)
        # the Drude limit sits near the ideal-metal-like value -k_B zeta(3)/(16 pi a^2)
        s_ref = -K_B * 1.2020569031595942 / (16 * math.pi * (500e-9) ** 2)
        assert drude[-1] == pytest.approx(s_ref, rel=0.1)
