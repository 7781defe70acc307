import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lifshitz.constants import EPS0_SI, ev_to_rad_s, sigma_si_to_gaussian
from lifshitz.materials import (
    CoreOscillators,
    DcDielectric,
    Drude,
    Finite,
    InverseXi,
    InverseXiSquared,
    MagneticLaw,
    Oscillator,
    Plasma,
    RelaxationLaw,
    Vacuum,
    ZeroFrequencyError,
    eval_core_permittivity,
    eval_permittivity,
    low_frequency_class,
)
from lifshitz.materials import library
from lifshitz.waves import matsubara_frequency

W_P = ev_to_rad_s(9.0)


class TestCorePermittivity:
    def test_empty_list_is_vacuum(self):
        assert eval_core_permittivity([], 1e15) == 1.0

    def test_static_value(self):
        w = 3e15
        assert eval_core_permittivity([Oscillator(w * w, w)], 0.0) == 2.0

    def test_at_resonance(self):
        w = 3e15
        assert eval_core_permittivity([Oscillator(w * w, w)], w) == pytest.approx(1.5, rel=1e-15)

    def test_rejects_negative_frequency(self):
        with pytest.raises(ValueError):
            eval_core_permittivity([], -1.0)

    def test_rejects_non_oscillator(self):
        with pytest.raises(TypeError):
            eval_core_permittivity([(1.0, 1.0)], 1.0)

    @pytest.mark.parametrize("kwargs", [dict(strength=-1, frequency=1),
                                        dict(strength=1, frequency=0),
                                        dict(strength=1, frequency=1, relaxation=-1)])
    def test_invalid_oscillator(self, kwargs):
        with pytest.raises(ValueError):
            Oscillator(**kwargs)

    def test_from_static(self):
        osc = Oscillator.from_static(2.5, 1e16)
        assert eval_core_permittivity([osc], 0.0) == pytest.approx(3.5)


class TestEvalPermittivity:
    def test_plasma_at_plasma_frequency(self):
        assert eval_permittivity(Plasma(omega_p=W_P), 1, 300.0, W_P) == pytest.approx(2.0)

    def test_drude_without_relaxation_is_plasma(self):
        assert eval_permittivity(Drude(omega_p=W_P), 1, 300.0, W_P) == pytest.approx(2.0)

    def test_dc_dielectric_substitution(self):
        w, sigma0 = 2e16, 1e13
        xi_star = 4 * math.pi * sigma0
        # strength chosen so that the core permittivity at xi_star is exactly 3
        core = CoreOscillators((Oscillator(2.0 * (w * w + xi_star**2), w),))
        assert eval_core_permittivity(core.oscillators, xi_star) == pytest.approx(3.0)
        assert eval_permittivity(DcDielectric(core, sigma0), 1, 300.0, xi_star) == pytest.approx(4.0)

    def test_default_frequency_is_matsubara(self):
        m = library.gold_drude()
        xi = matsubara_frequency(3, 300.0)
        assert eval_permittivity(m, 3, 300.0) == m.epsilon(xi, 300.0)

    @pytest.mark.parametrize("model", [library.gold_drude(), library.gold_plasma(),
                                       DcDielectric(library.silicon(), 1e10)])
    def test_divergent_models_raise_at_zero(self, model):
        with pytest.raises(ZeroFrequencyError):
            eval_permittivity(model, 0, 300.0)

    def test_finite_model_at_zero(self):
        assert eval_permittivity(library.silicon(), 0, 300.0) == pytest.approx(11.7)
        assert eval_permittivity(Vacuum(), 0, 300.0) == 1.0

    def test_rejects_inconsistent_slot(self):
        with pytest.raises(ValueError):
            eval_permittivity(Vacuum(), 0, 300.0, 1e14)
        with pytest.raises(ValueError):
            eval_permittivity(Vacuum(), -1, 300.0)

    def test_static_permittivities(self):
        for make, eps0 in [(library.silicon, 11.7), (library.sapphire, 10.1),
                           (library.mica, 5.4), (library.fused_silica, 3.8)]:
            assert eval_permittivity(make(), 0, 300.0) == pytest.approx(eps0, rel=1e-12)


class TestLowFrequencyClass:
    def test_vacuum(self):
        assert low_frequency_class(Vacuum()) == Finite(1.0)

    def test_drude(self):
        m = library.gold_drude()
        g = ev_to_rad_s(0.035)
        assert low_frequency_class(m, 300.0) == InverseXi(W_P**2 / g)

    def test_plasma(self):
        assert low_frequency_class(library.gold_plasma()) == InverseXiSquared(W_P)

    def test_drude_at_zero_relaxation(self):
        assert isinstance(low_frequency_class(Drude(omega_p=W_P)), InverseXiSquared)

    def test_dc_dielectric(self):
        assert low_frequency_class(DcDielectric(sigma0=2.0)) == InverseXi(8 * math.pi)


class TestLaws:
    def test_relaxation_power_law(self):
        law = RelaxationLaw(1e14, 300.0, 2.0)
        assert law(300.0) == 1e14
        assert law(150.0) == pytest.approx(0.25e14)

    def test_relaxation_validation(self):
        with pytest.raises(ValueError):
            RelaxationLaw(0.0)
        with pytest.raises(ValueError):
            RelaxationLaw(1.0, exponent=-1)

    @given(st.floats(1.0, 1e3), st.integers(1, 10_000))
    def test_magnetic_rule(self, mu0, l):
        law = MagneticLaw(mu0)
        assert law(0) == mu0
        assert law(l) == 1.0

    def test_permeability_below_one_rejected(self):
        with pytest.raises(ValueError):
            MagneticLaw(0.5)

    def test_conductivity_conversion(self):
        assert sigma_si_to_gaussian(4 * math.pi * EPS0_SI) == pytest.approx(1.0)


MODELS = [Vacuum(), library.gold_drude(), library.gold_plasma(), library.nickel_drude(),
          library.silicon(), library.sapphire(), library.mica(), library.fused_silica(),
          library.with_dc_conductivity(library.fused_silica(), 1e8)]


@settings(max_examples=200)
@given(st.sampled_from(MODELS), st.floats(1e10, 1e19))
def test_positivity(model, xi):
    assert model.epsilon(xi, 300.0) >= 1.0


@settings(max_examples=200)
@given(st.floats(1e10, 1e19), st.floats(1e11, 1e15), st.floats(1.0, 300.0))
def test_drude_below_plasma(xi, gamma, T):
    d = Drude(omega_p=W_P, relaxation=RelaxationLaw(gamma))
    p = Plasma(omega_p=W_P)
    assert d.epsilon(xi, T) <= p.epsilon(xi, T)


@given(st.sampled_from(MODELS), st.floats(0.5, 1000.0))
def test_low_frequency_class_total_and_pure(model, T):
    assert low_frequency_class(model, T) == low_frequency_class(model, T)


def test_to_plasma_and_without_carriers():
    d = library.gold_drude()
    assert library.to_plasma(d) == library.gold_plasma()
    assert library.without_carriers(d) == CoreOscillators(())
    si = library.silicon()
    doped = library.with_dc_conductivity(si, 1e9)
    assert library.without_carriers(doped) == si
    assert library.to_plasma(si) is si
