import numpy as np
import pytest

from bathforge.spectra import (BandGap1D, Blackbody, Lorentzian, Ohmic,
                               SpectrumDomainError, Tabulated, ThermalBath,
                               evaluate, occupancy, thermal_spectrum)


def test_lorentzian_closed_form():
    g, tc = 1.3, 2.0
    spec = Lorentzian(g, tc)
    assert evaluate(spec, 0.0) == pytest.approx(g**2 * tc / np.pi, rel=1e-14)
    # omega = 1/tau_c halves the zero-frequency value
    assert evaluate(spec, 1.0 / tc) == pytest.approx(g**2 * tc / (2 * np.pi), rel=1e-14)


def test_ohmic_vanishes_at_zero():
    assert evaluate(Ohmic(eta=1.0, omega_cut=10.0), 0.0) == 0.0
    assert evaluate(Ohmic(eta=1.0, omega_cut=10.0), -3.0) == 0.0


def test_ohmic_falls_faster_than_inverse_omega():
    spec = Ohmic(eta=1.0, omega_cut=10.0)
    w = np.array([20.0, 40.0, 80.0])
    vals = spec.evaluate(w)
    assert np.all(vals[1:] * w[1:] < vals[:-1] * w[:-1])


def test_blackbody_cubic_and_cutoff():
    spec = Blackbody(amplitude=2.0, omega_max=50.0)
    assert evaluate(spec, 3.0) == pytest.approx(2.0 * 27.0)
    assert evaluate(spec, 51.0) == 0.0


def test_bandgap_divergence_and_gap():
    spec = BandGap1D(omega_co=4.0, gamma_fs=0.5)
    assert evaluate(spec, 3.0) == pytest.approx(0.5 / np.sqrt(0.25))
    assert evaluate(spec, 4.5) == 0.0
    assert evaluate(spec, 3.9999) > 50 * 0.5


def test_nonnegativity_random_points():
    rng = np.random.default_rng(1)
    kinds = [Lorentzian(1.2, 0.7), Ohmic(0.8, 5.0), Blackbody(0.3, 40.0),
             BandGap1D(6.0, 1.1)]
    for spec in kinds:
        w = rng.uniform(-50, 50, size=1000)
        assert np.all(spec.evaluate(w) >= 0)
    grid = np.linspace(-20, 20, 200)
    tab = Tabulated(grid, np.abs(np.sin(grid)) + 0.1)
    w = rng.uniform(-20, 20, size=1000)
    assert np.all(tab.evaluate(w) >= 0)


def test_even_symmetry():
    spec = Lorentzian(1.0, 3.0)
    w = np.linspace(0.01, 30, 97)
    assert np.allclose(spec.evaluate(w), spec.evaluate(-w), rtol=1e-14)
    grid = np.linspace(-5, 5, 201)
    tab = Tabulated(grid, 1.0 / (1 + grid**2))
    assert np.allclose(tab.evaluate(w % 4.9), tab.evaluate(-(w % 4.9)), rtol=1e-12)


def test_occupancy_limits():
    assert occupancy(2.0, 0.0) == 0.0
    T = 1.7
    assert occupancy(T * np.log(2.0), T) == pytest.approx(1.0, rel=1e-12)
    # small-argument series oracle: n(x) = 1/x - 1/2 + x/12 - ...
    x = 0.01
    series = 1.0 / x - 0.5 + x / 12.0
    assert occupancy(0.01, 1.0) == pytest.approx(series, abs=1e-2)
    assert abs(occupancy(0.01, 1.0) - (1.0 / 0.01 - 0.5)) < 1e-2


def test_occupancy_domain():
    with pytest.raises(SpectrumDomainError):
        occupancy(0.0, 1.0)
    with pytest.raises(SpectrumDomainError):
        occupancy(-1.0, 1.0)


def test_thermal_zero_temperature_negative_side():
    bath = ThermalBath(Lorentzian(1.0, 1.0), 0.0)
    assert thermal_spectrum(bath, -5.0) == 0.0


def test_kms_identity_random():
    rng = np.random.default_rng(2)
    spec = Ohmic(0.9, 8.0)
    for _ in range(1000):
        w = rng.uniform(0.01, 40.0)
        T = rng.uniform(0.05, 20.0)
        bath = ThermalBath(spec, T)
        ratio = thermal_spectrum(bath, -w) / thermal_spectrum(bath, w)
        assert ratio == pytest.approx(np.exp(-w / T), rel=1e-12)


def test_thermal_zero_frequency_linear_response():
    eta, wc, T = 0.7, 10.0, 2.5
    bath = ThermalBath(Ohmic(eta, wc), T)
    assert thermal_spectrum(bath, 0.0) == pytest.approx(eta * T, rel=1e-12)
    # numeric limit oracle: evaluate just off zero
    w = 1e-6
    limit = (1.0 / np.expm1(w / T) + 1.0) * eta * w * np.exp(-w / wc)
    assert thermal_spectrum(bath, 0.0) == pytest.approx(limit, rel=1e-5)


def test_thermal_zero_frequency_divergent_kinds_raise():
    with pytest.raises(SpectrumDomainError):
        thermal_spectrum(ThermalBath(Lorentzian(1.0, 1.0), 1.0), 0.0)
    with pytest.raises(SpectrumDomainError):
        thermal_spectrum(ThermalBath(BandGap1D(4.0, 0.5), 1.0), 0.0)
    # fine at T = 0
    assert thermal_spectrum(ThermalBath(Lorentzian(1.0, 1.0), 0.0), 0.0) > 0


def test_tabulated_round_trip():
    g, tc = 1.0, 1.0
    ref = Lorentzian(g, tc)
    grid = np.linspace(-20 / tc, 20 / tc, 10_000)
    tab = Tabulated(grid, ref.evaluate(grid))
    rng = np.random.default_rng(3)
    w = rng.uniform(-20 / tc, 20 / tc, size=2000)
    got = tab.evaluate(w)
    want = ref.evaluate(w)
    assert np.max(np.abs(got - want) / want) < 1e-6


def test_tabulated_no_extrapolation():
    tab = Tabulated(np.array([0.0, 1.0, 2.0]), np.array([1.0, 2.0, 1.0]))
    with pytest.raises(SpectrumDomainError):
        tab.evaluate(2.5)
    with pytest.raises(SpectrumDomainError):
        tab.evaluate(np.array([0.5, -0.1]))


def test_tabulated_from_file(tmp_path):
    path = tmp_path / "spec.txt"
    path.write_text("# omega  G\n0.0 1.0\n1.0 0.5\n2.0 0.25\n")
    tab = Tabulated.from_file(path)
    assert tab.evaluate(1.0) == pytest.approx(0.5)
    assert tab.support == (0.0, 2.0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        Lorentzian(-1.0, 1.0)
    with pytest.raises(ValueError):
        Lorentzian(1.0, 0.0)
    with pytest.raises(ValueError):
        Ohmic(1.0, -2.0)
    with pytest.raises(ValueError):
        Tabulated(np.array([0.0, 1.0]), np.array([1.0, -0.5]))
    with pytest.raises(ValueError):
        ThermalBath(Ohmic(1.0, 1.0), -0.1)
