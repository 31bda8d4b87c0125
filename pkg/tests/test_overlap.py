import numpy as np
import pytest

from bathforge.filters import CPMG, ContinuousDrive, Free, SinP, build_filter
from bathforge.overlap import (OverlapConvergenceError, QubitProbeState,
                               coherence_decay, decoherence_rate,
                               infer_spectrum, measurement_thermodynamics)
from bathforge.spectra import (Lorentzian, Ohmic, SpectrumDomainError,
                               Tabulated, ThermalBath)


def wide_flat(g0):
    return Tabulated(np.array([-1e9, 1e9]), np.array([g0, g0]))


def test_flat_spectrum_identity():
    # a unit-area filter on a flat spectrum reproduces the plateau exactly
    g0 = 0.37
    flat = wide_flat(g0)
    t = 1.7
    for proto in [Free(t), CPMG(t, 4), ContinuousDrive(t, 2.0)]:
        filt = build_filter(proto)
        assert decoherence_rate(filt, flat) == pytest.approx(g0, rel=1e-6)


def test_markovian_limit():
    # the exact finite-time deficit is (tc/t)(1 - exp(-t/tc)) = 1% - 4e-46 at
    # t = 100 tc, so the 1% bound is tight by construction; the epsilon only
    # absorbs double-precision rounding of an otherwise-true inequality
    g, tc = 1.3, 0.5
    rate = decoherence_rate(build_filter(Free(100 * tc)), Lorentzian(g, tc))
    markov = g**2 * tc / np.pi
    assert abs(rate - markov) / markov < 0.01 * (1 + 1e-6)


def test_free_rate_matches_ou_closed_form():
    # phase-diffusion closed form under this normalization:
    # R(t) = G(0) (1 - (tc/t)(1 - exp(-t/tc)))
    g, tc = 1.1, 0.8
    for t in (0.3, 1.5, 7.0):
        got = decoherence_rate(build_filter(Free(t)), Lorentzian(g, tc))
        want = (g**2 * tc / np.pi) * (1 - (tc / t) * (1 - np.exp(-t / tc)))
        assert got == pytest.approx(want, rel=1e-10)


def test_pulse_train_suppresses_lorentzian_rate():
    # Zeno suppression: the shifted passband sees only the spectral tail
    g, tc, t = 1.0, 1.0, 4.0
    free = decoherence_rate(build_filter(Free(t)), Lorentzian(g, tc))
    cpmg = decoherence_rate(build_filter(CPMG(t, 8)), Lorentzian(g, tc))
    assert np.pi * 8 / t > 3 / tc
    assert cpmg < 0.15 * free


def test_zeno_monotone_in_pulse_number():
    g, tc, t = 1.0, 1.0, 2.0
    rates = []
    for n in (2, 4, 8, 16):
        assert np.pi * n / t > 3 / tc
        rates.append(decoherence_rate(build_filter(CPMG(t, n)), Lorentzian(g, tc)))
    assert np.all(np.diff(rates) <= 0)


def test_rate_nonnegative_random_pairs():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        t = rng.uniform(0.2, 5.0)
        kind = rng.integers(0, 4)
        proto = [Free(t), CPMG(t, int(rng.integers(1, 9))),
                 ContinuousDrive(t, rng.uniform(-5, 5)),
                 SinP(t, int(rng.integers(0, 3)), rng.uniform(0.1, 1.0))][kind]
        spec = [Lorentzian(rng.uniform(0.1, 2), rng.uniform(0.2, 3)),
                Ohmic(rng.uniform(0.1, 2), rng.uniform(1, 20))][rng.integers(0, 2)]
        assert decoherence_rate(build_filter(proto), spec) >= 0


def test_divergent_overlap_raises():
    from bathforge.spectra import Blackbody
    filt = build_filter(Free(1.0))
    with pytest.raises(OverlapConvergenceError):
        decoherence_rate(filt, Blackbody(1.0))  # no cutoff: omega^3 vs omega^-2
    with pytest.raises(OverlapConvergenceError):
        decoherence_rate(filt, ThermalBath(Lorentzian(1.0, 1.0), 1.0))


def test_coherence_decay_records():
    probe = QubitProbeState(np.pi / 4, 0.0)
    rec0 = coherence_decay(probe, rate=1.0, time=0.0)
    assert rec0.coherence == pytest.approx(1.0)
    assert rec0.p_plus == pytest.approx(1.0)
    assert rec0.p_plus + rec0.p_minus == 1.0

    rec_inf = coherence_decay(probe, rate=1.0, time=1e3)
    assert rec_inf.p_plus == pytest.approx(0.5, abs=1e-12)
    assert rec_inf.p_minus == pytest.approx(0.5, abs=1e-12)

    rec = coherence_decay(probe, rate=np.log(2.0), time=1.0)
    assert rec.coherence == pytest.approx(0.5, rel=1e-12)
    assert rec.p_plus == pytest.approx(0.75, rel=1e-12)


def test_coherence_scaling_with_probe_angle():
    probe = QubitProbeState(np.pi / 8, 0.0)
    rec = coherence_decay(probe, rate=0.0, time=5.0)
    assert rec.coherence == pytest.approx(np.sin(np.pi / 4))
    assert rec.p_plus + rec.p_minus == 1.0


# ---------------------------------------------------------------------------
# spectrum inversion


def test_infer_spectrum_narrowband_limit():
    # a long-time (narrow) filter centered at w0 measures G(w0) directly,
    # and the regularized inversion concentrates the weight there
    g, tc = 1.0, 1.0
    spec = Lorentzian(g, tc)
    w0 = 0.8
    filt = build_filter(ContinuousDrive(120.0, -w0))
    rate = decoherence_rate(filt, spec)
    assert rate == pytest.approx(spec.evaluate(w0), rel=0.05)
    grid = np.linspace(w0 - 1.0, w0 + 1.0, 41)
    est = infer_spectrum([(filt, rate)], grid, regularization=1e-6)
    center = np.sum(grid * est.values) / np.sum(est.values)
    assert center == pytest.approx(w0, abs=0.1)


def test_infer_spectrum_requires_measurements():
    with pytest.raises(ValueError):
        infer_spectrum([], np.linspace(-1, 1, 5), regularization=0.1)


def test_infer_spectrum_rank_deficient_needs_regularization():
    filt = build_filter(ContinuousDrive(30.0, 0.0))
    rate = decoherence_rate(filt, Lorentzian(1.0, 1.0))
    grid = np.linspace(-2, 2, 30)
    with pytest.raises(np.linalg.LinAlgError, match="regularization"):
        infer_spectrum([(filt, rate)], grid, regularization=0.0)


def test_infer_spectrum_reconstructs_lorentzian():
    # forward-simulate 40 drive measurements, invert, compare on |w| <= 3/tc;
    # the probe duration keeps adjacent passbands overlapping (no blind gaps)
    g, tc, t = 1.0, 1.0, 16.0
    spec = Lorentzian(g, tc)
    rabis = np.linspace(-5.0, 5.0, 40)
    filters = [build_filter(ContinuousDrive(t, r)) for r in rabis]
    rates = [decoherence_rate(f, spec) for f in filters]
    grid = np.linspace(-8.0, 8.0, 161)
    est = infer_spectrum(list(zip(filters, rates)), grid, regularization=1e-2)
    mask = np.abs(grid) <= 3.0
    rel = np.abs(est.values[mask] - spec.evaluate(grid[mask])) / spec.evaluate(grid[mask])
    assert np.max(rel) <= 0.05
    # forward-inverse consistency: refit residual equals the reported one
    assert est.refit_residual(filters, rates) <= est.residual + 1e-12


# ---------------------------------------------------------------------------
# measurement-interval thermodynamics


def peaked_bath(center=3.0, width=0.3, base=0.02, temperature=1.0):
    w = np.linspace(1e-3, 10.0, 500)
    vals = base * w * np.exp(-w / 2.0) + np.exp(-((w - center) / width) ** 2)
    return ThermalBath(Tabulated(w, vals), temperature)


def test_long_interval_recovers_bath_temperature():
    # golden-rule limit: filters collapse onto the transition frequencies
    bath = ThermalBath(Ohmic(1.0, 5.0), 1.3)
    res = measurement_thermodynamics(bath, omega0=1.0, tau=400.0)
    assert res.effective_temperature == pytest.approx(1.3, rel=0.02)
    ratio = res.rate_down / res.rate_up
    assert ratio == pytest.approx(np.exp(1.0 / 1.3), rel=0.02)


def test_short_interval_heats():
    bath = peaked_bath()
    res = measurement_thermodynamics(bath, omega0=1.0, tau=0.02)
    assert res.rate_up / res.rate_down == pytest.approx(1.0, abs=0.05)
    assert (res.effective_temperature > 20.0) or np.isinf(res.effective_temperature)


def test_matched_interval_cools():
    # spectral weight above omega0: a filter of matched width reaches it and
    # the rate ratio steepens beyond the thermal value
    bath = peaked_bath(temperature=1.0)
    taus = np.geomspace(0.05, 50.0, 25)
    t_effs = np.array([measurement_thermodynamics(bath, 1.0, tau).effective_temperature
                       for tau in taus])
    assert np.nanmin(t_effs) < 1.0


def test_vacuum_never_heats_rate_level():
    bath = ThermalBath(Ohmic(1.0, 5.0), 0.0)
    for tau in (0.05, 0.5, 5.0, 50.0):
        res = measurement_thermodynamics(bath, omega0=1.0, tau=tau)
        assert res.rate_up < res.rate_down


def test_measurement_validation():
    bath = ThermalBath(Ohmic(1.0, 5.0), 1.0)
    with pytest.raises(ValueError):
        measurement_thermodynamics(bath, 1.0, 0.0)
    with pytest.raises(ValueError):
        measurement_thermodynamics(bath, -1.0, 1.0)
