import numpy as np
import pytest

from bathforge.filters import (CPMG, ContinuousDrive, FilterTailError, Free,
                               SinP, build_filter, evaluate_filter,
                               export_samples, tail_exponent)
from bathforge.overlap import decoherence_rate
from bathforge.spectra import Tabulated


def wide_flat(g0=1.0, half=1e9):
    grid = np.array([-half, half])
    return Tabulated(grid, np.array([g0, g0]))


def test_free_filter_values():
    t = 1.7
    filt = build_filter(Free(t))
    assert evaluate_filter(filt, 0.0) == pytest.approx(t / (2 * np.pi), rel=1e-14)
    # sinc^2 zero at a full period
    assert evaluate_filter(filt, 2 * np.pi / t) < 1e-30


def test_single_echo_pulse_cancels_dc():
    filt = build_filter(CPMG(2.0, 1))
    assert evaluate_filter(filt, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_cpmg_zero_frequency_all_even_counts():
    for n in (2, 4, 8, 16):
        filt = build_filter(CPMG(1.3, n))
        assert evaluate_filter(filt, 0.0) <= 1e-12


def test_drive_translates_filter():
    t, rabi = 2.3, 3.7
    filt = build_filter(ContinuousDrive(t, rabi))
    # numeric maximization oracle on the defining integral
    w = np.linspace(-rabi - 4 / t, -rabi + 4 / t, 4001)
    vals = filt.evaluate(w)
    w_peak = w[np.argmax(vals)]
    assert w_peak == pytest.approx(-rabi, abs=2 * (w[1] - w[0]))
    assert filt.evaluate(-rabi) == pytest.approx(t / (2 * np.pi), rel=1e-12)


def test_normalization_unit_modulus_protocols():
    t = 1.7
    protos = [Free(t), CPMG(t, 1), CPMG(t, 2), CPMG(t, 4), CPMG(t, 8),
              CPMG(t, 16), ContinuousDrive(t, 3.0)]
    flat = wide_flat()
    for proto in protos:
        filt = build_filter(proto)
        area = decoherence_rate(filt, flat)
        assert area == pytest.approx(1.0, abs=1e-6), type(proto).__name__


def test_sinp_energy_normalization():
    # integral F domega equals the modulation energy / duration
    t, a0 = 2.0, 0.8
    flat = wide_flat()
    for p, frac in ((0, 1.0), (1, 0.5), (2, 3.0 / 8.0)):
        filt = build_filter(SinP(t, p, a0))
        area = decoherence_rate(filt, flat)
        assert area == pytest.approx(a0**2 * frac, rel=1e-6)
        assert filt.norm == pytest.approx(a0**2 * frac, rel=1e-14)


def test_closed_form_matches_defining_integral():
    rng = np.random.default_rng(11)
    t = 1.37
    protos = [Free(t), CPMG(t, 1), CPMG(t, 8), ContinuousDrive(t, 2.1),
              SinP(t, 0, 0.9), SinP(t, 1, 0.9), SinP(t, 2, 1.0)]
    worst = 0.0
    for proto in protos:
        filt = build_filter(proto)
        w = rng.uniform(-60 / t, 60 / t, size=143)
        closed = filt.evaluate(w)
        numeric = np.array([filt.evaluate_numeric(wi) for wi in w])
        scale = np.maximum(numeric, 1e-3 * numeric.max())
        worst = max(worst, float(np.max(np.abs(closed - numeric) / scale)))
    assert worst <= 1e-8


def test_cpmg_peak_location():
    # dense-grid scan oracle: the passband sits near pi N / t
    t, n = 2.0, 8
    filt = build_filter(CPMG(t, n))
    w = np.linspace(0.2 * np.pi * n / t, 2.5 * np.pi * n / t, 20001)
    peak = w[np.argmax(filt.evaluate(w))]
    assert peak == pytest.approx(np.pi * n / t, rel=0.1)


def test_tail_exponents_and_ordering():
    t = 1.7
    fitted = {p: tail_exponent(build_filter(SinP(t, p, 1.0))) for p in (0, 1, 2)}
    assert fitted[0] == pytest.approx(2.0, abs=0.2)
    assert fitted[1] == pytest.approx(4.0, abs=0.2)
    assert fitted[2] == pytest.approx(6.0, abs=0.2)
    assert fitted[2] > fitted[1] > fitted[0]
    assert tail_exponent(build_filter(Free(t))) == pytest.approx(2.0, abs=0.2)


def test_overflow_guard_returns_tail():
    filt = build_filter(Free(1.0))
    w = 1e12
    assert filt.evaluate(w) == pytest.approx(filt.tail_coeff / w**2, rel=1e-12)


def test_protocol_validation():
    with pytest.raises(ValueError):
        Free(0.0)
    with pytest.raises(ValueError):
        CPMG(1.0, 0)
    with pytest.raises(ValueError):
        SinP(1.0, 3, 1.0)
    with pytest.raises(ValueError):
        SinP(1.0, 2, 1.5)


def test_pulse_times_inside_interval():
    proto = CPMG(2.0, 5)
    pt = proto.pulse_times()
    assert np.all(pt > 0) and np.all(pt < 2.0)
    assert np.allclose(np.diff(pt), pt[0] * 2)


def test_export_samples(tmp_path):
    filt = build_filter(Free(1.0))
    path = tmp_path / "filter.txt"
    export_samples(filt, path)
    data = np.loadtxt(path)
    assert data.shape[1] == 2
    assert np.all(data[:, 1] >= 0)
