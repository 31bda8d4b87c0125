import numpy as np
import pytest

from bathforge.filters import SinP
from bathforge.spectra import Lorentzian, Tabulated
from bathforge.transfer import (OverlapRegimeWarning, TransferChannel,
                                tradeoff_curve, transfer_fidelity)


def displaced_lorentzian(center, tau_c=1.0, strength=0.05, half_width=8.0, points=801):
    """Band-limited tabulation of a Lorentzian of width 1/tau_c sitting at
    ``center`` (the mode spacing away from the transfer resonance)."""
    w = np.linspace(center - half_width / tau_c, center + half_width / tau_c, points)
    vals = strength / (np.pi * (1.0 + ((w - center) * tau_c) ** 2))
    return Tabulated(w, vals)


def test_no_bath_perfect_transfer():
    channel = TransferChannel(Lorentzian(0.0, 1.0), 2.0, SinP(2.0, 2, 1.0))
    res = transfer_fidelity(channel)
    assert res.fidelity == 1.0
    assert res.infidelity == 0.0
    assert res.in_regime


def test_tail_chopping_beats_free_shape_by_10x():
    # bath far outside the filter passband: infidelity is tail-dominated
    bath = displaced_lorentzian(center=40.0)
    T = 2.0
    infid = {}
    for p in (0, 2):
        res = transfer_fidelity(TransferChannel(bath, T, SinP(T, p, 1.0)))
        infid[p] = res.infidelity
    assert infid[2] <= infid[0] / 10.0


def test_longer_transfer_reduces_tail_infidelity():
    bath = displaced_lorentzian(center=40.0)
    infids = []
    for T in (1.0, 2.0, 4.0):
        res = transfer_fidelity(TransferChannel(bath, T, SinP(T, 2, 1.0)))
        infids.append(res.infidelity)
    assert infids[0] > infids[1] > infids[2]


def test_flat_bath_ordering_set_by_modulation_energy():
    grid = np.array([-1e9, 1e9])
    flat = Tabulated(grid, np.array([1e-3, 1e-3]))
    T = 2.0
    vals = {}
    for p, frac in ((0, 1.0), (1, 0.5), (2, 3.0 / 8.0)):
        res = transfer_fidelity(TransferChannel(flat, T, SinP(T, p, 1.0)))
        vals[p] = res.infidelity
        assert res.infidelity == pytest.approx(1e-3 * frac, rel=1e-5)
    assert vals[0] > vals[1] > vals[2]


def test_out_of_regime_clamps_to_zero():
    grid = np.array([-1e9, 1e9])
    strong = Tabulated(grid, np.array([2.0, 2.0]))
    with pytest.warns(OverlapRegimeWarning):
        res = transfer_fidelity(TransferChannel(strong, 1.0, SinP(1.0, 0, 1.0)))
    assert res.fidelity == 0.0
    assert res.infidelity > 1.0
    assert not res.in_regime


def test_tradeoff_table_bookkeeping():
    bath = displaced_lorentzian(center=40.0)
    times = np.linspace(1.0, 3.0, 20)
    rows = tradeoff_curve(bath, times, p_values=(0, 1, 2))
    assert len(rows) == 60
    # pareto flags: exactly one per transfer time, consistent with raw values
    for T in times:
        group = [r for r in rows if r["transfer_time"] == T]
        flagged = [r for r in group if r["pareto_best"]]
        assert len(flagged) == 1
        assert flagged[0]["infidelity"] == min(r["infidelity"] for r in group)


def test_best_shape_is_p2_at_long_times():
    bath = displaced_lorentzian(center=40.0, tau_c=1.0)
    times = np.linspace(20.0, 40.0, 5)   # T >= 20 tau_c
    rows = tradeoff_curve(bath, times)
    for T in times:
        best = [r for r in rows if r["transfer_time"] == T and r["pareto_best"]]
        assert best[0]["p"] == 2


def test_tail_dominance_ordering_on_band_limited_spectra():
    # five synthetic band-limited baths with support well off the passband
    rng = np.random.default_rng(17)
    T = 2.0
    for k in range(5):
        center = rng.uniform(30.0, 80.0)
        width = rng.uniform(0.5, 2.0)
        w = np.linspace(center - 5 * width, center + 5 * width, 301)
        vals = 0.01 * np.exp(-(((w - center) / width) ** 2))
        bath = Tabulated(w, vals)
        assert center - 5 * width > np.pi / T * 10  # support excludes the lobe
        infid = {p: transfer_fidelity(TransferChannel(bath, T, SinP(T, p, 1.0))).infidelity
                 for p in (0, 1, 2)}
        assert infid[2] < infid[1] < infid[0]


def test_channel_validation():
    with pytest.raises(ValueError):
        TransferChannel(Lorentzian(1.0, 1.0), 2.0, SinP(1.0, 2, 1.0))
    with pytest.raises(ValueError):
        TransferChannel(Lorentzian(1.0, 1.0), -1.0, SinP(1.0, 2, 1.0))
