"""Minimal two-bath heat machine: a periodically modulated qubit.

A qubit at resonance omega0, permanently and weakly coupled to a hot and a
cold bath with distinct spectra, is frequency-modulated at rate Omega.  In
the coarse-grained Floquet picture each bath splits into harmonic
sub-baths at omega_q = omega0 + q Omega with weights P_q set by the
modulation; the steady state of the resulting rate equations exchanges
heat with every sub-bath and the balance determines whether the machine
runs as an engine (work delivered to the modulator) or as a refrigerator
(heat pumped out of the cold bath).  With spectrally separated baths the
cold current is proportional to G_h(omega0+Omega) G_c(omega0-Omega) and is
positive exactly when n_h(omega0+Omega) < n_c(omega0-Omega); the switch
sits at Omega_crit = omega0 (T_h - T_c)/(T_h + T_c), where the efficiency
touches the Carnot bound.

Sign conventions: heat currents are positive flowing from a bath into the
qubit; power is positive when delivered to the modulation piston, so
P = J_h + J_c at steady state.
"""
from __future__ import annotations

from dataclasses import dataclass, replace, field
from typing import Mapping

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .spectra import SpectrumDomainError, ThermalBath, occupancy


def _eval_or_zero(spectrum, omega: float) -> float:
    """Band-limited reading: no support at a sideband means no channel."""
    try:
        return float(spectrum.evaluate(omega))
    except SpectrumDomainError:
        return 0.0

__all__ = [
    "PiFlip",
    "Sinusoidal",
    "CustomWeights",
    "MachineConfig",
    "MachineOperatingPoint",
    "SeparationReport",
    "harmonic_weights",
    "steady_state",
    "efficiency_curve",
    "critical_modulation_rate",
    "spectral_separation_report",
]

# relative scale below which both currents count as zero (reversible point)
_IDLE_BAND = 1e-14


@dataclass(frozen=True)
class PiFlip:
    """Periodic pi phase flips: square-wave sidebands P_q = (2/pi q)^2, odd q."""


@dataclass(frozen=True)
class Sinusoidal:
    """Sinusoidal frequency modulation of the given depth (phase-modulation
    index); sideband weights are squared Bessel functions J_q(depth)^2."""

    depth: float = 1.0


@dataclass(frozen=True)
class CustomWeights:
    """Explicit sideband weights {q: P_q}; renormalized over the cut."""

    weights: Mapping[int, float]


def harmonic_weights(modulation, harmonic_cut: int) -> dict[int, float]:
    """Sideband weights P_q of the modulation, renormalized over |q| <= cut."""
    if harmonic_cut < 1:
        raise ValueError("harmonic_cut must be >= 1")
    qs = range(-harmonic_cut, harmonic_cut + 1)
    if isinstance(modulation, PiFlip):
        raw = {q: (2.0 / (np.pi * q)) ** 2 if q % 2 else 0.0 for q in qs if q != 0}
        raw[0] = 0.0
    elif isinstance(modulation, Sinusoidal):
        raw = {q: float(jv(q, modulation.depth)) ** 2 for q in qs}
    elif isinstance(modulation, CustomWeights):
        raw = {q: float(modulation.weights.get(q, 0.0)) for q in qs}
        if any(v < 0 for v in raw.values()):
            raise ValueError("custom weights must be nonnegative")
    else:
        raise TypeError(f"unknown modulation {type(modulation).__name__}")
    total = sum(raw.values())
    if total <= 0:
        raise ValueError("modulation has no weight inside the harmonic cut")
    return {q: v / total for q, v in raw.items()}


@dataclass(frozen=True)
class MachineConfig:
    omega0: float
    omega_mod: float                     # modulation rate Omega
    hot: ThermalBath
    cold: ThermalBath
    modulation: object = field(default_factory=PiFlip)
    harmonic_cut: int = 1

    def __post_init__(self):
        if not 0 < self.omega_mod < self.omega0:
            raise ValueError("need 0 < omega_mod < omega0")


@dataclass(frozen=True)
class MachineOperatingPoint:
    excited_population: float
    heat_current_hot: float
    heat_current_cold: float
    power: float
    regime: str                          # 'engine' | 'refrigerator' | 'idle'
    efficiency_or_cop: float
    entropy_production: float
    balance_residual: float              # steady-state flux residual, relative


def _channel_rates(config: MachineConfig):
    """Per-(bath, harmonic) up/down rates and sideband frequencies.

    Sidebands at nonpositive frequency carry no channel and are dropped.
    """
    weights = harmonic_weights(config.modulation, config.harmonic_cut)
    chans = []
    for name, bath in (("hot", config.hot), ("cold", config.cold)):
        T = bath.temperature
        for q, p_q in weights.items():
            if p_q == 0.0:
                continue
            w_q = config.omega0 + q * config.omega_mod
            if w_q <= 0.0:
                continue
            g = _eval_or_zero(bath.spectrum, w_q)
            if g == 0.0:
                continue
            n = float(occupancy(w_q, T)) if T > 0 else 0.0
            chans.append((name, q, w_q, p_q * g * n, p_q * g * (n + 1.0)))
    return chans


def steady_state(config: MachineConfig) -> MachineOperatingPoint:
    """Steady-state populations, currents, power and regime of the machine."""
    chans = _channel_rates(config)
    up = sum(c[3] for c in chans)
    down = sum(c[4] for c in chans)
    if down == 0.0:
        raise ValueError("all channel rates vanish: no steady state defined")
    p_e = up / (up + down)
    p_g = 1.0 - p_e

    j = {"hot": 0.0, "cold": 0.0}
    for name, _q, w_q, r_up, r_down in chans:
        j[name] += w_q * (r_up * p_g - r_down * p_e)
    j_h, j_c = j["hot"], j["cold"]
    power = j_h + j_c

    t_h = config.hot.temperature
    t_c = config.cold.temperature
    entropy = 0.0
    if t_h > 0:
        entropy -= j_h / t_h
    if t_c > 0:
        entropy -= j_c / t_c

    scale = sum(abs(c[2]) * (c[3] + c[4]) for c in chans)
    residual = abs(up * p_g - down * p_e) / max(up + down, 1e-300)

    if power > _IDLE_BAND * scale and j_h > 0:
        regime, merit = "engine", power / j_h
    elif j_c > _IDLE_BAND * scale and power < 0:
        regime, merit = "refrigerator", j_c / (-power)
    else:
        regime, merit = "idle", np.nan
    return MachineOperatingPoint(
        excited_population=p_e, heat_current_hot=j_h, heat_current_cold=j_c,
        power=power, regime=regime, efficiency_or_cop=merit,
        entropy_production=entropy, balance_residual=residual,
    )


def critical_modulation_rate(config: MachineConfig, bracket=None) -> float | None:
    """Modulation rate where n_h(omega0+Omega) = n_c(omega0-Omega).

    Located by root bracketing of the occupancy difference; None when there
    is no crossing inside the bracket (default: the open interval
    (0, omega0)).
    """
    w0 = config.omega0
    t_h, t_c = config.hot.temperature, config.cold.temperature
    if t_h <= 0 or t_c <= 0:
        return None

    def gap(omega):
        return (float(occupancy(w0 + omega, t_h))
                - float(occupancy(w0 - omega, t_c)))

    lo, hi = bracket if bracket is not None else (1e-12 * w0, w0 * (1 - 1e-12))
    if gap(lo) * gap(hi) > 0:
        return None
    return float(brentq(gap, lo, hi, xtol=1e-15 * w0, rtol=8.9e-16))


def efficiency_curve(config: MachineConfig, omega_grid):
    """Sweep the modulation rate: rows of (Omega, regime, merit, J_c, P),
    plus the engine/refrigerator switch point.

    Returns (rows, omega_crit); rows are dicts in grid order.
    """
    rows = []
    for omega in np.asarray(omega_grid, dtype=float):
        pt = steady_state(replace(config, omega_mod=float(omega)))
        rows.append({"omega_mod": float(omega), "regime": pt.regime,
                     "efficiency_or_cop": pt.efficiency_or_cop,
                     "heat_current_cold": pt.heat_current_cold,
                     "heat_current_hot": pt.heat_current_hot,
                     "power": pt.power})
    return rows, critical_modulation_rate(config)


@dataclass(frozen=True)
class SeparationReport:
    cold_at_upper: float       # G_c(omega0 + Omega)
    hot_at_lower: float        # G_h(omega0 - Omega)
    leak_upper_fraction: float  # cold channel weight at the upper sideband
    leak_lower_fraction: float  # hot channel weight at the lower sideband
    separated: bool


def spectral_separation_report(config: MachineConfig,
                               threshold: float = 0.01) -> SeparationReport:
    """Check that the upper sideband sees only the hot bath and the lower
    sideband only the cold bath.  Leakage is the parasitic channel's total
    rate weight over the dominant channel's at the same sideband; the
    configuration is flagged unseparated when either leakage is >= the
    threshold (deterministic >= comparison)."""
    w_up = config.omega0 + config.omega_mod
    w_dn = config.omega0 - config.omega_mod

    def weight(bath, w):
        g = _eval_or_zero(bath.spectrum, w)
        T = bath.temperature
        n = float(occupancy(w, T)) if (T > 0 and w > 0) else 0.0
        return g * (2.0 * n + 1.0)

    hot_up = weight(config.hot, w_up)
    cold_up = weight(config.cold, w_up)
    hot_dn = weight(config.hot, w_dn)
    cold_dn = weight(config.cold, w_dn)
    leak_up = cold_up / hot_up if hot_up > 0 else (np.inf if cold_up > 0 else 0.0)
    leak_dn = hot_dn / cold_dn if cold_dn > 0 else (np.inf if hot_dn > 0 else 0.0)
    return SeparationReport(
        cold_at_upper=_eval_or_zero(config.cold.spectrum, w_up),
        hot_at_lower=_eval_or_zero(config.hot.spectrum, w_dn),
        leak_upper_fraction=leak_up,
        leak_lower_fraction=leak_dn,
        separated=not (leak_up >= threshold or leak_dn >= threshold),
    )
