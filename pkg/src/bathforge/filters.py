"""Spectral filter functions of dynamical control protocols.

A control protocol acting for a duration t induces the normalized filter

    F_t(omega) = |integral_0^t eps(t') exp(i omega t') dt'|^2 / (2 pi t),

where eps(t') is the control modulation: identically 1 for free evolution,
a sign-flipping square wave for a pi-pulse train, exp(i Omega_R t') for a
continuous off-resonant drive, and alpha0 sin^p(pi t'/t) for boundary-
coupling modulation.  With this convention every unit-modulus protocol has
unit filter area, so a flat spectrum G = g0 dephases at exactly R = g0.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import quad

__all__ = [
    "ControlProtocol",
    "Free",
    "CPMG",
    "ContinuousDrive",
    "SinP",
    "FilterFunction",
    "FilterTailError",
    "build_filter",
    "evaluate_filter",
    "tail_exponent",
    "export_samples",
]

# beyond this phase count the closed forms are pure roundoff noise; the
# period-averaged tail value is returned instead
_PHASE_GUARD = 1e9


class FilterTailError(RuntimeError):
    """The high-frequency tail did not fit a power law."""


@dataclass(frozen=True)
class ControlProtocol:
    """Base class; ``duration`` is the total control time in seconds."""

    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("protocol duration must be > 0")

    def modulation(self, tprime):
        """Control modulation eps(t') on [0, duration]; vectorized."""
        raise NotImplementedError


@dataclass(frozen=True)
class Free(ControlProtocol):
    """Free evolution: eps = 1."""

    kind = "free"

    def modulation(self, tprime):
        return np.ones_like(np.asarray(tprime, dtype=float))


@dataclass(frozen=True)
class CPMG(ControlProtocol):
    """Equidistant pi-pulse train: n_pulses ideal instantaneous phase flips
    at t (2k - 1)/(2 N), k = 1..N, so eps alternates sign inside (0, t)."""

    n_pulses: int = 1
    kind = "cpmg"

    def __post_init__(self):
        super().__post_init__()
        if self.n_pulses < 1:
            raise ValueError("CPMG needs n_pulses >= 1")

    def pulse_times(self) -> np.ndarray:
        n = self.n_pulses
        return self.duration * (2 * np.arange(1, n + 1) - 1) / (2 * n)

    def modulation(self, tprime):
        tp = np.asarray(tprime, dtype=float)
        flips = np.searchsorted(self.pulse_times(), tp, side="right")
        return (-1.0) ** flips


@dataclass(frozen=True)
class ContinuousDrive(ControlProtocol):
    """Continuous off-resonant drive: eps = exp(i rabi t'), which rigidly
    translates the free filter to be centered at omega = -rabi."""

    rabi: float = 0.0
    kind = "drive"

    def modulation(self, tprime):
        tp = np.asarray(tprime, dtype=float)
        return np.exp(1j * self.rabi * tp)


@dataclass(frozen=True)
class SinP(ControlProtocol):
    """Boundary-coupling modulation eps = alpha0 sin^p(pi t'/t), p in {0,1,2}.

    Each extra power of sin adds a continuous derivative at the endpoints
    and steepens the filter tail by omega^-2: the p = 2 filter effectively
    has no spectral tails beyond a controllable rolloff frequency.
    """

    p: int = 2
    alpha0: float = 1.0
    kind = "sinp"

    def __post_init__(self):
        super().__post_init__()
        if self.p not in (0, 1, 2):
            raise ValueError("p must be one of {0, 1, 2}")
        if abs(self.alpha0) > 1:
            raise ValueError("|alpha0| <= 1 required")

    def modulation(self, tprime):
        tp = np.asarray(tprime, dtype=float)
        if self.p == 0:
            return np.full_like(tp, self.alpha0)
        return self.alpha0 * np.sin(np.pi * tp / self.duration) ** self.p


def _sinc(x):
    # sin(x)/x with the removable singularity handled
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    np.divide(np.sin(x), x, out=out, where=(x != 0))
    return out


def _window_integral(x, t):
    """D(x) = integral_0^t exp(i x t') dt' = t exp(i x t/2) sinc(x t/2)."""
    x = np.asarray(x, dtype=float)
    return t * np.exp(0.5j * x * t) * _sinc(0.5 * x * t)


@dataclass(frozen=True)
class FilterFunction:
    """Evaluable filter F_t(omega) with the structure quadrature needs.

    ``amp`` is the closed-form |integral eps exp(i omega t')|^2 evaluated at
    the *untranslated* frequency; ``shift`` rigidly translates the filter
    (used for rates at shifted transition frequencies).  ``tail_power`` and
    ``tail_coeff`` describe the period-averaged asymptote
    F ~ tail_coeff / |omega - center|^tail_power.
    """

    protocol: ControlProtocol
    amp: Callable[[np.ndarray], np.ndarray]
    base_center: float
    tail_power: float
    tail_coeff: float
    norm: float
    symmetric: bool
    comm_periods: float = 1.0   # window commensurability, in units of ``period``
    tail_curv: float = 0.0      # sum_{j!=k} c_j c_k / d_jk^2 / (2 pi t)
    shift: float = 0.0

    @property
    def duration(self) -> float:
        return self.protocol.duration

    @property
    def period(self) -> float:
        """Oscillation period of F along omega."""
        return 2.0 * np.pi / self.duration

    @property
    def center(self) -> float:
        return self.base_center + self.shift

    def evaluate(self, omega):
        t = self.duration
        w = np.asarray(omega, dtype=float) - self.shift
        detune = w - self.base_center
        vals = self.amp(w) / (2.0 * np.pi * t)
        huge = np.abs(detune) * t > _PHASE_GUARD
        if np.any(huge):
            with np.errstate(divide="ignore"):
                tail = self.tail_coeff / np.abs(detune) ** self.tail_power
            vals = np.where(huge, tail, vals)
        if np.isscalar(omega) or np.ndim(omega) == 0:
            return float(vals)
        return vals

    __call__ = evaluate

    def evaluate_numeric(self, omega: float) -> float:
        """Direct quadrature of the defining time integral (cross-check)."""
        t = self.duration
        w = float(omega) - self.shift
        eps = self.protocol.modulation
        pts = None
        if isinstance(self.protocol, CPMG):
            pts = list(self.protocol.pulse_times())
        re = quad(lambda tp: np.real(eps(tp) * np.exp(1j * w * tp)), 0.0, t,
                  points=pts, limit=400)[0]
        im = quad(lambda tp: np.imag(eps(tp) * np.exp(1j * w * tp)), 0.0, t,
                  points=pts, limit=400)[0]
        return (re**2 + im**2) / (2.0 * np.pi * t)

    def translated(self, delta: float) -> "FilterFunction":
        """Filter translated by delta: returns F(omega - delta)."""
        return replace(self, shift=self.shift + delta,
                       symmetric=self.symmetric and (self.shift + delta == 0.0))


def _segment_amp(edges: np.ndarray, signs: np.ndarray, t: float):
    """|sum_j s_j (b_j - a_j) e^{i w (a_j+b_j)/2} sinc(w (b_j-a_j)/2)|^2.

    Exact transform of a piecewise-constant modulation; numerically stable
    for all omega including 0.
    """
    a = edges[:-1]
    b = edges[1:]
    mids = 0.5 * (a + b)
    halves = 0.5 * (b - a)

    def amp(w):
        w = np.asarray(w, dtype=float)
        flat = w.ravel()
        phase = np.exp(1j * np.outer(flat, mids))
        lobe = _sinc(np.outer(flat, halves))
        tot = (phase * lobe) @ (signs * 2.0 * halves)
        return (np.abs(tot) ** 2).reshape(w.shape)

    return amp



def _jump_curvature(coeffs, taus, t):
    """Second-order tail coefficient of a piecewise-constant modulation:
    sum over ordered pairs of jump products weighted by inverse squared
    spacing.  It controls the leading boundary error of the period-averaged
    tail model."""
    c = np.asarray(coeffs, dtype=float)
    tau = np.asarray(taus, dtype=float)
    d = tau[:, None] - tau[None, :]
    mask = ~np.eye(len(tau), dtype=bool)
    with np.errstate(divide="ignore"):
        inv2 = np.where(mask, 1.0 / d**2, 0.0)
    return float(np.sum(np.outer(c, c) * inv2) / (2.0 * np.pi * t))


def build_filter(protocol: ControlProtocol) -> FilterFunction:
    """Construct the filter function of a control protocol.

    Closed forms are used throughout; ``evaluate_numeric`` exposes the
    defining integral for cross-checking.
    """
    t = protocol.duration

    if isinstance(protocol, Free):
        def amp(w):
            return np.abs(_window_integral(w, t)) ** 2
        return FilterFunction(protocol, amp, 0.0, 2.0, 2.0 / (2.0 * np.pi * t),
                              norm=1.0, symmetric=True,
                              tail_curv=_jump_curvature([1.0, -1.0], [0.0, t], t))

    if isinstance(protocol, CPMG):
        edges = np.concatenate(([0.0], protocol.pulse_times(), [t]))
        signs = (-1.0) ** np.arange(protocol.n_pulses + 1)
        amp = _segment_amp(edges, signs, t)
        # interior sign flips jump by 2, endpoints by 1: sum of squared jumps
        jump_sq = 4.0 * protocol.n_pulses + 2.0
        jumps = np.concatenate(([1.0], -2.0 * signs[:-1], [signs[-1] * -1.0]))
        jump_at = np.concatenate(([0.0], protocol.pulse_times(), [t]))
        return FilterFunction(protocol, amp, 0.0, 2.0, jump_sq / (2.0 * np.pi * t),
                              norm=1.0, symmetric=True,
                              comm_periods=4.0 * protocol.n_pulses,
                              tail_curv=_jump_curvature(jumps, jump_at, t))

    if isinstance(protocol, ContinuousDrive):
        rabi = protocol.rabi

        def amp(w):
            return np.abs(_window_integral(np.asarray(w, dtype=float) + rabi, t)) ** 2

        return FilterFunction(protocol, amp, -rabi, 2.0, 2.0 / (2.0 * np.pi * t),
                              norm=1.0, symmetric=False,
                              tail_curv=_jump_curvature([1.0, -1.0], [0.0, t], t))

    if isinstance(protocol, SinP):
        a0 = protocol.alpha0
        w1 = np.pi / t
        p = protocol.p
        if p == 0:
            def amp(w):
                return a0**2 * np.abs(_window_integral(w, t)) ** 2
            tail_power, tail_coeff, norm = 2.0, 2.0 * a0**2 / (2.0 * np.pi * t), a0**2
            curv = _jump_curvature([a0, -a0], [0.0, t], t)
        elif p == 1:
            def amp(w):
                w = np.asarray(w, dtype=float)
                val = (_window_integral(w + w1, t) - _window_integral(w - w1, t)) / 2j
                return a0**2 * np.abs(val) ** 2
            tail_power, tail_coeff, norm = 4.0, 2.0 * a0**2 * w1**2 / (2.0 * np.pi * t), a0**2 / 2.0
            curv = 0.0
        else:
            def amp(w):
                w = np.asarray(w, dtype=float)
                val = (0.5 * _window_integral(w, t)
                       - 0.25 * _window_integral(w + 2 * w1, t)
                       - 0.25 * _window_integral(w - 2 * w1, t))
                return a0**2 * np.abs(val) ** 2
            tail_power, tail_coeff, norm = 6.0, 8.0 * a0**2 * w1**4 / (2.0 * np.pi * t), 3.0 * a0**2 / 8.0
            curv = 0.0
        return FilterFunction(protocol, amp, 0.0, tail_power, tail_coeff,
                              norm=norm, symmetric=True, tail_curv=curv)

    raise TypeError(f"unknown protocol type {type(protocol).__name__}")


def evaluate_filter(filt: FilterFunction, omega):
    """Evaluate F_t(omega); vectorized over omega."""
    return filt.evaluate(omega)


def tail_exponent(filt: FilterFunction, residual_threshold: float = 0.15) -> float:
    """Fitted asymptotic decay exponent s of F(omega) ~ omega^-s.

    Log-log fit of the period-averaged filter over omega in
    [omega_hi, 100 omega_hi] with omega_hi = 50 pi / t, measured from the
    filter center.  Raises ``FilterTailError`` when the rms log residual
    exceeds ``residual_threshold`` (non-power-law tail).
    """
    t = filt.duration
    w_hi = 50.0 * np.pi / t
    centers = np.geomspace(w_hi, 100.0 * w_hi, 48)
    lam = filt.period
    # average over 4 oscillation periods around each center: the mean of the
    # oscillatory factor is exact over whole periods
    offsets = np.linspace(-2.0 * lam, 2.0 * lam, 257)
    grid = centers[:, None] + offsets[None, :]
    vals = filt.evaluate(filt.center + grid.ravel()).reshape(grid.shape)
    means = np.trapezoid(vals, offsets, axis=1) / (offsets[-1] - offsets[0])
    if np.any(means <= 0):
        raise FilterTailError("filter tail vanished; no power law to fit")
    logw = np.log(centers)
    logf = np.log(means)
    slope, intercept = np.polyfit(logw, logf, 1)
    resid = logf - (slope * logw + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    if rms > residual_threshold:
        raise FilterTailError(
            f"tail is not a power law (rms log residual {rms:.3f} > {residual_threshold})"
        )
    return float(-slope)


def export_samples(filt: FilterFunction, path, omega=None) -> None:
    """Write dense (omega, F) samples as two-column text for plotting."""
    if omega is None:
        half = 40.0 * np.pi / filt.duration
        omega = np.linspace(filt.center - half, filt.center + half, 4001)
    vals = filt.evaluate(omega)
    header = "omega_rad_per_s filter_value_s"
    np.savetxt(path, np.column_stack([omega, vals]), header=header)
