"""Exact collective dephasing of N qubits sharing one bosonic bath.

N noninteracting qubits coupled to a common bath through the collective
spin L_z = sum_j sigma_zj evolve exactly under

    rho_mm'(t) = rho_mm'(0) exp(-i omega0 (m - m') t)
                            exp(+i f(t) (m'^2 - m^2))
                            exp(-(m - m')^2 gamma(t)),

where m, m' label L_z eigenvalues (Pauli convention: m in {-N, -N+2, .., N}).
The bath-induced quadratic phase f(t) L_z^2 is a collective Lamb shift from
virtual quanta exchange: it twists a transversely polarized spin ensemble
into a macroscopic superposition (GHZ cat).  Real quanta exchange produces
the competing decoherence exponent gamma(t); entanglement survives when the
Lamb-shift rate f_AB dominates the real-exchange rate Gamma = 2 pi G_T(0).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from math import lgamma
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .spectra import BathSpectrum, ThermalBath

__all__ = [
    "DickeState",
    "DephasingKernel",
    "InfraredDivergenceError",
    "PrincipalValueError",
    "dephasing_kernel",
    "evolve",
    "ghz_fidelity",
    "lamb_shift_rate",
    "dominance_ratio",
    "cat_formation_scan",
]

MAX_QUBITS = 14


class InfraredDivergenceError(ValueError):
    """The dephasing exponent diverges at low frequency."""


class PrincipalValueError(RuntimeError):
    """Principal-value integral failed to converge."""


def _ln_binom(n, k):
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


@dataclass
class DickeState:
    """Density matrix of N qubits on the symmetric (collective) subspace.

    Basis index k = 0..N counts up-spins; the L_z eigenvalue is
    m = 2k - N.  The matrix must be Hermitian, unit trace and positive
    semidefinite (eigenvalues >= -1e-12).
    """

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        n = self.n_qubits
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"n_qubits must lie in [1, {MAX_QUBITS}]")
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (n + 1, n + 1):
            raise ValueError(f"matrix must be {(n + 1, n + 1)}, got {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise ValueError("matrix must be Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError("matrix must have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise ValueError("matrix must be positive semidefinite")
        self.matrix = rho

    @property
    def m_values(self) -> np.ndarray:
        """L_z eigenvalues, ascending: -N, -N+2, ..., N."""
        return 2 * np.arange(self.n_qubits + 1) - self.n_qubits

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    @classmethod
    def from_vector(cls, n_qubits: int, amplitudes) -> "DickeState":
        v = np.asarray(amplitudes, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(n_qubits, np.outer(v, v.conj()))

    @classmethod
    def coherent(cls, n_qubits: int, theta: float, phi: float) -> "DickeState":
        """Spin coherent state: every qubit points along (theta, phi)."""
        return cls.from_vector(n_qubits, _coherent_vector(n_qubits, theta, phi))

    @classmethod
    def plus_x(cls, n_qubits: int) -> "DickeState":
        return cls.coherent(n_qubits, np.pi / 2, 0.0)

    @classmethod
    def pole(cls, n_qubits: int, up: bool = True) -> "DickeState":
        v = np.zeros(n_qubits + 1)
        v[-1 if up else 0] = 1.0
        return cls.from_vector(n_qubits, v)

    @classmethod
    def ghz(cls, n_qubits: int, chi: float = 0.0, axis: str = "z") -> "DickeState":
        return cls.from_vector(n_qubits, _ghz_vector(n_qubits, chi, axis))


def _coherent_vector(n: int, theta: float, phi: float) -> np.ndarray:
    # k up-spins: sqrt(C(n,k)) cos^(n-k)(theta/2) sin^k ... convention: the
    # qubit state is cos(theta/2)|down> + e^{i phi} sin(theta/2)|up>, so the
    # +x state (theta = pi/2, phi = 0) has all-positive amplitudes.
    k = np.arange(n + 1)
    with np.errstate(divide="ignore"):
        ln_mag = (0.5 * np.array([_ln_binom(n, int(j)) for j in k])
                  + (n - k) * np.log(max(np.cos(theta / 2), 1e-300))
                  + k * np.log(max(np.sin(theta / 2), 1e-300)))
    return np.exp(ln_mag) * np.exp(1j * phi * k)


def _equatorial_pole_vectors(n: int, angle: float):
    """The two antipodal equatorial coherent states at azimuth ``angle``."""
    k = np.arange(n + 1)
    base = np.exp([0.5 * _ln_binom(n, int(j)) for j in k]) / 2 ** (n / 2)
    a = base * np.exp(1j * angle * k)
    b = base * np.exp(1j * (angle + np.pi) * k)
    return a, b


def _ghz_vector(n: int, chi: float, axis: str) -> np.ndarray:
    if axis == "z":
        v = np.zeros(n + 1, dtype=complex)
        v[-1] = 1.0 / np.sqrt(2)          # |all up>
        v[0] = np.exp(1j * chi) / np.sqrt(2)  # |all down>
        return v
    angle = {"x": 0.0, "y": np.pi / 2}[axis]
    a, b = _equatorial_pole_vectors(n, angle)
    return (a + np.exp(1j * chi) * b) / np.sqrt(2)


@dataclass(frozen=True)
class DephasingKernel:
    """Time profiles of the collective Lamb phase and dephasing exponent.

    lamb_phase f(t)   = int_0^inf G(omega) (omega t - sin omega t)/omega^2,
    decoherence gamma(t) = int_0^inf G(omega) coth(omega/2T)
                                       (1 - cos omega t)/omega^2,

    with the zero-temperature spectrum in f regardless of the bath
    temperature: only the virtual part twists the spins.  f(t)/t approaches
    the two-body Lamb-shift rate f_AB at long times.
    """

    lamb_phase: Callable[[float], float]
    decoherence_exponent: Callable[[float], float]

    def scaled(self, gamma_scale: float) -> "DephasingKernel":
        """Kernel with the dephasing exponent suppressed by a factor in [0, 1]
        (models phase flips that average out the linear-in-L_z coupling)."""
        if not 0.0 <= gamma_scale:
            raise ValueError("gamma_scale must be >= 0")
        g = self.decoherence_exponent
        return replace(self, decoherence_exponent=lambda t: gamma_scale * g(t))


def _coth(x):
    return 1.0 / np.tanh(x)


def _kernel_integral(spec: BathSpectrum, t: float, which: str, temperature: float) -> float:
    """Oscillation-safe evaluation of the f / gamma integrals."""
    lo, hi = spec.support
    lo = max(lo, 0.0)
    upper = min(hi, spec.uv_bound())
    if not np.isfinite(upper):
        raise InfraredDivergenceError(
            f"spectrum kind '{spec.kind}' has no finite ultraviolet bound; "
            "the dephasing kernel integral diverges"
        )

    if temperature > 0:
        def weight(w):
            return spec.evaluate(w) * _coth(w / (2.0 * temperature))
    else:
        def weight(w):
            return spec.evaluate(w)

    # below omega_split the integrand has at most one oscillation: integrate
    # the full combination directly; above, split off the oscillatory part
    # and hand it to the cos/sin-weighted rule
    omega_split = min(5.0 / t, upper) if t > 0 else upper
    if which == "gamma":
        def smooth_low(w):
            return weight(w) * (1.0 - np.cos(w * t)) / w**2
        def smooth_high(w):
            return weight(w) / w**2
        osc_weight = "cos"
        osc_sign = -1.0
        def osc_factor(w):
            return weight(w) / w**2
    else:
        def smooth_low(w):
            return weight(w) * (w * t - np.sin(w * t)) / w**2
        def smooth_high(w):
            return weight(w) * t / w
        osc_weight = "sin"
        osc_sign = -1.0
        def osc_factor(w):
            return weight(w) / w**2

    total = 0.0
    pts = [b for b in spec.breakpoints() if lo < b < omega_split]
    total += quad(smooth_low, lo, omega_split, points=pts or None, limit=400)[0]
    if omega_split < upper:
        pts = sorted(b for b in spec.breakpoints() if omega_split < b < upper)
        segs = [omega_split] + pts + [upper]
        for a, b in zip(segs[:-1], segs[1:]):
            total += quad(smooth_high, a, b, limit=400)[0]
            total += osc_sign * quad(osc_factor, a, b, weight=osc_weight,
                                     wvar=t, limit=2000)[0]
    return total


def dephasing_kernel(bath: ThermalBath) -> DephasingKernel:
    """Build the exact dephasing kernel of a thermal bath.

    Raises ``InfraredDivergenceError`` when gamma diverges at low frequency
    (spectra with G(0) > 0 at T > 0: the thermal factor coth ~ 2T/omega then
    makes the integrand scale as 1/omega).
    """
    spec = bath.spectrum
    T = bath.temperature
    lo, _ = spec.support
    if T > 0 and lo <= 0:
        if spec.zero_limit() > 0:
            raise InfraredDivergenceError(
                f"kind '{spec.kind}' has G(0+) = {spec.zero_limit():g} > 0: "
                "gamma(t) is infrared divergent at T > 0"
            )

    def lamb_phase(t: float) -> float:
        if t == 0:
            return 0.0
        return _kernel_integral(spec, float(t), "f", 0.0)

    def decoherence_exponent(t: float) -> float:
        if t == 0:
            return 0.0
        return _kernel_integral(spec, float(t), "gamma", T)

    return DephasingKernel(lamb_phase=lamb_phase,
                           decoherence_exponent=decoherence_exponent)


def evolve(state: DickeState, kernel: DephasingKernel, omega0: float, t: float) -> DickeState:
    """Exact propagation: no time stepping, populations are conserved."""
    m = state.m_values.astype(float)
    dm = m[:, None] - m[None, :]
    sq = m[None, :] ** 2 - m[:, None] ** 2  # m'^2 - m^2
    f = kernel.lamb_phase(t)
    g = kernel.decoherence_exponent(t)
    factor = np.exp(-1j * omega0 * t * dm + 1j * f * sq - dm**2 * g)
    return DickeState(state.n_qubits, state.matrix * factor)


def ghz_fidelity(state: DickeState, axis: str = "equatorial"):
    """Best overlap with a GHZ cat (|P> + e^{i chi}|-P>)/sqrt(2).

    The relative phase chi is maximized analytically.  ``axis`` selects the
    cat poles P: 'z' uses the extreme L_z states, 'x'/'y' the antipodal
    equatorial coherent states, and 'equatorial' (default) additionally
    maximizes over the equatorial azimuth -- the natural choice for states
    produced by collective dephasing, which conserves L_z populations and
    can only build cats transverse to z.
    """
    if state.n_qubits < 2:
        raise ValueError("GHZ fidelity needs at least 2 qubits")
    rho = state.matrix
    n = state.n_qubits

    def fid_at(a, b):
        # max over chi of <GHZ(chi)|rho|GHZ(chi)>
        paa = np.real(a.conj() @ rho @ a)
        pbb = np.real(b.conj() @ rho @ b)
        cross = a.conj() @ rho @ b
        return 0.5 * (paa + pbb) + abs(cross)

    if axis == "z":
        a = np.zeros(n + 1, dtype=complex)
        b = np.zeros(n + 1, dtype=complex)
        a[-1] = 1.0
        b[0] = 1.0
        return float(fid_at(a, b))
    if axis in ("x", "y"):
        ang = 0.0 if axis == "x" else np.pi / 2
        return float(fid_at(*_equatorial_pole_vectors(n, ang)))
    if axis != "equatorial":
        raise ValueError("axis must be 'z', 'x', 'y' or 'equatorial'")

    def neg_fid(ang):
        return -fid_at(*_equatorial_pole_vectors(n, ang))

    # periodic in pi; coarse grid (hits 0 and pi/2 exactly), then refine
    grid = np.linspace(0.0, np.pi, 64, endpoint=False)
    vals = [-neg_fid(a) for a in grid]
    best = int(np.argmax(vals))
    span = np.pi / 64
    res = minimize_scalar(neg_fid, bounds=(grid[best] - span, grid[best] + span),
                          method="bounded", options={"xatol": 1e-12})
    return float(max(max(vals), -res.fun))


def lamb_shift_rate(spectrum: BathSpectrum, rtol: float = 1e-9) -> float:
    """Two-body Lamb-shift rate: principal value of int G(omega)/omega.

    Symmetric excision around omega = 0 at three radii with Richardson
    extrapolation of the excision radius to zero.
    """
    lo, hi = spectrum.support
    scale = spectrum.feature_scale()
    if not np.isfinite(scale):
        scale = max(abs(x) for x in (lo, hi) if np.isfinite(x)) or 1.0
    upper = min(hi, spectrum.uv_bound())
    lo = max(lo, -spectrum.uv_bound())

    def integral_excised(eps):
        total = 0.0
        segs = []
        if lo < -eps:
            segs.append((lo, -eps))
        if eps < upper:
            segs.append((eps, upper))
        for a, b in segs:
            pts = [p for p in spectrum.breakpoints() if a < p < b]
            val, _ = quad(lambda w: spectrum.evaluate(w) / w, a, b,
                          points=pts or None, limit=400)
            total += val
        return total

    eps0 = 1e-3 * scale
    raw = [integral_excised(eps0 / 2**k) for k in range(4)]
    lvl1 = [2 * b - a for a, b in zip(raw[:-1], raw[1:])]      # removes O(eps)
    lvl2 = [(4 * b - a) / 3 for a, b in zip(lvl1[:-1], lvl1[1:])]  # removes O(eps^2)
    value = lvl2[-1]
    spread = abs(lvl2[-1] - lvl2[-2])
    if not np.isfinite(value) or spread > max(rtol * abs(value), 1e-10 * (1.0 + abs(raw[0]))):
        raise PrincipalValueError(
            f"principal value not converged (extrapolation spread {spread:.3e})"
        )
    return float(value)


@dataclass(frozen=True)
class DominanceReport:
    lamb_shift: float       # f_AB, virtual-exchange rate
    real_exchange: float    # Gamma = 2 pi G_T(0)
    ratio: float
    gamma_is_zero: bool


def dominance_ratio(bath: ThermalBath) -> DominanceReport:
    """Compare virtual-quanta entangling rate f_AB against the real-quanta
    decoherence rate Gamma = 2 pi G_T(0).  f_AB uses the bare (T = 0)
    spectrum; entanglement dominates when the ratio is large."""
    from .spectra import thermal_spectrum

    gamma = 2.0 * np.pi * thermal_spectrum(bath, 0.0)
    f_ab = lamb_shift_rate(bath.spectrum)
    if gamma == 0.0:
        return DominanceReport(f_ab, 0.0, np.inf, True)
    return DominanceReport(f_ab, gamma, f_ab / gamma, False)


def cat_formation_scan(n_qubits: int, kernel: DephasingKernel, omega0: float,
                       times, gamma_scale: float = 1.0):
    """GHZ-cat fidelity of an initially +x-polarized ensemble versus time.

    Returns (times, fidelities); the peak over the scan is the figure of
    merit for bath-induced entanglement.
    """
    k = kernel.scaled(gamma_scale)
    state0 = DickeState.plus_x(n_qubits)
    times = np.asarray(times, dtype=float)
    fids = np.array([ghz_fidelity(evolve(state0, k, omega0, t)) for t in times])
    return times, fids
