"""Bath coupling spectra and their thermal dressing.

Units: hbar = k_B = 1 throughout the package, so frequencies, rates and
temperatures all carry rad/s.  A coupling spectrum G(omega) is the Fourier
transform of the bath autocorrelation function; it weights how strongly the
bath responds at each frequency and must be nonnegative on its support.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "SpectrumDomainError",
    "BathSpectrum",
    "Lorentzian",
    "Ohmic",
    "Blackbody",
    "BandGap1D",
    "Tabulated",
    "ThermalBath",
    "evaluate",
    "occupancy",
    "thermal_spectrum",
]


class SpectrumDomainError(ValueError):
    """Query outside a spectrum's declared support, or an undefined limit."""


class BathSpectrum:
    """Base class for coupling spectra G(omega) >= 0.

    Concrete kinds implement ``evaluate`` (vectorized) together with a few
    structural hooks used by the quadrature engines: ``support``, the
    smallest smooth feature scale, characteristic breakpoints, and an upper
    frequency beyond which the spectrum is numerically negligible.
    """

    kind = "abstract"

    def evaluate(self, omega):
        raise NotImplementedError

    __call__ = evaluate

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def zero_limit(self) -> float:
        """G(0+), the limit of the spectrum at zero frequency."""
        raise NotImplementedError

    def zero_slope(self) -> float:
        """dG/domega at 0+, used for the thermal linear-response limit."""
        raise NotImplementedError

    def feature_scale(self) -> float:
        """Narrowest frequency scale over which G varies appreciably."""
        raise NotImplementedError

    def breakpoints(self) -> list[float]:
        """Principal characteristic frequencies (short list)."""
        return []

    def refine_edges(self) -> list[float]:
        """Dense panel-edge refinement resolving every spectral feature."""
        return self.breakpoints()

    def uv_bound(self) -> float:
        """Frequency above which G is negligible (inf if it is not)."""
        return np.inf


def _as_float_or_array(omega, values):
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class Lorentzian(BathSpectrum):
    """G(omega) = g^2 tau_c / (pi (1 + omega^2 tau_c^2)).

    Even in omega and supported on the whole line; ``g`` is the probe-bath
    coupling strength and ``tau_c`` the bath correlation time.
    """

    g: float
    tau_c: float
    kind = "lorentzian"

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("coupling strength g must be >= 0")
        if self.tau_c <= 0:
            raise ValueError("correlation time tau_c must be > 0")

    def evaluate(self, omega):
        w = np.asarray(omega, dtype=float)
        vals = self.g**2 * self.tau_c / (np.pi * (1.0 + (w * self.tau_c) ** 2))
        return _as_float_or_array(omega, vals)

    __call__ = evaluate

    @property
    def support(self):
        return (-np.inf, np.inf)

    def zero_limit(self):
        return self.g**2 * self.tau_c / np.pi

    def zero_slope(self):
        return 0.0

    def feature_scale(self):
        return 1.0 / self.tau_c

    def breakpoints(self):
        return [-1.0 / self.tau_c, 0.0, 1.0 / self.tau_c]

    def refine_edges(self):
        s = 1.0 / self.tau_c
        offs = s * np.array([0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0])
        return sorted(np.concatenate([-offs, [0.0], offs]))

    def uv_bound(self):
        # G falls off as omega^-2; 1e6/tau_c leaves a relative tail < 1e-12
        # in any integral against a kernel that itself decays.
        return 1e6 / self.tau_c


@dataclass(frozen=True)
class Ohmic(BathSpectrum):
    """G(omega) = eta * omega * exp(-omega/omega_cut) for omega >= 0, else 0."""

    eta: float
    omega_cut: float
    kind = "ohmic"

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.omega_cut <= 0:
            raise ValueError("omega_cut must be > 0")

    def evaluate(self, omega):
        w = np.asarray(omega, dtype=float)
        vals = np.where(w >= 0, self.eta * w * np.exp(-np.minimum(np.abs(w), 7e2 * self.omega_cut) / self.omega_cut), 0.0)
        return _as_float_or_array(omega, vals)

    __call__ = evaluate

    @property
    def support(self):
        return (0.0, np.inf)

    def zero_limit(self):
        return 0.0

    def zero_slope(self):
        return self.eta

    def feature_scale(self):
        return self.omega_cut

    def breakpoints(self):
        return [self.omega_cut]

    def refine_edges(self):
        return list(self.omega_cut * 2.0 ** np.arange(-5, 6))

    def uv_bound(self):
        return 60.0 * self.omega_cut


@dataclass(frozen=True)
class Blackbody(BathSpectrum):
    """G(omega) = amplitude * omega^3 on [0, omega_max], else 0.

    The cubic rise matches the free-space photon mode density; ``omega_max``
    is a numerical cutoff so that integrals against slowly decaying filters
    stay finite.
    """

    amplitude: float
    omega_max: float = np.inf
    kind = "blackbody"

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.omega_max <= 0:
            raise ValueError("omega_max must be > 0")

    def evaluate(self, omega):
        w = np.asarray(omega, dtype=float)
        vals = np.where((w >= 0) & (w <= self.omega_max), self.amplitude * w**3, 0.0)
        return _as_float_or_array(omega, vals)

    __call__ = evaluate

    @property
    def support(self):
        return (0.0, self.omega_max)

    def zero_limit(self):
        return 0.0

    def zero_slope(self):
        return 0.0

    def feature_scale(self):
        return self.omega_max if np.isfinite(self.omega_max) else np.inf

    def breakpoints(self):
        return [self.omega_max] if np.isfinite(self.omega_max) else []

    def refine_edges(self):
        if not np.isfinite(self.omega_max):
            return []
        return list(self.omega_max * np.array([0.125, 0.25, 0.5, 0.75, 1.0]))

    def uv_bound(self):
        return self.omega_max


@dataclass(frozen=True)
class BandGap1D(BathSpectrum):
    """Band-edge mode density: G = gamma_fs / sqrt(1 - omega/omega_co).

    Supported on [0, omega_co); the inverse square root reproduces the
    divergence of the guided-mode density at the band edge, and the gap
    above omega_co carries no weight.
    """

    omega_co: float
    gamma_fs: float
    kind = "bandgap1d"

    def __post_init__(self):
        if self.omega_co <= 0:
            raise ValueError("omega_co must be > 0")
        if self.gamma_fs < 0:
            raise ValueError("gamma_fs must be >= 0")

    def evaluate(self, omega):
        w = np.asarray(omega, dtype=float)
        inside = (w >= 0) & (w < self.omega_co)
        x = np.where(inside, 1.0 - w / self.omega_co, 1.0)
        vals = np.where(inside, self.gamma_fs / np.sqrt(x), 0.0)
        return _as_float_or_array(omega, vals)

    __call__ = evaluate

    @property
    def support(self):
        return (0.0, self.omega_co)

    def zero_limit(self):
        return self.gamma_fs

    def zero_slope(self):
        return self.gamma_fs / (2.0 * self.omega_co)

    def feature_scale(self):
        return self.omega_co

    def breakpoints(self):
        return [self.omega_co * (1.0 - 2.0**-k) for k in range(1, 12)]

    def refine_edges(self):
        # geometric refinement toward the integrable edge singularity
        coarse = list(self.omega_co * np.array([0.125, 0.25, 0.5]))
        return coarse + [self.omega_co * (1.0 - 2.0**-k) for k in range(1, 45)]

    def uv_bound(self):
        return self.omega_co


@dataclass(frozen=True)
class Tabulated(BathSpectrum):
    """Sampled spectrum with monotone piecewise-cubic interpolation.

    Values must be nonnegative on a strictly increasing grid.  Queries
    outside [omega[0], omega[-1]] raise ``SpectrumDomainError``; there is no
    extrapolation.
    """

    omega: np.ndarray
    values: np.ndarray
    kind = "tabulated"
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        g = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or w.size < 2 or w.shape != g.shape:
            raise ValueError("need matching 1-d omega and value arrays with >= 2 samples")
        if np.any(np.diff(w) <= 0):
            raise ValueError("omega samples must be strictly increasing")
        if np.any(g < 0):
            raise ValueError("tabulated G values must be nonnegative")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "values", g)
        object.__setattr__(self, "_interp", PchipInterpolator(w, g, extrapolate=False))

    @classmethod
    def from_file(cls, path) -> "Tabulated":
        """Load from two-column numeric text; '#' starts a comment line."""
        data = np.loadtxt(path, comments="#")
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError(f"{path}: expected two numeric columns (omega, G)")
        return cls(omega=data[:, 0], values=data[:, 1])

    def evaluate(self, omega):
        w = np.asarray(omega, dtype=float)
        lo, hi = self.support
        if np.any(w < lo) or np.any(w > hi):
            raise SpectrumDomainError(
                f"tabulated spectrum queried outside support [{lo:g}, {hi:g}]"
            )
        vals = self._interp(w)
        return _as_float_or_array(omega, vals)

    __call__ = evaluate

    @property
    def support(self):
        return (float(self.omega[0]), float(self.omega[-1]))

    def zero_limit(self):
        lo, hi = self.support
        if lo > 0.0 or hi < 0.0:
            raise SpectrumDomainError("tabulated support does not reach omega = 0")
        return float(self._interp(0.0))

    def zero_slope(self):
        self.zero_limit()
        return float(self._interp.derivative()(0.0))

    def feature_scale(self):
        return float(np.min(np.diff(self.omega))) * 4.0

    def breakpoints(self):
        # capped so quadrature point lists stay short
        if self.omega.size <= 64:
            return list(self.omega)
        idx = np.linspace(0, self.omega.size - 1, 64).astype(int)
        return list(self.omega[idx])

    def refine_edges(self):
        # panels with edges at the knots integrate the piecewise cubic exactly
        if self.omega.size <= 8192:
            return list(self.omega)
        idx = np.linspace(0, self.omega.size - 1, 8192).astype(int)
        return list(self.omega[idx])

    def uv_bound(self):
        return float(self.omega[-1])


def evaluate(spectrum: BathSpectrum, omega):
    """Evaluate G(omega); vectorized over omega."""
    return spectrum.evaluate(omega)


def occupancy(omega, temperature: float):
    """Thermal occupancy n(omega, T) = 1/(exp(omega/T) - 1); 0 at T = 0.

    Requires omega > 0 (the occupancy of a negative-frequency mode is not
    defined here; the thermal dressing handles negative frequencies).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise SpectrumDomainError("occupancy requires omega > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        return _as_float_or_array(omega, np.zeros_like(w))
    with np.errstate(over="ignore"):
        n = 1.0 / np.expm1(w / temperature)
    return _as_float_or_array(omega, n)


@dataclass(frozen=True)
class ThermalBath:
    """A coupling spectrum held at a fixed temperature (rad/s units).

    The dressed spectrum G_T obeys detailed balance,
    G_T(-omega) = exp(-omega/T) G_T(omega), and carries no negative-frequency
    weight at T = 0.
    """

    spectrum: BathSpectrum
    temperature: float

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    def thermal(self, omega):
        return thermal_spectrum(self, omega)


def thermal_spectrum(bath: ThermalBath, omega) -> float:
    """Temperature-dressed spectrum G_T(omega) of a thermal bath.

    omega > 0: (n(omega,T) + 1) G(omega)   (emission side)
    omega < 0: n(|omega|,T) G(|omega|)     (absorption side; 0 at T = 0)
    omega = 0: G(0) at T = 0.  At T > 0 the two-sided limit is
    T * dG/domega(0+), which exists only for spectra with G(0) = 0
    (Ohmic-like); kinds with G(0) > 0 raise, since (n+1)G diverges there.
    """
    w = float(omega)
    T = bath.temperature
    G = bath.spectrum
    if w > 0:
        g = G.evaluate(w)
        if T == 0:
            return g
        return (float(occupancy(w, T)) + 1.0) * g
    if w < 0:
        if T == 0:
            return 0.0
        return float(occupancy(-w, T)) * G.evaluate(-w)
    # omega == 0
    g0 = G.zero_limit()
    if T == 0:
        return g0
    if g0 != 0.0:
        raise SpectrumDomainError(
            f"G_T(0) diverges for kind '{G.kind}' at T > 0 (G(0+) = {g0:g} != 0)"
        )
    return T * G.zero_slope()
