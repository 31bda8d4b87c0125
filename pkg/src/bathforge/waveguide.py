"""Band-edge dipole-dipole interactions and waveguide vacuum forces.

Near a photonic band edge the guided-mode density diverges as
1/sqrt(1 - omega_a/omega_co), so two atoms tuned just inside the gap
exchange virtual photons with a resonant dipole-dipole strength and range

    delta = gamma_fs / sqrt(1 - omega_a/omega_co),
    xi    = lambda_a / sqrt(1 - omega_a/omega_co),

(unit proportionality constants by convention) while real emission into
the guide is suppressed.  The same mode confinement boosts ground-state
(Casimir / van der Waals) forces mediated by the TEM modes of a
transmission line, whose far-zone pair energy falls only as 1/z^3.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

__all__ = [
    "BandEdgeConfig",
    "TEMLineConfig",
    "ZoneError",
    "rddi_strength_range",
    "two_atom_dynamics",
    "wootters_concurrence",
    "casimir_shape",
    "tem_pair_energy",
    "nonadditivity_ratio",
]


class ZoneError(ValueError):
    """Query outside a closed form's validity window."""


@dataclass(frozen=True)
class BandEdgeConfig:
    """Atom near a photonic band edge (c = 1 units, lambda_a = 2 pi/omega_a)."""

    omega_a: float
    omega_co: float
    gamma_fs: float
    lambda_a: float | None = None

    def __post_init__(self):
        if not 0 < self.omega_a < self.omega_co:
            raise ValueError("need 0 < omega_a < omega_co (atom below the band edge)")
        if self.gamma_fs < 0:
            raise ValueError("gamma_fs must be >= 0")
        if self.lambda_a is None:
            object.__setattr__(self, "lambda_a", 2 * np.pi / self.omega_a)


def rddi_strength_range(config: BandEdgeConfig) -> tuple[float, float]:
    """Exchange strength delta (rad/s) and range xi (length)."""
    root = np.sqrt(1.0 - config.omega_a / config.omega_co)
    return config.gamma_fs / root, config.lambda_a / root


def wootters_concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    r = rho @ yy @ rho.conj() @ yy
    ev = np.linalg.eigvals(r)
    lam = np.sqrt(np.clip(ev.real, 0.0, None))
    lam.sort()
    return float(max(0.0, lam[-1] - lam[-2] - lam[-3] - lam[-4]))


def two_atom_dynamics(delta: float, gamma_fs: float, times):
    """Excitation exchange of two atoms coupled by delta, each decaying at
    gamma_fs, starting from one excitation on atom 1.

    The single-excitation amplitudes obey
    c1 = exp(-gamma t/2) cos(delta t), c2 = -i exp(-gamma t/2) sin(delta t);
    every decay jump ends in the joint ground state, so the full density
    matrix is the no-jump projector plus the accumulated ground population.
    Returns (times, p1, p2, concurrence).
    """
    if delta < 0 or gamma_fs < 0:
        raise ValueError("delta and gamma_fs must be >= 0")
    times = np.asarray(times, dtype=float)
    env = np.exp(-gamma_fs * times)
    p1 = env * np.cos(delta * times) ** 2
    p2 = env * np.sin(delta * times) ** 2
    conc = np.empty_like(times)
    for i, t in enumerate(times):
        c1 = np.exp(-0.5 * gamma_fs * t) * np.cos(delta * t)
        c2 = -1j * np.exp(-0.5 * gamma_fs * t) * np.sin(delta * t)
        # basis |gg>, |ge>, |eg>, |ee>; excitation on atom 1 is |eg>
        psi = np.array([0.0, c2, c1, 0.0])
        rho = np.outer(psi, psi.conj())
        rho[0, 0] += 1.0 - np.exp(-gamma_fs * t)
        conc[i] = wootters_concurrence(rho)
    return times, p1, p2, conc


def casimir_shape(z_over_lambda: float, zone: str) -> float:
    """Dimensionless TEM pair-energy shape F(z) in its asymptotic zones.

    near (z/lambda_e < 0.1):  F = pi + 16 pi (z/le) ln(z/le)
    far  (z/lambda_e > 10):   F = (1/(2 pi)^3) (le/z)^3
    """
    x = float(z_over_lambda)
    if zone == "near":
        if not 0 <= x < 0.1:
            raise ZoneError(f"near zone requires z/lambda_e < 0.1, got {x:g}")
        if x == 0.0:
            return float(np.pi)
        return float(np.pi + 16.0 * np.pi * x * np.log(x))
    if zone == "far":
        if not x >= 10.0:
            raise ZoneError(f"far zone requires z/lambda_e >= 10, got {x:g}")
        return float((2.0 * np.pi) ** -3 / x**3)
    raise ZoneError("zone must be 'near' or 'far'")


@dataclass(frozen=True)
class TEMLineConfig:
    """Two atoms on a transmission line supporting 1d TEM modes.

    ``lambda_e`` is the dominant dipole-transition wavelength, ``a`` the
    transverse dimension (TEM modes dominate for z >> a), ``alpha0`` the
    static polarizability of the single-resonance response
    alpha(omega) = alpha0 / (1 - omega^2/omega_e^2).
    """

    lambda_e: float
    a: float
    alpha0: float = 1.0
    polarizability: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.lambda_e <= 0 or self.a <= 0:
            raise ValueError("lambda_e and a must be > 0")

    @property
    def omega_e(self) -> float:
        return 2 * np.pi / self.lambda_e   # c = 1

    def alpha_imag_axis(self, kappa):
        """alpha(i kappa c): the single-resonance form is smooth and positive
        on the imaginary frequency axis."""
        if self.polarizability is not None:
            return self.polarizability(kappa)
        ke = 2 * np.pi / self.lambda_e
        return self.alpha0 / (1.0 + (np.asarray(kappa) / ke) ** 2)


def _tem_integral(config: TEMLineConfig, z: float, k_max: float) -> float:
    """integral_0^inf dk k^2 alpha(ik)^2 exp(-2 k z) exp(-k/k_max).

    This is the resonance-pole-free rotation of the mode sum
    -int dk alpha(omega_k)^2 cos(2 k z) w(k): on the real axis the
    undamped polarizability has a double pole at k = 2 pi/lambda_e, and
    the retarded prescription routes the contour to the imaginary axis,
    where the integrand decays and the regulator bias is linear in 1/k_max.
    """
    ke = 2 * np.pi / config.lambda_e
    rate = 2.0 * z + 1.0 / k_max

    def fun(k):
        return k**2 * config.alpha_imag_axis(k) ** 2 * np.exp(-k * rate)

    upper = 80.0 / rate
    pts = sorted({min(ke, upper * 0.999), min(10 * ke, upper * 0.9999)})
    val, _ = quad(fun, 0.0, upper, points=pts, limit=400, epsabs=1e-300, epsrel=1e-11)
    return val


def tem_pair_energy(config: TEMLineConfig, z: float, k_max: float | None = None) -> float:
    """TEM-mediated vacuum interaction energy between ground-state atoms.

    Negative (attractive) for all separations; far-zone magnitude falls as
    1/z^3.  The high-frequency regulator exp(-k/k_max) with
    k_max = 1000/lambda_e is extrapolated away by Richardson in 1/k_max
    (two k_max values).  Only sign, exponents and ratios are
    regulator-independent; the overall prefactor carries the 1/a^4 mode
    normalization and is otherwise conventional.
    """
    if z <= 0:
        raise ValueError("separation z must be > 0")
    if k_max is None:
        k_max = 1e3 / config.lambda_e
    i1 = _tem_integral(config, z, k_max)
    i2 = _tem_integral(config, z, 2.0 * k_max)
    extrapolated = 2.0 * i2 - i1   # bias linear in 1/k_max
    if not np.isfinite(extrapolated) or abs(extrapolated - i2) > 0.05 * abs(extrapolated):
        raise RuntimeError(
            f"regulator extrapolation not converged (k_max = {k_max:g}): "
            f"{i1:g} -> {i2:g} -> {extrapolated:g}"
        )
    return -extrapolated / config.a**4


def nonadditivity_ratio(alpha0: float, z: float, geometry: str, a: float | None = None) -> float:
    """Three-body to pairwise interaction ratio (unit prefactors).

    free space (3d): alpha/z^3 -- nonadditivity needs densities ~ 1/alpha;
    TEM line (1d):   alpha/(a^2 z) -- important already at low densities
    when z >> a.
    """
    if alpha0 <= 0 or z <= 0:
        raise ValueError("alpha0 and z must be > 0")
    if geometry == "free3d":
        return alpha0 / z**3
    if geometry == "tem1d":
        if a is None or a <= 0:
            raise ValueError("tem1d geometry needs a transverse dimension a > 0")
        return alpha0 / (a**2 * z)
    raise ValueError("geometry must be 'free3d' or 'tem1d'")
