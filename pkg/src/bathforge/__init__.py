"""bathforge: thermal baths as a resource, numerically.

Controlled open-system dynamics built on the filter-spectrum overlap
R(t) = integral F_t(omega) G(omega) domega: decoherence control and bath
spectroscopy, Fisher-information bath estimation, modulated state
transfer, bath-induced collective entanglement, band-edge dipole-dipole
and waveguide Casimir scaling, and the minimal two-bath heat machine.

Units: hbar = k_B = 1; frequencies, rates and temperatures in rad/s.
"""
from .spectra import (BathSpectrum, Lorentzian, Ohmic, Blackbody, BandGap1D,
                      Tabulated, ThermalBath, SpectrumDomainError,
                      evaluate, occupancy, thermal_spectrum)
from .filters import (ControlProtocol, Free, CPMG, ContinuousDrive, SinP,
                      FilterFunction, build_filter, evaluate_filter,
                      tail_exponent, export_samples)
from .overlap import (QubitProbeState, DecoherenceRecord, decoherence_rate,
                      coherence_decay, infer_spectrum, measurement_thermodynamics)
from .estimate import (EstimationProblem, EstimationReport, qfi, optimize_time,
                       simulate_estimation)
from .transfer import TransferChannel, TransferResult, transfer_fidelity, tradeoff_curve
from .collective import (DickeState, DephasingKernel, dephasing_kernel, evolve,
                         ghz_fidelity, lamb_shift_rate, dominance_ratio,
                         cat_formation_scan)
from .waveguide import (BandEdgeConfig, TEMLineConfig, rddi_strength_range,
                        two_atom_dynamics, wootters_concurrence, casimir_shape,
                        tem_pair_energy, nonadditivity_ratio)
from .engine import (PiFlip, Sinusoidal, CustomWeights, MachineConfig,
                     MachineOperatingPoint, harmonic_weights, steady_state,
                     efficiency_curve, critical_modulation_rate,
                     spectral_separation_report)

__version__ = "0.1.0"
