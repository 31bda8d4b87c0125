import numpy as np
import pytest

from bathforge.estimate import (EstimationError, EstimationProblem, qfi,
                                optimize_time, simulate_estimation)
from bathforge.filters import Free
from bathforge.overlap import QubitProbeState
from bathforge.spectra import Lorentzian


def lorentzian_problem(g=3.0, tau_c=1.0, theta=np.pi / 4, n_meas=10_000):
    return EstimationProblem(
        bath_family=lambda x: Lorentzian(g=g, tau_c=x),
        x_value=tau_c,
        protocol_family=lambda t: Free(t),
        probe=QubitProbeState(theta),
        n_measurements=n_meas,
    )


def test_qfi_vanishes_at_poles():
    assert qfi(lorentzian_problem(theta=0.0), 1.0) == 0.0
    assert qfi(lorentzian_problem(theta=np.pi / 2), 1.0) == 0.0


def test_qfi_vanishes_for_insensitive_parameter():
    # the bath family ignores x: the exponent derivative is zero
    problem = EstimationProblem(
        bath_family=lambda x: Lorentzian(g=2.0, tau_c=1.0),
        x_value=1.0, protocol_family=lambda t: Free(t),
        probe=QubitProbeState(np.pi / 4), n_measurements=100,
    )
    assert qfi(problem, 1.0) == pytest.approx(0.0, abs=1e-18)


def test_exponent_derivative_matches_higher_order_stencil():
    problem = lorentzian_problem()
    t = 0.7
    x = problem.x_value
    h = 1e-3
    # five-point (4th-order) stencil oracle
    chis = [problem.exponent(x * (1 + k * h), t) for k in (-2, -1, 1, 2)]
    stencil = (chis[0] - 8 * chis[1] + 8 * chis[2] - chis[3]) / (12 * x * h)
    from bathforge.estimate import _exponent_derivative
    assert _exponent_derivative(problem, t) == pytest.approx(stencil, rel=1e-6)


def test_optimum_matches_dense_grid_scan():
    problem = lorentzian_problem(g=5.0)
    rep = optimize_time(problem, (0.05, 3.0))
    # two-stage grid-scan oracle, final resolution ~1e-5 in t
    grid = np.linspace(0.05, 3.0, 400)
    vals = [qfi(problem, t) for t in grid]
    i = int(np.argmax(vals))
    fine = np.linspace(grid[max(i - 2, 0)], grid[min(i + 2, len(grid) - 1)], 1500)
    fvals = [qfi(problem, t) for t in fine]
    t_grid = fine[int(np.argmax(fvals))]
    f_grid = max(fvals)
    assert rep.t_opt == pytest.approx(t_grid, rel=1e-3)
    assert rep.qfi_at_opt == pytest.approx(f_grid, rel=1e-3)
    assert rep.qfi_at_opt >= f_grid * (1 - 1e-9)
    assert not rep.boundary_warning


def test_bound_scales_inverse_sqrt_measurements():
    rep1 = optimize_time(lorentzian_problem(n_meas=1000), (0.05, 3.0))
    rep4 = optimize_time(lorentzian_problem(n_meas=4000), (0.05, 3.0))
    assert rep4.relative_error_bound == pytest.approx(rep1.relative_error_bound / 2, rel=1e-6)
    reps = [optimize_time(lorentzian_problem(n_meas=n), (0.05, 3.0)).relative_error_bound
            for n in (100, 1000, 10_000)]
    assert reps[0] > reps[1] > reps[2]


def test_boundary_warning_flag():
    rep = optimize_time(lorentzian_problem(g=5.0), (2.5, 3.0))
    assert rep.boundary_warning


def test_classical_fisher_equals_qfi_at_balanced_probe():
    # the +/- outcome statistics saturate the quantum bound at theta = pi/4
    problem = lorentzian_problem(g=2.0)
    t = 0.9
    x = problem.x_value
    h = 1e-5

    def p_plus(xv):
        return 0.5 * (1.0 + np.exp(-problem.exponent(xv, t)))

    p = p_plus(x)
    dp = (p_plus(x * (1 + h)) - p_plus(x * (1 - h))) / (2 * x * h)
    cfi = dp**2 / (p * (1 - p))
    assert qfi(problem, t) == pytest.approx(cfi, rel=1e-4)


def test_simulation_is_deterministic():
    problem = lorentzian_problem(n_meas=400)
    a = simulate_estimation(problem, 0.5, seed=7, n_repetitions=20)
    b = simulate_estimation(problem, 0.5, seed=7, n_repetitions=20)
    assert a == b
    c = simulate_estimation(problem, 0.5, seed=8, n_repetitions=20)
    assert a != c


def test_fully_dephased_probe_is_ill_posed():
    # enormous exponent everywhere on the bracket: p_+ = 1/2 exactly
    problem = lorentzian_problem(g=300.0, n_meas=400)
    with pytest.raises(EstimationError):
        simulate_estimation(problem, 50.0, seed=1, n_repetitions=10)


def test_cramer_rao_consistency():
    problem = lorentzian_problem(g=3.0, n_meas=10_000)
    rep = optimize_time(problem, (0.05, 3.0))
    emp = simulate_estimation(problem, rep.t_opt, seed=11)
    # the bound is never beaten beyond statistical slack
    assert emp >= rep.relative_error_bound * 0.8
    assert emp <= rep.relative_error_bound * 1.25
