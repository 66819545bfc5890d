import math
import warnings

import numpy as np
import pytest

from qmemory.codes import build_code
from qmemory.experiments.analytics import (DomainError, curie_weiss, ising_metropolis,
                                           peierls_bound)
from qmemory.experiments.barrier import StateSpaceTooLarge, energy_barrier
from qmemory.experiments.coherence import checkpoint_grid, coherence_time
from qmemory.experiments.core import NoEstimate, Outcome
from qmemory.experiments.cubic import CubicSuite, analyse, extract_constants, growing_sizes
from qmemory.experiments.fitting import FitError, fit
from qmemory.experiments.toric import (PointSummary, RegimeWarning, equilibrium_pairs,
                                       expected_pairs, point_seed, summarize)


# fitting

def test_linear_fit_exact():
    r = fit([0, 1, 2, 3], [1, 3, 5, 7], "linear")
    assert r["slope"] == pytest.approx(2) and r["intercept"] == pytest.approx(1)
    assert r.residual_norm < 1e-12


def test_arrhenius_recovers_exponent():
    b = np.linspace(1, 4, 7)
    r = fit(b, 0.3 * np.exp(1.7 * b), "arrhenius")
    assert r["exponent"] == pytest.approx(1.7)
    assert r["log_prefactor"] == pytest.approx(math.log(0.3))


def test_power_law_and_psc():
    L = np.array([8.0, 16, 32, 64])
    assert fit(L, 5 * L ** 1.3, "power-law-in-L")["exponent"] == pytest.approx(1.3)
    b = np.array([1.0, 2, 3, 4, 5])
    r = fit(b, np.exp(0.8 * b ** 2 - 0.1 * b + 2), "psc-quadratic")
    assert r["quadratic"] == pytest.approx(0.8)


def test_arrhenius_power_two_columns():
    x = np.array([[b, L] for b in (6.0, 7.0, 8.0) for L in (8.0, 16.0, 32.0)])
    y = np.exp(1.0 + 2.0 * x[:, 0]) * x[:, 1] ** -2.0
    r = fit(x, y, "arrhenius-power")
    assert r["beta_exponent"] == pytest.approx(2.0) and r["L_exponent"] == pytest.approx(-2.0)


def test_exp_poly_exact():
    b = np.arange(2.0, 5.01, 0.5)
    y = 0.56 * np.exp(1.01 * b) * (1 + 0.28 * b + 0.31 * b ** 2)
    r = fit(b, y, "exp-poly")
    assert r["exponent"] == pytest.approx(1.01, abs=1e-3)
    assert r["prefactor"] == pytest.approx(0.56, rel=1e-2)


def test_bootstrap_is_reproducible():
    rng = np.random.default_rng(0)
    x = np.linspace(0, 1, 12)
    y = 3 * x + rng.normal(0, 0.1, 12)
    a, b = fit(x, y, "linear"), fit(x, y, "linear")
    assert a.ci == b.ci
    lo, hi = a.ci["slope"]
    assert lo < a["slope"] < hi


def test_fit_errors():
    with pytest.raises(FitError):
        fit([1, 2], [1, 2], "linear")
    with pytest.raises(FitError):
        fit([1, 2, 3], [1, -2, 3], "arrhenius")
    with pytest.raises(FitError):
        fit([1, 2, 3], [1, 2, 3], "cubic-spline")


# barrier

@pytest.mark.parametrize("name,L,expect", [("four_qubit", None, 1.0), ("toric2d", 2, 2.0), ("toric2d", 3, 2.0)])
def test_energy_barrier(name, L, expect):
    assert energy_barrier(build_code(name, L)) == expect


def test_barrier_scales_with_delta_and_trivial_target():
    code = build_code("four_qubit")
    assert energy_barrier(code, delta=2.5) == 2.5
    assert energy_barrier(code, target=0) == 0.0
    assert energy_barrier(code, sector="Z") == 1.0


def test_barrier_refuses_large_codes():
    with pytest.raises(StateSpaceTooLarge):
        energy_barrier(build_code("toric2d", 4))


# analytics

@pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
def test_curie_weiss_transition(delta):
    bc = 1 / (2 * delta)
    assert not curie_weiss(50, delta, 0.9 * bc).double_well
    assert curie_weiss(50, delta, 1.1 * bc).double_well
    assert curie_weiss(50, delta, bc).curvature_half == 0.0


def test_curie_weiss_shape():
    c = curie_weiss(100, 1.0, 1.0)
    mid = len(c.x) // 2
    assert c.free_energy[mid] == pytest.approx(-100 * math.log(2))
    assert len(c.minima) == 2 and c.barrier > 0
    high_t = curie_weiss(100, 1.0, 0.2)
    assert list(high_t.minima) == [0.5]


def test_peierls_closed_form():
    b = peierls_bound(2.0)
    q = 9 * math.exp(-4.0)
    dens = 27 * math.exp(-8.0) * (2 - q) / (1 - q) ** 2
    assert b.minority_density == pytest.approx(dens, rel=1e-12)
    assert b.magnetization == pytest.approx(0.5 - 2 * dens, rel=1e-12)
    with pytest.raises(DomainError):
        peierls_bound(1.0)


def test_metropolis_low_and_high_temperature():
    rng = np.random.default_rng(1)
    assert ising_metropolis(16, 2.0, 2000, rng) > 0.95
    assert ising_metropolis(16, 0.2, 2000, rng, start="random") < 0.3


# toric helpers

def test_point_seed_is_order_free():
    assert point_seed(7, 16, 2.5) == point_seed(7, 16, 2.5)
    assert point_seed(7, 16, 2.5) != point_seed(7, 2.5, 16)
    assert point_seed(7, 16, 2.5) != point_seed(8, 16, 2.5)


def test_expected_pairs():
    assert expected_pairs(10, 0.0) == 50.0
    assert expected_pairs(10, 2.0, 0.5) == pytest.approx(50 * math.exp(-1.0))


def outcome(tau, censored=False):
    return Outcome(tau, censored, 0, 1, 0, 0.0, 0.0)


def test_summarize_handles_censoring():
    s = summarize(8, 1.0, [outcome(1.0), outcome(3.0)])
    assert s.tau == 2.0 and s.censored_fraction == 0.0
    with pytest.warns(RegimeWarning):
        summarize(8, 1.0, [outcome(1.0), outcome(9.0, True)])
    with pytest.raises(NoEstimate):
        summarize(8, 1.0, [outcome(9.0, True)])


@pytest.mark.parametrize("beta", [2.0, 3.0])
def test_equilibrium_pair_count(beta):
    got = equilibrium_pairs(32, beta, np.random.default_rng(4), 50.0, 500.0)
    assert got == pytest.approx(expected_pairs(32, beta), rel=0.25)


# coherence

def test_methods_order_and_determinism():
    m1 = coherence_time("toric2d", 8, 2.5, 200, 3, method=1)
    grid = checkpoint_grid(0.05, 1e4, 80)
    m2 = coherence_time("toric2d", 8, 2.5, 200, 3, method=2, grid=grid)
    again = coherence_time("toric2d", 8, 2.5, 200, 3, method=2, grid=grid, window=7)
    assert m2.tau == again.tau
    # the 99% success point sits in the early tail of the failure-time law
    assert m2.tau < m1.tau
    k = list(m2.checkpoints).index(m2.tau)
    assert np.all(m2.success[:k] >= 0.99) and m2.success[k] < 0.99


def test_zero_noise_control_has_no_estimate():
    with pytest.raises(NoEstimate) as e:
        coherence_time("four_qubit", None, 3.0, 20, 1, thermal=False, t_max=100.0)
    assert all(o.censored for o in e.value.outcomes)


def test_interval_cadence_matches_every_event_on_four_qubit():
    a = coherence_time("four_qubit", None, 2.0, 3000, 5)
    b = coherence_time("toric2d", 3, 2.0, 3, 5, cadence="interval", interval=0.5)
    assert a.tau > 0 and b.tau > 0


# cubic analysis

def test_extract_constants_inverts_scaling_laws():
    kappa, delta = 0.79, 2.0
    c = extract_constants(kappa * delta, kappa * delta ** 2 / 3)
    assert c["Delta"] == pytest.approx(delta) and c["kappa"] == pytest.approx(kappa)
    with pytest.raises(FitError):
        extract_constants(0.0, 1.0)


def test_growing_sizes():
    sizes, tau = growing_sizes([3, 5, 7, 9], np.array([1.0, 4.0, 2.0, 1.0]))
    assert list(sizes) == [3, 5] and list(tau) == [1.0, 4.0]


def test_analyse_synthetic_suite():
    sizes, betas = [3, 5, 7, 9, 11], [9.0, 9.5, 10.0, 10.5]
    tau = {}
    for b in betas:
        a = 1.2 * b - 9.0
        for L in sizes:
            tau[(L, b)] = PointSummary(L, b, 10, 10, float(L ** a * math.exp(b)), 0.0, 0.0)
    suite = analyse(CubicSuite(betas, sizes, tau))
    assert suite.exponent_line["slope"] == pytest.approx(1.2)
    assert all(suite.L_opt[b] == 11 for b in betas)
