import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import FourQubitChain, pair_survival_l4, rate
from sampling import gibbs_pvalue, grid_counts, syndrome_path, time_weighted
from qmemory.codes import build_code
from qmemory.energy import EnergyModel
from qmemory.experiments.coherence import coherence_time
from qmemory.experiments.toric import pair_survival
from qmemory.kmc.engine import EventTable, SyndromeState, TableDecoder, run
from qmemory.kmc.interacting import InteractingState
from qmemory.kmc.rates import InvalidParameter, gamma, gamma_scalar
from qmemory.pauli import PauliOperator


@pytest.mark.parametrize("beta", [0.1, 1.0, 5.0, 20.0])
def test_rate_matches_closed_form(beta):
    for w in (-3.0, -0.5, 0.5, 2.0):
        assert gamma(w, beta) == pytest.approx(rate(w, beta), rel=1e-12)
        assert gamma_scalar(w, beta) == pytest.approx(rate(w, beta), rel=1e-12)


def test_rate_is_smooth_through_zero():
    beta = 2.0
    ws = np.array([-2e-7, -1e-7, 0.0, 1e-7, 2e-7])
    g = gamma(ws, beta)
    assert np.all(np.diff(g) > 0)
    assert g[2] == pytest.approx(1 / beta, rel=1e-12)


def test_rate_underflow_is_finite():
    assert 0.0 <= gamma(-50.0, 40.0) < 1e-300
    assert math.isfinite(gamma(50.0, 40.0))


def test_bad_beta():
    with pytest.raises(InvalidParameter):
        gamma(1.0, 0.0)
    with pytest.raises(InvalidParameter):
        SyndromeState(build_code("four_qubit"), -1.0)


def test_event_table_degrees():
    code = build_code("toric2d", 4)
    tb = EventTable(code)
    assert tb.n_events == 3 * code.n
    # X and Z flip two checks, Y flips four
    kinds = tb.ev_kind
    assert set(tb.ev_deg[kinds == 1]) == {2} and set(tb.ev_deg[kinds == 3]) == {4}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["toric2d", "cubic", "four_qubit"]),
       st.sampled_from(["XYZ", "XZ", "X"]))
def test_caches_stay_consistent(seed, name, event_set):
    L = {"toric2d": 5, "cubic": 3, "four_qubit": None}[name]
    code = build_code(name, L)
    s = SyndromeState(code, 0.7, event_set=event_set)
    rng = np.random.default_rng(seed)
    for _ in range(5):
        s.advance(rng, max_events=int(rng.integers(1, 200)))
        s.check_consistency()


def test_initial_error_state():
    code = build_code("toric2d", 6)
    err = PauliOperator.from_bits(np.eye(1, code.n, 3, dtype=np.uint8)[0], np.zeros(code.n, np.uint8))
    s = SyndromeState(code, 1.0, error=err)
    assert s.n_violated == 2
    s.check_consistency()


def test_same_seed_same_trajectory():
    code = build_code("toric2d", 6)
    digests = []
    for _ in range(2):
        s = SyndromeState(code, 1.5)
        traj = run(s, np.random.default_rng(42), max_events=500, record_capacity=500)
        digests.append(traj.digest())
    assert digests[0] == digests[1]
    assert len(traj.times) == 500 and np.all(np.diff(traj.times) > 0)


def test_forbid_creation_from_vacuum_has_no_events():
    s = SyndromeState(build_code("toric2d", 4), 1.0, forbid_creation=True)
    assert s.total_rate == 0.0


def test_interval_checkpoints_fall_on_grid():
    code = build_code("toric2d", 8)
    s = SyndromeState(code, 0.8)
    rng = np.random.default_rng(1)
    seen = 0
    while seen < 5:
        reason = s.advance(rng, max_events=10**6, interval=0.25)
        if reason == "checkpoint":
            seen += 1
            k = s.t / 0.25
            assert k == pytest.approx(round(k), abs=1e-9)


def test_gibbs_occupancy_short_run():
    beta = 2.0
    chain = FourQubitChain(beta)
    times, s = syndrome_path(beta, 200_000, seed=7)
    assert time_weighted(times, s) == pytest.approx(chain.gibbs_syndrome(), abs=0.01)
    assert gibbs_pvalue(grid_counts(times, s, 5 / chain.gap()), chain.gibbs_syndrome()) > 1e-4


def test_oracle_chain_is_gibbs():
    chain = FourQubitChain(1.3)
    pi = chain.stationary().reshape(4, 4).sum(axis=0)
    assert pi == pytest.approx(chain.gibbs_syndrome(), rel=1e-10)


@pytest.mark.parametrize("beta", [2.0, 3.0])
def test_four_qubit_lifetime_matches_first_passage(beta):
    dec = TableDecoder(build_code("four_qubit"))
    exact = FourQubitChain(beta).mean_failure_time([int(c) & 3 for c in dec.table])
    est = coherence_time("four_qubit", None, beta, 8000, seed=11)
    assert est.tau == pytest.approx(exact, rel=0.05)


@pytest.mark.parametrize("beta", [1.0, 4.0])
def test_pair_survival_small_torus(beta):
    exact = pair_survival_l4(beta)
    r = pair_survival(4, beta, 5000, seed=5)
    assert abs(r.pi - exact) < 4 * r.stderr


def test_interacting_state_reduces_to_stabilizer():
    code = build_code("toric2d", 4)
    m = EnergyModel("anyon-anyon", V=0.0)
    a = InteractingState(code, 1.1, EnergyModel("anyon-anyon", V=0.3))
    rng = np.random.default_rng(0)
    a.advance(rng, max_events=300)
    a.check_consistency()
    b = InteractingState(code, 1.1, m)
    assert np.allclose(b.event_omegas(), SyndromeState(code, 1.1).event_omegas())
