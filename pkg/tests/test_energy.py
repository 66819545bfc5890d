import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lattice_gap_sum
from qmemory.codes import Z_TYPE, build_code, toric_qubit, violated
from qmemory.energy import (AnyonConfiguration, EnergyModel, UnknownModel, anyon_gap,
                            delta_energy, total_energy)
from qmemory.pauli import PauliOperator

L = 8
CODE = build_code("toric2d", L)
PLAQ = np.flatnonzero(CODE.check_type == Z_TYPE)


def plaquette(x, y):
    # plaquettes are the odd check of each site
    return 2 * (y * L + x) + 1


def config(checks):
    bits = np.zeros(CODE.m, np.uint8)
    bits[list(checks)] = 1
    return AnyonConfiguration.from_violated(CODE, bits)


def test_empty_configuration():
    for kind in ("stabilizer", "anyon-anyon"):
        assert total_energy(EnergyModel(kind, V=1.0), config([])) == 0.0


def test_constant_potential_three_anyons():
    m = EnergyModel("anyon-anyon", delta=1.0, V=1.0, alpha=0.0)
    assert total_energy(m, config([plaquette(0, 0), plaquette(3, 1), plaquette(5, 6)])) == pytest.approx(6.0)


def test_inverse_distance_pair():
    m = EnergyModel("anyon-anyon", delta=1.0, V=1.0, alpha=1.0)
    assert total_energy(m, config([plaquette(0, 0), plaquette(4, 0)])) == pytest.approx(2.25)


def test_pair_creation_costs_two():
    cfg = config([])
    assert delta_energy(EnergyModel(), cfg, [plaquette(0, 0), plaquette(1, 0)]) == 2.0
    assert delta_energy(EnergyModel(), cfg, []) == 0.0


def test_unknown_kind():
    with pytest.raises(UnknownModel):
        EnergyModel("bogus")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["anyon-anyon", "anyon-vacuum", "stabilizer"]),
       st.sampled_from([0.5, 1.0, 2.0]))
def test_delta_matches_recompute(seed, kind, alpha):
    rng = np.random.default_rng(seed)
    m = EnergyModel(kind, delta=1.0, V=0.3, alpha=alpha)
    cfg = config(rng.choice(PLAQ, rng.integers(0, 8), replace=False))
    flips = rng.choice(CODE.m, rng.integers(1, 4), replace=False)
    after = cfg.flipped(flips)
    assert delta_energy(m, cfg, flips) == pytest.approx(total_energy(m, after) - total_energy(m, cfg), abs=1e-9)


def test_energy_depends_only_on_syndrome():
    rng = np.random.default_rng(3)
    err = PauliOperator.from_bits(rng.random(CODE.n) < 0.1, rng.random(CODE.n) < 0.1)
    other = err * CODE.check_operator(5) * CODE.check_operator(8)
    m = EnergyModel("anyon-anyon", V=0.5)
    a = AnyonConfiguration.from_violated(CODE, violated(CODE, err))
    b = AnyonConfiguration.from_violated(CODE, violated(CODE, other))
    assert total_energy(m, a) == total_energy(m, b)


def test_anyon_gap_trivial_cases():
    assert anyon_gap(EnergyModel("anyon-vacuum", delta=1.3), CODE, 1) == 1.3
    m = EnergyModel("anyon-vacuum", delta=1.0, V=1.0, alpha=0.0)
    assert anyon_gap(m, CODE, 1) == pytest.approx(1 + 4 * (len(PLAQ) - 1))


def test_anyon_gap_lattice_sum():
    m = EnergyModel("anyon-vacuum", delta=1.0, V=1.0, alpha=1.0)
    assert anyon_gap(m, CODE, plaquette(2, 5)) == pytest.approx(lattice_gap_sum(L, 2, 1.0, 1.0, 1.0), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_anyon_gap_growth(alpha):
    m = EnergyModel("anyon-vacuum", delta=0.0, V=1.0, alpha=alpha)
    mu = {n: anyon_gap(m, build_code("toric2d", n), 1) for n in (32, 64)}
    assert mu[64] / mu[32] == pytest.approx(2 ** (2 - alpha), rel=0.1)


def test_log_potential_grows_with_separation():
    m = EnergyModel("anyon-anyon", V=1.0, potential="log")
    e = [total_energy(m, config([plaquette(0, 0), plaquette(d, 0)])) for d in range(1, 5)]
    assert all(b > a for a, b in zip(e, e[1:]))


def test_vacuum_minimum():
    m = EnergyModel("anyon-vacuum", delta=1.0, V=0.2, alpha=1.0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        cfg = config(rng.choice(PLAQ, 2 * rng.integers(1, 4), replace=False))
        assert total_energy(m, cfg) > 0.0
