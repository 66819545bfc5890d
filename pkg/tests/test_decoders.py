import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmemory.codes import build_code, class_bits, syndrome, violated
from qmemory.decoders import (ClusterDecoder, InvalidSyndrome, ToricFastDecoder, box_neutral,
                              cluster_decode)
from qmemory.decoders.threshold import (ThresholdPoint, WideIntervalWarning, estimate_crossing,
                                        majority_readout, threshold_scan)
from qmemory.pauli import PauliOperator

CODES = {("toric2d", 6): build_code("toric2d", 6), ("cubic", 3): build_code("cubic", 3),
         ("toric2d", 2): build_code("toric2d", 2)}


def random_error(code, p, rng):
    return PauliOperator.from_bits(rng.random(code.n) < p, rng.random(code.n) < p)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(CODES)), st.sampled_from([0.01, 0.05, 0.15]))
def test_correction_reproduces_syndrome(seed, key, p):
    code = CODES[key]
    s = violated(code, random_error(code, p, np.random.default_rng(seed)))
    res = cluster_decode(code, s)
    assert np.array_equal(violated(code, res.correction), s)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5, 8]))
def test_toric_fast_path_is_sound(seed, L):
    code = build_code("toric2d", L)
    dec = ToricFastDecoder(code)
    s = violated(code, random_error(code, 0.06, np.random.default_rng(seed)))
    res = dec.decode(s)
    assert np.array_equal(violated(code, res.correction), s)
    assert res.class_bits == class_bits(code, res.correction)


def test_eigenvalue_and_bit_inputs_agree():
    code = CODES[("toric2d", 6)]
    err = random_error(code, 0.05, np.random.default_rng(2))
    a = cluster_decode(code, syndrome(code, err)).correction
    b = cluster_decode(code, violated(code, err)).correction
    assert a == b


@pytest.mark.parametrize("name,L", [("toric2d", 5), ("cubic", 3)])
def test_single_errors_are_corrected(name, L):
    code = build_code(name, L)
    dec = ClusterDecoder(code)
    for q in range(0, code.n, 3):
        for kind in "XZY":
            err = PauliOperator.single(code.n, q, kind)
            assert not dec.decode(violated(code, err), err).failed


def test_odd_syndrome_is_rejected():
    code = CODES[("toric2d", 6)]
    bits = np.zeros(code.m, np.uint8)
    bits[1] = 1
    with pytest.raises(InvalidSyndrome):
        cluster_decode(code, bits)
    with pytest.raises(InvalidSyndrome):
        cluster_decode(code, np.zeros(code.m + 1, np.uint8))


def test_box_neutral_for_adjacent_pair():
    code = build_code("toric2d", 6)
    dec = ClusterDecoder(code)
    err = PauliOperator.single(code.n, 7, "X")
    members = np.flatnonzero(violated(code, err))
    box = dec.box_for(int(code.check_type[members[0]]), members)
    fix = box_neutral(code, box)
    assert fix is not None and np.array_equal(violated(code, fix), violated(code, err))


def test_rounds_double_radius():
    code = build_code("toric2d", 16)
    err = PauliOperator.from_support(code.n, x=[0, 40, 200, 333])
    res = cluster_decode(code, violated(code, err))
    assert res.final_radius in (1, 2, 4, 8, 16)
    assert res.rounds >= 1


def test_majority_readout():
    assert majority_readout(None, np.array([1, 1, -1])).bit == 1
    tie = majority_readout(None, np.array([1, -1]))
    assert tie.tie and tie.failed


def test_crossing_of_synthetic_curves():
    pts = []
    for L, k in ((8, 1.0), (16, 2.0)):
        for p in np.linspace(0.05, 0.15, 11):
            fails = int(round(1000 * (0.5 + k * (p - 0.1))))
            pts.append(ThresholdPoint("toric2d", L, float(p), 1000, fails))
    crossing, pairs = estimate_crossing(pts)
    assert crossing == pytest.approx(0.1, abs=1e-3)
    assert set(pairs) == {(8, 16)}


def test_small_scan_warns_and_is_deterministic():
    with pytest.warns(WideIntervalWarning):
        a = threshold_scan("toric2d", [0.05, 0.1], [4, 6], 40, seed=9)
    with pytest.warns(WideIntervalWarning):
        b = threshold_scan("toric2d", [0.05, 0.1], [4, 6], 40, seed=9)
    assert a.rows() == b.rows()
    assert a.points[0].p == 0.05
