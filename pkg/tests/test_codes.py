import numpy as np
import pytest

from qmemory.codes import (ContractViolation, InvalidSize, build_code, build_ising_2d,
                           checks_commute, class_bits, classify_residual, code_distance_bruteforce,
                           cubic_allowed, encoded_qubits, logical_algebra_ok, toric_qubit,
                           translation_covariant, violated)
from qmemory.pauli import PauliOperator


def invariants(code, rng):
    return (checks_commute(code) and logical_algebra_ok(code)
            and all(translation_covariant(code, rng, a) for a in range(code.geometry.dim)))


@pytest.mark.parametrize("L", range(2, 17))
def test_toric_invariants(L):
    code = build_code("toric2d", L)
    assert code.n == 2 * L * L and code.m == 2 * L * L
    assert encoded_qubits(code) == 2
    assert invariants(code, np.random.default_rng(L))


@pytest.mark.parametrize("L", [3, 5, 11])
def test_cubic_invariants(L):
    code = build_code("cubic", L)
    assert code.n == 2 * L ** 3
    assert encoded_qubits(code) == 2
    assert invariants(code, np.random.default_rng(L))
    weights = np.diff(code.check_ptr)
    assert (weights == 8).all()


def test_toric_4d_invariants():
    code = build_code("toric4d", 2)
    assert checks_commute(code) and logical_algebra_ok(code)
    assert translation_covariant(code, np.random.default_rng(0))


@pytest.mark.parametrize("name,L,d", [("four_qubit", None, 2), ("toric2d", 2, 2), ("toric2d", 3, 3)])
def test_small_distances(name, L, d):
    assert code_distance_bruteforce(build_code(name, L)) == d


def test_four_qubit_layout():
    code = build_code("four_qubit")
    assert code.n == 4 and code.m == 2 and code.k == 2
    assert code.exposed_mask == 0b11
    x_bar = PauliOperator.from_string("XXII")
    assert not violated(code, x_bar).any()
    # X0X1 anticommutes with the exposed Z-bar only
    assert class_bits(code, x_bar) & code.exposed_mask == 0b10


@pytest.mark.parametrize("L", [1, 4, 15, 63, 201])
def test_cubic_rejects_disallowed_sizes(L):
    assert not cubic_allowed(L)
    with pytest.raises(InvalidSize):
        build_code("cubic", L)


def test_toric_rejects_tiny():
    with pytest.raises(InvalidSize):
        build_code("toric2d", 1)


def test_single_edge_flips_two_plaquettes():
    L = 5
    code = build_code("toric2d", L)
    err = PauliOperator.single(code.n, toric_qubit(L, 2, 2, 1), "X")
    v = violated(code, err)
    assert v.sum() == 2
    assert (code.check_type[np.flatnonzero(v)] == code.check_type[np.flatnonzero(v)][0]).all()


def test_residual_classification():
    L = 4
    code = build_code("toric2d", L)
    assert classify_residual(code, PauliOperator.identity(code.n)).kind == "trivial"
    assert classify_residual(code, code.check_operator(0)).kind == "stabilizer"
    # a vertical-edge row, deformed by a star, is still a logical
    loop = PauliOperator.from_support(code.n, x=[toric_qubit(L, x, 1, 1) for x in range(L)])
    assert classify_residual(code, loop * code.check_operator(0)).is_logical
    with pytest.raises(ContractViolation):
        classify_residual(code, PauliOperator.single(code.n, 0, "X"))


def test_serialisation_roundtrip():
    code = build_code("toric2d", 3)
    again = type(code).from_dict(code.to_dict())
    assert np.array_equal(again.check_qubits, code.check_qubits)
    assert again.exposed_mask == code.exposed_mask


def test_ising_model():
    m = build_ising_2d(4)
    assert m.V == 16 and len(m.edges) == 32
    assert m.energy(np.ones(16)) == -16.0
