from itertools import combinations

import numpy as np
import pytest

from cosetgeo.mic import (
    DEFAULT_TOL,
    Fiducial,
    born_probabilities,
    displacement_operators,
    fiducial_report,
    find_fiducials,
    gram_matrix,
    gram_rank,
    is_mic,
    is_sic,
    pairwise_products,
    pauli_orbit,
    permutation_matrix,
    reconstruct_state,
    _displacement_equivalent,
)
from cosetgeo.permgrp import PermutationGroup, parse_cycles


def qubit_sic_fiducial():
    ct = np.sqrt((1 + 1 / np.sqrt(3)) / 2)
    st = np.sqrt((1 - 1 / np.sqrt(3)) / 2)
    return Fiducial.from_vector([ct, st * np.exp(1j * np.pi / 4)])


def pentagram_group():
    pairs = list(combinations(range(5), 2))
    index = {p: i for i, p in enumerate(pairs)}
    gens = []
    for text in ("(1,2,3,4,5)", "(3,4,5)"):
        g = parse_cycles(text, degree=5)
        gens.append(tuple(index[tuple(sorted((g[a], g[b])))] for a, b in pairs))
    return PermutationGroup(gens, 10)


def test_displacements_d2():
    ops = displacement_operators(2)
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    assert np.allclose(ops[0], np.eye(2))
    assert np.allclose(ops[1], z)
    assert np.allclose(ops[2], x)
    assert np.allclose(ops[3], x @ z)


@pytest.mark.parametrize("d", [2, 3, 5, 6, 7])
def test_displacement_trace_orthogonality(d):
    ops = displacement_operators(d)
    overlaps = np.einsum("aij,bij->ab", ops.conj(), ops)
    assert np.allclose(overlaps, d * np.eye(d * d), atol=1e-9)
    for k in range(1, d * d):
        assert abs(np.trace(ops[k])) < 1e-9


def test_tensor_realization():
    ops = displacement_operators(4, kind="tensor")
    overlaps = np.einsum("aij,bij->ab", ops.conj(), ops)
    assert np.allclose(overlaps, 4 * np.eye(16), atol=1e-9)
    with pytest.raises(ValueError):
        displacement_operators(6, kind="tensor")


def test_pauli_orbit_projectors():
    f = Fiducial.from_vector([0, 1, -1, -1, 1])
    projectors = pauli_orbit(f)
    psi = f.vector()
    assert np.allclose(projectors[0], np.outer(psi, psi.conj()))
    for p in projectors[:5]:
        assert np.allclose(p @ p, p, atol=1e-12)
        assert np.isclose(np.trace(p).real, 1.0)


def test_basis_state_orbit_collapses():
    e0 = Fiducial.from_vector([1, 0])
    projectors = pauli_orbit(e0)
    distinct = []
    for p in projectors:
        if not any(np.allclose(p, q, atol=1e-12) for q in distinct):
            distinct.append(p)
    assert len(distinct) == 2
    assert gram_rank(e0) < 4
    assert not is_mic(e0)
    assert not is_sic(e0)


def test_gram_matrix_shape_and_range():
    f = Fiducial.from_vector([1, 1, 0, -1, 0, -1, 0])
    g = gram_matrix(f)
    assert g.shape == (49, 49)
    assert np.allclose(g, g.T, atol=1e-12)
    assert np.allclose(np.diag(g), 1.0)
    assert g.min() >= -1e-12 and g.max() <= 1 + 1e-12
    # row sums equal the dimension
    assert np.allclose(g.sum(axis=1), 7.0, atol=1e-9)


def test_gram_ranks_of_known_fiducials():
    assert gram_rank(Fiducial.from_vector([0, 1, -1, -1, 1])) == 25
    w6 = np.exp(2j * np.pi / 6)
    assert gram_rank(Fiducial.from_vector([1, w6 - 1, 0, 0, -w6, 0])) == 36
    assert gram_rank(Fiducial.from_vector([1, 1, 0, -1, 0, -1, 0])) == 49


def test_pairwise_products_distinct_counts():
    w6 = np.exp(2j * np.pi / 6)
    pp6, values6 = pairwise_products(Fiducial.from_vector([1, w6 - 1, 0, 0, -w6, 0]))
    assert pp6 == 2
    pp5, values5 = pairwise_products(Fiducial.from_vector([0, 1, -1, -1, 1]))
    assert pp5 == len(values5)
    # computed overlap set for the five-dimensional vector: three values,
    # one of them forced analytically to 1/16 by <v|Zv> = -1/4
    assert pp5 == 3
    assert any(abs(v - 1 / 16) < 1e-9 for v in values5)


def test_qubit_sic():
    f = qubit_sic_fiducial()
    assert is_sic(f)
    assert is_mic(f)
    assert gram_rank(f) == 4
    pp, values = pairwise_products(f)
    assert pp == 1
    assert abs(values[0] - 1 / 3) < 1e-9


def test_sic_implies_mic_and_equiangular():
    f = qubit_sic_fiducial()
    report = fiducial_report(f)
    assert report.is_sic and report.is_mic
    assert report.pp == 1
    assert abs(report.angle_set[0] - 1 / np.sqrt(3)) < 1e-9


def test_invariance_under_phase_and_displacement():
    f = Fiducial.from_vector([0, 1, -1, -1, 1])
    base = (gram_rank(f), pairwise_products(f)[0])
    ops = displacement_operators(5)
    rng = np.random.default_rng(3)
    for k in (1, 7, 18):
        phase = np.exp(2j * np.pi * rng.random())
        moved = Fiducial.from_vector(phase * (ops[k] @ f.vector()))
        assert (gram_rank(moved), pairwise_products(moved)[0]) == base


def test_reconstruction_uniform_gives_maximally_mixed():
    f = qubit_sic_fiducial()
    rho = reconstruct_state([0.25] * 4, f)
    assert np.allclose(rho, np.eye(2) / 2, atol=1e-12)


@pytest.mark.parametrize("seed", [0, 1])
def test_reconstruction_round_trip_d2(seed):
    f = qubit_sic_fiducial()
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    p = born_probabilities(rho, f)
    assert np.max(np.abs(reconstruct_state(p, f) - rho)) <= 1e-8


def test_reconstruction_pure_state_d2():
    f = qubit_sic_fiducial()
    psi = np.array([1, 1j]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    p = born_probabilities(rho, f)
    assert np.max(np.abs(reconstruct_state(p, f) - rho)) <= 1e-8


def test_reconstruction_rejects_non_sic():
    f = Fiducial.from_vector([1, 0])
    with pytest.raises(ValueError):
        reconstruct_state([0.25] * 4, f)


def test_permutation_matrix_action():
    g = parse_cycles("(1,2,3)", degree=3)
    m = permutation_matrix(g)
    e0 = np.array([1, 0, 0])
    assert np.allclose(m @ e0, [0, 1, 0])


def test_find_fiducials_trivial_cases():
    trivial = PermutationGroup([], 1)
    assert find_fiducials(trivial) == []
    c9 = PermutationGroup.from_cycles(["(1,2,3,4,5,6,7,8,9)"])
    with pytest.raises(ValueError):
        find_fiducials(c9, order_cap=5)


def test_find_fiducials_a5_degree_5():
    a5 = PermutationGroup.from_cycles(["(1,2,3,4,5)", "(3,4,5)"])
    reports = find_fiducials(a5)
    assert reports, "expected candidates from the degree-5 action"
    mics = [r for r in reports if r.is_mic]
    assert mics
    target = Fiducial.from_vector([0, 1, -1, -1, 1]).vector()
    ops = displacement_operators(5)
    assert any(
        _displacement_equivalent(target, r.fiducial.vector(), ops) for r in mics
    )
    # output is sorted: MICs first, then by ascending distinct-value count
    assert [r.is_mic for r in reports] == sorted(
        (r.is_mic for r in reports), reverse=True
    )


def test_find_fiducials_pentagram_group_finds_none():
    reports = find_fiducials(pentagram_group())
    assert not any(r.is_mic for r in reports)


def test_find_fiducials_deterministic():
    a5 = PermutationGroup.from_cycles(["(1,2,3,4,5)", "(3,4,5)"])
    first = [r.to_json() for r in find_fiducials(a5)]
    second = [r.to_json() for r in find_fiducials(a5)]
    assert first == second


def test_fiducial_json_round_trip():
    f = Fiducial.from_vector([0, 1, -1, -1, 1])
    back = Fiducial.from_json(f.to_json())
    assert np.allclose(back.vector(), f.vector())
