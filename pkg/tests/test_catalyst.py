from functools import reduce
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embezzle.catalyst import (
    DenseCapError,
    NonCommutingError,
    ProvenanceError,
    WordMixture,
    apply_protocol,
    build_catalyst,
    catalyst_difference,
    catalyst_trace_distance,
    compositions,
    copy_rotation,
    from_runs,
    per_party_cyclic_shift,
    shift_catalyst,
    simultaneous_spectra,
    to_runs,
    typeclass_trace_norm,
)
from embezzle.linalg import trace_norm
from embezzle.states import (
    DensityMatrix,
    Partition,
    Permutation,
    permute_registers,
    sample_random_state,
    tensor,
)


def kron_all(mats):
    return reduce(np.kron, mats)


def dense_gamma(rho, sigma, n, first=1):
    """Direct sum of weighted Kronecker products."""
    r, s = rho.entries, sigma.entries
    return sum(kron_all([r] * k + [s] * (n - k)) for k in range(first, first + n - 1)) / (n - 1)


def random_diag(d, rng, zeros=0):
    p = rng.random(d)
    p[:zeros] = 0.0
    rng.shuffle(p)
    return DensityMatrix.from_diag(p / p.sum())


def brute_force_diag_norm(p, q, n):
    """Sum over all d**n diagonal multi-indices of |p_b1 (prod q - prod p)|."""
    total = 0.0
    for idx in product(range(len(p)), repeat=n):
        rest = idx[1:]
        total += abs(p[idx[0]] * (np.prod([q[i] for i in rest]) - np.prod([p[i] for i in rest])))
    return total


# -- WordMixture ------------------------------------------------------------

def test_runs_round_trip():
    word = (0, 0, 1, 0, 1, 1, 1)
    assert to_runs(word) == ((0, 2), (1, 1), (0, 1), (1, 3))
    assert from_runs(to_runs(word)) == word


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=12), st.integers(-20, 20))
def test_rotate_matches_explicit_rotation(word, shift):
    bases = tuple(DensityMatrix.maximally_mixed(2) for _ in range(3))
    mix = WordMixture.from_words(bases, [(1.0, word)])
    L = len(word)
    k = shift % L
    expected = tuple(word[L - k:] + word[:L - k])
    assert mix.rotate(shift).terms[0][1] == expected


def test_word_mixture_validation():
    a = DensityMatrix.maximally_mixed(2)
    with pytest.raises(ValueError):
        WordMixture.from_words((a,), [(0.5, (0, 0)), (0.5, (0,))])
    with pytest.raises(ValueError):
        WordMixture.from_words((a,), [(1.0, (1,))])
    with pytest.raises(ValueError):
        WordMixture((a, DensityMatrix.maximally_mixed(3)), ())


# -- build / shift ----------------------------------------------------------

def test_build_catalyst_n2(pure0, mixed):
    gamma = build_catalyst(pure0, mixed, 2)
    assert gamma.terms == ((1.0, (0, 1)),)
    assert np.allclose(gamma.dense_array(), np.kron(pure0.entries, mixed.entries))


def test_build_catalyst_structure():
    rho, sigma = sample_random_state(2, seed=1), sample_random_state(2, seed=2)
    gamma = build_catalyst(rho, sigma, 5)
    assert len(gamma.terms) == 4 and gamma.length == 5
    assert all(w == pytest.approx(0.25) for w in gamma.weights)
    assert [word for _, word in gamma.terms] == [(0,) * r + (1,) * (5 - r) for r in range(1, 5)]
    assert gamma.is_state()


def test_catalyst_of_equal_states_is_power():
    rho = sample_random_state(2, seed=3)
    gamma = build_catalyst(rho, rho, 4)
    assert np.allclose(gamma.dense_array(), kron_all([rho.entries] * 4), atol=1e-15)
    assert np.allclose(shift_catalyst(gamma).dense_array(), gamma.dense_array(), atol=1e-15)


def test_catalyst_dense_oracle_diag_pair():
    rng = np.random.default_rng(4)
    rho, sigma = random_diag(2, rng), random_diag(2, rng)
    gamma = build_catalyst(rho, sigma, 4)
    assert np.allclose(gamma.dense_array(), dense_gamma(rho, sigma, 4), atol=1e-15)


def test_shift_catalyst_n2_and_n3(pure0, mixed):
    gp = shift_catalyst(build_catalyst(pure0, mixed, 2))
    assert gp.terms == ((1.0, (0, 0)),)
    gp3 = shift_catalyst(build_catalyst(pure0, mixed, 3))
    r, s = pure0.entries, mixed.entries
    oracle = 0.5 * (kron_all([r, r, s]) + kron_all([r, r, r]))
    assert np.allclose(gp3.dense_array(), oracle)
    assert np.allclose(gp3.dense_array(), dense_gamma(pure0, mixed, 3, first=2))


def test_build_catalyst_errors(pure0):
    with pytest.raises(ValueError):
        build_catalyst(pure0, pure0, 1)
    with pytest.raises(ValueError):
        build_catalyst(pure0, DensityMatrix.maximally_mixed(3), 3)
    bogus = WordMixture.from_words((pure0, pure0), [(1.0, (1, 0))])
    with pytest.raises(ProvenanceError):
        shift_catalyst(bogus)
    with pytest.raises(ProvenanceError):
        shift_catalyst(shift_catalyst(build_catalyst(pure0, pure0, 3)))


# -- difference -------------------------------------------------------------

def test_difference_two_terms(random_pairs):
    for rho, sigma in random_pairs:
        n = 4
        gamma = build_catalyst(rho, sigma, n)
        gp = shift_catalyst(gamma)
        diff = catalyst_difference(gamma, gp)
        assert sorted(diff.terms) == sorted([(1 / 3, (0, 1, 1, 1)), (-1 / 3, (0, 0, 0, 0))])
        assert diff.total_weight == pytest.approx(0, abs=1e-15)
        assert np.max(np.abs(diff.dense_array() - (gamma.dense_array() - gp.dense_array()))) <= 1e-12


def test_difference_n2(pure0, mixed):
    diff = catalyst_difference(build_catalyst(pure0, mixed, 2), shift_catalyst(build_catalyst(pure0, mixed, 2)))
    oracle = np.kron(pure0.entries, mixed.entries) - np.kron(pure0.entries, pure0.entries)
    assert np.allclose(diff.dense_array(), oracle)


def test_difference_vanishes_for_equal_states():
    rho = sample_random_state(3, seed=8)
    gamma = build_catalyst(rho, rho, 5)
    diff = catalyst_difference(gamma, shift_catalyst(gamma))
    assert diff.terms == ()
    assert not np.any(diff.dense_array())


def test_difference_n3_diagonal(pure0, mixed):
    gamma = build_catalyst(pure0, mixed, 3)
    diff = catalyst_difference(gamma, shift_catalyst(gamma))
    expected = 0.5 * np.array([0.25 - 1, 0.25, 0.25, 0.25, 0, 0, 0, 0])
    assert np.allclose(diff.dense_array(), np.diag(expected), atol=1e-15)


def test_difference_provenance(pure0, mixed):
    g3 = build_catalyst(pure0, mixed, 3)
    g4 = build_catalyst(pure0, mixed, 4)
    with pytest.raises(ProvenanceError):
        catalyst_difference(g3, shift_catalyst(g4))
    with pytest.raises(ProvenanceError):
        catalyst_difference(g3, shift_catalyst(build_catalyst(mixed, pure0, 3)))
    with pytest.raises(ProvenanceError):
        catalyst_difference(shift_catalyst(g3), g3)


# -- trace distance ---------------------------------------------------------

def test_trace_distance_benchmark(pure0, mixed):
    gamma = build_catalyst(pure0, mixed, 3)
    gp = shift_catalyst(gamma)
    for method in ("dense", "commuting-typeclass", "auto"):
        assert catalyst_trace_distance(gamma, gp, method) == pytest.approx(0.75, abs=1e-12)


def test_trace_distance_equal_states_zero():
    rho = DensityMatrix.from_diag([0.3, 0.7])
    gamma = build_catalyst(rho, rho, 6)
    assert catalyst_trace_distance(gamma, shift_catalyst(gamma), "commuting-typeclass") == 0.0
    assert catalyst_trace_distance(gamma, shift_catalyst(gamma), "dense") == 0.0


@pytest.mark.parametrize("d,n", [(2, 2), (2, 5), (3, 3), (3, 4)])
def test_typeclass_matches_brute_force(d, n):
    rng = np.random.default_rng(10 * d + n)
    p = rng.random(d)
    q = rng.random(d)
    p, q = p / p.sum(), q / q.sum()
    assert typeclass_trace_norm(p, q, n) == pytest.approx(brute_force_diag_norm(p, q, n), abs=1e-13)


def test_typeclass_with_zero_probabilities():
    p = np.array([1.0, 0.0, 0.0])
    q = np.array([0.0, 0.5, 0.5])
    # supports are disjoint after the first register: norm is 1 + 1
    assert typeclass_trace_norm(p, q, 4) == pytest.approx(brute_force_diag_norm(p, q, 4), abs=1e-14)
    assert typeclass_trace_norm(p, q, 4) == pytest.approx(2.0)


def test_compositions():
    comps = compositions(4, 3)
    assert comps.shape == (15, 3)
    assert np.all(comps.sum(axis=1) == 4)
    assert [tuple(r) for r in comps] == sorted(tuple(r) for r in comps)
    assert len({tuple(r) for r in comps}) == 15
    assert compositions(5, 2).tolist() == [[i, 5 - i] for i in range(6)]


def test_typeclass_agrees_with_dense_on_rotated_commuting_pair():
    rng = np.random.default_rng(12)
    q_, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    rho = DensityMatrix(q_ @ np.diag([0.6, 0.3, 0.1]) @ q_.conj().T)
    sigma = DensityMatrix(q_ @ np.diag([0.2, 0.2, 0.6]) @ q_.conj().T)
    gamma = build_catalyst(rho, sigma, 4)
    gp = shift_catalyst(gamma)
    dense = catalyst_trace_distance(gamma, gp, "dense")
    fast = catalyst_trace_distance(gamma, gp, "commuting-typeclass")
    assert fast == pytest.approx(dense, abs=1e-10)


def test_simultaneous_spectra_degenerate_sum():
    # rho + 0.37 sigma is degenerate here, so the eigenspace refinement runs
    rho = DensityMatrix.from_diag([0.37, 0.0, 0.63])
    u = np.eye(3)
    u[:2, :2] = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    sigma_d = np.diag([0.0, 1.0, 0.0])
    rho_r = DensityMatrix(u @ rho.entries @ u.T)
    sigma_r = DensityMatrix(u @ sigma_d @ u.T)
    p, q = simultaneous_spectra(rho_r, sigma_r)
    assert sorted(zip(np.round(p, 12), np.round(q, 12))) == [(0.0, 1.0), (0.37, 0.0), (0.63, 0.0)]


def test_method_errors():
    rho = sample_random_state(2, seed=1)
    sigma = sample_random_state(2, seed=2)
    gamma = build_catalyst(rho, sigma, 4)
    gp = shift_catalyst(gamma)
    with pytest.raises(NonCommutingError):
        catalyst_trace_distance(gamma, gp, "commuting-typeclass")
    with pytest.raises(DenseCapError):
        catalyst_trace_distance(gamma, gp, "dense", dense_cap=8)
    with pytest.raises(ValueError):
        catalyst_trace_distance(gamma, gp, "bogus")
    big = build_catalyst(rho, sigma, 20)
    with pytest.raises(DenseCapError):
        catalyst_trace_distance(big, shift_catalyst(big), "auto")


def test_bound_on_random_noncommuting(random_pairs):
    for rho, sigma in random_pairs:
        for n in (2, 3, 4):
            gamma = build_catalyst(rho, sigma, n)
            assert catalyst_trace_distance(gamma, shift_catalyst(gamma)) <= 2 / (n - 1) + 1e-9


def test_monotone_vanishing_benchmark(pure0, mixed):
    values = {}
    for n in (4, 8, 16, 32, 64, 128, 256):
        gamma = build_catalyst(pure0, mixed, n)
        values[n] = catalyst_trace_distance(gamma, shift_catalyst(gamma))
        assert values[n] <= 2 / (n - 1) + 1e-9
    for k in (4, 8, 16, 32, 64, 128):
        assert values[2 * k] < values[k] + 1e-12


# -- protocol ---------------------------------------------------------------

def test_protocol_word_level_shift(pure0, mixed):
    res = apply_protocol(pure0, mixed, 4)
    words = sorted(word for _, word in res.output.terms)
    expected = sorted((1,) + (0,) * (r + 1) + (1,) * (4 - r - 1) for r in range(1, 4))
    assert words == expected


def test_protocol_benchmark(pure0, mixed):
    res = apply_protocol(pure0, mixed, 3)
    assert res.achieved_error == pytest.approx(0.75, abs=1e-10)
    assert res.bound == 1.0
    assert res.dense_checked and res.exactness_residual <= 1e-10 and res.ok


def test_protocol_equal_states():
    rho = sample_random_state(2, seed=21)
    res = apply_protocol(rho, rho, 4)
    assert res.achieved_error == 0.0
    target = tensor(rho, build_catalyst(rho, rho, 4).densify())
    assert np.allclose(res.output.dense_array(), target.entries, atol=1e-15)


def test_protocol_dense_residual_random(random_pairs):
    for rho, sigma in random_pairs[:6]:
        res = apply_protocol(rho, sigma, 3)
        assert res.dense_checked and res.word_exact
        assert res.exactness_residual <= 1e-10


def test_protocol_beyond_dense_cap_is_word_level(pure0, mixed):
    res = apply_protocol(pure0, mixed, 40)
    assert not res.dense_checked and res.word_exact and res.ok


def test_protocol_errors(pure0):
    with pytest.raises(ValueError):
        apply_protocol(pure0, pure0, 1)
    with pytest.raises(ValueError):
        apply_protocol(pure0, DensityMatrix.maximally_mixed(3), 3)


# -- per-party cyclic shift -------------------------------------------------

def test_per_party_single_copy_is_identity():
    m = sample_random_state(4, seed=30, shape=(2, 2))
    out = per_party_cyclic_shift(m, Partition((2, 2), (0, 1)), 1)
    assert np.array_equal(out.entries, m.entries)


def test_per_party_identical_copies_unchanged():
    a = sample_random_state(2, seed=31)
    out = per_party_cyclic_shift(tensor(a, a), Partition((2,), (0,)), 2)
    assert np.allclose(out.entries, tensor(a, a).entries, atol=1e-15)


def test_per_party_two_parties_two_copies():
    r1, r2, s1, s2 = (sample_random_state(2, seed=k) for k in range(40, 44))
    part = Partition((2, 2), (0, 1))
    state = reduce(tensor, [r1, r2, s1, s2])
    out = per_party_cyclic_shift(state, part, 2)
    assert np.allclose(out.entries, reduce(tensor, [s1, s2, r1, r2]).entries, atol=1e-15)
    # composed from the two single-party cycles
    only0 = per_party_cyclic_shift(state, part, 2, parties=[0])
    assert np.allclose(only0.entries, reduce(tensor, [s1, r2, r1, s2]).entries, atol=1e-15)
    both = per_party_cyclic_shift(only0, part, 2, parties=[1])
    assert np.allclose(both.entries, out.entries, atol=1e-15)
    composed = Permutation((2, 1, 0, 3)).compose(Permutation((0, 3, 2, 1)))
    assert np.allclose(permute_registers(state, composed).entries, out.entries, atol=1e-15)


def test_per_party_shape_mismatch():
    with pytest.raises(ValueError):
        per_party_cyclic_shift(sample_random_state(8, seed=1, shape=(2, 2, 2)), Partition((2, 2)), 2)


def test_copy_rotation_multi_register():
    assert copy_rotation(3, 2).image == (2, 3, 4, 5, 0, 1)
    assert copy_rotation(3, 1) == Permutation.cyclic(3)
