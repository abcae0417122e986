"""Superselected unitaries: validation, generators, gates, locality, sampling."""

import numpy as np
import pytest

from fermidesc import fock, transformations as tf
from fermidesc.errors import ValidationError
from fermidesc.fock import ModeSet


def expm_eigh_oracle(h: np.ndarray) -> np.ndarray:
    """exp(i h) through the spectral theorem; independent of the production path."""
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(1j * evals)[None, :]) @ evecs.conj().T


def test_validate_examples():
    tf.validate_ps_unitary(np.eye(4, dtype=complex))
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    with pytest.raises(ValidationError) as err:
        tf.validate_ps_unitary(hadamard)
    assert err.value.code == "ssr_violation"
    for theta in (0.0, 0.4, np.pi):
        n0 = fock.creator(1, 0) @ fock.annihilator(1, 0)
        tf.validate_ps_unitary(expm_eigh_oracle(theta * n0.matrix))


def test_validate_rejects_non_unitary():
    with pytest.raises(ValidationError) as err:
        tf.validate_ps_unitary(np.diag([1.0, 2.0]).astype(complex))
    assert err.value.code == "not_unitary"


def test_exp_hamiltonian_zero_gives_identity():
    h = fock.FockOperator(2, np.zeros((4, 4)))
    u = tf.exp_hamiltonian(h)
    assert np.allclose(u.matrix, np.eye(4), atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_exp_hamiltonian_matches_spectral_oracle(seed):
    rng = np.random.default_rng(seed)
    n_modes = 3
    diag = fock.parity_diagonal(n_modes).real
    h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = (h + h.conj().T) / 2
    # zero out the parity-mixing blocks to make the generator even
    mask = np.equal.outer(diag, diag)
    h = np.where(mask, h, 0.0)
    u = tf.exp_hamiltonian(fock.FockOperator(n_modes, h))
    assert fock.frobenius(u.matrix - expm_eigh_oracle(h)) < 1e-12


def test_exp_hamiltonian_rejections():
    odd = fock.annihilator(2, 0) + fock.creator(2, 0)
    with pytest.raises(ValidationError) as err:
        tf.exp_hamiltonian(odd)
    assert err.value.code == "ssr_violation"
    skew = fock.FockOperator(1, np.array([[0, 1], [-1, 0]], dtype=complex))
    with pytest.raises(ValidationError) as err:
        tf.exp_hamiltonian(skew)
    assert err.value.code == "not_hermitian"


def test_phase_gate_zero_is_identity():
    u = tf.named_gate("phase", 2, modes=(0,), theta=0.0)
    assert np.allclose(u.matrix, np.eye(4), atol=1e-14)


def test_tunneling_half_pi_swaps_with_sign():
    u = tf.named_gate("tunneling", 2, modes=(0, 1), theta=np.pi / 2)
    v10 = fock.fock_basis_state(2, [1, 0]).amplitudes
    v01 = fock.fock_basis_state(2, [0, 1]).amplitudes
    assert np.allclose(u.matrix @ v10, -v01, atol=1e-12)
    assert np.allclose(u.matrix @ v01, v10, atol=1e-12)


def test_tunneling_is_rotation_in_single_particle_sector():
    theta = 0.3
    u = tf.named_gate("tunneling", 2, modes=(0, 1), theta=theta)
    v10 = fock.fock_basis_state(2, [1, 0]).amplitudes
    expected = np.cos(theta) * v10 - np.sin(theta) * fock.fock_basis_state(2, [0, 1]).amplitudes
    assert np.allclose(u.matrix @ v10, expected, atol=1e-12)


def test_interaction_gate_diagonal_fixes_vacuum():
    u = tf.named_gate("interaction", 2, modes=(0, 1), theta=1.3)
    assert np.allclose(u.matrix, np.diag(np.diag(u.matrix)), atol=1e-14)
    vac = fock.vacuum_state(2).amplitudes
    assert np.allclose(u.matrix @ vac, vac, atol=1e-14)


def test_named_gate_index_errors():
    with pytest.raises(ValidationError):
        tf.named_gate("phase", 2, modes=(2,), theta=0.1)
    with pytest.raises(ValidationError):
        tf.named_gate("tunneling", 2, modes=(0, 0), theta=0.1)


def test_is_local_unitary_examples():
    assert tf.is_local_unitary(
        tf.named_gate("phase", 2, modes=(0,), theta=0.4), ModeSet((0,), 2)
    )
    assert not tf.is_local_unitary(
        tf.named_gate("tunneling", 2, modes=(0, 1), theta=0.4), ModeSet((0,), 2)
    )
    phase_only = tf.PSUnitary(2, np.exp(0.9j) * np.eye(4))
    assert tf.is_local_unitary(phase_only, ModeSet((0,), 2))
    assert tf.is_local_unitary(phase_only, ModeSet((1,), 2))


@pytest.mark.parametrize("seed", range(4))
def test_locality_criteria_agree_on_unitaries(seed):
    # span membership iff every outside annihilator is left invariant
    n_modes = 3
    sub = ModeSet((0, 1), n_modes)
    local = tf.local_random_ps_unitary(sub, seed)
    assert tf.is_local_unitary(local, sub)
    assert tf.invariance_support(local).is_subset_of(sub)
    glob = tf.random_ps_unitary(n_modes, seed + 1000)
    assert not tf.is_local_unitary(glob, sub)
    assert not tf.invariance_support(glob).is_subset_of(sub)


def test_random_ps_unitary_contracts():
    a = tf.random_ps_unitary(3, 7)
    b = tf.random_ps_unitary(3, 7)
    assert np.array_equal(a.matrix, b.matrix)
    p = fock.parity_operator(3)
    assert fock.frobenius((a.matrix @ p.matrix) - (p.matrix @ a.matrix)) < 1e-12


def test_random_ps_unitary_seed_separation():
    distances = [
        fock.frobenius(
            tf.random_ps_unitary(3, 2 * k).matrix - tf.random_ps_unitary(3, 2 * k + 1).matrix
        )
        for k in range(100)
    ]
    assert min(distances) > 0.1


def test_local_random_embedding_contracts():
    sub = ModeSet((1, 2), 4)
    u = tf.local_random_ps_unitary(sub, 3)
    assert tf.is_local_unitary(u, sub)
    for j in (0, 3):
        f = fock.annihilator(4, j)
        assert fock.frobenius(u.conjugate(f).matrix - f.matrix) < 1e-12
    # the embedding of the identity is the ambient identity
    from fermidesc.algebra import embed_local_operator

    lifted = embed_local_operator(np.eye(4, dtype=complex), sub)
    assert np.allclose(lifted.matrix, np.eye(16), atol=1e-12)


def test_local_random_on_full_set_matches_global_sampler():
    full = ModeSet.full(3)
    assert np.array_equal(
        tf.local_random_ps_unitary(full, 5).matrix, tf.random_ps_unitary(3, 5).matrix
    )


@pytest.mark.parametrize("n_modes", [2, 3, 4, 5])
def test_group_closure(n_modes):
    for seed in range(3):
        u = tf.random_ps_unitary(n_modes, seed)
        v = tf.random_ps_unitary(n_modes, seed + 10)
        tf.validate_ps_unitary((u @ v).matrix)


def test_disjoint_local_unitaries_commute():
    for seed in range(5):
        u = tf.local_random_ps_unitary(ModeSet((0,), 3), seed)
        v = tf.local_random_ps_unitary(ModeSet((1, 2), 3), seed + 40)
        assert fock.frobenius((u @ v).matrix - (v @ u).matrix) < 1e-10


def test_exp_inverse():
    rng = np.random.default_rng(0)
    n0 = fock.creator(2, 0) @ fock.annihilator(2, 0)
    n1 = fock.creator(2, 1) @ fock.annihilator(2, 1)
    h = 0.7 * n0 + 1.9 * (n0 @ n1)
    u = tf.exp_hamiltonian(h)
    v = tf.exp_hamiltonian(-1.0 * h)
    assert fock.frobenius((u @ v).matrix - np.eye(4)) < 1e-9


def test_haar_blocks_respect_sectors():
    for seed in range(10):
        u = tf.random_ps_unitary(4, seed)
        p = fock.parity_operator(4).matrix
        assert fock.frobenius(u.matrix @ p - p @ u.matrix) < 1e-12


def test_phase_distance():
    u = tf.random_ps_unitary(2, 1).matrix
    assert tf.phase_distance(u, np.exp(1.2j) * u) < 1e-12
    v = tf.random_ps_unitary(2, 2).matrix
    assert tf.phase_distance(u, v) > 0.1


def test_canonical_phase_pins_first_block_entry():
    u = tf.random_ps_unitary(3, 4).matrix
    rotated = tf.canonical_phase(np.exp(0.77j) * u, 3)
    base = tf.canonical_phase(u, 3)
    assert fock.frobenius(rotated - base) < 1e-12
