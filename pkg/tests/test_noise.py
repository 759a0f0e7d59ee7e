from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from collisional_dicke.collisions import apply_partial_swap_dm
from collisional_dicke.errors import CapacityError, DomainError, RepresentationError
from collisional_dicke.noise import (
    AMPLITUDE_DAMPING,
    DEPHASING,
    DEPOLARIZING,
    IDENTITY,
    PER_COLLISION,
    NoiseConfig,
    apply_channel,
    apply_missing_collision,
    density_trace_norms,
    make_channel,
    noisy_block_after,
    run_noisy_trace,
    run_noisy_trace_reference,
    run_trajectories,
    write_sweep_csv,
)
from collisional_dicke.protocol import ProtocolSpec, run_trace
from collisional_dicke.subspace import FULL, SUBSPACE, DensityState, PureState, get_basis

from conftest import random_state

CHANNELS = (DEPHASING, DEPOLARIZING, AMPLITUDE_DAMPING)
I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)


def dense_channel(rho, n, qubit, ops):
    # Kraus sum with operators lifted by explicit Kronecker products
    total = np.zeros_like(rho)
    for k in ops:
        factors = [I2] * n
        factors[n - 1 - qubit] = k
        big = factors[0]
        for f in factors[1:]:
            big = np.kron(big, f)
        total += big @ rho @ big.conj().T
    return total


@pytest.mark.parametrize("label", CHANNELS)
@pytest.mark.parametrize("q", [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0])
def test_kraus_completeness(label, q):
    assert make_channel(label, q).completeness_error() < 1e-12


def test_channel_operator_sets():
    assert len(make_channel(DEPHASING, 0.0).operators) == 1
    np.testing.assert_array_equal(make_channel(DEPHASING, 0.0).operators[0], I2)
    q = 0.3
    ops = make_channel(DEPOLARIZING, q).operators
    expected = [math.sqrt(1 - 3 * q / 4) * I2, math.sqrt(q) * X / 2, math.sqrt(q) * Y / 2, math.sqrt(q) * Z / 2]
    for a, b in zip(ops, expected):
        np.testing.assert_allclose(a, b, atol=1e-15)
    k1, k2 = make_channel(AMPLITUDE_DAMPING, 1.0).operators
    np.testing.assert_array_equal(k1, np.diag([1, 0]))
    np.testing.assert_array_equal(k2, [[0, 1], [0, 0]])
    with pytest.raises(DomainError):
        make_channel(DEPHASING, 1.5)
    with pytest.raises(DomainError):
        make_channel("bitflip", 0.1)


def test_identity_channel_leaves_state(rng):
    basis = get_basis(3, 1)
    rho = DensityState.from_pure(PureState(basis, random_state(rng, 3)), FULL)
    out = apply_channel(rho, 1, make_channel(IDENTITY))
    np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-15)


def test_dephasing_scales_coherence_across_bit(rng):
    # off-diagonals between masks differing at the bit scale by 1 - 2q
    basis = get_basis(4, 2)
    psi = PureState(basis, random_state(rng, basis.dim))
    rho = DensityState.from_pure(psi, SUBSPACE)
    bit = basis.bits[:, 2]
    differ = bit[:, None] != bit[None, :]
    complete = apply_channel(rho, 2, make_channel(DEPHASING, 0.5))
    assert np.max(np.abs(complete.matrix[differ])) < 1e-15
    np.testing.assert_allclose(complete.matrix[~differ], rho.matrix[~differ], atol=1e-15)
    flipped = apply_channel(rho, 2, make_channel(DEPHASING, 1.0))
    np.testing.assert_allclose(flipped.matrix[differ], -rho.matrix[differ], atol=1e-15)
    partial = apply_channel(rho, 2, make_channel(DEPHASING, 0.2))
    np.testing.assert_allclose(partial.matrix[differ], 0.6 * rho.matrix[differ], atol=1e-15)


def test_damping_on_excited_qubit():
    q = 0.37
    basis = get_basis(1, 1)
    rho = DensityState(FULL, np.diag([0, 1]).astype(complex), basis)
    out = apply_channel(rho, 0, make_channel(AMPLITUDE_DAMPING, q))
    np.testing.assert_allclose(out.matrix, np.diag([q, 1 - q]), atol=1e-15)
    full = apply_channel(rho, 0, make_channel(AMPLITUDE_DAMPING, 1.0))
    np.testing.assert_allclose(full.matrix, np.diag([1, 0]), atol=1e-15)


@pytest.mark.parametrize("label", CHANNELS)
def test_apply_channel_matches_dense_kraus_sum(rng, label):
    n = 4
    basis = get_basis(n, 2)
    v = random_state(rng, 1 << n)
    w = random_state(rng, 1 << n)
    rho = DensityState(FULL, 0.6 * np.outer(v, v.conj()) + 0.4 * np.outer(w, w.conj()), basis)
    channel = make_channel(label, 0.23)
    for qubit in range(n):
        out = apply_channel(rho, qubit, channel)
        np.testing.assert_allclose(out.matrix, dense_channel(rho.matrix, n, qubit, channel.operators), atol=1e-14)
        out.check()


def test_subspace_representation_rules(rng):
    basis = get_basis(4, 2)
    rho = DensityState.from_pure(PureState(basis, random_state(rng, basis.dim)), SUBSPACE)
    out = apply_channel(rho, 0, make_channel(DEPHASING, 0.3))
    expected = apply_channel(rho.to_full(), 0, make_channel(DEPHASING, 0.3)).matrix[np.ix_(basis.masks, basis.masks)]
    np.testing.assert_allclose(out.matrix, expected, atol=1e-15)
    for label in (DEPOLARIZING, AMPLITUDE_DAMPING):
        with pytest.raises(RepresentationError):
            apply_channel(rho, 0, make_channel(label, 0.1))


def test_missing_collision_examples(rng):
    basis = get_basis(2, 1)
    rho = DensityState.from_pure(PureState.basis_state(basis, 0b01))
    half = apply_missing_collision(rho, 0, 1, math.pi / 2, 0.5)
    np.testing.assert_allclose(half.matrix, np.diag([0.5, 0.5]), atol=1e-15)
    mixed = DensityState(SUBSPACE, np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]]), basis)
    np.testing.assert_allclose(
        apply_missing_collision(mixed, 0, 1, 0.4, 0.0).matrix, apply_partial_swap_dm(mixed, 0, 1, 0.4).matrix
    )
    np.testing.assert_array_equal(apply_missing_collision(mixed, 0, 1, 0.4, 1.0).matrix, mixed.matrix)


def test_missing_collision_linearity_against_dense(rng):
    basis = get_basis(2, 1)
    v = random_state(rng, 4)
    rho = DensityState(FULL, np.outer(v, v.conj()), basis)
    gamma, p = 0.81, 0.27
    u = math.cos(gamma) * np.eye(4) + 1j * math.sin(gamma) * np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
    )
    expected = (1 - p) * u @ rho.matrix @ u.conj().T + p * rho.matrix
    np.testing.assert_allclose(apply_missing_collision(rho, 0, 1, gamma, p).matrix, expected, atol=1e-15)


NOISE_CASES = [
    NoiseConfig(p_miss=0.2),
    NoiseConfig(channel=DEPHASING, q=0.03),
    NoiseConfig(channel=DEPOLARIZING, q=0.02, p_miss=0.1),
    NoiseConfig(channel=AMPLITUDE_DAMPING, q=0.04),
    NoiseConfig(channel=DEPOLARIZING, q=0.02, policy=PER_COLLISION, p_miss=0.1, drop_intra=True),
    NoiseConfig(channel=AMPLITUDE_DAMPING, q=0.03, policy=PER_COLLISION),
]


@pytest.mark.parametrize("noise", NOISE_CASES, ids=lambda c: f"{c.describe()}-{c.policy}")
@pytest.mark.parametrize("kind", ["phase", "magnitude"])
def test_sector_engine_matches_reference(rng, noise, kind):
    spec = ProtocolSpec(5, 2)
    thetas = rng.uniform(-2, 2, 5)
    fast = run_noisy_trace(spec, 0.7, 1.3, 25, noise, kind, rz_angles=thetas)
    ref = run_noisy_trace_reference(spec, 0.7, 1.3, 25, noise, kind, rz_angles=thetas, check=True)
    np.testing.assert_allclose(fast.values, ref.values, atol=1e-12)


def test_sector_engine_large_support_branch():
    # depolarizing on 7 qubits stores every sector, beyond the transfer-matrix size
    spec = ProtocolSpec(7, 2)
    noise = NoiseConfig(channel=DEPOLARIZING, q=0.05)
    fast = run_noisy_trace(spec, 0.5, 1.1, 6, noise)
    ref = run_noisy_trace_reference(spec, 0.5, 1.1, 6, noise)
    np.testing.assert_allclose(fast.values, ref.values, atol=1e-12)


@pytest.mark.parametrize("label", CHANNELS)
@pytest.mark.parametrize("kind", ["phase", "magnitude"])
def test_zero_noise_reproduces_noiseless(label, kind):
    spec = ProtocolSpec(6, 3)
    noisy = run_noisy_trace(spec, 0.4, 2.1, 60, NoiseConfig(channel=label, q=0.0), kind)
    np.testing.assert_allclose(noisy.values, run_trace(spec, 0.4, 2.1, 60, kind).values, atol=1e-10)


def test_full_dropout_freezes_state():
    spec = ProtocolSpec(5, 2)
    trace = run_noisy_trace(spec, 0.0, 1.3, 40, NoiseConfig(p_miss=1.0))
    np.testing.assert_allclose(trace.values, 1 / 10, atol=1e-12)


def test_full_damping_empties_target():
    spec = ProtocolSpec(4, 2)
    trace = run_noisy_trace(spec, 0.9, 1.3, 10, NoiseConfig(channel=AMPLITUDE_DAMPING, q=1.0))
    assert np.all(trace.values == 0.0)


@pytest.mark.parametrize("label", CHANNELS)
def test_trace_preserved_over_long_runs(label):
    spec = ProtocolSpec(5, 2)
    norms = density_trace_norms(spec, 0.8, 1.7, 200, NoiseConfig(channel=label, q=0.05, p_miss=0.1))
    np.testing.assert_allclose(norms, 1.0, atol=1e-10)


def test_noisy_block_is_physical():
    spec = ProtocolSpec(5, 2)
    block = noisy_block_after(spec, 0.8, 1.7, 30, NoiseConfig(channel=DEPHASING, q=0.05, p_miss=0.2))
    DensityState(SUBSPACE, block, spec.basis).check()


def test_capacity_guard():
    with pytest.raises(CapacityError):
        run_noisy_trace(ProtocolSpec(13, 2), 0.1, 0.2, 2, NoiseConfig(channel=DEPOLARIZING, q=0.1))


def test_noise_config_validation():
    with pytest.raises(DomainError):
        NoiseConfig(p_miss=1.2)
    with pytest.raises(DomainError):
        NoiseConfig(channel="bitflip")
    with pytest.raises(DomainError):
        NoiseConfig(policy="sometimes")
    with pytest.raises(DomainError):
        NoiseConfig(engine="trajectories", trajectories=0)
    assert NoiseConfig(channel=DEPHASING, q=0.0).is_noiseless
    assert NoiseConfig().with_level("pmiss", 0.3).p_miss == 0.3
    assert NoiseConfig().with_level(DEPOLARIZING, 0.2).describe() == "depolarizing=0.2"


def test_trajectory_endpoints():
    spec = ProtocolSpec(5, 2)
    clean = run_trajectories(spec, 0.3, 1.2, 20, 0.0, 50, seed=3)
    np.testing.assert_allclose(clean.values, run_trace(spec, 0.3, 1.2, 20).values, atol=1e-12)
    assert np.all(clean.stderr < 1e-15)
    frozen = run_trajectories(spec, 0.3, 1.2, 20, 1.0, 50, seed=3)
    np.testing.assert_allclose(frozen.values, 0.1, atol=1e-12)
    assert np.all(frozen.stderr < 1e-15)
    with pytest.raises(DomainError):
        run_trajectories(spec, 0.3, 1.2, 20, 0.1, 0)


def test_trajectory_seeding_is_per_trajectory():
    spec = ProtocolSpec(4, 2)
    thetas = [0.3, -0.2, 0.5, 1.0]
    big = run_trajectories(spec, 0.3, 1.2, 10, 0.3, 40, seed=7, rz_angles=thetas)
    again = run_trajectories(spec, 0.3, 1.2, 10, 0.3, 40, seed=7, rz_angles=thetas)
    assert big.values.tobytes() == again.values.tobytes()
    # the first 20 trajectories of a seed-7 batch equal a 20-trajectory batch
    head = run_trajectories(spec, 0.3, 1.2, 10, 0.3, 20, seed=7, rz_angles=thetas)
    tail = run_trajectories(spec, 0.3, 1.2, 10, 0.3, 20, seed=27, rz_angles=thetas)
    np.testing.assert_allclose((head.values + tail.values) / 2, big.values, atol=1e-14)


@pytest.mark.parametrize("p_miss", [0.1, 0.3, 0.5])
def test_trajectories_agree_with_density_matrix(p_miss):
    spec = ProtocolSpec(4, 2)
    thetas = [0.4, -1.0, 0.2, 0.9]
    dm = run_noisy_trace(spec, 0.6, 1.4, 15, NoiseConfig(p_miss=p_miss), rz_angles=thetas)
    traj = run_trajectories(spec, 0.6, 1.4, 15, p_miss, 2000, seed=11, rz_angles=thetas)
    z = np.abs(traj.values - dm.values) / np.maximum(traj.stderr, 1e-15)
    assert np.all(z < 4.0)
    assert np.mean(z < 3.0) > 0.9


def test_trajectory_engine_via_noise_config():
    spec = ProtocolSpec(4, 2)
    noise = NoiseConfig(p_miss=0.2, engine="trajectories", trajectories=30, seed=5)
    direct = run_trajectories(spec, 0.6, 1.4, 8, 0.2, 30, seed=5)
    via = run_noisy_trace(spec, 0.6, 1.4, 8, noise)
    assert via.values.tobytes() == direct.values.tobytes()
    with pytest.raises(DomainError):
        run_noisy_trace(spec, 0.6, 1.4, 8, NoiseConfig(channel=DEPHASING, q=0.1, engine="trajectories"))


def test_sweep_csv_format(tmp_path):
    path = tmp_path / "sweep.csv"
    rows = [{"n": 5, "m": 2, "channel": "pmiss", "q_or_pmiss": 0.1, "gamma_in": 1 / 3, "gamma_sh": 2.0,
             "best_round": 12, "fidelity": 0.95, "stderr": 0.0, "baseline_fidelity": 0.9}]
    write_sweep_csv(rows, path, ("baseline_fidelity",))
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    parsed = list(csv.DictReader(path.open()))
    assert list(parsed[0]) == ["n", "m", "channel", "q_or_pmiss", "gamma_in", "gamma_sh", "best_round",
                               "fidelity", "stderr", "baseline_fidelity"]
    assert parsed[0]["gamma_in"] == "0.333333333333"
