import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dqgo.ising import (
    IsingInstance,
    basis_energies,
    brute_force_ground_state,
    classical_energy,
    ferromagnetic_instance,
    load_instance,
    sample_sk_instance,
    save_instance,
    sk_instance_from_seed,
)
from dqgo.statevector import CapacityError
from helpers import all_configs, enumerate_energy


def test_energy_examples():
    inst = IsingInstance(2, {(0, 1): 1.0}, (0.0, 0.0))
    assert classical_energy(inst, (1, 1)) == -1.0
    inst = IsingInstance(2, {(0, 1): 1.0}, (0.5, 0.0))
    assert classical_energy(inst, (1, 1)) == -1.5


def test_energy_matches_reversed_summation():
    inst = sample_sk_instance(3, np.random.default_rng(3))
    for s in all_configs(3):
        assert classical_energy(inst, s) == pytest.approx(enumerate_energy(inst, s), abs=1e-12)


def test_energy_length_mismatch():
    with pytest.raises(ValueError):
        classical_energy(ferromagnetic_instance(3), (1, 1))


def test_basis_energies_follow_bit_convention():
    inst = sample_sk_instance(4, np.random.default_rng(11))
    energies = basis_energies(inst)
    for b, s in enumerate(all_configs(4)):
        assert energies[b] == pytest.approx(classical_energy(inst, s), abs=1e-12)


def test_instance_validation():
    with pytest.raises(ValueError):
        IsingInstance(2, {(1, 0): 1.0}, (0.0, 0.0))
    with pytest.raises(ValueError):
        IsingInstance(2, {(0, 2): 1.0}, (0.0, 0.0))
    with pytest.raises(ValueError):
        IsingInstance(2, {(0, 1): float("inf")}, (0.0, 0.0))
    with pytest.raises(ValueError):
        IsingInstance(2, {}, (0.0,))


def test_ground_state_z2_pair():
    gs = brute_force_ground_state(IsingInstance(2, {(0, 1): 1.0}, (0.0, 0.0)))
    assert gs.energy == -1.0
    assert gs.degeneracy == 2
    assert set(gs.ground_set) == {(1, 1), (-1, -1)}


def test_ground_state_with_field():
    inst = IsingInstance(2, {(0, 1): 1.0}, (0.5, 0.0))
    # enumerate the four configurations by hand
    energies = {s: -1.0 * s[0] * s[1] - 0.5 * s[0] for s in [(1, 1), (1, -1), (-1, 1), (-1, -1)]}
    best = min(energies, key=energies.get)
    gs = brute_force_ground_state(inst)
    assert tuple(gs.config) == best == (1, 1)
    assert gs.energy == pytest.approx(-1.5)
    assert gs.degeneracy == 1


def test_ground_state_single_spin():
    gs = brute_force_ground_state(IsingInstance(1, {}, (1.0,)))
    assert tuple(gs.config) == (1,)
    assert gs.energy == -1.0


def test_ground_state_capacity():
    with pytest.raises(CapacityError):
        brute_force_ground_state(IsingInstance(25, {}, (0.0,) * 25))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_ground_energy_below_random_configs(n, seed):
    rng = np.random.default_rng(seed)
    inst = sample_sk_instance(n, rng)
    gs = brute_force_ground_state(inst)
    for _ in range(100):
        s = rng.choice([-1, 1], size=n)
        assert gs.energy <= classical_energy(inst, s) + 1e-12
    for config in gs.ground_set:
        assert classical_energy(inst, config) == pytest.approx(gs.energy, abs=1e-9)


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_spin_flip_symmetry_without_field(n, seed):
    rng = np.random.default_rng(seed)
    sk = sample_sk_instance(n, rng)
    inst = IsingInstance(n, sk.couplings, (0.0,) * n)
    s = rng.choice([-1, 1], size=n)
    assert classical_energy(inst, s) == pytest.approx(classical_energy(inst, -s), abs=1e-12)


def test_sk_shape():
    inst = sample_sk_instance(2, np.random.default_rng(0))
    assert len(inst.couplings) == 1 and len(inst.fields) == 2


def test_sk_moments():
    rng = np.random.default_rng(123)
    couplings, fields = [], []
    while len(couplings) < 100_000:
        inst = sample_sk_instance(4, rng)
        couplings += list(inst.couplings.values())
        fields += list(inst.fields)
    J = np.array(couplings[:100_000])
    assert abs(J.mean()) <= 0.01
    assert abs(J.var() - 0.25) <= 0.01
    h = np.array(fields[:100_000])
    assert abs(h.var() - 0.25) <= 0.01


def test_sk_deterministic():
    assert sk_instance_from_seed(5, 42) == sk_instance_from_seed(5, 42)
    assert sk_instance_from_seed(5, 42) != sk_instance_from_seed(5, 43)


def test_sk_rejects_empty():
    with pytest.raises(ValueError):
        sample_sk_instance(0, np.random.default_rng(0))


def test_ferromagnet():
    assert ferromagnetic_instance(2).couplings == {(0, 1): 1.0}
    assert ferromagnetic_instance(2).fields == (0.0, 0.0)
    four = ferromagnetic_instance(4)
    assert len(four.couplings) == 6 and set(four.couplings.values()) == {1.0}
    gs = brute_force_ground_state(four)
    assert set(gs.ground_set) == {(1, 1, 1, 1), (-1, -1, -1, -1)}
    assert gs.energy == -4 * 3 / 2
    with pytest.raises(ValueError):
        ferromagnetic_instance(1)


@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_json_round_trip(n, seed):
    inst = sk_instance_from_seed(n, seed)
    back = IsingInstance.from_json(inst.to_json())
    assert back == inst
    assert back.seed == seed
    assert all(back.couplings[k] == v for k, v in inst.couplings.items())


def test_json_shape_and_unknown_keys(tmp_path):
    inst = sk_instance_from_seed(3, 9)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    data = json.loads(path.read_text())
    assert list(data) == ["n", "couplings", "fields", "seed"]
    assert data["couplings"] == sorted(data["couplings"])
    assert load_instance(path) == inst
    data["extra"] = 1
    with pytest.raises(ValueError):
        IsingInstance.from_dict(data)
