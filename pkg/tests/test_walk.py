import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstx.errors import ValidationError
from qstx.programmable import qubot_gate
from qstx.tensor import PureState, entanglement_entropy, is_unitary, kron, state
from qstx.walk import (
    CONVENTIONAL_HADAMARD,
    CoinSchedule,
    cascade_block,
    classical_walk_reference,
    controlled_walk_evolve,
    controlled_walk_step,
    cyclic_displacement,
    far_mass,
    make_coin,
    position_distribution,
    spread_sigma,
    walk_evolve,
    walk_step,
    walker,
)

IDENT = make_coin("rotation", 0.0)
HY = make_coin("hadamard_y")


def maxdiff(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def dense_trajectory(n, coin, steps, start):
    step = qubot_gate(n).matrix @ np.kron(coin.matrix, np.eye(n))
    return [np.linalg.matrix_power(step, t) @ start for t in range(steps + 1)]


# coins

def test_coin_matrices():
    s = 1 / math.sqrt(2)
    assert maxdiff(HY.matrix, s * np.array([[1, 1], [-1, 1]])) == 0
    assert maxdiff(make_coin("hadamard_x").matrix, s * np.array([[1, 1j], [1j, 1]])) == 0
    assert maxdiff(IDENT.matrix, np.eye(2)) == 0
    assert maxdiff(make_coin("rotation", math.pi / 2).matrix, 1j * np.array([[0, 1], [1, 0]])) < 1e-15


def test_coin_distinct_from_conventional_hadamard():
    assert maxdiff(HY.matrix, CONVENTIONAL_HADAMARD) > 0.5


@pytest.mark.parametrize("kind", ["hadamard_y", "hadamard_x"])
def test_coin_unitary_det(kind):
    m = make_coin(kind).matrix
    assert is_unitary(m, 1e-12)
    assert abs(abs(np.linalg.det(m)) - 1) < 1e-12


def test_coin_validation():
    with pytest.raises(ValidationError):
        make_coin("rotation")
    with pytest.raises(ValidationError):
        make_coin("custom", matrix=np.eye(3))
    with pytest.raises(ValidationError):
        make_coin("custom", matrix=[[1, 1], [0, 1]])
    with pytest.raises(ValidationError):
        make_coin("bogus")
    with pytest.raises(ValidationError):
        CoinSchedule(())


# steps

def test_identity_coin_uniform_motion():
    tr = walk_evolve(6, IDENT, 4, walker(6, 0))
    assert [int(np.argmax(position_distribution(w))) for w in tr] == [0, 1, 2, 3, 4]


def test_hadamard_first_step():
    dist = position_distribution(walk_evolve(8, HY, 1, walker(8, 0))[-1])
    assert maxdiff(dist, [0, 0.5, 0, 0, 0, 0, 0, 0.5]) < 1e-15


@pytest.mark.parametrize("n", [2, 5, 9])
def test_identity_coin_full_cycle(n):
    s = walk_step(n, IDENT)
    start = walker(n, 0).state.amplitudes
    assert maxdiff(np.linalg.matrix_power(s, n) @ start, start) < 1e-15


def test_step_is_shift_after_coin():
    n = 5
    assert maxdiff(walk_step(n, HY), qubot_gate(n).matrix @ kron(HY.matrix, np.eye(n))) == 0
    assert is_unitary(walk_step(n, HY), 1e-12)


def test_zero_steps():
    w = walker(8, 3, (1, 1j))
    assert walk_evolve(8, HY, 0, w) == [w]


def test_dense_oracle_sixteen():
    n, T = 16, 25
    start = walker(n, 0)
    fast = walk_evolve(n, HY, T, start)
    dense = dense_trajectory(n, HY, T, start.state.amplitudes)
    assert max(maxdiff(a.state.amplitudes, b) for a, b in zip(fast, dense)) < 1e-10
    assert [w.step_count for w in fast] == list(range(T + 1))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 32), T=st.integers(0, 50), theta=st.floats(0, math.pi), site=st.integers(0, 31))
def test_ordering_consistency(n, T, theta, site):
    coin = make_coin("rotation", theta)
    start = walker(n, site % n, (1, 1j))
    fast = walk_evolve(n, coin, T, start)
    dense = dense_trajectory(n, coin, T, start.state.amplitudes)
    assert max(maxdiff(a.state.amplitudes, b) for a, b in zip(fast, dense)) < 1e-10


def test_alternating_schedule_period_four():
    n = 16
    sched = [IDENT, make_coin("rotation", math.pi / 2)]
    tr = walk_evolve(n, sched, 12, walker(n, 0))
    peaks = [int(np.argmax(position_distribution(w))) for w in tr]
    assert peaks == [0, 1, 0, 15] * 3 + [0]
    sigmas = [spread_sigma(position_distribution(w)) for w in walk_evolve(n, sched, 12, walker(n, 0, (1, 1)))]
    assert maxdiff(sigmas[4:], sigmas[:-4]) < 1e-12
    a0 = tr[0].state.amplitudes
    assert maxdiff(tr[4].state.amplitudes, -a0) < 1e-12


def test_walk_validation():
    with pytest.raises(ValidationError):
        walk_evolve(8, HY, 2, walker(6, 0))
    with pytest.raises(ValidationError):
        walk_evolve(8, HY, -1, walker(8, 0))
    with pytest.raises(ValidationError):
        walker(8, 8)


def test_probability_conserved_long_run():
    tr = walk_evolve(32, make_coin("rotation", 0.3), 1000, walker(32, 0, (1, 1j)))
    assert max(abs(w.state.norm_sq() - 1) for w in tr) < 1e-12


# distributions

def test_fresh_walker_delta():
    assert np.array_equal(position_distribution(walker(7, 4)), np.eye(7)[4])


def test_distribution_permutation_covariant():
    n = 10
    w = walk_evolve(n, HY, 5, walker(n, 0, (1, 1j)))[-1]
    perm = np.random.default_rng(3).permutation(n)
    relabelled = PureState(w.state.tensor()[:, perm].reshape(-1), (2, n))
    assert maxdiff(position_distribution(relabelled), position_distribution(w)[perm]) < 1e-15


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 20), T=st.integers(0, 30), theta=st.floats(0, 2 * math.pi))
def test_distribution_normalized(n, T, theta):
    d = position_distribution(walk_evolve(n, make_coin("rotation", theta), T, walker(n, 0))[-1])
    assert d.min() >= 0
    assert abs(d.sum() - 1) < 1e-12


# theta continuity: measured TV jump between neighbouring grid angles

def test_theta_continuity():
    n, T, dtheta = 32, 16, 0.01
    prev, worst = None, 0.0
    for th in np.arange(0, math.pi / 2 + dtheta / 2, dtheta):
        d = position_distribution(walk_evolve(n, make_coin("rotation", float(th)), T, walker(n, 0))[-1])
        if prev is not None:
            worst = max(worst, 0.5 * float(np.abs(d - prev).sum()))
        prev = d
    assert worst < 0.05, f"max TV jump {worst:.4f}"


# controlled cascade

def test_cascade_blocks():
    coins = [HY, make_coin("rotation", 0.3), make_coin("hadamard_x")]
    n = 6
    s = controlled_walk_step(coins, n)
    b = qubot_gate(n).matrix
    assert s.shape == (36, 36)
    assert is_unitary(s, 1e-12)
    for k, c in enumerate(coins):
        cm = kron(c.matrix, np.eye(n))
        assert maxdiff(cascade_block(s, k, n), cm @ b) < 1e-12
        # conjugate to the coin-first walk step
        assert maxdiff(cm.conj().T @ cascade_block(s, k, n) @ cm, walk_step(n, c)) < 1e-12
    assert maxdiff(s, kron(np.kron(np.diag([1, 0, 0]), coins[0].matrix) + np.kron(np.diag([0, 1, 0]), coins[1].matrix)
                            + np.kron(np.diag([0, 0, 1]), coins[2].matrix), np.eye(n)) @ kron(np.eye(3), b)) < 1e-15


@pytest.mark.parametrize("k", [0, 1])
def test_fixed_control_matches_single_coin_walk(k):
    coins = [HY, make_coin("rotation", 0.7)]
    n, T = 12, 15
    start = walker(n, 2, (1, 1j))
    ctrl = state(np.eye(2)[k], (2,))
    cascade = controlled_walk_evolve(coins, n, T, ctrl, start)
    c = coins[k].matrix
    # (X B)^T = X (B X)^T X^dag with X = coin (x) I
    shifted = PureState(np.kron(c.conj().T, np.eye(n)) @ start.state.amplitudes, (2, n))
    single = walk_evolve(n, coins[k], T, type(start)(shifted))
    for a, b in zip(cascade, single):
        expect = np.kron(np.eye(2)[k], np.kron(c, np.eye(n)) @ b.state.amplitudes)
        assert maxdiff(a.amplitudes, expect) < 1e-10
        assert maxdiff(position_distribution(a), position_distribution(b)) < 1e-10


def test_deterministic_bank():
    tr = controlled_walk_evolve([IDENT], 5, 3, state([1], (1,)), walker(5, 0))
    assert int(np.argmax(position_distribution(tr[-1]))) == 3


def test_control_superposition_entangles():
    tr = controlled_walk_evolve([HY, make_coin("hadamard_x")], 16, 10, state([1, 1], (2,)), walker(16, 0))
    assert entanglement_entropy(tr[-1], 0) > 1e-3


def test_controlled_validation():
    with pytest.raises(ValidationError):
        controlled_walk_step([np.eye(3)], 4)
    with pytest.raises(ValidationError):
        controlled_walk_evolve([HY, IDENT], 4, 1, state([1, 0, 0], (3,)), walker(4, 0))


# classical reference

def test_classical_two_steps():
    d = classical_walk_reference(7, 2)
    assert maxdiff(d, [0.5, 0, 0.25, 0, 0, 0.25, 0]) < 1e-15


def test_classical_deterministic():
    assert np.array_equal(classical_walk_reference(6, 9, p_right=1.0), np.eye(6)[3])


def test_classical_bad_probability():
    with pytest.raises(ValidationError):
        classical_walk_reference(6, 2, p_right=1.5)


def test_classical_matches_monte_carlo():
    n, T, samples = 64, 20, 10**6
    r = np.random.default_rng(20070801)
    moves = np.where(r.random((samples, T)) < 0.5, 1, -1).sum(axis=1)
    emp = np.bincount(moves % n, minlength=n) / samples
    exact = classical_walk_reference(n, T)
    sigma = np.sqrt(exact * (1 - exact) / samples)
    assert np.all(np.abs(emp - exact) <= 3 * sigma + 1e-15)


# spread

def test_sigma_delta():
    assert spread_sigma(np.eye(9)[0], 0) == 0.0


def test_sigma_classical():
    assert spread_sigma(classical_walk_reference(101, 2), 0) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_quantum_spreads_faster():
    n, T = 128, 40
    q = spread_sigma(position_distribution(walk_evolve(n, HY, T, walker(n, 0))[-1]))
    c = spread_sigma(classical_walk_reference(n, T))
    assert q > 2 * c


def test_displacement_range():
    d = cyclic_displacement(8, 3)
    assert d.min() == -4 and d.max() == 3
    assert d[3] == 0


def test_far_mass():
    assert far_mass(np.eye(16)[8], 0) == 1.0
    assert far_mass(np.eye(16)[2], 0) == 0.0
