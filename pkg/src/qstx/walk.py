"""Coined quantum walks on an n-cycle driven by the qubot shift.

One step applies the coin to the internal register and then the conditional
shift ``B``, i.e. the step operator is ``B (C (x) I)``. A coin schedule cycles
through a list of coins, one per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .lattice import check_sites
from .programmable import ProgramBank, conditional_gate, qubot_gate
from .tensor import SIGMA_X, PureState, as_matrix, kron, unitary_residual

COIN_KINDS = ("hadamard_y", "hadamard_x", "rotation", "custom")

# Conventional (sigma_x + sigma_z)/sqrt(2); differs from the hadamard_y coin.
CONVENTIONAL_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class Coin:
    matrix: np.ndarray
    label: str

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (2, 2):
            raise ValidationError(f"coin must be 2x2, got {m.shape}")
        res = unitary_residual(m)
        if res > 1e-12:
            raise ValidationError(f"coin {self.label!r} is not unitary (residual {res:.3e})")
        object.__setattr__(self, "matrix", m)


def make_coin(kind: str, theta: float | None = None, matrix=None) -> Coin:
    """Build a named coin.

    ``hadamard_y`` is ``(I + i sigma_y)/sqrt(2) = [[1, 1], [-1, 1]]/sqrt(2)``,
    ``hadamard_x`` is ``(I + i sigma_x)/sqrt(2)`` and ``rotation`` is
    ``exp(i theta sigma_x)``. ``custom`` wraps a user matrix.
    """
    if kind == "hadamard_y":
        m = np.array([[1, 1], [-1, 1]], dtype=complex) / math.sqrt(2)
        return Coin(m, kind)
    if kind == "hadamard_x":
        return Coin(np.array([[1, 1j], [1j, 1]]) / math.sqrt(2), kind)
    if kind == "rotation":
        if theta is None:
            raise ValidationError("rotation coin needs theta")
        m = math.cos(theta) * np.eye(2) + 1j * math.sin(theta) * SIGMA_X
        return Coin(m, f"rotation({theta!r})")
    if kind == "custom":
        if matrix is None:
            raise ValidationError("custom coin needs a matrix")
        return Coin(matrix, "custom")
    raise ValidationError(f"unknown coin kind {kind!r}; expected one of {COIN_KINDS}")


@dataclass(frozen=True)
class CoinSchedule:
    coins: tuple[Coin, ...]

    def __post_init__(self):
        coins = tuple(self.coins)
        if not coins:
            raise ValidationError("coin schedule is empty")
        object.__setattr__(self, "coins", coins)

    def coin_at(self, step: int) -> Coin:
        return self.coins[step % len(self.coins)]


def as_schedule(coins) -> CoinSchedule:
    if isinstance(coins, CoinSchedule):
        return coins
    if isinstance(coins, Coin):
        return CoinSchedule((coins,))
    return CoinSchedule(tuple(coins))


@dataclass(frozen=True)
class WalkState:
    state: PureState
    step_count: int = 0

    def __post_init__(self):
        if self.step_count < 0:
            raise ValidationError("step_count must be >= 0")


def walker(n: int, site: int = 0, coin_state=(1, 0)) -> WalkState:
    """Walker localized at ``site`` with internal state ``coin_state``."""
    n = check_sites(n)
    if not 0 <= site < n:
        raise ValidationError(f"start site {site} out of range [0, {n})")
    c = np.asarray(coin_state, dtype=complex)
    if c.shape != (2,):
        raise ValidationError("coin state must have 2 amplitudes")
    c = c / np.linalg.norm(c)
    pos = np.zeros(n, dtype=complex)
    pos[site] = 1.0
    return WalkState(PureState(np.kron(c, pos), (2, n)))


def walk_step(n: int, coin: Coin) -> np.ndarray:
    """Dense one-step operator ``B (coin (x) I_n)``."""
    n = check_sites(n)
    return qubot_gate(n).matrix @ kron(coin.matrix, np.eye(n))


def walk_evolve(n: int, schedule, steps: int, initial: WalkState) -> list[WalkState]:
    """Trajectory of ``steps + 1`` states; step ``t`` uses ``schedule.coin_at(t)``."""
    n = check_sites(n)
    schedule = as_schedule(schedule)
    if int(steps) != steps or steps < 0:
        raise ValidationError(f"steps must be a non-negative integer, got {steps!r}")
    if initial.state.shape != (2, n):
        raise ValidationError(f"walk state shape {initial.state.shape} != (2, {n})")
    out = [initial]
    psi = initial.state.tensor().copy()
    for t in range(int(steps)):
        psi = schedule.coin_at(t).matrix @ psi
        psi = np.stack([np.roll(psi[0], 1), np.roll(psi[1], -1)])
        out.append(WalkState(PureState(psi.reshape(-1), (2, n)), initial.step_count + t + 1))
    return out


def position_distribution(ws) -> np.ndarray:
    """Site probabilities, summing over coin and control registers."""
    st = ws.state if isinstance(ws, WalkState) else ws
    probs = np.abs(st.tensor()) ** 2
    dist = probs.reshape(-1, st.shape[-1]).sum(axis=0)
    return dist / dist.sum()


def _coin_bank(bank) -> ProgramBank:
    if isinstance(bank, ProgramBank):
        ops = bank.ops
    else:
        ops = tuple(c.matrix if isinstance(c, Coin) else as_matrix(c) for c in bank)
    if any(u.shape != (2, 2) for u in ops):
        raise ValidationError("controlled walk coins must all be 2x2")
    return bank if isinstance(bank, ProgramBank) else ProgramBank(ops)


def controlled_walk_step(bank, n: int) -> np.ndarray:
    """Cascade ``(C (x) I_n)(I_c (x) B)`` on control (x) coin (x) lattice.

    ``C`` selects coin ``bank[k]`` for control ``|k>``. Note the shift acts
    before the coin here, so the control-``k`` block is ``(U_k (x) I) B``.
    """
    n = check_sites(n)
    bank = _coin_bank(bank)
    c = conditional_gate(bank).matrix
    return kron(c, np.eye(n)) @ kron(np.eye(len(bank)), qubot_gate(n).matrix)


def cascade_block(step: np.ndarray, k: int, n: int) -> np.ndarray:
    """The ``2n x 2n`` block of a cascade step acting when the control is ``|k>``."""
    d = 2 * n
    return step[k * d:(k + 1) * d, k * d:(k + 1) * d]


def controlled_walk_evolve(bank, n: int, steps: int, control: PureState, initial: WalkState) -> list[PureState]:
    """Trajectory of ``control (x) walker`` under repeated cascade steps."""
    bank = _coin_bank(bank)
    if control.dim != len(bank):
        raise ValidationError(f"control dimension {control.dim} != bank size {len(bank)}")
    if initial.state.shape != (2, n):
        raise ValidationError(f"walk state shape {initial.state.shape} != (2, {n})")
    s = controlled_walk_step(bank, n)
    cur = PureState(np.kron(control.amplitudes, initial.state.amplitudes), (len(bank), 2, n))
    out = [cur]
    for _ in range(int(steps)):
        cur = cur.evolve(s)
        out.append(cur)
    return out


def classical_walk_reference(n: int, steps: int, p_right: float = 0.5, start: int = 0) -> np.ndarray:
    """Exact distribution of a classical +-1 random walk on the n-cycle, by convolution."""
    n = check_sites(n)
    if not 0.0 <= p_right <= 1.0:
        raise ValidationError(f"p_right must lie in [0, 1], got {p_right}")
    dist = np.zeros(n)
    dist[start % n] = 1.0
    for _ in range(int(steps)):
        dist = p_right * np.roll(dist, 1) + (1 - p_right) * np.roll(dist, -1)
    return dist


def cyclic_displacement(n: int, origin: int) -> np.ndarray:
    """Minimal signed displacement of each site from ``origin``, in ``[-n/2, n/2)``."""
    return (np.arange(n) - origin + n // 2) % n - n // 2


def spread_sigma(dist, origin: int = 0) -> float:
    dist = np.asarray(dist, dtype=float)
    d = cyclic_displacement(dist.size, origin)
    mean = float(np.dot(dist, d))
    var = float(np.dot(dist, d**2)) - mean**2
    return math.sqrt(max(var, 0.0))


def far_mass(dist, origin: int = 0) -> float:
    """Probability beyond a quarter-ring from ``origin``; large values spoil ``spread_sigma``."""
    dist = np.asarray(dist, dtype=float)
    d = cyclic_displacement(dist.size, origin)
    return float(dist[np.abs(d) > dist.size / 4].sum())
