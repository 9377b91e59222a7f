"""Executable invariant suite behind ``qstx verify``.

Each entry measures one property and compares it against a bound. Entries are
grouped by module; the ``acceptance`` group holds the end-to-end criteria.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lattice, programmable, transfer, walk
from .tensor import (
    PureState,
    basis_state,
    dft_matrix,
    entanglement_entropy,
    kron,
    mat_exp_i,
    max_abs_diff,
    partial_trace,
    phase_distance,
    state,
    unitary_residual,
)

MODULES = (
    "tensor-core",
    "shift-lattice",
    "programmable-dynamics",
    "perfect-transfer",
    "coined-walk",
    "cli",
    "acceptance",
)

SEED = 20070801


@dataclass(frozen=True)
class Outcome:
    module: str
    name: str
    measured: float
    bound: float
    relation: str  # "<=" or ">="
    seconds: float = 0.0
    note: str = ""

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        if self.relation == "<=":
            return self.measured <= self.bound
        return self.measured >= self.bound

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        text = (
            f"{tag}  {self.module}/{self.name}  measured={self.measured:.3e} "
            f"{self.relation} {self.bound:.3e}  ({self.seconds:.2f}s)"
        )
        return f"{text}  {self.note}" if self.note else text


_REGISTRY: list[tuple[str, str, str, Callable]] = []


def invariant(module: str, name: str, relation: str = "<="):
    def deco(fn):
        _REGISTRY.append((module, name, relation, fn))
        return fn

    return deco


def entries(selection: str = "all") -> list[tuple[str, str, str, Callable]]:
    if selection != "all" and selection not in MODULES:
        raise ValueError(f"unknown module {selection!r}; choose 'all' or one of {', '.join(MODULES)}")
    return [e for e in _REGISTRY if selection in ("all", e[0])]


def _normalize(res, relation):
    """A check returns ``(measured, bound[, note])`` or a list of
    ``(label, measured, bound[, relation])`` sub-measurements."""
    if isinstance(res, list):
        return [(f":{r[0]}", r[1], r[2], r[3] if len(r) > 3 else relation, "") for r in res]
    return [("", res[0], res[1], relation, res[2] if len(res) > 2 else "")]


def run_suite(selection: str = "all", echo: Callable[[str], None] | None = None) -> list[Outcome]:
    out = []
    for module, name, relation, fn in entries(selection):
        t0 = time.perf_counter()
        try:
            parts = _normalize(fn(), relation)
        except Exception as exc:  # a crashing check is a failing check
            parts = [("", math.inf, 0.0, relation, f"error: {type(exc).__name__}: {exc}")]
        dt = time.perf_counter() - t0
        for label, measured, bound, rel, note in parts:
            o = Outcome(module, name + label, float(measured), float(bound), rel, dt, note)
            out.append(o)
            if echo:
                echo(o.line())
    return out


def _rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


def _rand_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def _rand_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _rand_state(rng, shape):
    v = rng.normal(size=math.prod(shape)) + 1j * rng.normal(size=math.prod(shape))
    return state(v, shape)


# ---------------------------------------------------------------- tensor-core

@invariant("tensor-core", "exp-group-law")
def _exp_group_law():
    rng = _rng()
    worst = 0.0
    for d in (2, 3, 4, 8):
        for _ in range(10):
            h = _rand_hermitian(rng, d)
            s, t = rng.uniform(-5, 5, 2)
            worst = max(worst, max_abs_diff(mat_exp_i(h, s) @ mat_exp_i(h, t), mat_exp_i(h, s + t)))
    return worst, 1e-10


@invariant("tensor-core", "dft-unitary-n<=512")
def _dft_unitary():
    return max(unitary_residual(dft_matrix(n)) for n in range(1, 513)), 1e-11


@invariant("tensor-core", "kron-associative-exact")
def _kron_assoc():
    rng = _rng()
    worst = 0.0
    for _ in range(10):
        a, b, c = (rng.integers(-4, 5, (2, 2)) + 1j * rng.integers(-4, 5, (2, 2)) for _ in range(3))
        worst = max(worst, max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))))
    return worst, 0.0


@invariant("tensor-core", "entropy-cut-symmetry")
def _entropy_symmetry():
    rng = _rng()
    worst = 0.0
    for shape in ((2, 3), (2, 2, 4), (3, 2, 2, 2)):
        st = _rand_state(rng, shape)
        k = len(shape)
        for cut in range(1, k):
            side = list(range(cut))
            other = list(range(cut, k))
            worst = max(worst, abs(entanglement_entropy(st, side) - entanglement_entropy(st, other)))
    return worst, 1e-10


@invariant("tensor-core", "partial-trace-unit-trace")
def _ptrace_trace():
    rng = _rng()
    worst = 0.0
    for shape in ((2, 3), (2, 2, 5), (4, 3, 2)):
        st = _rand_state(rng, shape)
        for k in range(len(shape)):
            worst = max(worst, abs(np.trace(partial_trace(st, k)) - 1))
    return worst, 1e-12


# -------------------------------------------------------------- shift-lattice

@invariant("shift-lattice", "group-law-both-constructions")
def _group_law():
    rng = _rng()
    worst = 0.0
    for n in range(2, 65):
        a, b = rng.uniform(-3, 3, 2)
        for build in (lattice.shift_root_spectral, lattice.shift_root_closed):
            worst = max(worst, max_abs_diff(build(n, a) @ build(n, b), build(n, a + b)))
    return worst, 1e-10


@invariant("shift-lattice", "periodicity-alpha+n")
def _periodicity():
    rng = _rng()
    worst = 0.0
    for n in range(2, 65):
        a = rng.uniform(-3, 3)
        for build in (lattice.shift_root_spectral, lattice.shift_root_closed):
            worst = max(worst, max_abs_diff(build(n, a + n), build(n, a)))
    return worst, 1e-10


@invariant("shift-lattice", "oracle-equivalence-n<=128")
def _oracle_equivalence():
    rng = _rng()
    worst = 0.0
    for n in range(2, 129):
        for a in rng.uniform(-3, 3, 3):
            worst = max(worst, max_abs_diff(lattice.shift_root_closed(n, a), lattice.shift_root_spectral(n, a)))
        worst = max(worst, max_abs_diff(lattice.shift_hamiltonian_closed(n), lattice.shift_hamiltonian_spectral(n)))
    return worst, 1e-10


def localization_violations(sizes, alphas_int=range(-3, 4), builder=None) -> int:
    builder = builder or lattice.shift_root_closed
    bad = 0
    for n in sizes:
        for a in alphas_int:
            mags = np.abs(builder(n, a)[:, 0])
            if np.count_nonzero(mags > 1e-8) != 1 or mags.max() <= 1 - 1e-8:
                bad += 1
            half = np.abs(builder(n, a + 0.5)[:, 0])
            if np.count_nonzero(half > 1 / n) < math.ceil(n / 2):
                bad += 1
    return bad


@invariant("shift-lattice", "localization-dichotomy")
def _localization():
    return localization_violations(range(2, 33)), 0


@invariant("shift-lattice", "generator-identity")
def _generator_identity():
    worst = 0.0
    for n in range(2, 65):
        h = lattice.shift_hamiltonian_spectral(n)
        for t in (0.25, 1.0, math.sqrt(2), 7.5):
            worst = max(worst, max_abs_diff(mat_exp_i(h, t), lattice.shift_root_spectral(n, t)))
    return worst, 1e-9


# ------------------------------------------------------ programmable-dynamics

@invariant("programmable-dynamics", "block-structure")
def _block_structure():
    rng = _rng()
    worst = 0.0
    for p, d in ((2, 2), (3, 4), (4, 3)):
        g = programmable.conditional_gate([_rand_unitary(rng, d) for _ in range(p)])
        worst = max(worst, g.off_block_mass())
    for n in (2, 5, 9):
        worst = max(worst, programmable.qubot_gate(n).off_block_mass())
    return worst, 1e-12


@invariant("programmable-dynamics", "programmable-on-basis-programs")
def _prog_compliance():
    rng = _rng()
    worst = 0.0
    for p, d in ((2, 3), (3, 4)):
        bank = programmable.ProgramBank(tuple(_rand_unitary(rng, d) for _ in range(p)))
        g = programmable.conditional_gate(bank)
        samples = [_rand_state(rng, (d,)) for _ in range(50)]
        for k in range(p):
            prog = basis_state((p,), (k,))
            _, op, _ = programmable.extract_data_operator(g, prog, d)
            worst = max(worst, phase_distance(op, bank.ops[k]))
            rep = programmable.check_programmability(g, [prog], samples, tol=1e-10)
            worst = max(worst, max(c.residual for c in rep.checks))
    return worst, 1e-10


@invariant("programmable-dynamics", "nonorthogonal-programs-imply-equal-operators")
def _ortprog_contrapositive():
    rng = _rng()
    worst = 0.0
    passing_pairs = 0
    d = 3
    u = _rand_unitary(rng, d)
    banks = [
        [u, np.exp(0.7j) * u],
        [u, _rand_unitary(rng, d)],
        [u, u.conj().T],
        [np.eye(d), np.diag([1, 1, -1])],
    ]
    for ops in banks:
        g = programmable.conditional_gate(ops)
        samples = [_rand_state(rng, (d,)) for _ in range(6)]
        progs = [basis_state((2,), (0,)), state([1, 1]), _rand_state(rng, (2,))]
        verdict = []
        for prog in progs:
            rep = programmable.check_programmability(g, [prog], samples, tol=1e-8)
            _, op, _ = programmable.extract_data_operator(g, prog, d)
            verdict.append((prog, rep.passed, op))
        for i in range(len(verdict)):
            for j in range(i + 1, len(verdict)):
                pa, oka, opa = verdict[i]
                pb, okb, opb = verdict[j]
                if oka and okb and abs(np.vdot(pa.amplitudes, pb.amplitudes)) > 1e-8:
                    passing_pairs += 1
                    worst = max(worst, phase_distance(opa, opb))
    # qubot on a 2-site ring: forward and backward shifts coincide
    g2 = programmable.qubot_gate(2)
    samples2 = [basis_state((2,), (0,)), basis_state((2,), (1,))]
    ops2 = []
    for prog in (basis_state((2,), (0,)), state([1, 1])):
        if programmable.check_programmability(g2, [prog], samples2).passed:
            ops2.append(programmable.extract_data_operator(g2, prog, 2)[1])
    if len(ops2) == 2:
        passing_pairs += 1
        worst = max(worst, phase_distance(*ops2))
    return worst, 1e-8, f"{passing_pairs} passing non-orthogonal pairs examined"


@invariant("programmable-dynamics", "switch-commutator-n<=32")
def _switch_commutation():
    worst = 0.0
    for n in range(2, 33):
        a, b = programmable.switch_summands(n)
        worst = max(worst, float(np.max(np.abs(a @ b - b @ a))))
    return worst, 1e-12


@invariant("programmable-dynamics", "chessman-matches-shift-oracles")
def _chessman():
    worst = 0.0
    m, n = 3, 4
    for move in ((1, 0), (0, 1), (1, 1), (-1, 2), (2, -1)):
        h = programmable.chessman_hamiltonian(m, n, [move])
        for t in (1, 2, 3):
            k, j = move
            oracle = kron(lattice.shift_root_closed(m, j * t), lattice.shift_root_closed(n, k * t))
            worst = max(worst, max_abs_diff(mat_exp_i(h, t), oracle))
    return worst, 1e-9


# ----------------------------------------------------------- perfect-transfer

@invariant("perfect-transfer", "isospectrality-n<=64")
def _isospectral():
    worst = 0.0
    for n in range(2, 65):
        jx = transfer.spin_operators(n).jx
        a = np.linalg.eigvalsh((2 * math.pi / n) * jx + lattice.varpi(n) * np.eye(n))
        b = np.linalg.eigvalsh(lattice.shift_hamiltonian_spectral(n))
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst, 1e-9


@invariant("perfect-transfer", "Ox-conjugation-n<=64")
def _ox_conjugation():
    worst = 0.0
    for n in range(2, 65):
        o = transfer.basis_change_Ox(n)
        conj = o @ transfer.rescaled_lattice_hamiltonian(n) @ o.conj().T
        worst = max(worst, max_abs_diff(conj, transfer.spin_operators(n).jx))
    return worst, 1e-9


def mirror_defect(n: int) -> float:
    mirror = transfer.mirror_map(n)
    return float(max(1 - abs(mirror[n - 1 - m, m]) for m in range(n)))


@invariant("perfect-transfer", "mirror-property")
def _mirror():
    return max(mirror_defect(n) for n in range(2, 33)), 1e-9


@invariant("perfect-transfer", "return-at-2pi-over-omega")
def _return_period():
    worst = 0.0
    for n in (2, 5, 8, 16):
        for omega in (0.5, 1.0, 2.0):
            h = transfer.pst_hamiltonian(n, omega)
            worst = max(worst, 1 - transfer.transfer_fidelity(h, 2 * math.pi / omega, 0, 0))
    return worst, 1e-9


@invariant("perfect-transfer", "switch-commutator")
def _pst_switch_commutation():
    worst = 0.0
    for n in range(2, 33):
        a, b = transfer.pst_switch_summands(n)
        worst = max(worst, float(np.max(np.abs(a @ b - b @ a))))
    return worst, 1e-12


# ---------------------------------------------------------------- coined-walk

@invariant("coined-walk", "probability-conserved-1000-steps")
def _prob_conservation():
    worst = 0.0
    for coin in (walk.make_coin("hadamard_y"), walk.make_coin("rotation", 0.3)):
        traj = walk.walk_evolve(32, coin, 1000, walk.walker(32, 0))
        worst = max(worst, max(abs(ws.state.norm_sq() - 1) for ws in traj))
    return worst, 1e-12


@invariant("coined-walk", "ordering-consistency")
def _ordering():
    worst = 0.0
    coins = (walk.make_coin("hadamard_y"), walk.make_coin("hadamard_x"), walk.make_coin("rotation", 0.4))
    for n in (2, 7, 16, 32):
        for coin in coins:
            step = walk.walk_step(n, coin)
            start = walk.walker(n, 1 % n, (1, 1j))
            traj = walk.walk_evolve(n, coin, 50, start)
            dense = start.state.amplitudes
            for t in range(51):
                worst = max(worst, max_abs_diff(traj[t].state.amplitudes, dense))
                dense = step @ dense
    return worst, 1e-10


@invariant("coined-walk", "control-block-reduction")
def _block_reduction():
    worst = 0.0
    coins = [walk.make_coin("hadamard_y"), walk.make_coin("rotation", 0.3), walk.make_coin("hadamard_x")]
    for n in (3, 8):
        s = walk.controlled_walk_step(coins, n)
        b = programmable.qubot_gate(n).matrix
        for k, c in enumerate(coins):
            worst = max(worst, max_abs_diff(walk.cascade_block(s, k, n), kron(c.matrix, np.eye(n)) @ b))
            for l in range(len(coins)):
                if l != k:
                    blk = s[k * 2 * n:(k + 1) * 2 * n, l * 2 * n:(l + 1) * 2 * n]
                    worst = max(worst, float(np.max(np.abs(blk))))
    return worst, 1e-12


def theta_tv_jump(n: int = 32, steps: int = 16, dtheta: float = 0.01) -> tuple[float, float]:
    """Largest total-variation change between neighbouring grid angles, and where it occurs."""
    thetas = np.arange(0.0, math.pi / 2 + dtheta / 2, dtheta)
    prev, worst, where = None, 0.0, 0.0
    for th in thetas:
        traj = walk.walk_evolve(n, walk.make_coin("rotation", float(th)), steps, walk.walker(n, 0))
        dist = walk.position_distribution(traj[-1])
        if prev is not None:
            tv = 0.5 * float(np.abs(dist - prev).sum())
            if tv > worst:
                worst, where = tv, float(th)
        prev = dist
    return worst, where


@invariant("coined-walk", "theta-continuity-tv")
def _theta_continuity():
    worst, where = theta_tv_jump()
    return worst, 0.05, f"largest jump ending at theta={where:.2f}"


# ------------------------------------------------------------------------ cli

@invariant("cli", "determinism-byte-identical")
def _cli_determinism():
    from .cli import render, run_scenario

    cfgs = [
        {"scenario": "shift", "n": 8, "alpha": 0.5},
        {"scenario": "walk", "n": 8, "coin": "hadamard_y", "steps": 3},
        {"scenario": "audit", "n": 4, "program": "0;+"},
    ]
    mismatches = 0
    for cfg in cfgs:
        for fmt in ("json", "csv"):
            a = render(run_scenario(dict(cfg)), fmt)
            b = render(run_scenario(dict(cfg)), fmt)
            mismatches += a != b
    return mismatches, 0


@invariant("cli", "validation-precedes-computation")
def _cli_validation_first():
    from . import cli

    bad = [
        {"scenario": "shift", "n": 1, "alpha": 0.5},
        {"scenario": "pst", "n": 8, "omega": 0},
        {"scenario": "walk", "n": 8, "coin": "bogus"},
        {"scenario": "chessman", "n": 4, "moves": "1,0;1,0"},
        {"scenario": "qubot", "n": 4, "steps": -1},
        {"scenario": "shift", "n": 4},
    ]
    before = cli.BUILD_COUNTER["runs"]
    escaped = 0
    for cfg in bad:
        try:
            cli.run_scenario(cfg)
            escaped += 1
        except cli.UsageError:
            pass
    return escaped + (cli.BUILD_COUNTER["runs"] - before), 0


@invariant("cli", "scenarios-documented")
def _cli_documented():
    from .cli import SCENARIOS, build_parser

    text = build_parser().format_help()
    missing = [s for s in SCENARIOS if s not in text or not SCENARIOS[s].formula]
    return len(missing), 0


# ----------------------------------------------------------------- acceptance

@invariant("acceptance", "01-generator-identity")
def _acc1():
    return _generator_identity()


@invariant("acceptance", "02-dual-construction-equivalence")
def _acc2():
    rng = _rng()
    worst = 0.0
    for n in range(2, 129):
        for a in rng.uniform(-3, 3, 20):
            worst = max(worst, max_abs_diff(lattice.shift_root_closed(n, a), lattice.shift_root_spectral(n, a)))
        worst = max(worst, max_abs_diff(lattice.shift_hamiltonian_closed(n), lattice.shift_hamiltonian_spectral(n)))
    return worst, 1e-10


@invariant("acceptance", "03-root-property")
def _acc3():
    worst = 0.0
    for n in (4, 16, 64):
        u = lattice.shift_u(n)
        for m in (2, 3, 5, 8):
            for build in (lattice.shift_root_spectral, lattice.shift_root_closed):
                worst = max(worst, max_abs_diff(np.linalg.matrix_power(build(n, 1 / m), m), u))
    return worst, 1e-9


@invariant("acceptance", "04-localization-dichotomy")
def _acc4():
    return localization_violations((8, 32)), 0


@invariant("acceptance", "05-attenuation-law")
def _acc5():
    h = lattice.shift_hamiltonian_closed(1024)
    vals = [abs(h[j, j + d]) * d for j in range(0, 1024 - 8, 97) for d in range(1, 9)]
    vals += [abs(h[j + d, j]) * d for j in range(0, 1024 - 8, 97) for d in range(1, 9)]
    return max(abs(v - 1) for v in vals), 0.05


@invariant("acceptance", "06-programmability-contrapositive")
def _acc6():
    flags = {"basis-audit-passes": 0, "basis-overlap-passes": 0, "nonorthogonal-audit-fails": 0,
             "nonorthogonal-overlap-fails": 0}
    ent_err = 0.0
    sizes = (3, 4, 8)
    for n in sizes:
        g = programmable.qubot_gate(n)
        data = [basis_state((n,), (i,)) for i in range(n)]
        basis = [basis_state((2,), (0,)), basis_state((2,), (1,))]
        plus = state([1, 1])
        bank = programmable.ProgramBank((lattice.shift_u(n), lattice.shift_u(n).conj().T))
        flags["basis-audit-passes"] += programmable.check_programmability(g, basis, data).passed
        flags["basis-overlap-passes"] += programmable.program_overlap_audit(basis, bank).passed
        flags["nonorthogonal-audit-fails"] += not programmable.check_programmability(g, [basis[0], plus], data).passed
        flags["nonorthogonal-overlap-fails"] += not programmable.program_overlap_audit([basis[0], plus], bank).passed
        _, ent = programmable.run_conditional(g, plus, data[0], 1)
        ent_err = max(ent_err, abs(ent - 1.0))
    _, ent2 = programmable.run_conditional(programmable.qubot_gate(2), state([1, 1]), basis_state((2,), (0,)), 1)
    out = [(k, v, len(sizes), ">=") for k, v in flags.items()]
    out += [("entropy-1bit-n>=3", ent_err, 1e-6), ("entropy-0bit-n=2", abs(ent2), 1e-10)]
    return out


@invariant("acceptance", "07-lattice-spin-equivalence")
def _acc7():
    a = _isospectral()[0]
    b = _ox_conjugation()[0]
    return max(a, b), 1e-9


@invariant("acceptance", "08-perfect-state-transfer")
def _acc8():
    worst = 0.0
    for n in range(2, 33):
        for omega in (0.5, 1.0, 2.0):
            f = transfer.transfer_fidelity(transfer.pst_hamiltonian(n, omega), math.pi / omega, 0, n - 1)
            worst = max(worst, abs(1 - f))
        worst = max(worst, mirror_defect(n))
    return worst, 1e-9


def switch_defects(n: int, g: float | None = None) -> tuple[float, float, float]:
    """(leak for control |0>, swap defect for control |1>, commutator norm)."""
    g = programmable.default_switch_coupling(n) if g is None else g
    h = programmable.switch_hamiltonian(n, g)
    leak = 0.0
    for t in (0.5, 1.0, 3.0, 7.25):
        psi = mat_exp_i(h, t) @ np.kron([1, 0], np.kron([1, 0], np.eye(n)[0]))
        leak = max(leak, float(np.sum(np.abs(psi.reshape(2, 2, n)[:, 1, :]) ** 2)))
    t_swap = (math.pi / 2) / g
    psi = mat_exp_i(h, t_swap) @ np.kron([0, 1], np.kron([1, 0], np.eye(n)[0]))
    rails = (np.abs(psi.reshape(2, 2, n)) ** 2).sum(axis=(0, 2))
    a, b = programmable.switch_summands(n, g)
    return leak, abs(rails[1] - 1.0), float(np.max(np.abs(a @ b - b @ a)))


@invariant("acceptance", "09-switch-behavior")
def _acc9():
    leak = swap = comm = 0.0
    for n in (2, 5, 8, 16):
        for g in (None, 0.3):
            a, b, c = switch_defects(n, g)
            leak, swap, comm = max(leak, a), max(swap, b), max(comm, c)
    return [("control0-leak", leak, 1e-12), ("control1-swap", swap, 1e-10), ("commutator", comm, 1e-12)]


@invariant("acceptance", "10-walk-correctness")
def _acc10():
    n, steps = 16, 25
    coin = walk.make_coin("hadamard_y")
    start = walk.walker(n, 0)
    traj = walk.walk_evolve(n, coin, steps, start)
    step = walk.walk_step(n, coin)
    traj_err = max(
        max_abs_diff(traj[t].state.amplitudes, np.linalg.matrix_power(step, t) @ start.state.amplitudes)
        for t in range(steps + 1)
    )
    d1 = walk.position_distribution(walk.walk_evolve(8, coin, 1, walk.walker(8, 0))[-1])
    expect = np.zeros(8)
    expect[1] = expect[7] = 0.5
    one_step = max_abs_diff(d1, expect)
    det = walk.walk_evolve(n, walk.make_coin("rotation", 0.0), 5, walk.walker(n, 0))
    det_err = max(1 - walk.position_distribution(ws)[t % n] for t, ws in enumerate(det))
    return [
        ("trajectory-vs-dense", traj_err, 1e-10),
        ("hadamard_y-one-step", one_step, 1e-12),
        ("rotation0-deterministic", det_err, 1e-12),
        ("cascade-blocks", _block_reduction()[0], 1e-12),
    ]


@invariant("acceptance", "11-quantum-vs-classical-spread", relation=">=")
def _acc11():
    n, steps = 128, 40
    traj = walk.walk_evolve(n, walk.make_coin("hadamard_y"), steps, walk.walker(n, 0))
    q = walk.spread_sigma(walk.position_distribution(traj[-1]), 0)
    c = walk.spread_sigma(walk.classical_walk_reference(n, steps, 0.5), 0)
    return q / c, 2.0, f"quantum sigma {q:.4f}, classical sigma {c:.4f}"
