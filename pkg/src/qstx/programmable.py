"""Program-controlled gates and Hamiltonians, with audits of programmability.

A conditional gate ``C = sum_k |k><k| (x) U_k`` acts on ``program (x) data``.
It behaves as a programmable gate (no program/data entanglement) only on
program states that pick out a single operator; the audits here measure that.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ValidationError
from .lattice import check_sites, shift_hamiltonian_spectral, shift_u
from .tensor import (
    PROJ_1,
    SIGMA_X,
    SIGMA_Z,
    PureState,
    as_matrix,
    entanglement_entropy,
    kron,
    mat_exp_i,
    phase_distance,
    unitary_residual,
)


class Check(NamedTuple):
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass(frozen=True)
class Report:
    checks: tuple[Check, ...]
    notes: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed}
                for c in self.checks
            ],
            "notes": self.notes,
        }


@dataclass(frozen=True)
class ProgramBank:
    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_matrix(u) for u in self.ops)
        if not ops:
            raise ValidationError("program bank must hold at least one operator")
        dims = {u.shape[0] for u in ops}
        if len(dims) != 1:
            raise ValidationError(f"program bank operators have mixed dimensions {sorted(dims)}")
        for i, u in enumerate(ops):
            res = unitary_residual(u)
            if res > 1e-10:
                raise ValidationError(f"bank operator {i} is not unitary (residual {res:.3e})")
        object.__setattr__(self, "ops", ops)

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def data_dim(self) -> int:
        return self.ops[0].shape[0]


@dataclass(frozen=True)
class ConditionalGate:
    matrix: np.ndarray
    program_dim: int
    data_dim: int
    bank: ProgramBank | None = field(default=None, compare=False, repr=False)

    def block(self, k: int, l: int | None = None) -> np.ndarray:
        """The ``(k, l)`` data block; ``l`` defaults to ``k``."""
        l = k if l is None else l
        d = self.data_dim
        return self.matrix[k * d:(k + 1) * d, l * d:(l + 1) * d]

    def off_block_mass(self) -> float:
        worst = 0.0
        for k, l in itertools.product(range(self.program_dim), repeat=2):
            if k != l:
                worst = max(worst, float(np.max(np.abs(self.block(k, l)), initial=0.0)))
        return worst


def conditional_gate(bank: ProgramBank | Sequence) -> ConditionalGate:
    """``sum_k |k><k| (x) bank.ops[k]``."""
    if not isinstance(bank, ProgramBank):
        bank = ProgramBank(tuple(bank))
    p, d = len(bank), bank.data_dim
    m = np.zeros((p * d, p * d), dtype=complex)
    for k, u in enumerate(bank.ops):
        m[k * d:(k + 1) * d, k * d:(k + 1) * d] = u
    return ConditionalGate(m, p, d, bank)


def reprogram(gate: ConditionalGate, a) -> np.ndarray:
    """Follow the gate by a unitary ``a`` on the program register: ``(a (x) I) C``."""
    a = as_matrix(a)
    if a.shape[0] != gate.program_dim:
        raise ValidationError(
            f"program operator has dimension {a.shape[0]}, gate program register has {gate.program_dim}"
        )
    return kron(a, np.eye(gate.data_dim)) @ gate.matrix


def _unwrap(gate) -> np.ndarray:
    return gate.matrix if isinstance(gate, ConditionalGate) else as_matrix(gate)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # largest-magnitude entry made real positive; ties go to the lowest index
    mag = np.abs(v)
    idx = int(np.flatnonzero(mag >= mag.max() - 1e-12)[0])
    return v * (abs(v[idx]) / v[idx])


def extract_data_operator(gate, program: PureState, data_dim: int):
    """Reconstruct the data-side operator a gate implements for ``program``.

    The gate is applied to ``program (x) |i>`` for every data basis state. The
    program-side output of column 0 (dominant Schmidt vector, phase fixed) is
    taken as reference and each column's data-side vector is read off against
    it. Returns ``(program_out, operator, product_residual)``; the residual is
    the worst distance of any column output from ``program_out (x) column``.
    """
    g = _unwrap(gate)
    p = program.dim
    if g.shape[0] != p * data_dim:
        raise ValidationError(f"gate dimension {g.shape[0]} != {p} x {data_dim}")
    # columns of g acting on program (x) e_i, reshaped to (p, d) each
    cols = np.einsum("axbi,b->iax", g.reshape(p, data_dim, p, data_dim), program.amplitudes)
    u, _, _ = np.linalg.svd(cols[0])
    prog_out = _fix_phase(u[:, 0])
    op = np.einsum("a,iax->xi", prog_out.conj(), cols)
    resid = float(np.max(np.abs(cols - np.einsum("a,xi->iax", prog_out, op))))
    return prog_out, op, resid


def check_programmability(
    gate,
    programs: Sequence[PureState],
    data_samples: Sequence[PureState],
    tol: float = 1e-8,
) -> Report:
    """Audit whether ``gate`` acts programmably for each program state.

    For every program the audit records the largest program/data entanglement
    entropy over the data samples, how far the gate output is from a product
    with a data-independent program output, whether the extracted data
    operator is unitary, and whether each sample's data output agrees with
    that operator applied to the sample.
    """
    if len(data_samples) < 2:
        raise ValidationError("need at least 2 data samples to judge operator consistency")
    g = _unwrap(gate)
    checks = []
    for pi, prog in enumerate(programs):
        d = data_samples[0].dim
        if any(s.dim != d for s in data_samples) or g.shape[0] != prog.dim * d:
            raise ValidationError(
                f"program {pi} (dim {prog.dim}) and data samples do not match gate dimension {g.shape[0]}"
            )
        prog_out, op, prod_res = extract_data_operator(g, prog, d)
        max_ent = 0.0
        consistency = 0.0
        for s in data_samples:
            joint = PureState(np.kron(prog.amplitudes, s.amplitudes), (prog.dim, d))
            out = joint.evolve(g)
            max_ent = max(max_ent, entanglement_entropy(out, 0))
            expected = np.kron(prog_out, op @ s.amplitudes)
            consistency = max(consistency, float(np.max(np.abs(out.amplitudes - expected))))
        checks += [
            Check(f"program[{pi}].max_entropy_bits", max_ent, tol),
            Check(f"program[{pi}].product_residual", prod_res, tol),
            Check(f"program[{pi}].operator_unitarity", unitary_residual(op), tol),
            Check(f"program[{pi}].sample_consistency", consistency, tol),
        ]
    return Report(tuple(checks), notes=f"{len(programs)} programs x {len(data_samples)} data samples")


def program_overlap_audit(
    programs: Sequence[PureState], bank: ProgramBank, tol: float = 1e-8
) -> Report:
    """Programs implementing operators that differ beyond a global phase must be orthogonal."""
    if len(programs) != len(bank):
        raise ValidationError(f"{len(programs)} programs for a bank of {len(bank)} operators")
    checks, exempt = [], []
    for a, b in itertools.combinations(range(len(bank)), 2):
        if phase_distance(bank.ops[a], bank.ops[b]) > tol:
            overlap = abs(np.vdot(programs[a].amplitudes, programs[b].amplitudes))
            checks.append(Check(f"overlap[{a},{b}]", float(overlap), tol))
        else:
            exempt.append(f"{a},{b}")
    notes = f"exempt (same operator up to phase): {'; '.join(exempt)}" if exempt else ""
    return Report(tuple(checks), notes=notes)


def qubot_gate(n: int) -> ConditionalGate:
    """``B = |0><0| (x) U + |1><1| (x) U^dag``: forward on |0>, backward on |1>."""
    u = shift_u(n)
    return conditional_gate(ProgramBank((u, u.conj().T)))


def qubot_hamiltonian(n: int) -> np.ndarray:
    return kron(SIGMA_Z, shift_hamiltonian_spectral(n))


def default_switch_coupling(n: int) -> float:
    n = check_sites(n)
    return 2.0 / (n - 1)


def switch_hamiltonian(n: int, g: float | None = None) -> np.ndarray:
    """Transport on either of two rails plus a rail flip conditioned on control |1>.

    Space ordering is control (2) (x) rail (2) (x) lattice (n).
    """
    n = check_sites(n)
    g = default_switch_coupling(n) if g is None else float(g)
    transport = kron(np.eye(2), np.eye(2), shift_hamiltonian_spectral(n))
    flip = kron(PROJ_1, SIGMA_X, np.eye(n))
    return transport + g * flip


def switch_summands(n: int, g: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    n = check_sites(n)
    g = default_switch_coupling(n) if g is None else float(g)
    return (
        kron(np.eye(2), np.eye(2), shift_hamiltonian_spectral(n)),
        g * kron(PROJ_1, SIGMA_X, np.eye(n)),
    )


DEFAULT_MOVES = tuple((k, j) for k in (-1, 0, 1) for j in (-1, 0, 1) if (k, j) != (0, 0))


def chessman_hamiltonian(m: int, n: int, moves: Sequence[tuple[int, int]] = DEFAULT_MOVES) -> np.ndarray:
    """Conditional generator on ``moves (x) lattice_m (x) lattice_n``.

    Control state ``|(k, j)>`` drives the n-lattice by ``k`` sites and the
    m-lattice by ``j`` sites per unit time.
    """
    m, n = check_sites(m), check_sites(n)
    moves = [tuple(int(x) for x in mv) for mv in moves]
    if not moves:
        raise ValidationError("chessman move list is empty")
    if any(len(mv) != 2 for mv in moves):
        raise ValidationError("each chessman move must be a (k, j) pair")
    if len(set(moves)) != len(moves):
        raise ValidationError(f"duplicate chessman moves in {moves}")
    along_n = kron(np.eye(m), shift_hamiltonian_spectral(n))
    along_m = kron(shift_hamiltonian_spectral(m), np.eye(n))
    c = len(moves)
    h = np.zeros((c * m * n, c * m * n), dtype=complex)
    for idx, (k, j) in enumerate(moves):
        proj = np.zeros((c, c))
        proj[idx, idx] = 1.0
        h += kron(proj, k * along_n + j * along_m)
    return h


def run_conditional(op, program: PureState, data: PureState, t=0):
    """Evolve ``program (x) data`` and report program/data entanglement.

    ``op`` is either a :class:`ConditionalGate`, applied ``t`` times (``t`` a
    non-negative integer), or a Hermitian generator evolved for time ``t``.
    Returns ``(state, entropy_bits)``.
    """
    joint = PureState(np.kron(program.amplitudes, data.amplitudes), (program.dim, data.dim))
    if isinstance(op, ConditionalGate):
        if isinstance(t, bool) or int(t) != t or t < 0:
            raise ValidationError(f"gate steps must be a non-negative integer, got {t!r}")
        if op.matrix.shape[0] != joint.dim:
            raise ValidationError(f"gate dimension {op.matrix.shape[0]} != {program.dim} x {data.dim}")
        amps = joint.amplitudes
        for _ in range(int(t)):
            amps = op.matrix @ amps
        out = PureState(amps, joint.shape)
    else:
        h = as_matrix(op)
        if h.shape[0] != joint.dim:
            raise ValidationError(f"Hamiltonian dimension {h.shape[0]} != {program.dim} x {data.dim}")
        out = joint.evolve(mat_exp_i(h, float(t)))
    return out, entanglement_entropy(out, 0)

