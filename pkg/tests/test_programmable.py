import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstx.errors import ValidationError
from qstx.lattice import shift_hamiltonian_spectral, shift_root_spectral, shift_u
from qstx.programmable import (
    DEFAULT_MOVES,
    ProgramBank,
    chessman_hamiltonian,
    check_programmability,
    conditional_gate,
    default_switch_coupling,
    extract_data_operator,
    program_overlap_audit,
    qubot_gate,
    qubot_hamiltonian,
    reprogram,
    run_conditional,
    switch_hamiltonian,
    switch_summands,
)
from qstx.tensor import SIGMA_X, basis_state, is_hermitian, is_unitary, mat_exp_i, phase_distance, state

from helpers import ket, random_unitary

PLUS = state([1, 1], (2,))
HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def maxdiff(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def data_samples(n, count, seed=7):
    r = np.random.default_rng(seed)
    return [state(r.normal(size=n) + 1j * r.normal(size=n), (n,)) for _ in range(count)]


def programs_basis(p):
    return [basis_state((p,), (k,)) for k in range(p)]


# bank and gate construction

def test_cnot():
    assert np.array_equal(conditional_gate([np.eye(2), SIGMA_X]).matrix, CNOT)


def test_qubot_is_conditional_instance():
    u = shift_u(4)
    assert np.array_equal(conditional_gate([u, u.conj().T]).matrix, qubot_gate(4).matrix)


def test_single_op_bank(rng):
    a = random_unitary(rng, 3)
    assert np.array_equal(conditional_gate([a]).matrix, a)


def test_bank_validation():
    with pytest.raises(ValidationError):
        ProgramBank(())
    with pytest.raises(ValidationError, match="mixed"):
        ProgramBank((np.eye(2), np.eye(3)))
    with pytest.raises(ValidationError, match="not unitary"):
        ProgramBank((np.eye(2), 2 * np.eye(2)))


def test_conditional_action(rng):
    bank = [random_unitary(rng, 3) for _ in range(4)]
    gate = conditional_gate(bank)
    for k in range(4):
        for d in data_samples(3, 5):
            out = gate.matrix @ np.kron(ket(4, k), d.amplitudes)
            assert maxdiff(out, np.kron(ket(4, k), bank[k] @ d.amplitudes)) < 1e-11
    assert gate.off_block_mass() < 1e-12
    assert is_unitary(gate.matrix, 1e-10)


# reprogramming

def test_reprogram_identity():
    g = qubot_gate(5)
    assert np.array_equal(reprogram(g, np.eye(2)), g.matrix)


def test_reprogram_hadamard_is_walk_step():
    n = 5
    g = qubot_gate(n)
    step = reprogram(g, HADAMARD)
    assert maxdiff(step, np.kron(HADAMARD, np.eye(n)) @ g.matrix) < 1e-15
    assert is_unitary(step, 1e-10)


def test_reprogram_inverse(rng):
    g = qubot_gate(4)
    a = random_unitary(rng, 2)
    once = reprogram(g, a)
    back = np.kron(a.conj().T, np.eye(4)) @ once
    assert maxdiff(back, g.matrix) < 1e-12


def test_reprogram_dimension_mismatch():
    with pytest.raises(ValidationError):
        reprogram(qubot_gate(4), np.eye(3))


# programmability

def test_basis_programs_are_programmable(rng):
    bank = [random_unitary(rng, 3) for _ in range(3)]
    rep = check_programmability(conditional_gate(bank), programs_basis(3), data_samples(3, 4), tol=1e-10)
    assert rep.passed
    ent = [c.residual for c in rep.checks if c.name.endswith("max_entropy_bits")]
    assert max(ent) < 1e-10


def test_superposed_program_entangles():
    rep = check_programmability(qubot_gate(4), [PLUS], [basis_state((4,), (0,)), basis_state((4,), (2,))])
    assert not rep.passed
    ent = next(c for c in rep.checks if c.name.endswith("max_entropy_bits"))
    assert ent.residual == pytest.approx(1.0, abs=1e-10)
    assert not ent.passed


def test_superposed_program_two_site_ring():
    rep = check_programmability(qubot_gate(2), [PLUS], data_samples(2, 3))
    assert rep.passed, rep.failures


def test_programmability_needs_two_samples():
    with pytest.raises(ValidationError):
        check_programmability(qubot_gate(3), [PLUS], data_samples(3, 1))


def test_report_semantics():
    rep = check_programmability(qubot_gate(4), [PLUS], data_samples(4, 2))
    assert rep.passed == all(c.residual <= c.tolerance for c in rep.checks)
    d = rep.as_dict()
    assert d["passed"] is rep.passed
    assert len(d["checks"]) == len(rep.checks)


def test_extracted_operator_matches_bank(rng):
    bank = [random_unitary(rng, 4) for _ in range(3)]
    gate = conditional_gate(bank)
    for k in range(3):
        _, op, res = extract_data_operator(gate, basis_state((3,), (k,)), 4)
        assert res < 1e-12
        assert phase_distance(op, bank[k]) < 1e-10
        rep = check_programmability(gate, [basis_state((3,), (k,))], data_samples(4, 50, seed=k), tol=1e-10)
        assert rep.passed


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_nonorthogonal_programs_share_operator(seed):
    # if two non-orthogonal programs both pass, their operators agree up to phase
    r = np.random.default_rng(seed)
    u = random_unitary(r, 3)
    same = r.random() < 0.5
    v = u * np.exp(1j * r.uniform(0, 2 * np.pi)) if same else random_unitary(r, 3)
    gate = conditional_gate([u, v])
    p1 = basis_state((2,), (0,))
    p2 = state(r.normal(size=2) + 1j * r.normal(size=2), (2,))
    assume_nonorth = abs(np.vdot(p1.amplitudes, p2.amplitudes)) > 1e-3
    samples = data_samples(3, 3, seed=seed % 1000)
    both = check_programmability(gate, [p1, p2], samples).passed
    if both and assume_nonorth:
        ops = [extract_data_operator(gate, p, 3)[1] for p in (p1, p2)]
        assert phase_distance(*ops) < 1e-8
    if same:
        assert both


# orthogonality audit

def test_overlap_basis_passes():
    u = shift_u(4)
    bank = ProgramBank((u, u.conj().T))
    assert program_overlap_audit(programs_basis(2), bank).passed


def test_overlap_violation():
    u = shift_u(4)
    bank = ProgramBank((u, u.conj().T))
    rep = program_overlap_audit([basis_state((2,), (0,)), PLUS], bank)
    assert not rep.passed
    assert rep.failures[0].residual == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_overlap_same_operator_exempt(rng):
    u = random_unitary(rng, 3)
    rep = program_overlap_audit([basis_state((2,), (0,)), PLUS], ProgramBank((u, 1j * u)))
    assert rep.passed
    assert "0,1" in rep.notes


def test_overlap_length_mismatch():
    with pytest.raises(ValidationError):
        program_overlap_audit([PLUS], ProgramBank((np.eye(2), SIGMA_X)))


# qubot

def test_qubot_forward_wrap():
    out = qubot_gate(4).matrix @ np.kron(ket(2, 0), ket(4, 3))
    assert np.array_equal(out, np.kron(ket(2, 0), ket(4, 0)))


def test_qubot_backward_wrap():
    out = qubot_gate(4).matrix @ np.kron(ket(2, 1), ket(4, 0))
    assert np.array_equal(out, np.kron(ket(2, 1), ket(4, 3)))


def test_qubot_orthogonal():
    b = qubot_gate(4).matrix
    assert np.array_equal(b.T @ b, np.eye(8))


def test_qubot_hamiltonian():
    n = 6
    h = qubot_hamiltonian(n)
    assert is_hermitian(h, 1e-12)
    u = mat_exp_i(h, 1)
    assert maxdiff(u, qubot_gate(n).matrix) < 1e-9
    assert maxdiff(u @ np.kron(ket(2, 0), ket(n, 0)), np.kron(ket(2, 0), ket(n, 1))) < 1e-9
    assert maxdiff(u @ np.kron(ket(2, 1), ket(n, 0)), np.kron(ket(2, 1), ket(n, 5))) < 1e-9
    assert maxdiff(mat_exp_i(h, 0), np.eye(2 * n)) < 1e-15


# switch

def rail_mass(psi, n, rail):
    return float(np.sum(np.abs(psi.reshape(2, 2, n)[:, rail, :]) ** 2))


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_switch_control_zero_stays_on_rail(t):
    n = 5
    psi = np.kron(np.kron(ket(2, 0), ket(2, 0)), ket(n, 0))
    out = mat_exp_i(switch_hamiltonian(n), t) @ psi
    assert rail_mass(out, n, 1) < 1e-20


def test_switch_control_one_swaps_rails():
    n = 5
    g = default_switch_coupling(n)
    psi = np.kron(np.kron(ket(2, 1), ket(2, 0)), ket(n, 2))
    out = mat_exp_i(switch_hamiltonian(n), (math.pi / 2) / g) @ psi
    assert rail_mass(out, n, 1) == pytest.approx(1.0, abs=1e-10)


def test_switch_disabled():
    n, t = 4, 0.83
    ref = np.kron(np.eye(4), mat_exp_i(shift_hamiltonian_spectral(n), t))
    assert maxdiff(mat_exp_i(switch_hamiltonian(n, g=0), t), ref) < 1e-10


def test_switch_default_coupling():
    assert default_switch_coupling(5) == 0.5
    with pytest.raises(ValidationError):
        switch_hamiltonian(1)


@pytest.mark.parametrize("n", [2, 3, 8, 17, 32])
def test_switch_summands_commute(n):
    a, b = switch_summands(n)
    assert np.max(np.abs(a @ b - b @ a)) < 1e-12
    h = switch_hamiltonian(n)
    assert h.shape == (4 * n, 4 * n)
    assert is_hermitian(h, 1e-12)


# chessman

def chessman_block(m, n, t, k, j):
    return np.kron(shift_root_spectral(m, j * t), shift_root_spectral(n, k * t))


def test_chessman_single_forward_move():
    m, n = 3, 4
    u = mat_exp_i(chessman_hamiltonian(m, n, [(1, 0)]), 1)
    assert maxdiff(u, np.kron(np.eye(m), shift_u(n))) < 1e-9


def test_chessman_diagonal_move():
    u = mat_exp_i(chessman_hamiltonian(4, 4, [(1, 1)]), 1)
    psi = u @ np.kron(ket(4, 0), ket(4, 0))
    assert maxdiff(psi, np.kron(ket(4, 1), ket(4, 1))) < 1e-9


def test_chessman_two_site_jump():
    u = mat_exp_i(chessman_hamiltonian(3, 5, [(2, 0)]), 1)
    assert maxdiff(u, np.kron(np.eye(3), shift_root_spectral(5, 2))) < 1e-9


@pytest.mark.parametrize("move", [(1, 0), (0, -1), (2, 1), (-1, 3)])
@pytest.mark.parametrize("t", [1, 2, 5])
def test_chessman_single_move_oracle(move, t):
    m, n = 3, 4
    u = mat_exp_i(chessman_hamiltonian(m, n, [move]), t)
    assert maxdiff(u, chessman_block(m, n, t, *move)) < 1e-9


def test_chessman_multi_move_blocks():
    m, n = 3, 3
    h = chessman_hamiltonian(m, n)
    assert h.shape == (len(DEFAULT_MOVES) * 9,) * 2
    assert is_hermitian(h, 1e-12)
    u = mat_exp_i(h, 1)
    for idx, (k, j) in enumerate(DEFAULT_MOVES):
        blk = u[idx * 9:(idx + 1) * 9, idx * 9:(idx + 1) * 9]
        assert maxdiff(blk, chessman_block(m, n, 1, k, j)) < 1e-9


def test_chessman_validation():
    with pytest.raises(ValidationError, match="duplicate"):
        chessman_hamiltonian(3, 3, [(1, 0), (1, 0)])
    with pytest.raises(ValidationError):
        chessman_hamiltonian(3, 3, [])


# run_conditional

def test_run_qubot_forward_three_steps():
    out, ent = run_conditional(qubot_gate(8), basis_state((2,), (0,)), basis_state((8,), (2,)), 3)
    assert np.array_equal(out.amplitudes, np.kron(ket(2, 0), ket(8, 5)))
    assert ent == pytest.approx(0.0, abs=1e-12)


def test_run_superposed_program():
    _, ent = run_conditional(qubot_gate(8), PLUS, basis_state((8,), (0,)), 1)
    assert ent == pytest.approx(1.0, abs=1e-12)


def test_run_zero_steps():
    data = state([1, 1j, 0, 2], (4,))
    out, ent = run_conditional(qubot_gate(4), PLUS, data, 0)
    assert np.array_equal(out.amplitudes, np.kron(PLUS.amplitudes, data.amplitudes))
    assert ent == pytest.approx(0.0, abs=1e-12)


def test_run_hamiltonian_matches_gate():
    n = 6
    data = basis_state((n,), (1,))
    a, _ = run_conditional(qubot_hamiltonian(n), PLUS, data, 1.0)
    b, _ = run_conditional(qubot_gate(n), PLUS, data, 1)
    assert maxdiff(a.amplitudes, b.amplitudes) < 1e-9


def test_run_validation():
    with pytest.raises(ValidationError):
        run_conditional(qubot_gate(4), PLUS, basis_state((3,), (0,)), 1)
    with pytest.raises(ValidationError):
        run_conditional(qubot_gate(4), PLUS, basis_state((4,), (0,)), -1)
