"""Programmable quantum state transfer on cyclic lattices and spin chains."""
from .errors import CapacityError, QstxError, ValidationError
from .lattice import (
    clock_v,
    shift_hamiltonian_closed,
    shift_hamiltonian_spectral,
    shift_root_closed,
    shift_root_spectral,
    shift_u,
    sinc_kernel,
    varpi,
    weyl_commutator_phase,
)
from .programmable import (
    Check,
    ConditionalGate,
    ProgramBank,
    Report,
    chessman_hamiltonian,
    check_programmability,
    conditional_gate,
    program_overlap_audit,
    qubot_gate,
    qubot_hamiltonian,
    reprogram,
    run_conditional,
    switch_hamiltonian,
)
from .tensor import (
    PureState,
    basis_state,
    dft_matrix,
    entanglement_entropy,
    is_hermitian,
    is_unitary,
    kron,
    mat_exp_i,
    partial_trace,
    product_state,
    state,
)
from .transfer import (
    SpinRep,
    basis_change_Ox,
    conditional_pst_hamiltonian,
    coupling_profile,
    pst_hamiltonian,
    pst_switch_hamiltonian,
    spin_operators,
    transfer_fidelity,
)
from .walk import (
    Coin,
    CoinSchedule,
    WalkState,
    classical_walk_reference,
    controlled_walk_step,
    make_coin,
    position_distribution,
    spread_sigma,
    walk_evolve,
    walk_step,
    walker,
)

__version__ = "0.1.0"
