"""Spin-(n-1)/2 picture of lattice transport and perfect state transfer.

Everything is in dimensionless units: spin matrices have spectra
``{-j, ..., j}`` and the lattice generator maps onto them through
``(n / 2 pi) (H_U - varpi I)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .lattice import check_sites, shift_hamiltonian_spectral, varpi
from .tensor import PROJ_1, SIGMA_X, SIGMA_Z, as_matrix, dft_matrix, kron, mat_exp_i


@dataclass(frozen=True)
class SpinRep:
    """Angular momentum matrices for spin ``j = (n - 1)/2``, basis ordered ``m = j, j-1, ..., -j``."""

    n: int
    j: float
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def jplus(self) -> np.ndarray:
        return self.jx + 1j * self.jy


def spin_operators(n: int) -> SpinRep:
    n = check_sites(n)
    j = (n - 1) / 2
    m = j - np.arange(n)
    # <m+1| J+ |m> on the superdiagonal, since m descends with the index
    jp = np.diag(np.sqrt((j - m[1:]) * (j + m[1:] + 1)), 1).astype(complex)
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    return SpinRep(n, j, jx, jy, np.diag(m).astype(complex))


def coupling_profile(n: int, omega: float = 1.0) -> list[float]:
    """Nearest-neighbour couplings ``omega sqrt(k (n - k)) / 2`` for bonds ``k = 1..n-1``."""
    n = check_sites(n)
    return [omega * math.sqrt(k * (n - k)) / 2 for k in range(1, n)]


def pst_hamiltonian(n: int, omega: float = 1.0) -> np.ndarray:
    """``omega J_x`` as a tridiagonal chain Hamiltonian."""
    n = check_sites(n)
    if omega == 0:
        raise ValidationError("omega must be non-zero")
    bonds = np.array(coupling_profile(n, omega))
    return (np.diag(bonds, 1) + np.diag(bonds, -1)).astype(complex)


def rescaled_lattice_hamiltonian(n: int) -> np.ndarray:
    """``(n / 2 pi) (H_U - varpi I)``, the lattice generator on the spin scale."""
    n = check_sites(n)
    return (n / (2 * math.pi)) * (shift_hamiltonian_spectral(n) - varpi(n) * np.eye(n))


def basis_change_Ox(n: int) -> np.ndarray:
    """Unitary taking the rescaled lattice generator to ``J_x``.

    ``F`` diagonalizes the lattice generator with eigenvalues ascending in the
    momentum index, a reversal puts them in the ``m`` order of ``J_z``, and a
    rotation by ``pi/2`` about y turns ``J_z`` into ``J_x``.
    """
    n = check_sites(n)
    spin = spin_operators(n)
    reverse = np.eye(n)[::-1]
    rot = mat_exp_i(spin.jy, -math.pi / 2)
    return rot @ reverse @ dft_matrix(n)


def transfer_fidelity(h, t: float, source: int, target: int) -> float:
    """``|<target| exp(i h t) |source>|``."""
    h = as_matrix(h)
    dim = h.shape[0]
    for name, site in (("source", source), ("target", target)):
        if isinstance(site, bool) or int(site) != site or not 0 <= site < dim:
            raise ValidationError(f"{name} site {site!r} out of range [0, {dim})")
    col = mat_exp_i(h, t)[:, int(source)]
    return float(min(abs(col[int(target)]), 1.0))


def conditional_pst_hamiltonian(n: int) -> np.ndarray:
    """``sigma_z (x) J_x``: control |0> runs ``+J_x``, control |1> runs ``-J_x``."""
    return kron(SIGMA_Z, spin_operators(n).jx)


def pst_switch_hamiltonian(n: int, g: float | None = None) -> np.ndarray:
    """``I (x) I (x) J_x + g |1><1| (x) sigma_x (x) I`` on control (x) rail (x) chain."""
    transport, flip = pst_switch_summands(n, g)
    return transport + flip


def pst_switch_summands(n: int, g: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    n = check_sites(n)
    g = 2.0 / (n - 1) if g is None else float(g)
    return kron(np.eye(2), np.eye(2), spin_operators(n).jx), g * kron(PROJ_1, SIGMA_X, np.eye(n))


def mirror_map(n: int) -> np.ndarray:
    """``exp(i pi J_x)``; sends site ``m`` to ``n - 1 - m`` up to a phase."""
    return mat_exp_i(spin_operators(n).jx, math.pi)


def mirror_phases(n: int) -> np.ndarray:
    """Phases ``arg <n-1-m| exp(i pi J_x) |m>``; representation dependent, reported as-is."""
    mirror = mirror_map(n)
    return np.angle(mirror[::-1].diagonal())
