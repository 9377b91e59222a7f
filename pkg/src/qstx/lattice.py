"""Shift operator on an N-site ring, its fractional powers and its generator.

Two independent constructions are provided for both the fractional shift
``U(alpha)`` and the Hamiltonian ``H_U``: a spectral one through the DFT and a
closed-form one evaluated entry by entry. They are meant to check each other.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .tensor import dft_matrix


def check_sites(n) -> int:
    """Validate a lattice size; a single-site ring is rejected."""
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ValidationError(f"lattice size must be an integer >= 2, got {n!r}")
    return int(n)


def varpi(n: int) -> float:
    """Diagonal of ``H_U`` and phase slope of the kernel, ``pi (n - 1) / n``."""
    n = check_sites(n)
    return math.pi * (n - 1) / n


def shift_u(n: int) -> np.ndarray:
    """Cyclic shift ``U|j> = |j+1 mod n>``."""
    n = check_sites(n)
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


def clock_v(n: int, alpha: float) -> np.ndarray:
    n = check_sites(n)
    k = np.arange(n)
    return np.diag(np.exp(2j * np.pi * alpha * k / n))


def shift_root_spectral(n: int, alpha: float) -> np.ndarray:
    """``U(alpha) = F^dag V(alpha) F``."""
    n = check_sites(n)
    f = dft_matrix(n)
    phases = np.exp(2j * np.pi * alpha * np.arange(n) / n)
    return f.conj().T @ (phases[:, None] * f)


def sinc_kernel(n: int, x):
    """Periodic kernel ``exp(i varpi x) sin(pi x) / (n sin(pi x / n))``.

    The kernel has period ``n`` in ``x``, so the argument is first reduced to
    ``[-n/2, n/2]``; this keeps the phase accurate for large ``x`` and leaves
    only one removable singularity, at ``x = 0``, where the limit is 1.
    """
    n = check_sites(n)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValidationError("kernel argument must be finite")
    r = x - n * np.round(x / n)
    small = np.abs(r) < 1e-12
    safe = np.where(small, 1.0, r)
    ratio = np.where(small, 1.0, np.sin(np.pi * safe) / (n * np.sin(np.pi * safe / n)))
    out = np.exp(1j * varpi(n) * r) * ratio
    return out[()] if out.ndim == 0 else out


def shift_root_closed(n: int, alpha: float) -> np.ndarray:
    """``U(alpha)[j, k] = kernel(k - j + alpha)``."""
    n = check_sites(n)
    j, k = np.indices((n, n))
    return sinc_kernel(n, k - j + float(alpha))


def shift_hamiltonian_spectral(n: int) -> np.ndarray:
    """``H_U = F^dag K F`` with ``K = diag(2 pi k / n)``, so ``exp(i H_U t) = U(t)``."""
    n = check_sites(n)
    f = dft_matrix(n)
    k = 2 * np.pi * np.arange(n) / n
    h = f.conj().T @ (k[:, None] * f)
    return 0.5 * (h + h.conj().T)


def shift_hamiltonian_closed(n: int) -> np.ndarray:
    """Entry-wise ``H_U``: ``varpi`` on the diagonal and
    ``(2 pi / n) / (exp(2 pi i (k - j) / n) - 1)`` off it."""
    n = check_sites(n)
    j, k = np.indices((n, n))
    d = (k - j) % n
    off = d != 0
    z = np.exp(2j * np.pi * np.where(off, d, 1) / n)
    h = np.where(off, (2 * np.pi / n) / (z - 1), 0.0).astype(complex)
    np.fill_diagonal(h, varpi(n))
    return h


def weyl_commutator_phase(n: int, alpha: float, beta: float) -> float:
    """Max entry-wise gap between ``V(beta) U(alpha)`` and ``exp(2 pi i alpha beta / n) U(alpha) V(beta)``.

    Vanishes for integer ``alpha`` and ``beta``.
    """
    n = check_sites(n)
    u = shift_root_spectral(n, alpha)
    v = clock_v(n, beta)
    lhs = v @ u
    rhs = np.exp(2j * np.pi * alpha * beta / n) * (u @ v)
    return float(np.max(np.abs(lhs - rhs)))
