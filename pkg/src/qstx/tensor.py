"""Dense complex linear-algebra primitives shared by every other module.

Matrices are plain ``numpy`` complex128 arrays. States carry their tensor
factorization explicitly through :class:`PureState` so that partial traces and
entanglement cuts can be taken by factor index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, ValidationError

DIM_CAP = 2**20

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PROJ_0 = np.array([[1, 0], [0, 0]], dtype=complex)
PROJ_1 = np.array([[0, 0], [0, 1]], dtype=complex)


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def hermitian_residual(m) -> float:
    a = as_matrix(m)
    return float(np.max(np.abs(a - a.conj().T)))


def unitary_residual(m) -> float:
    a = as_matrix(m)
    return float(np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0]))))


def is_hermitian(m, tol: float = 1e-10) -> bool:
    return hermitian_residual(m) <= tol


def is_unitary(m, tol: float = 1e-10) -> bool:
    return unitary_residual(m) <= tol


def max_abs_diff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def phase_distance(u, v) -> float:
    """``1 - |tr(u^dag v)|/d``: zero iff u and v agree up to a global phase."""
    u, v = as_matrix(u), as_matrix(v)
    if u.shape != v.shape:
        raise ValidationError(f"shape mismatch {u.shape} vs {v.shape}")
    return float(max(0.0, 1.0 - abs(np.trace(u.conj().T @ v)) / u.shape[0]))


def validate_shape(factors: Sequence[int], cap: int = DIM_CAP) -> tuple[int, ...]:
    shape = tuple(int(f) for f in factors)
    if not shape:
        raise ValidationError("tensor shape needs at least one factor")
    if any(f < 1 for f in shape):
        raise ValidationError(f"all factor dimensions must be >= 1, got {shape}")
    if math.prod(shape) > cap:
        raise CapacityError(f"total dimension {math.prod(shape)} exceeds cap {cap}")
    return shape


@dataclass(frozen=True)
class PureState:
    """State vector over a tensor product space with factor dimensions ``shape``."""

    amplitudes: np.ndarray
    shape: tuple[int, ...]

    def __post_init__(self):
        shape = validate_shape(self.shape)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != math.prod(shape):
            raise ValidationError(
                f"{amps.size} amplitudes do not fit shape {shape} (need {math.prod(shape)})"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "PureState":
        nrm = math.sqrt(self.norm_sq())
        if nrm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return PureState(self.amplitudes / nrm, self.shape)

    def tensor(self) -> np.ndarray:
        """Amplitudes as an array with one axis per factor."""
        return self.amplitudes.reshape(self.shape)

    def evolve(self, unitary) -> "PureState":
        u = as_matrix(unitary)
        if u.shape[0] != self.dim:
            raise ValidationError(f"operator dimension {u.shape[0]} != state dimension {self.dim}")
        return PureState(u @ self.amplitudes, self.shape)


def state(amplitudes, shape: Sequence[int] | None = None, normalize: bool = True) -> PureState:
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    s = PureState(amps, tuple(shape) if shape is not None else (amps.size,))
    return s.normalized() if normalize else s


def basis_state(shape: Sequence[int], index: Sequence[int]) -> PureState:
    shape = validate_shape(shape)
    if len(index) != len(shape) or any(not 0 <= i < d for i, d in zip(index, shape)):
        raise ValidationError(f"basis index {tuple(index)} invalid for shape {shape}")
    amps = np.zeros(math.prod(shape), dtype=complex)
    amps[np.ravel_multi_index(tuple(index), shape)] = 1.0
    return PureState(amps, shape)


def product_state(*parts: PureState) -> PureState:
    if not parts:
        raise ValidationError("product_state needs at least one factor")
    amps = parts[0].amplitudes
    shape = parts[0].shape
    for p in parts[1:]:
        validate_shape(shape + p.shape)
        amps = np.kron(amps, p.amplitudes)
        shape = shape + p.shape
    return PureState(amps, shape)


def kron(*mats, cap: int = DIM_CAP) -> np.ndarray:
    """Kronecker product of one or more square matrices, left factor outermost."""
    if not mats:
        raise ValidationError("kron needs at least one matrix")
    mats = [as_matrix(m) for m in mats]
    dim = math.prod(m.shape[0] for m in mats)
    if dim > cap:
        raise CapacityError(f"kron result dimension {dim} exceeds cap {cap}")
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def mat_exp_i(h, t: float, tol: float = 1e-10) -> np.ndarray:
    """Return ``exp(i h t)`` for Hermitian ``h`` via its eigendecomposition."""
    h = as_matrix(h)
    res = hermitian_residual(h)
    if res > tol:
        raise ValidationError(f"generator is not Hermitian: max |h - h^dag| = {res:.3e} > {tol:g}")
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w * t)) @ v.conj().T


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT with the *positive* exponent: ``F[j, k] = exp(+2 pi i j k / n) / sqrt(n)``.

    This is the conjugate of ``numpy.fft``'s forward transform matrix.
    """
    if int(n) != n or n < 1:
        raise ValidationError(f"DFT size must be a positive integer, got {n!r}")
    n = int(n)
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n) / math.sqrt(n)


def _as_factor_list(idx, nfactors: int) -> list[int]:
    items = [idx] if isinstance(idx, (int, np.integer)) else list(idx)
    out = []
    for i in items:
        if int(i) != i or not 0 <= i < nfactors:
            raise ValidationError(f"factor index {i!r} out of range for {nfactors} factors")
        out.append(int(i))
    if len(set(out)) != len(out):
        raise ValidationError(f"duplicate factor indices {items}")
    return out


def _bipartite(st: PureState, keep: list[int]) -> np.ndarray:
    rest = [i for i in range(len(st.shape)) if i not in keep]
    t = np.transpose(st.tensor(), keep + rest)
    dk = math.prod(st.shape[i] for i in keep)
    return t.reshape(dk, -1)


def partial_trace(st: PureState, keep) -> np.ndarray:
    """Reduced density matrix of the factor(s) ``keep``, tracing out the rest."""
    m = _bipartite(st, _as_factor_list(keep, len(st.shape)))
    return m @ m.conj().T


def entanglement_entropy(st: PureState, cut) -> float:
    """Von Neumann entropy in bits across the bipartition ``cut | rest``."""
    side = _as_factor_list(cut, len(st.shape))
    if not side or len(side) == len(st.shape):
        raise ValidationError("both sides of the cut must be non-empty")
    m = _bipartite(st, side)
    s = np.linalg.svd(m, compute_uv=False)
    p = s**2
    p = p / p.sum()
    p = p[p > 1e-14]
    ent = float(-np.sum(p * np.log2(p)))
    return min(max(ent, 0.0), math.log2(min(m.shape)))
