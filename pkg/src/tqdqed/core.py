"""Dense linear algebra and open-system primitives.

Everything here works on plain ``numpy`` complex arrays. Tensor products
follow the fixed ordering qubit 1, qubit 2, oscillator. Qubit basis index 0 is
the ground state ``|g>`` and index 1 the excited state ``|e>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10

# single-qubit operators in the (g, e) basis
IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
# sigma_z = |g><g| - |e><e|
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# sigma_- = |g><e| lowers e -> g
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
PROJ_G = np.array([[1, 0], [0, 0]], dtype=complex)
PROJ_E = np.array([[0, 0], [0, 1]], dtype=complex)


class DimensionError(ValueError):
    """Raised when operator shapes are incompatible."""


class ContractViolation(ValueError):
    """Raised when an input breaks a documented precondition."""


@dataclass(frozen=True)
class LindbladChannel:
    """A jump operator paired with its rate (rad/s)."""

    operator: np.ndarray
    rate: float
    label: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise ContractViolation(f"negative rate {self.rate} for channel {self.label!r}")
        op = np.asarray(self.operator, dtype=complex)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise DimensionError(f"jump operator must be square, got {op.shape}")
        object.__setattr__(self, "operator", op)


def is_hermitian(A: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(np.max(np.abs(A)), 1.0) if A.size else 1.0
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= tol * scale)


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= tol)


def _check_square(A: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")


def tensor(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of square factors, leftmost factor slowest."""
    if len(factors) == 0:
        raise DimensionError("tensor() needs at least one factor")
    mats = [np.asarray(f, dtype=complex) for f in factors]
    for m in mats:
        _check_square(m)
    return reduce(np.kron, mats)


def basis(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def ket2dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def eig_hermitian(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    evals : ndarray
        Real eigenvalues in ascending order.
    evecs : ndarray
        Eigenvectors as columns. Each column is rephased so that its
        largest-magnitude entry is real and positive; ties go to the lowest
        index.
    """
    H = np.asarray(H, dtype=complex)
    _check_square(H)
    if not is_hermitian(H):
        raise ContractViolation("eig_hermitian() requires a Hermitian matrix")
    evals, evecs = np.linalg.eigh(H)
    for k in range(evecs.shape[1]):
        col = evecs[:, k]
        mags = np.abs(col)
        # first index within rounding of the maximum, so the choice is stable
        j = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[0])
        evecs[:, k] = col * (np.conj(col[j]) / mags[j])
    return evals, evecs


def expm_unitary(H: np.ndarray, t: float) -> np.ndarray:
    """Return exp(-i H t) for Hermitian ``H`` via its spectral decomposition."""
    evals, evecs = eig_hermitian(H)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def dissipator(L: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Lindblad dissipator (2 L rho L^+ - L^+ L rho - rho L^+ L) / 2."""
    L = np.asarray(L, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if L.shape != rho.shape:
        raise DimensionError(f"operator {L.shape} and state {rho.shape} differ in shape")
    Ld = L.conj().T
    LdL = Ld @ L
    return L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)


def lindblad_rhs(rho: np.ndarray, H: np.ndarray, channels: Sequence[LindbladChannel]) -> np.ndarray:
    """Master-equation time derivative -i[H, rho] + sum_k rate_k D[L_k] rho."""
    rho = np.asarray(rho, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if H.shape != rho.shape:
        raise DimensionError(f"Hamiltonian {H.shape} and state {rho.shape} differ in shape")
    out = -1j * commutator(H, rho)
    for ch in channels:
        out = out + ch.rate * dissipator(ch.operator, rho)
    return out


def liouvillian(H: np.ndarray, channels: Sequence[LindbladChannel]) -> np.ndarray:
    """Superoperator acting on row-major ``rho.reshape(-1)``.

    Uses vec(A rho B) = (A kron B^T) vec(rho) for row-major stacking.
    """
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    eye = np.eye(d)
    sup = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for ch in channels:
        L = ch.operator
        if L.shape != H.shape:
            raise DimensionError(f"channel {ch.label!r} has shape {L.shape}, expected {H.shape}")
        LdL = L.conj().T @ L
        sup = sup + ch.rate * (np.kron(L, L.conj()) - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T))
    return sup


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = rho - sigma
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
