"""Qubit-oscillator coupling and hybrid Hamiltonians.

The hybrid space is qubit 1 (x) qubit 2 (x) oscillator, with the oscillator
truncated to levels 0..n_max. Frequencies are angular (rad/s).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .core import (
    IDENTITY2,
    PROJ_E,
    PROJ_G,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    ContractViolation,
    commutator,
    tensor,
)

# CODATA exact values
ELEMENTARY_CHARGE = 1.602176634e-19  # C
HBAR = 1.054571817e-34  # J s

QUBIT_LABELS = ("g", "e")


@dataclass(frozen=True)
class CircuitGeometry:
    """Lumped parameters of the resonator (or transmon) and the dot gate.

    omega_r : resonator or transmon frequency (rad/s)
    z0 : characteristic impedance (ohm)
    chi0 : capacitance division ratio C_c / (C_c + C_d)
    w : dot half-spacing (m)
    s : effective voltage distance (m)
    alpha : transmon anharmonicity (rad/s), 0 for a linear resonator
    """

    omega_r: float
    z0: float = 1e3
    chi0: float = 0.28
    w: float = 50e-9
    s: float = 100e-9
    alpha: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.chi0 < 1.0:
            raise ContractViolation(f"chi0 must lie in (0, 1), got {self.chi0}")
        if self.w <= 0 or self.s <= 0:
            raise ContractViolation("w and s must be positive")
        if self.alpha < 0:
            raise ContractViolation("alpha must be non-negative")
        if self.omega_r <= 0 or self.z0 <= 0:
            raise ContractViolation("omega_r and z0 must be positive")


def vacuum_rabi_g0(geom: CircuitGeometry) -> float:
    """Vacuum Rabi coupling g0 = (e w chi0 / s) omega_r sqrt(Z0 / (pi hbar)), rad/s."""
    return (ELEMENTARY_CHARGE * geom.w * geom.chi0 / geom.s) * geom.omega_r * math.sqrt(geom.z0 / (math.pi * HBAR))


def effective_coupling(g0: float, theta: float) -> float:
    return g0 * math.cos(theta)


@dataclass(frozen=True)
class HybridSystem:
    """Two qubits sharing one oscillator mode.

    ``ladder`` sets the oscillator matrix elements: ``"bosonic"`` uses
    <n-1|a|n> = sqrt(n); ``"unit"`` uses <n-1|a|n> = 1 (a transmon ladder with
    equal neighbouring matrix elements).
    """

    omega_q: tuple[float, float]
    g: tuple[float, float]
    omega_r: float
    n_max: int = 2
    alpha: float = 0.0
    ladder: str = "bosonic"

    def __post_init__(self):
        object.__setattr__(self, "omega_q", tuple(float(x) for x in self.omega_q))
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        if self.n_max < 1:
            raise ContractViolation(f"n_max must be >= 1, got {self.n_max}")
        if self.alpha < 0:
            raise ContractViolation("alpha must be non-negative")
        if self.ladder not in ("bosonic", "unit"):
            raise ValueError(f"unknown ladder {self.ladder!r}")

    @classmethod
    def dispersive(cls, g: float, delta_over_g: float, omega_r: float, n_max: int = 2) -> "HybridSystem":
        """Equal couplings, both qubits detuned by the same Delta above the resonator."""
        w = omega_r + delta_over_g * g
        return cls(omega_q=(w, w), g=(g, g), omega_r=omega_r, n_max=n_max)

    @classmethod
    def resonant(cls, g1: float, g2: float, omega_tr: float, alpha: float, n_max: int = 3, ladder: str = "unit") -> "HybridSystem":
        return cls(omega_q=(omega_tr, omega_tr), g=(g1, g2), omega_r=omega_tr, n_max=n_max, alpha=alpha, ladder=ladder)

    @property
    def detunings(self) -> tuple[float, float]:
        return (self.omega_q[0] - self.omega_r, self.omega_q[1] - self.omega_r)

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 4 * self.n_levels

    def with_(self, **changes) -> "HybridSystem":
        return replace(self, **changes)

    @cached_property
    def ops(self) -> "HybridOperators":
        return HybridOperators(self.n_max, self.ladder)

    def index(self, q1: str, q2: str, n: int) -> int:
        return self.ops.index(q1, q2, n)


def lowering(n_levels: int, ladder: str = "bosonic") -> np.ndarray:
    if ladder == "bosonic":
        elems = np.sqrt(np.arange(1, n_levels))
    elif ladder == "unit":
        elems = np.ones(n_levels - 1)
    else:
        raise ValueError(f"unknown ladder {ladder!r}")
    return np.diag(elems, 1).astype(complex)


@dataclass(frozen=True)
class HybridOperators:
    """Operators embedded in the qubit 1 (x) qubit 2 (x) oscillator space."""

    n_max: int
    ladder: str = "bosonic"
    a: np.ndarray = field(init=False, repr=False)
    number: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        N = self.n_max + 1
        a = tensor([IDENTITY2, IDENTITY2, lowering(N, self.ladder)])
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "number", tensor([IDENTITY2, IDENTITY2, np.diag(np.arange(N))]))

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 4 * self.n_levels

    def qubit(self, op: np.ndarray, k: int) -> np.ndarray:
        """Embed a single-qubit operator on qubit ``k`` (1 or 2)."""
        eye = np.eye(self.n_levels)
        if k == 1:
            return tensor([op, IDENTITY2, eye])
        if k == 2:
            return tensor([IDENTITY2, op, eye])
        raise ValueError(f"qubit index must be 1 or 2, got {k}")

    def oscillator(self, op: np.ndarray) -> np.ndarray:
        return tensor([IDENTITY2, IDENTITY2, op])

    def oscillator_projector(self, n: int) -> np.ndarray:
        P = np.zeros((self.n_levels, self.n_levels), dtype=complex)
        P[n, n] = 1.0
        return self.oscillator(P)

    def sz(self, k):
        return self.qubit(SIGMA_Z, k)

    def sx(self, k):
        return self.qubit(SIGMA_X, k)

    def sm(self, k):
        return self.qubit(SIGMA_MINUS, k)

    def sp(self, k):
        return self.qubit(SIGMA_PLUS, k)

    def proj_e(self, k):
        return self.qubit(PROJ_E, k)

    def proj_g(self, k):
        return self.qubit(PROJ_G, k)

    def excitation_number(self) -> np.ndarray:
        """N = a^+ a + |e><e|_1 + |e><e|_2 (photon count via the number operator)."""
        return self.number + self.proj_e(1) + self.proj_e(2)

    def index(self, q1: str, q2: str, n: int) -> int:
        i1, i2 = QUBIT_LABELS.index(q1), QUBIT_LABELS.index(q2)
        if not 0 <= n <= self.n_max:
            raise IndexError(f"oscillator level {n} outside 0..{self.n_max}")
        return (2 * i1 + i2) * self.n_levels + n

    def labels(self) -> list[str]:
        return [f"{q1}{q2}{n}" for q1 in QUBIT_LABELS for q2 in QUBIT_LABELS for n in range(self.n_levels)]

    def ket(self, label: str) -> np.ndarray:
        """Basis ket from a label like ``"ge0"`` (qubit 1, qubit 2, level)."""
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(label[0], label[1], int(label[2:]))] = 1.0
        return v


def _oscillator_diagonal(sys: HybridSystem) -> np.ndarray:
    n = np.arange(sys.n_levels)
    return np.diag(n * sys.omega_r - 0.5 * n * (n - 1) * sys.alpha).astype(complex)


def _interaction(sys: HybridSystem, rwa: bool) -> np.ndarray:
    o = sys.ops
    a = o.a
    ad = a.conj().T
    H = np.zeros((o.dim, o.dim), dtype=complex)
    for k, gk in zip((1, 2), sys.g):
        if rwa:
            H += gk * (ad @ o.sm(k) + o.sp(k) @ a)
        else:
            H += gk * o.sx(k) @ (a + ad)
    return H


def free_hamiltonian(sys: HybridSystem) -> np.ndarray:
    """Oscillator (with anharmonic shifts) plus the bare qubits, -omega/2 sigma_z each."""
    o = sys.ops
    H = o.oscillator(_oscillator_diagonal(sys))
    for k, wk in zip((1, 2), sys.omega_q):
        H = H - 0.5 * wk * o.sz(k)
    return H


def tavis_cummings_hamiltonian(sys: HybridSystem, rwa: bool = False) -> np.ndarray:
    """Two-qubit Tavis-Cummings Hamiltonian on the truncated space.

    By default the coupling is g sigma_x (a + a^+) including counter-rotating
    terms; ``rwa=True`` keeps only g (a^+ sigma_- + sigma_+ a).
    """
    if sys.alpha != 0.0:
        raise ContractViolation("tavis_cummings_hamiltonian() needs alpha = 0; use transmon_hamiltonian()")
    return free_hamiltonian(sys) + _interaction(sys, rwa)


def transmon_hamiltonian(sys: HybridSystem, rwa: bool = False) -> np.ndarray:
    """Qubits coupled to an anharmonic oscillator with levels n omega - n(n-1) alpha / 2."""
    if sys.alpha > 0 and sys.n_max < 2:
        raise ContractViolation("anharmonicity needs n_max >= 2 to act")
    return free_hamiltonian(sys) + _interaction(sys, rwa)


def rwa_interaction(sys: HybridSystem) -> np.ndarray:
    """Resonant interaction-picture Hamiltonian sum_k g_k (a^+ sigma_-^k + h.c.) on levels {0, 1}."""
    small = sys.with_(n_max=1, alpha=0.0)
    return _interaction(small, rwa=True)


def excitation_subspaces(n_max: int = 1) -> dict[str, list[str]]:
    """Basis labels of the excitation-number blocks used for the holonomic gate."""
    if n_max != 1:
        raise ValueError("subspaces S1..S4 are defined on oscillator levels {0, 1}")
    return {
        "S1": ["eg0", "ge0", "gg1"],
        "S2": ["ee0", "eg1", "ge1"],
        "S3": ["gg0"],
        "S4": ["ee1"],
    }


@dataclass(frozen=True)
class DispersiveModel:
    """Second-order dispersive reduction of the Tavis-Cummings model.

    ``chi`` is the qubit-qubit exchange rate and ``omega_tilde`` the dressed
    qubit frequencies in the +omega~/2 sigma_z convention, i.e.
    omega~ = -omega + g^2 / Delta. This matches the -omega/2 sigma_z form of
    the bare Hamiltonian up to the Lamb shift.
    """

    chi: float
    omega_tilde: tuple[float, float]
    lamb: tuple[float, float]
    detunings: tuple[float, float]
    H_tilde: np.ndarray = field(repr=False)

    @property
    def gate_time(self) -> float:
        return math.pi / (2.0 * self.chi)


def exchange_chi(g1: float, g2: float, d1: float, d2: float) -> float:
    return g1 * g2 * (d1 + d2) / (2.0 * d1 * d2)


def qubit_pair_operator(op1: np.ndarray, op2: np.ndarray) -> np.ndarray:
    return tensor([op1, op2])


def exchange_hamiltonian(chi: float) -> np.ndarray:
    """-chi (sigma_+^1 sigma_-^2 + sigma_-^1 sigma_+^2) on the two-qubit space."""
    return -chi * (qubit_pair_operator(SIGMA_PLUS, SIGMA_MINUS) + qubit_pair_operator(SIGMA_MINUS, SIGMA_PLUS))


def schrieffer_wolff_reduce(sys: HybridSystem, warn_ratio: float = 5.0) -> DispersiveModel:
    d1, d2 = sys.detunings
    if d1 == 0.0 or d2 == 0.0:
        raise ContractViolation("dispersive reduction is singular at zero detuning")
    g1, g2 = sys.g
    for gk, dk in ((g1, d1), (g2, d2)):
        if gk != 0 and abs(dk / gk) < warn_ratio:
            warnings.warn(f"|Delta/g| = {abs(dk / gk):.2f} is below {warn_ratio}; dispersive model is unreliable", stacklevel=2)
    chi = exchange_chi(g1, g2, d1, d2)
    lamb = (g1**2 / d1, g2**2 / d2)
    wt = (-sys.omega_q[0] + lamb[0], -sys.omega_q[1] + lamb[1])
    H = 0.5 * wt[0] * qubit_pair_operator(SIGMA_Z, IDENTITY2) + 0.5 * wt[1] * qubit_pair_operator(IDENTITY2, SIGMA_Z)
    H = H + exchange_hamiltonian(chi)
    return DispersiveModel(chi=chi, omega_tilde=wt, lamb=lamb, detunings=(d1, d2), H_tilde=H)


def sw_generator(sys: HybridSystem) -> np.ndarray:
    """S = sum_k (g_k / Delta_k) (a^+ sigma_-^k - sigma_+^k a)."""
    o = sys.ops
    a = o.a
    ad = a.conj().T
    S = np.zeros((o.dim, o.dim), dtype=complex)
    for k, gk, dk in zip((1, 2), sys.g, sys.detunings):
        S += (gk / dk) * (ad @ o.sm(k) - o.sp(k) @ a)
    return S


def sw_effective_hamiltonian(sys: HybridSystem) -> np.ndarray:
    """H_d0 + [S, V] / 2 built numerically, with V the rotating part of the coupling."""
    V = _interaction(sys, rwa=True)
    return free_hamiltonian(sys) + 0.5 * commutator(sw_generator(sys), V)
