"""Entangling-gate targets and protocols on the hybrid two-qubit system.

Gate matrices act on the zero-photon computational subspace listed in
``GATE_ORDER`` = (gg, eg, ge, ee). With this ordering the cyclic holonomic
evolution reproduces ``ideal_holonomic`` entry by entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .core import ContractViolation, expm_unitary, ket2dm
from .coupling import (
    HybridSystem,
    exchange_hamiltonian,
    free_hamiltonian,
    rwa_interaction,
    schrieffer_wolff_reduce,
    tavis_cummings_hamiltonian,
    transmon_hamiltonian,
)
from .lindblad import DecoherenceRates, Trajectory, build_channels, integrate

GATE_ORDER = ("gg", "eg", "ge", "ee")
DEFAULT_SAMPLES = 2000


@dataclass(frozen=True)
class GateSpec:
    """Timing and target of one gate run.

    ``kind`` is ``"iswap_dispersive"`` or ``"holonomic_resonant"``; ``frame``
    names the frame in which ``target`` is defined.
    """

    kind: str
    duration: float
    frame: str
    target: np.ndarray = field(repr=False)
    phi_mix: float | None = None


@dataclass(frozen=True)
class BrightDarkFrame:
    """Bright/dark decomposition of the single-excitation block.

    ``bright`` and ``dark`` are coefficient pairs on (|e,g,0>, |g,e,0>).
    ``bright`` is signed so that the block Hamiltonian reads
    Omega |g,g,1><b| + h.c.; ``bright2`` is the analogue on (|g,e,1>, |e,g,1>)
    coupled to |e,e,0>.
    """

    omega: float
    phi_mix: float
    bright: np.ndarray
    dark: np.ndarray
    bright2: np.ndarray
    dark2: np.ndarray


def ideal_iswap(chi: float, t: float) -> np.ndarray:
    """Exchange evolution under -chi (s+ s- + s- s+), in ``GATE_ORDER``."""
    c, s = math.cos(chi * t), math.sin(chi * t)
    return np.array(
        [[1, 0, 0, 0],
         [0, c, 1j * s, 0],
         [0, 1j * s, c, 0],
         [0, 0, 0, 1]],
        dtype=complex,
    )


def ideal_holonomic(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array(
        [[1, 0, 0, 0],
         [0, c, s, 0],
         [0, s, -c, 0],
         [0, 0, 0, -1]],
        dtype=complex,
    )


def mixing_angle(g1: float, g2: float) -> float:
    """phi_mix in (-pi, pi] with tan(phi_mix / 2) = -g1 / g2.

    For g2 > 0 the half angle lies in (-pi/2, pi/2), so sin(phi_mix/2) has the
    sign of -g1. Equal positive couplings give -pi/2; the +pi/2 gate differs
    from it only by the sign of one qubit's excited state.
    """
    if g1 == 0.0 and g2 == 0.0:
        raise ContractViolation("mixing angle undefined when both couplings vanish")
    phi = 2.0 * math.atan2(-g1, g2)
    if phi <= -math.pi:
        phi += 2.0 * math.pi
    elif phi > math.pi:
        phi -= 2.0 * math.pi
    return phi


def bright_dark(g1: float, g2: float) -> BrightDarkFrame:
    omega = math.hypot(g1, g2)
    if omega == 0.0:
        raise ContractViolation("bright/dark frame needs at least one nonzero coupling")
    b = np.array([g1, g2], dtype=complex) / omega
    d = np.array([g2, -g1], dtype=complex) / omega
    return BrightDarkFrame(
        omega=omega,
        phi_mix=mixing_angle(g1, g2),
        bright=b,
        dark=d,
        bright2=b.copy(),
        dark2=d.copy(),
    )


def holonomic_unitary_extended(g1: float, g2: float) -> tuple[np.ndarray, list[str]]:
    """Closed-form cyclic evolution on qubits (x) levels {0, 1}.

    Returns the 8x8 unitary in the natural tensor order and the basis labels.
    In S1 and S2 the bright state and the auxiliary state pick up -1 and the
    dark state is untouched; |g,g,0> and |e,e,1> are idle.
    """
    ops = HybridSystem((0.0, 0.0), (g1, g2), 0.0, n_max=1).ops
    bd = bright_dark(g1, g2)
    U = np.eye(8, dtype=complex)
    b1 = bd.bright[0] * ops.ket("eg0") + bd.bright[1] * ops.ket("ge0")
    b2 = bd.bright2[0] * ops.ket("ge1") + bd.bright2[1] * ops.ket("eg1")
    for vec in (b1, b2, ops.ket("gg1"), ops.ket("ee0")):
        U -= 2.0 * np.outer(vec, vec.conj())
    return U, ops.labels()


def embed_levels(op: np.ndarray, n_from: int, n_to: int) -> np.ndarray:
    """Embed an operator on qubits (x) levels 0..n_from into 0..n_to (zero padding)."""
    if n_to < n_from:
        raise ValueError("target truncation must not be smaller")
    a, b = n_from + 1, n_to + 1
    idx = np.array([q * b + n for q in range(4) for n in range(a)])
    out = np.zeros((4 * b, 4 * b), dtype=complex)
    out[np.ix_(idx, idx)] = op
    return out


def computational_indices(sys: HybridSystem) -> list[int]:
    return [sys.index(lab[0], lab[1], 0) for lab in GATE_ORDER]


def computational_block(U: np.ndarray, sys: HybridSystem) -> np.ndarray:
    idx = computational_indices(sys)
    return U[np.ix_(idx, idx)]


def phase_aligned_distance(U: np.ndarray, V: np.ndarray) -> float:
    """max |U - e^{i a} V| with the global phase a fitted from the trace overlap."""
    overlap = np.trace(V.conj().T @ U)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(U - phase * V)))


def exchange_populations(chi: float, times) -> dict[str, np.ndarray]:
    """Populations of |e,g> and |g,e> under the exchange Hamiltonian from |g,e>."""
    H = exchange_hamiltonian(chi)
    # natural two-qubit order: gg, ge, eg, ee
    psi0 = np.array([0, 1, 0, 0], dtype=complex)
    times = np.asarray(times, dtype=float)
    pe, pg = np.empty(times.size), np.empty(times.size)
    for i, t in enumerate(times):
        psi = expm_unitary(H, t) @ psi0
        pe[i] = abs(psi[2]) ** 2
        pg[i] = abs(psi[1]) ** 2
    return {"eg": pe, "ge": pg}


def _frame_energies(H0: np.ndarray) -> np.ndarray:
    return np.real(np.diag(H0)).copy()


def rotate_to_frame(rho: np.ndarray, energies: np.ndarray, t: float) -> np.ndarray:
    """U^+ rho U with U = exp(-i diag(energies) t)."""
    phase = np.exp(1j * energies * t)
    return phase[:, None] * rho * phase.conj()[None, :]


def _frame_fidelity(traj: Trajectory, target: np.ndarray, energies: np.ndarray) -> np.ndarray:
    phases = np.exp(1j * np.outer(traj.times, energies))
    rotated = phases[:, :, None] * traj.states * phases.conj()[:, None, :]
    return np.real(np.einsum("ij,tji->t", target, rotated))


def iswap_gate_spec(sys: HybridSystem) -> GateSpec:
    model = schrieffer_wolff_reduce(sys)
    return GateSpec(
        kind="iswap_dispersive",
        duration=model.gate_time,
        frame="dispersive_rotating",
        target=ideal_iswap(model.chi, model.gate_time),
    )


def holonomic_gate_spec(sys: HybridSystem) -> GateSpec:
    bd = bright_dark(*sys.g)
    return GateSpec(
        kind="holonomic_resonant",
        duration=math.pi / bd.omega,
        frame="interaction",
        target=ideal_holonomic(bd.phi_mix),
        phi_mix=bd.phi_mix,
    )


@dataclass(frozen=True)
class GateRun:
    spec: GateSpec
    trajectory: Trajectory
    target_state: np.ndarray = field(repr=False)
    fidelity: float
    frame_fidelity: np.ndarray = field(repr=False)


def _time_grid(T: float, samples: int) -> np.ndarray:
    return np.linspace(0.0, T, samples + 1)


def _shift_qubits(sys: HybridSystem, offsets) -> HybridSystem:
    if offsets is None:
        return sys
    return sys.with_(omega_q=(sys.omega_q[0] + offsets[0], sys.omega_q[1] + offsets[1]))


def run_iswap_protocol(
    sys: HybridSystem,
    rates: DecoherenceRates,
    rho0: np.ndarray | None = None,
    rwa: bool = True,
    tol: float = 1e-9,
    samples: int = DEFAULT_SAMPLES,
    qubit_offsets: tuple[float, float] | None = None,
) -> GateRun:
    """Dispersive exchange gate of duration pi / (2 chi).

    The Tavis-Cummings Hamiltonian is evolved in the lab frame and each state
    is rotated into the frame of the dressed qubit frequencies before the
    fidelity is taken. ``rwa=False`` keeps the counter-rotating coupling,
    whose Bloch-Siegert shift the second-order exchange rate does not include.
    ``qubit_offsets`` shifts the qubit frequencies of the evolved Hamiltonian
    only (quasi-static detuning noise); timing keeps the nominal values.
    """
    d1, d2 = sys.detunings
    if d1 == 0.0 or d2 == 0.0:
        raise ContractViolation("the dispersive iSWAP needs nonzero qubit-resonator detuning")
    if not math.isclose(d1, d2, rel_tol=1e-12) or not math.isclose(sys.g[0], sys.g[1], rel_tol=1e-12):
        raise ContractViolation("the iSWAP protocol assumes equal detunings and equal dressed frequencies")
    if sys.alpha != 0.0:
        raise ContractViolation("the iSWAP protocol uses a linear resonator (alpha = 0)")
    model = schrieffer_wolff_reduce(sys)
    spec = iswap_gate_spec(sys)
    ops = sys.ops
    if rho0 is None:
        rho0 = ket2dm(ops.ket("ge0"))
    rho0 = np.asarray(rho0, dtype=complex)

    # ideal evolution: exchange on the zero-photon block, in the dressed frame
    U = np.eye(sys.dim, dtype=complex)
    idx = computational_indices(sys)
    U[np.ix_(idx, idx)] = spec.target
    target = U @ rho0 @ U.conj().T

    H = tavis_cummings_hamiltonian(_shift_qubits(sys, qubit_offsets), rwa=rwa)
    channels = build_channels(rates, sys)
    traj = integrate(rho0, H, channels, _time_grid(spec.duration, samples), tol=tol, target=target, labels=ops.labels())

    frame = 0.5 * model.omega_tilde[0] * ops.sz(1) + 0.5 * model.omega_tilde[1] * ops.sz(2) + sys.omega_r * ops.number
    frame_fid = _frame_fidelity(traj, target, _frame_energies(frame))
    return GateRun(spec=spec, trajectory=traj, target_state=target, fidelity=float(frame_fid[-1]), frame_fidelity=frame_fid)


def _pulse(shape: str) -> Callable[[float, float], float]:
    if shape == "square":
        return lambda t, T: 1.0
    if shape == "sin2":
        # unit mean over [0, T], so the pulse area matches the square pulse
        return lambda t, T: 2.0 * math.sin(math.pi * t / T) ** 2
    raise ValueError(f"unknown pulse shape {shape!r}")


def run_holonomic_protocol(
    sys: HybridSystem,
    rates: DecoherenceRates,
    rho0: np.ndarray | None = None,
    rwa: bool = False,
    tol: float = 1e-9,
    samples: int = DEFAULT_SAMPLES,
    pulse_shape: str = "square",
    qubit_offsets: tuple[float, float] | None = None,
) -> GateRun:
    """Resonant holonomic entangler, duration pi / Omega.

    Evolves the anharmonic-oscillator Hamiltonian in the lab frame and
    measures fidelity in the interaction frame of the bare Hamiltonian, where
    the ideal map is the cyclic bright-state evolution. The default initial
    state is |g,e,1>, whose ideal image is |e,g,1> up to sign for equal
    couplings.
    """
    if not (math.isclose(sys.omega_q[0], sys.omega_r) and math.isclose(sys.omega_q[1], sys.omega_r)):
        raise ContractViolation("holonomic protocol needs both qubits resonant with the oscillator")
    if sys.n_max < 3:
        raise ContractViolation("holonomic protocol needs n_max >= 3 to resolve leakage")
    spec = holonomic_gate_spec(sys)
    ops = sys.ops
    if rho0 is None:
        rho0 = ket2dm(ops.ket("ge1"))
    rho0 = np.asarray(rho0, dtype=complex)
    outside = [i for i, lab in enumerate(ops.labels()) if int(lab[2:]) > 1]
    if np.max(np.abs(rho0[outside]), initial=0.0) > 0:
        raise ContractViolation("initial state must live on oscillator levels {0, 1}")

    U_small, _ = holonomic_unitary_extended(*sys.g)
    U = embed_levels(U_small, 1, sys.n_max)
    # idle identity on levels >= 2 keeps U unitary on the full space
    for i in outside:
        U[i, i] = 1.0
    target = U @ rho0 @ U.conj().T

    H_free = free_hamiltonian(sys)
    H_int = transmon_hamiltonian(sys, rwa=rwa) - H_free
    H_evolved_free = _with_offsets(H_free, sys, qubit_offsets)
    if pulse_shape == "square":
        H = H_evolved_free + H_int
    else:
        f = _pulse(pulse_shape)
        T = spec.duration

        def H(t):
            return H_evolved_free + f(t, T) * H_int

    channels = build_channels(rates, sys)
    traj = integrate(rho0, H, channels, _time_grid(spec.duration, samples), tol=tol, target=target, labels=ops.labels())
    frame_fid = _frame_fidelity(traj, target, _frame_energies(H_free))
    return GateRun(spec=spec, trajectory=traj, target_state=target, fidelity=float(frame_fid[-1]), frame_fidelity=frame_fid)


def _with_offsets(H: np.ndarray, sys: HybridSystem, offsets) -> np.ndarray:
    if offsets is None:
        return H
    ops = sys.ops
    return H - 0.5 * offsets[0] * ops.sz(1) - 0.5 * offsets[1] * ops.sz(2)


@dataclass(frozen=True)
class HolonomyReport:
    parallel_transport: float
    cyclic_leakage: float
    unitary_error: float
    dark_drift: float
    excitation_drift: float
    leakage: dict[str, float] = field(default_factory=dict)
    leakage_gg2: dict[str, float] = field(default_factory=dict)


def holonomy_conditions_check(g1: float, g2: float, alpha: float | None = None, omega_tr: float | None = None,
                              n_samples: int = 201, n_max: int = 3, ladder: str = "unit") -> HolonomyReport:
    """Check the holonomic-gate conditions on closed-system evolution.

    The RWA part (levels {0, 1}) gives the parallel-transport residual
    max_t |<psi_i(t)|H|psi_j(t)>| / Omega over the qubit subspace of S1, the
    leakage out of the computational subspace at T, the distance to the ideal
    gate, and the drift of the dark-state population and excitation number.
    With ``alpha`` and ``omega_tr`` given, the full anharmonic model is
    evolved too and the leakage of each S1/S2 basis state is reported along
    with its population in |g,g,2>.
    """
    H = rwa_interaction(HybridSystem((0.0, 0.0), (g1, g2), 0.0, n_max=1))
    small = HybridSystem((0.0, 0.0), (g1, g2), 0.0, n_max=1)
    ops = small.ops
    bd = bright_dark(g1, g2)
    T = math.pi / bd.omega
    times = np.linspace(0.0, T, n_samples)
    N = ops.excitation_number()

    q_states = [ops.ket("eg0"), ops.ket("ge0")]
    dark = bd.dark[0] * ops.ket("eg0") + bd.dark[1] * ops.ket("ge0")
    psi_mix = (ops.ket("eg0") + 1j * ops.ket("ge0") + ops.ket("ee0")) / math.sqrt(3)

    pt = 0.0
    dark_pop, n_expect = [], []
    for t in times:
        U = expm_unitary(H, t)
        evolved = [U @ v for v in q_states]
        for a in evolved:
            for b in evolved:
                pt = max(pt, abs(np.vdot(a, H @ b)) / bd.omega)
        psi = U @ psi_mix
        dark_pop.append(abs(np.vdot(dark, psi)) ** 2)
        n_expect.append(np.real(np.vdot(psi, N @ psi)))

    U_T = expm_unitary(H, T)
    comp = [small.index(lab[0], lab[1], 0) for lab in GATE_ORDER]
    block = U_T[np.ix_(comp, comp)]
    leak = float(1.0 - np.min(np.sum(np.abs(block) ** 2, axis=0)))
    err = float(np.max(np.abs(block - ideal_holonomic(bd.phi_mix))))

    leakage, gg2 = {}, {}
    if alpha is not None:
        if omega_tr is None:
            raise ValueError("omega_tr is required with alpha")
        big = HybridSystem.resonant(g1, g2, omega_tr, alpha, n_max=n_max, ladder=ladder)
        Hb = transmon_hamiltonian(big)
        Ub = expm_unitary(Hb, T)
        bo = big.ops
        subspaces = {"S1": ["eg0", "ge0", "gg1"], "S2": ["ee0", "eg1", "ge1"]}
        for name, labs in subspaces.items():
            idx = [bo.index(lab[0], lab[1], int(lab[2:])) for lab in labs]
            for lab in labs:
                out = Ub @ bo.ket(lab)
                leakage[lab] = float(1.0 - np.sum(np.abs(out[idx]) ** 2))
                gg2[lab] = float(abs(out[bo.index("g", "g", 2)]) ** 2)

    return HolonomyReport(
        parallel_transport=pt,
        cyclic_leakage=leak,
        unitary_error=err,
        dark_drift=float(np.ptp(dark_pop)),
        excitation_drift=float(np.ptp(n_expect)),
        leakage=leakage,
        leakage_gg2=gg2,
    )


def propagate_unitary(H: np.ndarray, T: float, tol: float = 1e-12) -> np.ndarray:
    """Integrate dU/dt = -i H U with an adaptive Runge-Kutta scheme."""
    d = H.shape[0]

    def rhs(t, y):
        return (-1j * (H @ y.reshape(d, d))).reshape(-1)

    sol = solve_ivp(rhs, (0.0, T), np.eye(d, dtype=complex).reshape(-1), method="DOP853", rtol=tol, atol=tol)
    if not sol.success:
        raise RuntimeError(sol.message)
    return sol.y[:, -1].reshape(d, d)


def superposition_states() -> list[np.ndarray]:
    """The 4 basis states and 12 pairwise superpositions of the computational subspace."""
    out = [np.eye(4, dtype=complex)[i] for i in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            for ph in (1.0, 1j):
                v = np.zeros(4, dtype=complex)
                v[i], v[j] = 1.0, ph
                out.append(v / math.sqrt(2))
    return out


def average_state_fidelity(run: Callable[[np.ndarray], GateRun], sys: HybridSystem) -> float:
    """Mean state-transfer fidelity over ``superposition_states`` (an extension metric).

    ``run`` maps an initial density matrix on the hybrid space to a GateRun.
    """
    idx = computational_indices(sys)
    fids = []
    for v in superposition_states():
        psi = np.zeros(sys.dim, dtype=complex)
        psi[idx] = v
        fids.append(run(ket2dm(psi)).fidelity)
    return float(np.mean(fids))
