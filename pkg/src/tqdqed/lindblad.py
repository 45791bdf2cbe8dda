"""Master-equation integration, decoherence channels and observables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp

from .core import ContractViolation, DimensionError, LindbladChannel, liouvillian
from .coupling import HybridSystem

TWO_PI = 2.0 * math.pi

Generator = Union[np.ndarray, Callable[[float], np.ndarray]]


class IntegrationError(RuntimeError):
    """The adaptive integrator could not reach the requested final time."""


@dataclass(frozen=True)
class DecoherenceRates:
    """Decoherence rates in rad/s.

    Per-qubit tuples are ordered (qubit 1, qubit 2). Dephasing enters the
    master equation as (gamma_phi / 2) D[|e><e| - |g><g|], which damps the
    qubit coherence at rate gamma_phi. The transmon dephasing is likewise
    (gamma_phi_tr / 2) D[|0><0| - |1><1|].
    """

    gamma_ge: tuple[float, float] = (0.0, 0.0)
    gamma_ef: tuple[float, float] = (0.0, 0.0)
    gamma_gf: tuple[float, float] = (0.0, 0.0)
    gamma_phi: tuple[float, float] = (0.0, 0.0)
    gamma_a: float = 0.0
    gamma_phi_tr: float = 0.0

    def __post_init__(self):
        for name in ("gamma_ge", "gamma_ef", "gamma_gf", "gamma_phi"):
            val = tuple(float(x) for x in getattr(self, name))
            if len(val) != 2:
                raise ValueError(f"{name} needs one rate per qubit")
            object.__setattr__(self, name, val)
        rates = [*self.gamma_ge, *self.gamma_ef, *self.gamma_gf, *self.gamma_phi, self.gamma_a, self.gamma_phi_tr]
        if min(rates) < 0:
            raise ContractViolation("decoherence rates must be non-negative")

    @classmethod
    def resonator_defaults(cls) -> "DecoherenceRates":
        """Qubit dephasing 2.7 MHz and resonator decay 0.028 MHz (ordinary frequency)."""
        return cls(gamma_phi=(TWO_PI * 2.7e6, TWO_PI * 2.7e6), gamma_a=TWO_PI * 0.028e6)

    @classmethod
    def transmon_defaults(cls) -> "DecoherenceRates":
        """Qubit dephasing 2.7 MHz, transmon decay 4 kHz and dephasing 0.8 MHz."""
        return cls(
            gamma_phi=(TWO_PI * 2.7e6, TWO_PI * 2.7e6),
            gamma_a=TWO_PI * 4e3,
            gamma_phi_tr=TWO_PI * 0.8e6,
        )

    @property
    def is_zero(self) -> bool:
        return not any([*self.gamma_ge, *self.gamma_ef, *self.gamma_gf, *self.gamma_phi, self.gamma_a, self.gamma_phi_tr])


def build_channels(rates: DecoherenceRates, sys: HybridSystem) -> list[LindbladChannel]:
    """Jump operators of the master equation embedded in the hybrid space.

    Zero rates are omitted. Qubits are two-level here, so the e-f and g-f
    relaxation channels have no support and must be zero.
    """
    if any(rates.gamma_ef) or any(rates.gamma_gf):
        raise ContractViolation("gamma_ef / gamma_gf need a third qubit level, which the hybrid model does not carry")
    o = sys.ops
    out = []
    for k in (1, 2):
        if rates.gamma_ge[k - 1]:
            out.append(LindbladChannel(o.sm(k), rates.gamma_ge[k - 1], f"relax_ge_{k}"))
        if rates.gamma_phi[k - 1]:
            out.append(LindbladChannel(o.proj_e(k) - o.proj_g(k), 0.5 * rates.gamma_phi[k - 1], f"dephase_{k}"))
    if rates.gamma_a:
        out.append(LindbladChannel(o.a, rates.gamma_a, "osc_decay"))
    if rates.gamma_phi_tr:
        op = o.oscillator_projector(0) - o.oscillator_projector(1)
        out.append(LindbladChannel(op, 0.5 * rates.gamma_phi_tr, "osc_dephase"))
    return out


@dataclass(frozen=True)
class TrajectoryDiagnostics:
    trace_drift: float
    hermiticity_drift: float
    min_eigenvalue: float
    n_steps: int
    n_rhs_evals: int


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the master equation.

    ``populations`` maps basis labels to diagonal entries along ``times``.
    ``fidelity`` is Tr[rho_target rho(t)] when a target was supplied.
    """

    times: np.ndarray
    states: np.ndarray = field(repr=False)
    labels: tuple[str, ...] = ()
    populations: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    fidelity: np.ndarray | None = field(default=None, repr=False)
    diagnostics: TrajectoryDiagnostics | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_fidelity(self) -> float:
        if self.fidelity is None:
            raise ValueError("trajectory was integrated without a target state")
        return float(self.fidelity[-1])

    def population(self, label: str) -> np.ndarray:
        return self.populations[label]


def state_fidelity(rho_id: np.ndarray, rho_re: np.ndarray) -> float:
    """Tr[rho_id rho_re]; equals the overlap probability when rho_id is pure."""
    rho_id = np.asarray(rho_id)
    rho_re = np.asarray(rho_re)
    if rho_id.shape != rho_re.shape:
        raise DimensionError(f"states differ in shape: {rho_id.shape} vs {rho_re.shape}")
    return float(np.real(np.einsum("ij,ji->", rho_id, rho_re)))


def _diagnostics(states: np.ndarray, n_steps: int, nfev: int) -> TrajectoryDiagnostics:
    traces = np.real(np.einsum("tii->t", states))
    herm = np.max(np.abs(states - np.conj(np.transpose(states, (0, 2, 1)))))
    hermitian_part = 0.5 * (states + np.conj(np.transpose(states, (0, 2, 1))))
    min_eig = float(np.min(np.linalg.eigvalsh(hermitian_part)))
    return TrajectoryDiagnostics(
        trace_drift=float(np.max(np.abs(traces - traces[0]))),
        hermiticity_drift=float(herm),
        min_eigenvalue=min_eig,
        n_steps=n_steps,
        n_rhs_evals=nfev,
    )


def integrate(
    rho0: np.ndarray,
    H: Generator,
    channels: Sequence[LindbladChannel],
    t_grid,
    tol: float = 1e-9,
    target: np.ndarray | None = None,
    labels: Sequence[str] | None = None,
) -> Trajectory:
    """Integrate the master equation with an embedded Runge-Kutta 4(5) pair.

    Parameters
    ----------
    rho0 : ndarray
        Initial density matrix.
    H : ndarray or callable
        Constant Hamiltonian or a function ``t -> H(t)``.
    channels : sequence of LindbladChannel
    t_grid : array_like
        Strictly increasing output times; integration runs from ``t_grid[0]``
        to ``t_grid[-1]`` and the last sample is an actual step endpoint.
    tol : float
        Relative and absolute local error tolerance.
    target : ndarray, optional
        Ideal density matrix; enables the fidelity series.
    labels : sequence of str, optional
        Names of the basis states, used to key the population table.

    Notes
    -----
    The trace is never renormalised; its drift is reported in the
    diagnostics.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least two points")
    if abs(np.trace(rho0) - 1) > 1e-10 or np.max(np.abs(rho0 - rho0.conj().T)) > 1e-12:
        raise ContractViolation("rho0 must be a Hermitian, unit-trace density matrix")

    if callable(H):
        dissipative = liouvillian(np.zeros((d, d)), channels)

        def rhs(t, y):
            Ht = H(t)
            rho = y.reshape(d, d)
            return (-1j * (Ht @ rho - rho @ Ht)).reshape(-1) + dissipative @ y
    else:
        H = np.asarray(H, dtype=complex)
        if H.shape != (d, d):
            raise DimensionError(f"Hamiltonian {H.shape} does not match state {rho0.shape}")
        sup = liouvillian(H, channels)

        def rhs(t, y):
            return sup @ y

    sol = solve_ivp(
        rhs,
        (t_grid[0], t_grid[-1]),
        rho0.reshape(-1),
        method="RK45",
        t_eval=t_grid,
        rtol=tol,
        atol=tol,
    )
    if sol.status != 0:
        reached = sol.t[-1] if sol.t.size else t_grid[0]
        raise IntegrationError(f"integration stopped at t={reached:.6e} of {t_grid[-1]:.6e}: {sol.message}")
    states = sol.y.T.reshape(-1, d, d)
    # step count is not exposed by solve_ivp; nfev / 6 stages approximates it
    diag = _diagnostics(states, n_steps=int(sol.nfev // 6), nfev=int(sol.nfev))

    pops = {}
    if labels is not None:
        if len(labels) != d:
            raise DimensionError(f"{len(labels)} labels for a {d}-dimensional space")
        diag_entries = np.real(np.einsum("tii->ti", states))
        pops = {lab: diag_entries[:, i] for i, lab in enumerate(labels)}
    fid = None
    if target is not None:
        target = np.asarray(target, dtype=complex)
        if target.shape != (d, d):
            raise DimensionError("target state has the wrong dimension")
        fid = np.real(np.einsum("ij,tji->t", target, states))
    return Trajectory(
        times=t_grid.copy(),
        states=states,
        labels=tuple(labels) if labels is not None else (),
        populations=pops,
        fidelity=fid,
        diagnostics=diag,
    )
