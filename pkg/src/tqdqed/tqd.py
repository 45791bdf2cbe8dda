"""Single triple-quantum-dot charge qubit.

Position basis ``(|100>, |010>, |001>)`` and even-odd basis ``(|E>, |C>, |L>)``
with ``|E> = (|100> + |001>)/sqrt2``, ``|C> = |010>``,
``|L> = (|100> - |001>)/sqrt2``. All energies are angular frequencies (rad/s)
with hbar = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import ContractViolation, eig_hermitian

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi

# columns are |E>, |C>, |L> written in the position basis
EVEN_ODD = np.array(
    [[1 / SQRT2, 0.0, 1 / SQRT2],
     [0.0, 1.0, 0.0],
     [1 / SQRT2, 0.0, -1 / SQRT2]],
    dtype=complex,
)

# n1 - n3 in the position basis; the dipole operator is e*w times this
DIPOLE_POSITION = np.diag([1.0, 0.0, -1.0]).astype(complex)

LEVELS = ("g", "e", "f")
EVEN_ODD_LABELS = ("E", "C", "L")


@dataclass(frozen=True)
class TqdParams:
    """Control parameters of one TQD, all in rad/s.

    ``d_eps_d`` and ``d_eps_q`` are quasi-static charge-noise offsets added to
    the mean detunings. ``d_t_p`` and ``d_t_m`` are optional tunneling
    fluctuations, zero by default.
    """

    eps_d_mean: float = 0.0
    eps_q_mean: float = 0.0
    t12: float = 0.0
    t23: float = 0.0
    d_eps_d: float = 0.0
    d_eps_q: float = 0.0
    d_t_p: float = 0.0
    d_t_m: float = 0.0

    @classmethod
    def from_tp_tm(cls, t_p: float, t_m: float = 0.0, **kwargs) -> "TqdParams":
        return cls(t12=(t_p + t_m) / SQRT2, t23=(t_p - t_m) / SQRT2, **kwargs)

    @classmethod
    def operating_point(cls, t_p: float, eps_q: float, min_ratio: float = 10.0, **noise) -> "TqdParams":
        """Double-sweet-spot operating point: eps_d = t_m = 0, eps_q/t_p >= min_ratio."""
        if t_p <= 0 or eps_q / t_p < min_ratio:
            raise ContractViolation(
                f"operating point needs eps_q/t_p >= {min_ratio}, got {eps_q / t_p if t_p else float('inf')}"
            )
        return cls.from_tp_tm(t_p, 0.0, eps_q_mean=eps_q, **noise)

    @property
    def t_p(self) -> float:
        return (self.t12 + self.t23) / SQRT2

    @property
    def t_m(self) -> float:
        return (self.t12 - self.t23) / SQRT2

    @property
    def eps_d(self) -> float:
        return self.eps_d_mean + self.d_eps_d

    @property
    def eps_q(self) -> float:
        return self.eps_q_mean + self.d_eps_q

    def replace(self, **changes) -> "TqdParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class TqdEigensystem:
    """Eigen-energies and eigenvectors (columns g, e, f in the E, C, L basis)."""

    E_g: float
    E_e: float
    E_f: float
    theta: float
    vectors: np.ndarray = field(repr=False)

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.E_g, self.E_e, self.E_f])

    @property
    def omega_ge(self) -> float:
        return self.E_e - self.E_g

    @property
    def omega_gf(self) -> float:
        return self.E_f - self.E_g

    @property
    def omega_ef(self) -> float:
        return self.E_f - self.E_e


def h_position(p: TqdParams) -> np.ndarray:
    """TQD Hamiltonian in the position basis."""
    t_p = p.t_p + p.d_t_p
    t_m = p.t_m + p.d_t_m
    t12 = (t_p + t_m) / SQRT2
    t23 = (t_p - t_m) / SQRT2
    return np.array(
        [[p.eps_d, t12, 0.0],
         [t12, p.eps_q, t23],
         [0.0, t23, -p.eps_d]],
        dtype=complex,
    )


def to_even_odd(H_pos: np.ndarray) -> np.ndarray:
    """Rotate a position-basis operator into the (E, C, L) basis."""
    return EVEN_ODD.conj().T @ np.asarray(H_pos, dtype=complex) @ EVEN_ODD


def h_even_odd(p: TqdParams) -> np.ndarray:
    return to_even_odd(h_position(p))


def mixing_angle(t_p: float, eps_q: float) -> float:
    """theta with tan(2 theta) = 2 t_p / eps_q; zero in the fully degenerate case."""
    if t_p == 0.0 and eps_q == 0.0:
        return 0.0
    return 0.5 * math.atan2(2.0 * t_p, eps_q)


def eigensystem_analytic(t_p: float, eps_q: float) -> TqdEigensystem:
    """Closed-form eigensystem at eps_d = t_m = 0 and zero noise."""
    root = math.sqrt(4.0 * t_p**2 + eps_q**2)
    theta = mixing_angle(t_p, eps_q)
    c, s = math.cos(theta), math.sin(theta)
    vectors = np.array(
        [[c, 0.0, s],
         [-s, 0.0, c],
         [0.0, 1.0, 0.0]],
        dtype=complex,
    )
    return TqdEigensystem(
        E_g=(eps_q - root) / 2.0,
        E_e=0.0,
        E_f=(eps_q + root) / 2.0,
        theta=theta,
        vectors=vectors,
    )


def eigensystem_numeric(p: TqdParams) -> TqdEigensystem:
    """Numerical eigensystem of the even-odd Hamiltonian.

    ``theta`` is recovered from the ground state as atan2(-<C|g>, <E|g>), which
    matches the analytic angle at the operating point.
    """
    evals, evecs = eig_hermitian(h_even_odd(p))
    g = evecs[:, 0]
    # sign so that <E|g> >= 0 (analytic convention); theta then follows
    if g[0].real < 0:
        evecs[:, 0] = -g
        g = -g
    theta = math.atan2(-g[1].real, g[0].real)
    return TqdEigensystem(E_g=evals[0], E_e=evals[1], E_f=evals[2], theta=theta, vectors=evecs)


def omega_ge_exact(p: TqdParams) -> float:
    evals = np.linalg.eigvalsh(h_even_odd(p))
    return float(evals[1] - evals[0])


def excitation_energy_expansion(t_p: float, t_m: float, eps_q: float, d_eps_d: float = 0.0, d_eps_q: float = 0.0) -> float:
    """First-order expansion of omega_ge in the detuning noise offsets.

    Keeps the noise-free energy, the dipolar term linear in ``d_eps_d`` and the
    quadrupolar term linear in ``d_eps_q``.
    """
    tt = t_p**2 + t_m**2
    root = math.sqrt(4.0 * tt + eps_q**2)
    base = 0.5 * (root - eps_q)
    dipolar = -t_p * t_m * (3.0 + eps_q / root) / tt * d_eps_d if tt else 0.0
    quadrupolar = 0.5 * (eps_q / root - 1.0) * d_eps_q
    return base + dipolar + quadrupolar


def dipolar_slope(t_p: float, t_m: float, eps_q: float) -> float:
    tt = t_p**2 + t_m**2
    return -t_p * t_m * (3.0 + eps_q / math.sqrt(4.0 * tt + eps_q**2)) / tt


def quadrupolar_slope(t_p: float, t_m: float, eps_q: float) -> float:
    return 0.5 * (eps_q / math.sqrt(4.0 * (t_p**2 + t_m**2) + eps_q**2) - 1.0)


def tunneling_dipolar_noise(t_p: float, d_t_p: float, d_t_m: float, d_eps_d: float) -> float:
    """Residual dipolar fluctuation from tunneling noise, 4 dt_m / (t_p + dt_p) * d_eps_d.

    Reported for reference only; it is not derived or checked here.
    """
    return 4.0 * d_t_m / (t_p + d_t_p) * d_eps_d


def _central(f, x0: float, h: float) -> float:
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h)


def sweet_spot_derivatives(p: TqdParams, rel_step: float = 1e-5) -> tuple[float, float]:
    """Finite-difference slopes (d omega_ge / d eps_d, d omega_ge / d eps_q).

    Central differences with a Richardson extrapolation over steps h and h/2,
    h = max(t_p * rel_step, 2 pi * 1 kHz). Both slopes are dimensionless.
    """
    h = max(abs(p.t_p) * rel_step, TWO_PI * 1e3)

    def along_d(x):
        return omega_ge_exact(p.replace(d_eps_d=p.d_eps_d + x))

    def along_q(x):
        return omega_ge_exact(p.replace(d_eps_q=p.d_eps_q + x))

    out = []
    for f in (along_d, along_q):
        coarse = _central(f, 0.0, h)
        fine = _central(f, 0.0, h / 2)
        out.append((4.0 * fine - coarse) / 3.0)
    return out[0], out[1]


@dataclass(frozen=True)
class DipoleElements:
    """Dipole matrix elements in units of e*w."""

    d_ge: float
    d_gf: float
    d_ef: float
    d_gg: float
    d_ee: float
    d_ff: float

    def scaled(self, w: float, charge: float = 1.602176634e-19) -> "DipoleElements":
        k = charge * w
        return DipoleElements(*(k * getattr(self, n) for n in ("d_ge", "d_gf", "d_ef", "d_gg", "d_ee", "d_ff")))


def dipole_operator_even_odd() -> np.ndarray:
    return to_even_odd(DIPOLE_POSITION)


def dipole_matrix_elements(eigensys: TqdEigensystem) -> DipoleElements:
    """<m|d|n> between TQD eigenstates, in units of e*w."""
    V = eigensys.vectors
    D = V.conj().T @ dipole_operator_even_odd() @ V
    return DipoleElements(
        d_ge=float(D[0, 1].real),
        d_gf=float(D[0, 2].real),
        d_ef=float(D[1, 2].real),
        d_gg=float(D[0, 0].real),
        d_ee=float(D[1, 1].real),
        d_ff=float(D[2, 2].real),
    )


@dataclass(frozen=True)
class DriveParams:
    """Microwave drive on the dipolar detuning, eps(t) cos(w0 t + phi).

    ``shape`` is ``"square"`` or ``"raised_cosine"``. For the raised cosine,
    ``amplitude`` is the peak value and the pulse area is amplitude*duration/2.
    """

    amplitude: float
    duration: float
    carrier: float
    phase: float = 0.0
    shape: str = "square"

    def __post_init__(self):
        if self.shape not in ("square", "raised_cosine"):
            raise ValueError(f"unknown envelope shape {self.shape!r}")

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t <= self.duration)
        if self.shape == "square":
            env = np.full_like(t, self.amplitude)
        else:
            env = 0.5 * self.amplitude * (1.0 - np.cos(TWO_PI * t / self.duration))
        return np.where(inside, env, 0.0)

    @property
    def area(self) -> float:
        return self.amplitude * self.duration * (1.0 if self.shape == "square" else 0.5)

    def check_weak(self, t_p: float) -> bool:
        ok = self.amplitude <= abs(t_p) / 10.0
        if not ok:
            warnings.warn(f"drive amplitude {self.amplitude:.3e} exceeds t_p/10", stacklevel=2)
        return ok


@dataclass(frozen=True)
class DriveHamiltonian:
    matrix: np.ndarray
    rwa_valid: bool


def effective_drive_hamiltonian(
    drive: DriveParams,
    eigensys: TqdEigensystem,
    t: float = 0.0,
    d_eps_d: float = 0.0,
    d_eps_q: float = 0.0,
) -> DriveHamiltonian:
    """Resonantly driven TQD in the interaction picture of its bare levels.

    Matrix in the (g, e, f) basis after dropping counter-rotating terms. The
    static ``d_eps_d`` term on the g-e element is kept alongside the drive.
    ``rwa_valid`` is False when the envelope comes within a factor 10 of the
    detunings |omega_ef - w0| or |omega_ge + w0|.
    """
    eps = float(drive.envelope(t))
    c, s = math.cos(eigensys.theta), math.sin(eigensys.theta)
    ge = c * (0.5 * eps * np.exp(1j * drive.phase) + d_eps_d)
    H = np.array(
        [[d_eps_q * s**2, ge, 0.0],
         [np.conj(ge), 0.0, 0.0],
         [0.0, 0.0, d_eps_q * c**2]],
        dtype=complex,
    )
    gaps = (abs(eigensys.omega_ef - drive.carrier), abs(eigensys.omega_ge + drive.carrier))
    rwa_valid = drive.amplitude * 10.0 <= min(gaps)
    return DriveHamiltonian(matrix=H, rwa_valid=bool(rwa_valid))


def propagate_drive_lab_frame(
    p: TqdParams,
    drive: DriveParams,
    psi0: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> np.ndarray:
    """Integrate the Schrodinger equation for H0 + H' + drive in the lab frame.

    ``psi0`` and the returned state are in the TQD eigenbasis (g, e, f) of the
    noise-free Hamiltonian.
    """
    base = eigensystem_numeric(p.replace(d_eps_d=0.0, d_eps_q=0.0))
    V = base.vectors
    H_static = V.conj().T @ h_even_odd(p) @ V
    coupling = V.conj().T @ dipole_operator_even_odd() @ V

    def rhs(t, psi):
        H = H_static + float(drive.envelope(t)) * math.cos(drive.carrier * t + drive.phase) * coupling
        return -1j * (H @ psi)

    sol = solve_ivp(rhs, (0.0, drive.duration), np.asarray(psi0, dtype=complex), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"lab-frame propagation failed: {sol.message}")
    return sol.y[:, -1]


def eigenstate_populations(eps_q_grid, t_p: float) -> dict[str, np.ndarray]:
    """Even-odd weights of |g>, |e>, |f> along an eps_q sweep at eps_d = t_m = 0.

    Keys are ``"pop_<basis>_<level>"`` plus the energies ``E_g``, ``E_e``,
    ``E_f`` and the grid itself under ``eps_q``.
    """
    grid = np.asarray(eps_q_grid, dtype=float)
    out: dict[str, np.ndarray] = {"eps_q": grid}
    energies = np.empty((grid.size, 3))
    pops = np.empty((grid.size, 3, 3))
    for i, eq in enumerate(grid):
        es = eigensystem_numeric(TqdParams.from_tp_tm(t_p, 0.0, eps_q_mean=eq))
        energies[i] = es.energies
        pops[i] = np.abs(es.vectors) ** 2
    for j, lvl in enumerate(LEVELS):
        out[f"E_{lvl}"] = energies[:, j]
    for j, lvl in enumerate(LEVELS):
        for b, name in enumerate(EVEN_ODD_LABELS):
            out[f"pop_{name}_{lvl}"] = pops[:, b, j]
    return out
