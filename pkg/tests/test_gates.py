import math

import numpy as np
import pytest

from tqdqed.core import ContractViolation, expm_unitary, is_unitary, ket2dm
from tqdqed.coupling import HybridSystem, rwa_interaction, schrieffer_wolff_reduce, tavis_cummings_hamiltonian
from tqdqed.gates import (
    GATE_ORDER,
    average_state_fidelity,
    bright_dark,
    computational_block,
    exchange_populations,
    holonomic_unitary_extended,
    holonomy_conditions_check,
    ideal_holonomic,
    ideal_iswap,
    mixing_angle,
    phase_aligned_distance,
    propagate_unitary,
    run_holonomic_protocol,
    run_iswap_protocol,
    superposition_states,
)
from tqdqed.lindblad import DecoherenceRates

TWO_PI = 2 * math.pi
G = TWO_PI * 66e6
W = TWO_PI * 1.7e9
NO_NOISE = DecoherenceRates()


def test_ideal_gates_unitary():
    assert is_unitary(ideal_iswap(0.3, 1.7))
    assert is_unitary(ideal_holonomic(0.4))
    # at chi t = pi/2 the exchange is an iSWAP
    U = ideal_iswap(1.0, math.pi / 2)
    assert np.allclose(U[1:3, 1:3], [[0, 1j], [1j, 0]], atol=1e-15)


@pytest.mark.parametrize("g1,g2", [(1.0, 1.0), (0.3, 2.0), (-1.0, 0.5), (0.0, 1.0), (1.0, -1.0)])
def test_mixing_angle_branch(g1, g2):
    phi = mixing_angle(g1, g2)
    assert -math.pi < phi <= math.pi
    if g2 != 0:
        assert math.tan(phi / 2) == pytest.approx(-g1 / g2)
    if g2 > 0 and g1 != 0:
        assert math.copysign(1, math.sin(phi / 2)) == -math.copysign(1, g1)


def test_equal_couplings_give_quarter_turn():
    assert mixing_angle(1.0, 1.0) == pytest.approx(-math.pi / 2)
    # the +pi/2 gate is the same map with one qubit's |e> sign flipped
    Z2 = np.diag([1, 1, -1, -1])  # GATE_ORDER: gg, eg, ge, ee; flips qubit 2 excited
    assert np.allclose(Z2 @ ideal_holonomic(-math.pi / 2) @ Z2, ideal_holonomic(math.pi / 2))


def test_mixing_angle_rejects_zero_couplings():
    with pytest.raises(ContractViolation):
        mixing_angle(0.0, 0.0)


def test_bright_dark_orthonormal():
    bd = bright_dark(0.7, -1.3)
    assert abs(np.vdot(bd.bright, bd.dark)) < 1e-15
    assert np.linalg.norm(bd.bright) == pytest.approx(1.0)
    assert bd.omega == pytest.approx(math.hypot(0.7, 1.3))


def test_extended_unitary_block_and_unitarity():
    g1, g2 = 0.4, 1.1
    U, labels = holonomic_unitary_extended(g1, g2)
    assert is_unitary(U)
    idx = [labels.index(lab + "0") for lab in GATE_ORDER]
    assert np.allclose(U[np.ix_(idx, idx)], ideal_holonomic(mixing_angle(g1, g2)))


def test_cyclic_rwa_evolution_matches_closed_form():
    rng = np.random.default_rng(7)
    for _ in range(3):
        g1, g2 = rng.uniform(0.2, 2.0, size=2) * rng.choice([-1, 1], size=2)
        sys = HybridSystem((0.0, 0.0), (g1, g2), 0.0, n_max=1)
        T = math.pi / math.hypot(g1, g2)
        U_rk = propagate_unitary(rwa_interaction(sys), T)
        U_cf, _ = holonomic_unitary_extended(g1, g2)
        assert np.max(np.abs(U_rk - U_cf)) < 1e-9


def test_holonomy_conditions():
    rep = holonomy_conditions_check(0.8, -0.5)
    assert rep.parallel_transport < 1e-10
    assert rep.cyclic_leakage < 1e-12
    assert rep.unitary_error < 1e-8
    assert rep.dark_drift < 1e-10
    assert rep.excitation_drift < 1e-10


def test_leakage_falls_with_anharmonicity():
    small = holonomy_conditions_check(G, G, alpha=5 * G, omega_tr=W)
    large = holonomy_conditions_check(G, G, alpha=20 * G, omega_tr=W)
    assert max(large.leakage.values()) < max(small.leakage.values())
    # leakage is dominated by S2 states reaching the second oscillator level
    assert small.leakage["ge1"] > 10 * small.leakage["eg0"]
    assert small.leakage_gg2["ge1"] > 0.5 * small.leakage["ge1"]


def test_exchange_populations_swap():
    chi = 2.0
    pops = exchange_populations(chi, [0.0, math.pi / (4 * chi), math.pi / (2 * chi)])
    assert np.allclose(pops["eg"], [0.0, 0.5, 1.0])
    assert np.allclose(pops["eg"] + pops["ge"], 1.0)


def test_iswap_block_converges_with_detuning():
    errs = []
    for ratio in (10, 20, 40):
        sys = HybridSystem.dispersive(G, ratio, W)
        model = schrieffer_wolff_reduce(sys)
        U = expm_unitary(tavis_cummings_hamiltonian(sys, rwa=True), model.gate_time)
        o = sys.ops
        frame = 0.5 * model.omega_tilde[0] * o.sz(1) + 0.5 * model.omega_tilde[1] * o.sz(2) + W * o.number
        R = np.diag(np.exp(1j * np.real(np.diag(frame)) * model.gate_time))
        errs.append(phase_aligned_distance(computational_block(R @ U, sys), ideal_iswap(model.chi, model.gate_time)))
    assert errs[1] < errs[0] / 2 and errs[2] < errs[1] / 2


def test_iswap_noise_free_large_detuning():
    run = run_iswap_protocol(HybridSystem.dispersive(G, 20.0, W), NO_NOISE, samples=200)
    assert run.fidelity >= 0.999
    assert run.trajectory.population("eg0")[-1] > 0.99
    assert run.spec.duration == pytest.approx(math.pi / (2 * G / 20))


def test_iswap_rwa_conserves_excitations():
    sys = HybridSystem.dispersive(G, 10.0, W)
    run = run_iswap_protocol(sys, NO_NOISE, samples=100, tol=1e-11)
    N = sys.ops.excitation_number()
    n = np.real(np.einsum("ij,tji->t", N, run.trajectory.states))
    assert np.ptp(n) < 1e-10


def test_iswap_contracts():
    with pytest.raises(ContractViolation):
        run_iswap_protocol(HybridSystem((W, W), (G, G), W), NO_NOISE)
    with pytest.raises(ContractViolation):
        run_iswap_protocol(HybridSystem((W + 10 * G, W + 12 * G), (G, G), W), NO_NOISE)


def test_holonomic_noise_free_large_anharmonicity():
    sys = HybridSystem.resonant(G, G, W, 50 * G)
    run = run_holonomic_protocol(sys, NO_NOISE, rwa=True, samples=200, tol=1e-11)
    assert run.fidelity > 0.998
    assert run.trajectory.population("eg1")[-1] > 0.998
    N = sys.ops.excitation_number()
    n = np.real(np.einsum("ij,tji->t", N, run.trajectory.states))
    assert np.ptp(n) < 1e-10


def test_holonomic_shaped_pulse_keeps_cyclic_condition():
    sys = HybridSystem.resonant(G, G, W, 50 * G)
    square = run_holonomic_protocol(sys, NO_NOISE, rwa=True, samples=100)
    shaped = run_holonomic_protocol(sys, NO_NOISE, rwa=True, samples=100, pulse_shape="sin2")
    assert shaped.fidelity == pytest.approx(square.fidelity, abs=2e-3)


def test_holonomic_offsets_detune_gate():
    sys = HybridSystem.resonant(G, G, W, 50 * G)
    base = run_holonomic_protocol(sys, NO_NOISE, rwa=True, samples=100)
    zero = run_holonomic_protocol(sys, NO_NOISE, rwa=True, samples=100, qubit_offsets=(0.0, 0.0))
    off = run_holonomic_protocol(sys, NO_NOISE, rwa=True, samples=100, qubit_offsets=(0.3 * G, -0.3 * G))
    assert zero.fidelity == pytest.approx(base.fidelity, abs=1e-12)
    assert off.fidelity < base.fidelity - 1e-3


def test_holonomic_contracts():
    with pytest.raises(ContractViolation):
        run_holonomic_protocol(HybridSystem.resonant(G, G, W, 5 * G, n_max=2), NO_NOISE)
    with pytest.raises(ContractViolation):
        run_holonomic_protocol(HybridSystem((W + G, W), (G, G), W, n_max=3, alpha=5 * G), NO_NOISE)
    sys = HybridSystem.resonant(G, G, W, 5 * G)
    with pytest.raises(ContractViolation):
        run_holonomic_protocol(sys, NO_NOISE, rho0=ket2dm(sys.ops.ket("gg2")))


def test_average_state_fidelity_extension():
    assert len(superposition_states()) == 16
    sys = HybridSystem.resonant(G, G, W, 50 * G)
    avg = average_state_fidelity(lambda rho: run_holonomic_protocol(sys, NO_NOISE, rho0=rho, rwa=True, samples=20), sys)
    assert avg > 0.998
