import math
import warnings

import numpy as np
import pytest

from tqdqed.core import ContractViolation, commutator, is_hermitian
from tqdqed.coupling import (
    CircuitGeometry,
    HybridSystem,
    _interaction,
    effective_coupling,
    excitation_subspaces,
    exchange_chi,
    free_hamiltonian,
    lowering,
    schrieffer_wolff_reduce,
    sw_effective_hamiltonian,
    sw_generator,
    tavis_cummings_hamiltonian,
    transmon_hamiltonian,
    vacuum_rabi_g0,
)

TWO_PI = 2 * math.pi


def test_g0_band():
    lo = vacuum_rabi_g0(CircuitGeometry(omega_r=TWO_PI * 1.5e9)) / TWO_PI
    hi = vacuum_rabi_g0(CircuitGeometry(omega_r=TWO_PI * 6.5e9)) / TWO_PI
    assert 54e6 <= lo <= 66e6
    assert 225e6 <= hi <= 275e6


def test_g0_linear_in_frequency():
    ws = np.linspace(1.5e9, 6.5e9, 7) * TWO_PI
    ratio = [vacuum_rabi_g0(CircuitGeometry(omega_r=w)) / w for w in ws]
    assert np.ptp(ratio) < 1e-15


def test_effective_coupling_projection():
    assert effective_coupling(2.0, math.pi / 3) == pytest.approx(1.0)


def test_geometry_validation():
    with pytest.raises(ContractViolation):
        CircuitGeometry(omega_r=1.0, chi0=1.5)
    with pytest.raises(ContractViolation):
        CircuitGeometry(omega_r=1.0, w=-1e-9)


def test_lowering_ladders():
    assert np.allclose(np.diag(lowering(4, "bosonic"), 1), np.sqrt([1, 2, 3]))
    assert np.allclose(np.diag(lowering(4, "unit"), 1), 1.0)


def test_labels_and_index_order():
    sys = HybridSystem((1.0, 1.0), (0.1, 0.1), 1.0, n_max=2)
    labels = sys.ops.labels()
    assert labels[:4] == ["gg0", "gg1", "gg2", "ge0"]
    assert sys.index("e", "g", 1) == labels.index("eg1")


def test_tavis_cummings_hermitian_and_rwa_conserves_excitations():
    sys = HybridSystem((5.0, 5.2), (0.1, 0.12), 4.0, n_max=3)
    N = sys.ops.excitation_number()
    H_rwa = tavis_cummings_hamiltonian(sys, rwa=True)
    H_full = tavis_cummings_hamiltonian(sys, rwa=False)
    assert is_hermitian(H_rwa) and is_hermitian(H_full)
    assert np.max(np.abs(commutator(H_rwa, N))) < 1e-12
    assert np.max(np.abs(commutator(H_full, N))) > 1e-3


def test_transmon_hamiltonian_anharmonic_diagonal():
    sys = HybridSystem.resonant(0.1, 0.1, 5.0, 0.3, n_max=3)
    H0 = free_hamiltonian(sys)
    i0, i1, i2 = (sys.index("g", "g", n) for n in range(3))
    e = np.real(np.diag(H0))
    assert (e[i2] - e[i1]) - (e[i1] - e[i0]) == pytest.approx(-0.3)
    assert is_hermitian(transmon_hamiltonian(sys))


def test_excitation_subspaces_block_diagonal():
    sys = HybridSystem.resonant(0.3, 0.4, 5.0, 0.0, n_max=1)
    H = _interaction(sys, rwa=True)
    blocks = excitation_subspaces()
    idx = {lab: sys.index(lab[0], lab[1], int(lab[2:])) for labs in blocks.values() for lab in labs}
    for a, la in blocks.items():
        for b, lb in blocks.items():
            if a == b:
                continue
            sub = H[np.ix_([idx[x] for x in la], [idx[x] for x in lb])]
            assert np.max(np.abs(sub)) == 0


def test_sw_generator_cancels_first_order_coupling():
    sys = HybridSystem.dispersive(1.0, 10.0, 30.0, n_max=3)
    S = sw_generator(sys)
    assert np.max(np.abs(S + S.conj().T)) < 1e-14
    assert np.allclose(commutator(S, free_hamiltonian(sys)), _interaction(sys, rwa=True), atol=1e-12)


def test_sw_effective_matches_dispersive_model():
    sys = HybridSystem.dispersive(1.0, 10.0, 30.0, n_max=2)
    model = schrieffer_wolff_reduce(sys)
    He = sw_effective_hamiltonian(sys)
    idx = [sys.index(a, b, 0) for a, b in ("gg", "ge", "eg", "ee")]
    diff = He[np.ix_(idx, idx)] - model.H_tilde
    # agreement up to a constant energy offset
    assert np.allclose(diff, diff[0, 0] * np.eye(4), atol=1e-12)


def test_exchange_rate_and_gate_time():
    assert exchange_chi(1.0, 1.0, 10.0, 10.0) == pytest.approx(0.1)
    sys = HybridSystem.dispersive(2.0, 10.0, 100.0)
    model = schrieffer_wolff_reduce(sys)
    assert model.chi == pytest.approx(0.2)
    assert model.gate_time == pytest.approx(math.pi / 0.4)


def test_dispersive_guard_rails():
    with pytest.raises(ContractViolation):
        schrieffer_wolff_reduce(HybridSystem((1.0, 1.0), (0.1, 0.1), 1.0))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        schrieffer_wolff_reduce(HybridSystem.dispersive(1.0, 3.0, 30.0))
    assert rec
