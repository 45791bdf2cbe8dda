"""Triple-quantum-dot qubits coupled through a shared resonator or transmon.

Modules
-------
core      linear-algebra primitives and the Lindblad superoperator
tqd       single triple-dot Hamiltonian, eigensystem, sweet spots, drive
coupling  vacuum Rabi coupling, Tavis-Cummings / transmon models, dispersive reduction
lindblad  decoherence channels and the master-equation integrator
gates     iSWAP and holonomic entangling-gate protocols
"""

__version__ = "0.1.0"

from .core import ContractViolation, DimensionError, LindbladChannel, eig_hermitian, expm_unitary
from .coupling import CircuitGeometry, HybridSystem, schrieffer_wolff_reduce, vacuum_rabi_g0
from .gates import run_holonomic_protocol, run_iswap_protocol
from .lindblad import DecoherenceRates, IntegrationError, integrate
from .tqd import TqdParams, eigensystem_analytic, eigensystem_numeric, sweet_spot_derivatives

__all__ = [
    "__version__",
    "CircuitGeometry",
    "ContractViolation",
    "DecoherenceRates",
    "DimensionError",
    "HybridSystem",
    "IntegrationError",
    "LindbladChannel",
    "TqdParams",
    "eig_hermitian",
    "eigensystem_analytic",
    "eigensystem_numeric",
    "expm_unitary",
    "integrate",
    "run_holonomic_protocol",
    "run_iswap_protocol",
    "schrieffer_wolff_reduce",
    "sweet_spot_derivatives",
    "vacuum_rabi_g0",
]
