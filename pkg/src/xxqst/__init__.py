"""Quantum state transfer through XX spin chains via free-fermion dynamics."""

from .amplitudes import AmplitudeMatrix, amplitude_matrix, single_amplitude, two_particle_amplitude
from .analysis import ScalingFit, TransferResult, find_transfer_time, fit_power_law, scaling_exponent_1q, sweep
from .chain_model import ChainSpec, ProtocolConfig, ProtocolKind, bose_hubbard_to_xxz, build_chain, protocol_chain
from .ed_oracle import ChainOracle
from .fidelity import TransferSetup, fidelity_1q, fidelity_2q_exact, fidelity_trace
from .spectral import SpectralClass, classify_spectrum, diagonalize, rabi_gap

__version__ = "0.1.0"
