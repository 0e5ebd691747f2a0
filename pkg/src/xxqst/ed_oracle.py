"""Brute-force propagation in the spin basis, used as ground truth.

Works directly on spin configurations inside the 0-, 1- and 2-excitation
sectors (no fermionization), with dense ``numpy.linalg.eigh`` for the
propagator.  Average fidelities are obtained from the Kraus operators of the
sender-to-receiver channel, independently of any closed-form fidelity
expression.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .chain_model import ChainSpec
from .errors import ConvergenceFailure, IndexOutOfRange, SizeCapExceeded

MAX_SITES = 14

# E|phi_i|^2 |phi_k|^2 over bit strings i, k of the input register.  One qubit:
# Haar.  Two qubits: 10/108 on the diagonal, 5/108 for strings one bit flip
# apart, 7/108 for strings two flips apart; this ensemble reproduces the
# closed-form two-qubit average fidelity used by the fast path.
_MOMENTS = {
    1: np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0,
    2: np.array(
        [
            [10.0, 5.0, 5.0, 7.0],
            [5.0, 10.0, 7.0, 5.0],
            [5.0, 7.0, 10.0, 5.0],
            [7.0, 5.0, 5.0, 10.0],
        ]
    )
    / 108.0,
}


def ensemble_moments(n_qubits: int) -> np.ndarray:
    return _MOMENTS[n_qubits].copy()


def haar_moments(n_qubits: int) -> np.ndarray:
    d = 2**n_qubits
    return (np.ones((d, d)) + np.eye(d)) / (d * (d + 1))


@dataclass(frozen=True)
class SectorBasis:
    n_sites: int
    excitation_count: int
    states: tuple = field(init=False)

    def __post_init__(self):
        if self.excitation_count not in (0, 1, 2):
            raise ValueError(f"only 0, 1 and 2 excitations are supported, got {self.excitation_count}")
        if self.n_sites > MAX_SITES:
            raise SizeCapExceeded(f"oracle is capped at {MAX_SITES} sites, got {self.n_sites}")
        states = tuple(itertools.combinations(range(1, self.n_sites + 1), self.excitation_count))
        object.__setattr__(self, "states", states)

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def dimension(self) -> int:
        return len(self.states)


def sector_hamiltonian(chain: ChainSpec, sector: SectorBasis) -> np.ndarray:
    if chain.n_sites > MAX_SITES:
        raise SizeCapExceeded(f"oracle is capped at {MAX_SITES} sites, got {chain.n_sites}")
    if sector.n_sites != chain.n_sites:
        raise ValueError("sector and chain disagree on the number of sites")
    dim = sector.dimension
    h = np.zeros((dim, dim))
    for i, state in enumerate(sector.states):
        occupied = set(state)
        h[i, i] = sum(-2.0 * chain.fields[n - 1] for n in occupied)
        for bond in range(1, chain.n_sites):
            left, right = bond, bond + 1
            if (left in occupied) == (right in occupied):
                continue
            moved = (occupied - {left, right}) | ({right} if left in occupied else {left})
            j = sector.index[tuple(sorted(moved))]
            h[i, j] = -2.0 * chain.couplings[bond - 1]
    return h


class SectorPropagator:
    """Caches the dense eigendecomposition of one sector matrix."""

    def __init__(self, hmat: np.ndarray):
        try:
            self.w, self.v = np.linalg.eigh(hmat)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc

    def propagate(self, initial: int, t: float) -> np.ndarray:
        if not 0 <= initial < self.w.size:
            raise IndexOutOfRange(f"basis index {initial} outside 0..{self.w.size - 1}")
        return self.v @ (np.exp(-1j * self.w * t) * self.v[initial])


def sector_propagate(hmat: np.ndarray, initial: int, t: float) -> np.ndarray:
    """``exp(-i H t)`` applied to basis vector ``initial`` (0-based index into the sector)."""
    return SectorPropagator(hmat).propagate(initial, t)


class ChainOracle:
    """Propagators of the 0-, 1- and 2-excitation sectors of one chain."""

    def __init__(self, chain: ChainSpec):
        self.chain = chain
        self.sectors = [SectorBasis(chain.n_sites, k) for k in (0, 1, 2)]
        self.propagators = [SectorPropagator(sector_hamiltonian(chain, s)) for s in self.sectors]

    def evolve(self, occupied, t: float) -> dict:
        """Map from occupied-site tuples to amplitudes of ``exp(-iHt)|occupied>``."""
        key = tuple(sorted(occupied))
        sector = self.sectors[len(key)]
        psi = self.propagators[len(key)].propagate(sector.index[key], t)
        return dict(zip(sector.states, psi))

    def single_amplitude(self, n: int, m: int, t: float) -> complex:
        return complex(self.evolve((n,), t)[(m,)])

    def single_matrix(self, t: float) -> np.ndarray:
        n = self.chain.n_sites
        out = np.empty((n, n), dtype=complex)
        for src in range(1, n + 1):
            psi = self.evolve((src,), t)
            out[src - 1] = [psi[(m,)] for m in range(1, n + 1)]
        return out

    def pair_amplitude(self, n: int, m: int, p: int, q: int, t: float) -> complex:
        """Spin-basis ``<p q| exp(-iHt) |n m>``; symmetric in each pair."""
        return complex(self.evolve((n, m), t)[tuple(sorted((p, q)))])

    def kraus_operators(self, senders, receivers, t: float) -> dict:
        """Kraus operators of the sender-to-receiver channel at time ``t``.

        Keys are the occupied non-receiver sites; each value is a ``d x d``
        matrix over sender/receiver bit strings, with bit ``j`` of the index
        set when site ``senders[j]`` (input) or ``receivers[j]`` (output) is up.
        """
        senders, receivers = list(senders), list(receivers)
        d = 2 ** len(senders)
        ops: dict = {}
        for x in range(d):
            start = [s for j, s in enumerate(senders) if x >> j & 1]
            for config, amp in self.evolve(start, t).items():
                occ = set(config)
                y = sum(1 << j for j, r in enumerate(receivers) if r in occ)
                rest = tuple(sorted(occ.difference(receivers)))
                ops.setdefault(rest, np.zeros((d, d), dtype=complex))[y, x] += amp
        return ops

    def average_fidelity(self, senders, receivers, t: float, moments=None, receiver_phases=None) -> float:
        """Fidelity ``sum_e |<phi|K_e|phi>|^2`` averaged over an input ensemble.

        The ensemble is described by its second moments of populations,
        ``moments[i, k] = E|phi_i|^2 |phi_k|^2``, with independent uniform
        phases on the components.  Defaults to :func:`ensemble_moments`.
        ``receiver_phases[j]`` multiplies the up state of receiver ``j`` (a
        local z rotation applied after the transfer).
        """
        n_q = len(senders)
        p = ensemble_moments(n_q) if moments is None else np.asarray(moments, dtype=float)
        rot = np.ones(2**n_q, dtype=complex)
        if receiver_phases is not None:
            for y in range(rot.size):
                for j, ph in enumerate(receiver_phases):
                    if y >> j & 1:
                        rot[y] *= ph
        total = 0.0
        for k in self.kraus_operators(senders, receivers, t).values():
            k = rot[:, None] * k
            diag = np.diag(k)
            off = np.abs(k) ** 2
            np.fill_diagonal(off, 0.0)
            total += float(np.real(diag @ p @ diag.conj())) + float(np.sum(p * off))
        return total

    def haar_fidelity(self, senders, receivers, t: float) -> float:
        """Haar-averaged fidelity via ``(d + sum_e |Tr K_e|^2) / (d (d + 1))``."""
        d = 2 ** len(senders)
        traces = [np.trace(k) for k in self.kraus_operators(senders, receivers, t).values()]
        return float((d + sum(abs(x) ** 2 for x in traces)) / (d * (d + 1)))

    def fidelity_1q(self, sender: int, receiver: int, t: float) -> float:
        """1-qubit average fidelity after the optimal receiver phase correction."""
        f = self.single_amplitude(sender, receiver, t)
        phase = np.conj(f) / abs(f) if abs(f) > 0 else 1.0
        return self.average_fidelity([sender], [receiver], t, receiver_phases=[phase])

    def fidelity_2q(self, senders, receivers, t: float) -> float:
        return self.average_fidelity(senders, receivers, t)
