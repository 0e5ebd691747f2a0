"""Cross-checks of the spectral fast path against the spin-basis oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .amplitudes import amplitude_matrix, pair_determinant
from .chain_model import ChainSpec, ProtocolKind, protocol_chain
from .ed_oracle import ChainOracle
from .fidelity import TransferSetup, fidelity_1q, fidelity_2q_exact
from .spectral import diagonalize

# strong enough to matter, weak enough to keep amplitudes non-trivial over t <= 500
DEFAULT_XI = {
    ProtocolKind.UNIFORM: 1.0,
    ProtocolKind.WEAK_EDGE_1Q: 0.05,
    ProtocolKind.BARRIER_EDGE_1Q: 5.0,
    ProtocolKind.BARRIER_NN_1Q: 10.0,
    ProtocolKind.WEAK_BLOCK_2Q: 0.001,
    ProtocolKind.BARRIER_BLOCK_2Q: 10.0,
}


@dataclass(frozen=True)
class Deviation:
    kind: str
    n_sites: int
    single: float
    pair: float
    fidelity_1q: float
    fidelity_2q: float

    @property
    def worst_amplitude(self) -> float:
        return max(self.single, self.pair)

    @property
    def worst_fidelity(self) -> float:
        return max(self.fidelity_1q, self.fidelity_2q)


def compare_chain(chain: ChainSpec, times, kind: str = "") -> Deviation:
    """Largest fast-path vs oracle deviations over ``times`` for one chain."""
    n = chain.n_sites
    decomp = diagonalize(chain)
    oracle = ChainOracle(chain)
    one = TransferSetup.one_qubit(n)
    two = TransferSetup.two_qubit(n)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    d_single = d_pair = d_f1 = d_f2 = 0.0
    for t in times:
        ampl = amplitude_matrix(decomp, t)
        d_single = max(d_single, float(np.abs(ampl.entries - oracle.single_matrix(t)).max()))
        f = ampl.entries
        for src in pairs:
            psi = oracle.evolve(src, t)
            for dst in pairs:
                g = pair_determinant(f[src[0] - 1], f[src[1] - 1], *dst)
                d_pair = max(d_pair, abs(g - psi[dst]))
        d_f1 = max(d_f1, abs(fidelity_1q(ampl, one) - oracle.fidelity_1q(1, n, t)))
        d_f2 = max(d_f2, abs(fidelity_2q_exact(ampl, two) - oracle.fidelity_2q(two.senders, two.receivers, t)))
    return Deviation(kind, n, d_single, d_pair, d_f1, d_f2)


def oracle_equivalence(n_range=range(4, 11), n_times: int = 20, t_max: float = 500.0, seed: int = 0, xi=None):
    """Deviation records for every protocol kind and length in ``n_range``.

    Times are drawn uniformly from ``[0, t_max]`` with a seeded generator, so
    the report is reproducible.
    """
    rng = np.random.default_rng(seed)
    xi = DEFAULT_XI if xi is None else xi
    out = []
    for kind in ProtocolKind:
        for n in n_range:
            if n < kind.min_sites:
                continue
            times = rng.uniform(0.0, t_max, n_times)
            out.append(compare_chain(protocol_chain(kind, n, xi[kind]), times, kind.value))
    return out
