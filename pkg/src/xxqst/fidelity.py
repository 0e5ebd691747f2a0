"""Average transfer fidelities for one- and two-qubit state transfer.

Two-particle amplitudes ``g_{s1 s2}^{p q}`` are the fermionic determinants
taken in the written pair order, so ``g^{n r}`` with ``n > r`` carries a minus
sign relative to the spin-basis amplitude.  The closed-form two-qubit fidelity
is an exact input average (see ``ed_oracle.ensemble_moments``) when the chain
is mirror symmetric and the receivers are the mirror image of the senders,
``(r1, r2) = (N + 1 - s2, N + 1 - s1)``.  Other placements are accepted and
evaluated term by term, but the result is then only the closed form itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .amplitudes import AmplitudeMatrix, amplitude_rows, pair_determinant
from .errors import IndexOutOfRange, SetupArityMismatch, UnorderedPair
from .spectral import RESONANT_ENERGY, RabiMode, SpectralDecomposition, bilocalized_pair, rabi_gap, sextet_indices

LOCC_FIDELITY_2Q = 2.0 / 5.0


@dataclass(frozen=True)
class TransferSetup:
    senders: tuple
    receivers: tuple

    def __post_init__(self):
        object.__setattr__(self, "senders", tuple(int(s) for s in self.senders))
        object.__setattr__(self, "receivers", tuple(int(r) for r in self.receivers))
        if len(self.senders) != len(self.receivers) or len(self.senders) not in (1, 2):
            raise SetupArityMismatch(f"need 1 or 2 senders matched by receivers, got {self}")
        if len(set(self.senders + self.receivers)) != 2 * len(self.senders):
            raise ValueError(f"senders and receivers must be distinct sites, got {self}")
        if self.qubits == 2 and not (self.senders[0] < self.senders[1] and self.receivers[0] < self.receivers[1]):
            raise UnorderedPair(f"two-qubit blocks must be ordered pairs, got {self}")
        if self.qubits == 2 and self.senders[1] >= self.receivers[0]:
            raise ValueError(f"the sender block must lie left of the receiver block, got {self}")

    @property
    def qubits(self) -> int:
        return len(self.senders)

    @classmethod
    def one_qubit(cls, n_sites: int) -> "TransferSetup":
        return cls((1,), (n_sites,))

    @classmethod
    def two_qubit(cls, n_sites: int) -> "TransferSetup":
        return cls((1, 2), (n_sites - 1, n_sites))

    @classmethod
    def default(cls, n_sites: int, qubits: int) -> "TransferSetup":
        return cls.one_qubit(n_sites) if qubits == 1 else cls.two_qubit(n_sites)

    def is_mirror_image(self, n_sites: int) -> bool:
        return self.receivers == tuple(n_sites + 1 - s for s in reversed(self.senders))

    def check(self, n_sites: int) -> None:
        for site in self.senders + self.receivers:
            if not 1 <= site <= n_sites:
                raise IndexOutOfRange(f"site {site} outside 1..{n_sites}")


def fidelity_1q_from_abs(abs_f):
    """``1/2 + |f|/3 + |f|^2/6``, written so that |f| = 0 and 1 give 1/2 and 1 exactly."""
    return (3.0 + 2.0 * abs_f + abs_f**2) / 6.0


def fidelity_2q_from_rows(row_s1, row_s2, setup: TransferSetup):
    """Exact two-qubit average fidelity from the amplitude rows of both senders.

    ``row_s1[..., m - 1] = f_{s1}^m``; leading axes are broadcast (one entry per
    time point).  The leakage sums run over every site outside the receiver pair.
    """
    r1, r2 = setup.receivers
    f11 = row_s1[..., r1 - 1]
    f22 = row_s2[..., r2 - 1]
    f21 = row_s2[..., r1 - 1]
    f12 = row_s1[..., r2 - 1]
    g = pair_determinant(row_s1, row_s2, r1, r2)

    fbar = (
        0.25
        + 5.0 / 54.0 * np.real(f11 + f22 + 7.0 / 5.0 * f22 * np.conj(f11) + (f11 + f22) * np.conj(g))
        + 1.0 / 54.0 * (np.abs(f21) ** 2 + np.abs(f12) ** 2)
        + 5.0 / 108.0 * (np.abs(f22) ** 2 + np.abs(f11) ** 2)
        + 1.0 / 36.0 * np.abs(g) ** 2
        + 7.0 / 54.0 * np.real(g)
    )
    n_sites = row_s1.shape[-1]
    for n in range(1, n_sites + 1):
        if n in (r1, r2):
            continue
        g_n1 = pair_determinant(row_s1, row_s2, n, r1)
        g_n2 = pair_determinant(row_s1, row_s2, n, r2)
        fbar = fbar - 1.0 / 54.0 * (np.abs(g_n1) ** 2 + np.abs(g_n2) ** 2)
        fbar = fbar - 1.0 / 27.0 * np.real(
            np.conj(row_s2[..., n - 1]) * g_n1 + np.conj(row_s1[..., n - 1]) * g_n2
        )
    return fbar


def fidelity_1q(ampl: AmplitudeMatrix, setup: TransferSetup) -> float:
    if setup.qubits != 1:
        raise SetupArityMismatch("fidelity_1q needs a single sender and receiver")
    setup.check(ampl.n_sites)
    return float(fidelity_1q_from_abs(abs(ampl.f(setup.senders[0], setup.receivers[0]))))


def fidelity_2q_exact(ampl: AmplitudeMatrix, setup: TransferSetup) -> float:
    if setup.qubits != 2:
        raise SetupArityMismatch("fidelity_2q_exact needs two senders and two receivers")
    setup.check(ampl.n_sites)
    s1, s2 = setup.senders
    return float(fidelity_2q_from_rows(ampl.entries[s1 - 1], ampl.entries[s2 - 1], setup))


def fidelity_2q_perturbative_from(f1_nm1, f1_n, f2_nm1):
    """Weak-coupling two-qubit fidelity from ``f_1^{N-1}``, ``f_1^N`` and ``f_2^{N-1}``."""
    a = f1_nm1
    abs2 = np.abs(a) ** 2
    return (
        0.25
        + 10.0 / 54.0 * np.real(a)
        + 7.0 / 54.0 * np.real(a**2)
        + 12.0 / 54.0 * abs2
        + 2.0 / 54.0 * np.abs(f1_n) ** 2
        + 10.0 / 54.0 * abs2 * np.real(a)
        - 10.0 / 54.0 * np.real(np.conj(a) * f1_n * f2_nm1)
        - 7.0 / 54.0 * np.real(f1_n * f2_nm1)
    )


def fidelity_2q_perturbative(ampl: AmplitudeMatrix) -> float:
    n = ampl.n_sites
    return float(fidelity_2q_perturbative_from(ampl.f(1, n - 1), ampl.f(1, n), ampl.f(2, n - 1)))


def ref1N_closed_form(decomp: SpectralDecomposition, t, delta_omega: float | None = None):
    """Resonant-sextet closed form ``cos(2t)/2 * (1 + cos(dw t))`` for Re f_1^{N-1}."""
    if delta_omega is None:
        delta_omega = rabi_gap(decomp, RabiMode.SEXTET_N6N)
    t = np.asarray(t, dtype=float)
    return np.cos(2.0 * t) / 2.0 * (1.0 + np.cos(delta_omega * t))


def sextet_amplitude(decomp: SpectralDecomposition, t, source: int = 1, target: int | None = None):
    """``f_source^target`` restricted to the six resonant levels of an N = 6n chain."""
    n = decomp.n_sites
    target = n - 1 if target is None else target
    k = sextet_indices(n)
    a = decomp.eigenvectors
    weights = a[source - 1, k] * a[target - 1, k]
    t = np.asarray(t, dtype=float)
    return np.exp(-1j * np.multiply.outer(t, decomp.eigenvalues[k])) @ weights


def sextet_quadratures(decomp: SpectralDecomposition, t, source: int = 1, target: int | None = None):
    """Slow envelopes ``(C, S)`` with ``Re f = C cos(2t) - S sin(2t)`` on the sextet.

    Each sextet level is written as ``eps = +-2 + d``; the triplet near +2
    contributes ``w cos(d t)`` to C and ``w sin(d t)`` to S, the one near -2
    ``w cos(d t)`` and ``-w sin(d t)``.  The split is exact, and C is the
    envelope of the fast ``cos(2t)`` carrier.
    """
    n = decomp.n_sites
    target = n - 1 if target is None else target
    k = sextet_indices(n)
    a = decomp.eigenvectors
    eps = decomp.eigenvalues[k]
    carrier = np.where(eps > 0, RESONANT_ENERGY, -RESONANT_ENERGY)
    detune = eps - carrier
    weights = a[source - 1, k] * a[target - 1, k]
    t = np.asarray(t, dtype=float)
    phase = np.multiply.outer(t, detune)
    c = np.cos(phase) @ weights
    s = (np.sin(phase) * np.sign(carrier)) @ weights
    return c, s


def rabi_amplitude_1q(decomp: SpectralDecomposition, t):
    """Two-level truncation of ``f_1^N`` onto the bi-localized pair.

    Each level keeps its own phase, ``exp(-i eps t)``; relative to the pair's
    mean energy these are ``exp(-+ i dw t / 2)``.
    """
    hi, lo = bilocalized_pair(decomp)
    a = decomp.eigenvectors
    n = decomp.n_sites
    pair = np.array([hi, lo])
    weights = a[n - 1, pair] * a[0, pair]
    t = np.asarray(t, dtype=float)
    out = np.exp(-1j * np.multiply.outer(t, decomp.eigenvalues[pair])) @ weights
    return complex(out) if out.ndim == 0 else out


@dataclass
class FidelityTrace:
    times: np.ndarray
    fbar: np.ndarray
    re_f: np.ndarray
    abs_f: np.ndarray
    abs_g: np.ndarray | None = None
    setup: TransferSetup | None = field(default=None, repr=False)


def fidelity_series(decomp: SpectralDecomposition, setup: TransferSetup, times) -> np.ndarray:
    """``F(t)`` on an array of times (1-QST uses ``|f|``, 2-QST the exact formula)."""
    return _trace_arrays(decomp, setup, times)[0]


def _trace_arrays(decomp, setup, times):
    setup.check(decomp.n_sites)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    rows = amplitude_rows(decomp, setup.senders, times)
    f = rows[:, 0, setup.receivers[0] - 1]
    if setup.qubits == 1:
        return fidelity_1q_from_abs(np.abs(f)), f, None
    g = pair_determinant(rows[:, 0], rows[:, 1], *setup.receivers)
    return fidelity_2q_from_rows(rows[:, 0], rows[:, 1], setup), f, g


def fidelity_trace(decomp: SpectralDecomposition, setup: TransferSetup, times) -> FidelityTrace:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    fbar, f, g = _trace_arrays(decomp, setup, times)
    return FidelityTrace(
        times=times,
        fbar=fbar,
        re_f=f.real,
        abs_f=np.abs(f),
        abs_g=None if g is None else np.abs(g),
        setup=setup,
    )
