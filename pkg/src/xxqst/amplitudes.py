"""Single- and two-particle transition amplitudes of an XX chain.

``f_n^m(t) = <m| exp(-i H t) |n> = sum_k exp(-i eps_k t) a[m, k] a[n, k]``.
Two-particle amplitudes between ordered pairs follow from the free-fermion
determinant of single-particle amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, UnorderedPair
from .spectral import SpectralDecomposition


@dataclass(frozen=True, eq=False)
class AmplitudeMatrix:
    """All ``f_n^m`` at one time; ``entries[n - 1, m - 1] = f_n^m``."""

    time: float
    entries: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.entries.shape[0]

    def f(self, n: int, m: int) -> complex:
        _check_site(n, self.n_sites)
        _check_site(m, self.n_sites)
        return complex(self.entries[n - 1, m - 1])


def _check_site(site: int, n_sites: int) -> None:
    if not 1 <= site <= n_sites:
        raise IndexOutOfRange(f"site {site} outside 1..{n_sites}")


def _phases(decomp: SpectralDecomposition, times) -> np.ndarray:
    return np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), decomp.eigenvalues))


def single_amplitude(decomp: SpectralDecomposition, n: int, m: int, t: float) -> complex:
    _check_site(n, decomp.n_sites)
    _check_site(m, decomp.n_sites)
    a = decomp.eigenvectors
    return complex(np.sum(np.exp(-1j * decomp.eigenvalues * t) * a[m - 1] * a[n - 1]))


def amplitude_matrix(decomp: SpectralDecomposition, t: float) -> AmplitudeMatrix:
    a = decomp.eigenvectors
    entries = (a * np.exp(-1j * decomp.eigenvalues * t)) @ a.T
    entries.setflags(write=False)
    return AmplitudeMatrix(float(t), entries)


def amplitude_rows(decomp: SpectralDecomposition, sources, times) -> np.ndarray:
    """Batched amplitudes out of ``sources`` (1-based) at many times.

    Returns an array of shape ``(len(times), len(sources), N)`` whose entry
    ``[i, j, m - 1]`` is ``f_{sources[j]}^m(times[i])``.  Costs O(T N^2) with
    no re-diagonalization.
    """
    sources = list(sources)
    for s in sources:
        _check_site(s, decomp.n_sites)
    a = decomp.eigenvectors
    phases = _phases(decomp, np.atleast_1d(times))
    weighted = phases[:, None, :] * a[np.asarray(sources) - 1][None, :, :]
    return weighted @ a.T


def pair_determinant(row_n, row_m, p: int, q: int):
    """``f_n^p f_m^q - f_n^q f_m^p`` from the amplitude rows of sources n and m.

    Rows may carry leading batch axes; ``p``, ``q`` are 1-based site labels.
    """
    return row_n[..., p - 1] * row_m[..., q - 1] - row_n[..., q - 1] * row_m[..., p - 1]


def two_particle_amplitude(ampl: AmplitudeMatrix, n: int, m: int, p: int, q: int) -> complex:
    """``g_{nm}^{pq}`` for ordered pairs ``n < m`` and ``p < q``."""
    if n >= m or p >= q:
        raise UnorderedPair(f"pairs must be ordered, got ({n},{m}) -> ({p},{q})")
    for site in (n, m, p, q):
        _check_site(site, ampl.n_sites)
    f = ampl.entries
    return complex(pair_determinant(f[n - 1], f[m - 1], p, q))
