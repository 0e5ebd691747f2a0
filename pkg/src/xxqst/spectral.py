"""Single-excitation spectrum of an XX chain and its structure.

The one-excitation block of the XX Hamiltonian is the real symmetric
tridiagonal matrix with diagonal ``-2 h_n`` and off-diagonal ``-2 J_n``; the
all-down state is shifted to zero energy.  Eigenvectors are stored as
``a[n, k] = <n|eps_k>`` with 0-based array indices, while every public
function taking site or level labels uses 1-based labels.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .chain_model import ChainSpec
from .errors import IndexOutOfRange, LocalizationNotFound, SextetMismatch
from .tridiag import tql_implicit

DEGENERACY_RTOL = 1e-8
# clusters of levels closer than this fraction of the mean level spacing count as quasi-degenerate
QUASI_DEGENERACY_FRACTION = 0.25
SEXTET_RTOL = 0.10
RESONANT_ENERGY = 2.0


@dataclass(frozen=True, eq=False)
class SingleExcitationHamiltonian:
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    @classmethod
    def from_chain(cls, chain: ChainSpec) -> "SingleExcitationHamiltonian":
        return cls(-2.0 * chain.fields, -2.0 * chain.couplings)

    def dense(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    hamiltonian: SingleExcitationHamiltonian

    @property
    def n_sites(self) -> int:
        return self.eigenvalues.size

    def residual(self) -> float:
        """Largest entry of ``H v_k - eps_k v_k`` over all k."""
        h = self.hamiltonian.dense()
        return float(np.abs(h @ self.eigenvectors - self.eigenvectors * self.eigenvalues).max())


def diagonalize(chain: ChainSpec) -> SpectralDecomposition:
    ham = SingleExcitationHamiltonian.from_chain(chain)
    w, v = tql_implicit(ham.diagonal, ham.off_diagonal)
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    # largest-magnitude component positive
    pivots = np.abs(v).argmax(axis=0)
    v = v * np.sign(v[pivots, np.arange(v.shape[1])])
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v, ham)


def degeneracy_tolerance(decomp: SpectralDecomposition) -> float:
    w = decomp.eigenvalues
    return DEGENERACY_RTOL * float(w[-1] - w[0])


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


class ResidueClass(enum.Enum):
    """Length classes of the weak-block chain, labelled by ``N mod 6``."""

    SIX_N = "N=6n"
    TWO_3N_PLUS_1 = "N=2(3n+1)"
    TWO_3N_PLUS_2 = "N=2(3n+2)"
    SIX_N_PLUS_MINUS_1 = "N=6n+-1"
    THREE_2N_PLUS_1 = "N=3(2n+1)"

    @classmethod
    def of(cls, n_sites: int) -> "ResidueClass":
        return {
            0: cls.SIX_N,
            1: cls.SIX_N_PLUS_MINUS_1,
            2: cls.TWO_3N_PLUS_1,
            3: cls.THREE_2N_PLUS_1,
            4: cls.TWO_3N_PLUS_2,
            5: cls.SIX_N_PLUS_MINUS_1,
        }[n_sites % 6]


@dataclass(frozen=True)
class SpectralClass:
    parity: Parity
    residue_class: ResidueClass
    has_zero_mode: bool
    degenerate_sets: tuple  # of (energy, multiplicity)

    @property
    def resonant_multiplicity(self) -> int:
        """Common multiplicity of the clusters at +-2, or 0 if they are absent or differ."""
        mults = {m for _, m in self.degenerate_sets}
        if len(self.degenerate_sets) == 2 and len(mults) == 1:
            return mults.pop()
        return 0

    @property
    def label(self) -> str:
        names = {2: "double-degenerate", 3: "triple-degenerate"}
        mult = self.resonant_multiplicity
        parts = [self.residue_class.value]
        if mult:
            parts.append(names.get(mult, f"{mult}-fold degenerate"))
        if self.has_zero_mode:
            parts.append("zero mode")
        return ", ".join(parts)

    def to_dict(self) -> dict:
        return {
            "parity": self.parity.value,
            "residue_class": self.residue_class.value,
            "has_zero_mode": self.has_zero_mode,
            "degenerate_sets": [
                {"energy": float(e), "multiplicity": int(m)} for e, m in self.degenerate_sets
            ],
            "label": self.label,
        }


def _cluster(values: np.ndarray, window: float) -> list[np.ndarray]:
    groups, current = [], [values[0]]
    for x in values[1:]:
        if x - current[-1] < window:
            current.append(x)
        else:
            groups.append(np.array(current))
            current = [x]
    groups.append(np.array(current))
    return groups


def classify_spectrum(decomp: SpectralDecomposition, n_sites: int) -> SpectralClass:
    """Classify a weak-block (h = 0) spectrum by zero mode and +-2J multiplets."""
    w = decomp.eigenvalues
    tol = degeneracy_tolerance(decomp)
    has_zero = bool(np.any(np.abs(w) < tol))

    window = QUASI_DEGENERACY_FRACTION * float(w[-1] - w[0]) / max(n_sites - 1, 1)
    sets = []
    for target in (-RESONANT_ENERGY, RESONANT_ENERGY):
        for group in _cluster(w, window):
            if group.size >= 2 and abs(group.mean() - target) < window:
                sets.append((float(group.mean()), int(group.size)))
    return SpectralClass(
        parity=Parity.EVEN if n_sites % 2 == 0 else Parity.ODD,
        residue_class=ResidueClass.of(n_sites),
        has_zero_mode=has_zero,
        degenerate_sets=tuple(sets),
    )


def _check_sites(decomp: SpectralDecomposition, sites) -> np.ndarray:
    idx = np.asarray(list(sites), dtype=int)
    if idx.size == 0:
        raise IndexOutOfRange("empty site list")
    if np.any(idx < 1) or np.any(idx > decomp.n_sites):
        raise IndexOutOfRange(f"sites {idx.tolist()} outside 1..{decomp.n_sites}")
    return idx - 1


def localization_weights(decomp: SpectralDecomposition, sites) -> np.ndarray:
    """Weight of every eigenstate on ``sites`` (1-based), as a length-N array."""
    idx = _check_sites(decomp, sites)
    return (decomp.eigenvectors[idx] ** 2).sum(axis=0)


def localization_weight(decomp: SpectralDecomposition, sites, k: int) -> float:
    if not 1 <= k <= decomp.n_sites:
        raise IndexOutOfRange(f"level {k} outside 1..{decomp.n_sites}")
    return float(localization_weights(decomp, sites)[k - 1])


class RabiMode(enum.Enum):
    BI_LOCAL_1Q = "bilocal-1q"
    SEXTET_N6N = "sextet-n6n"


def bilocalized_pair(decomp: SpectralDecomposition) -> tuple[int, int]:
    """0-based indices ``(upper, lower)`` of the two states most localized on sites 1 and N."""
    weights = localization_weights(decomp, (1, decomp.n_sites))
    top = np.argsort(weights, kind="stable")[-2:]
    if weights[top].min() <= 0.5:
        raise LocalizationNotFound(
            f"no bi-localized pair: best edge weights {np.sort(weights[top]).tolist()}"
        )
    lo, hi = sorted(top, key=lambda k: decomp.eigenvalues[k])
    return int(hi), int(lo)


def sextet_indices(n_sites: int) -> np.ndarray:
    """0-based indices of the two resonant triplets of an N = 6n weak-block chain."""
    if n_sites % 6 != 0:
        raise ValueError(f"sextet needs N = 6n, got {n_sites}")
    third = n_sites // 3
    labels = np.array([third - 1, third, third + 1, 2 * third, 2 * third + 1, 2 * third + 2])
    return labels - 1


def rabi_gap(decomp: SpectralDecomposition, mode: RabiMode | str) -> float:
    mode = RabiMode(mode)
    w = decomp.eigenvalues
    if mode is RabiMode.BI_LOCAL_1Q:
        hi, lo = bilocalized_pair(decomp)
        return float(w[hi] - w[lo])

    n = decomp.n_sites
    k = sextet_indices(n)
    block = localization_weights(decomp, (1, 2, n - 1, n))
    # a fully quadri-localized sextet carries the whole 4-site block weight
    if block[k].sum() / 4.0 <= 0.5:
        raise LocalizationNotFound(f"sextet carries only {block[k].sum():.3f} of the block weight 4")
    lower = 0.5 * (w[k[2]] - w[k[0]])
    upper = 0.5 * (w[k[5]] - w[k[3]])
    if abs(lower - upper) > SEXTET_RTOL * max(abs(lower), abs(upper)):
        raise SextetMismatch(f"triplet half-gaps disagree: {lower:.6g} vs {upper:.6g}")
    return float(lower)
