"""Chain specifications for the transfer protocols and the Bose-Hubbard mapping.

Site and bond labels in this module are 1-based: bond ``i`` joins sites
``i`` and ``i + 1``.  Energies are in units of the bulk coupling ``J = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidLength, NonHalfIntegerFilling, NonPositivePerturbation


class ProtocolKind(enum.Enum):
    UNIFORM = "uniform"
    WEAK_EDGE_1Q = "weak-edge-1q"
    BARRIER_EDGE_1Q = "barrier-edge-1q"
    BARRIER_NN_1Q = "barrier-nn-1q"
    WEAK_BLOCK_2Q = "weak-block-2q"
    BARRIER_BLOCK_2Q = "barrier-block-2q"

    @property
    def qubits(self) -> int:
        """Number of transferred qubits the protocol is designed for."""
        return 2 if self in (ProtocolKind.WEAK_BLOCK_2Q, ProtocolKind.BARRIER_BLOCK_2Q) else 1

    @property
    def is_weak(self) -> bool:
        return self in (ProtocolKind.WEAK_EDGE_1Q, ProtocolKind.WEAK_BLOCK_2Q)

    @property
    def min_sites(self) -> int:
        return 4 if self.qubits == 2 else 2

    @classmethod
    def parse(cls, value: "str | ProtocolKind") -> "ProtocolKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for kind in cls:
            if key in (kind.value, kind.name.lower().replace("_", "-")):
                return kind
        raise ValueError(f"unknown protocol kind {value!r}")


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """An open XX chain: ``n_sites`` spins, ``n_sites - 1`` couplings, ``n_sites`` fields."""

    n_sites: int
    couplings: np.ndarray
    fields: np.ndarray

    def __post_init__(self):
        if self.n_sites < 2:
            raise InvalidLength(f"need at least 2 sites, got {self.n_sites}")
        object.__setattr__(self, "couplings", _frozen(self.couplings))
        object.__setattr__(self, "fields", _frozen(self.fields))
        if self.couplings.shape != (self.n_sites - 1,):
            raise InvalidLength(f"expected {self.n_sites - 1} couplings, got {self.couplings.shape}")
        if self.fields.shape != (self.n_sites,):
            raise InvalidLength(f"expected {self.n_sites} fields, got {self.fields.shape}")
        if np.any(self.couplings <= 0):
            raise NonPositivePerturbation("all couplings must be positive")

    def __eq__(self, other):
        if not isinstance(other, ChainSpec):
            return NotImplemented
        return (
            self.n_sites == other.n_sites
            and np.array_equal(self.couplings, other.couplings)
            and np.array_equal(self.fields, other.fields)
        )

    def __hash__(self):
        return hash((self.n_sites, self.couplings.tobytes(), self.fields.tobytes()))

    @property
    def is_mirror_symmetric(self) -> bool:
        return bool(
            np.array_equal(self.couplings, self.couplings[::-1])
            and np.array_equal(self.fields, self.fields[::-1])
        )


@dataclass(frozen=True)
class ProtocolConfig:
    kind: ProtocolKind
    n_sites: int
    perturbation: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProtocolKind.parse(self.kind))


def build_chain(config: ProtocolConfig) -> ChainSpec:
    kind, n, xi = config.kind, config.n_sites, float(config.perturbation)
    if n < kind.min_sites:
        raise InvalidLength(f"{kind.value} needs at least {kind.min_sites} sites, got {n}")
    if kind.is_weak and not xi > 0:
        raise NonPositivePerturbation(f"{kind.value} needs a positive weak coupling, got {xi}")

    couplings = np.ones(n - 1)
    fields = np.zeros(n)
    # 1-based labels below; bond i is couplings[i - 1], site n is fields[n - 1]
    if kind is ProtocolKind.WEAK_EDGE_1Q:
        couplings[[0, n - 2]] = xi
    elif kind is ProtocolKind.WEAK_BLOCK_2Q:
        couplings[[1, n - 3]] = xi
    elif kind is ProtocolKind.BARRIER_EDGE_1Q:
        fields[[0, n - 1]] = xi
    elif kind is ProtocolKind.BARRIER_NN_1Q:
        fields[[1, n - 2]] = xi
    elif kind is ProtocolKind.BARRIER_BLOCK_2Q:
        fields[[2, n - 3]] = xi
    return ChainSpec(n, couplings, fields)


def protocol_chain(kind, n_sites: int, xi: float = 1.0) -> ChainSpec:
    """Shorthand for ``build_chain(ProtocolConfig(kind, n_sites, xi))``."""
    return build_chain(ProtocolConfig(ProtocolKind.parse(kind), n_sites, xi))


@dataclass(frozen=True)
class EffectiveXXZParams:
    coupling_k: float
    anisotropy_delta: float


def bose_hubbard_to_xxz(hopping_t: float, nn_interaction_v: float, filling_f: float) -> EffectiveXXZParams:
    """Hard-core (U -> infinity) mapping of Bose-Hubbard parameters onto an XXZ chain.

    ``K = 2 t (f + 1/2)`` and ``Delta = V / K``.
    """
    if not hopping_t > 0:
        raise ValueError(f"hopping must be positive, got {hopping_t}")
    twice = 2.0 * filling_f
    if not (filling_f > 0 and math.isclose(twice, round(twice), abs_tol=1e-12) and round(twice) % 2 == 1):
        raise NonHalfIntegerFilling(f"filling must be a positive half-integer, got {filling_f}")
    k = 2.0 * hopping_t * (filling_f + 0.5)
    return EffectiveXXZParams(coupling_k=k, anisotropy_delta=nn_interaction_v / k)
