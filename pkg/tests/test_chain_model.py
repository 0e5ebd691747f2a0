import numpy as np
import pytest
from hypothesis import given, strategies as st

from xxqst.chain_model import (
    ChainSpec,
    ProtocolConfig,
    ProtocolKind,
    bose_hubbard_to_xxz,
    build_chain,
    protocol_chain,
)
from xxqst.errors import InvalidLength, NonHalfIntegerFilling, NonPositivePerturbation


def test_uniform_five_sites():
    chain = build_chain(ProtocolConfig(ProtocolKind.UNIFORM, 5))
    assert chain.couplings.tolist() == [1, 1, 1, 1]
    assert chain.fields.tolist() == [0] * 5


def test_weak_block_24():
    chain = protocol_chain("weak-block-2q", 24, 0.001)
    expected = np.ones(23)
    expected[[1, 21]] = 0.001  # J_2 and J_22
    assert np.array_equal(chain.couplings, expected)
    assert not chain.fields.any()


def test_barrier_nn_10():
    chain = protocol_chain(ProtocolKind.BARRIER_NN_1Q, 10, 50)
    assert chain.fields.tolist() == [0, 50, 0, 0, 0, 0, 0, 0, 50, 0]
    assert np.all(chain.couplings == 1)


def _expected(kind, n, xi):
    j, h = np.ones(n - 1), np.zeros(n)
    # 1-based positions written out per kind
    if kind is ProtocolKind.WEAK_EDGE_1Q:
        j[0] = j[n - 2] = xi
    elif kind is ProtocolKind.WEAK_BLOCK_2Q:
        j[1] = j[n - 3] = xi
    elif kind is ProtocolKind.BARRIER_EDGE_1Q:
        h[0] = h[n - 1] = xi
    elif kind is ProtocolKind.BARRIER_NN_1Q:
        h[1] = h[n - 2] = xi
    elif kind is ProtocolKind.BARRIER_BLOCK_2Q:
        h[2] = h[n - 3] = xi
    return j, h


@pytest.mark.parametrize("kind", list(ProtocolKind))
@pytest.mark.parametrize("n", range(4, 13))
def test_kind_layout_exhaustive(kind, n):
    chain = protocol_chain(kind, n, 0.37)
    j, h = _expected(kind, n, 0.37)
    assert np.array_equal(chain.couplings, j)
    assert np.array_equal(chain.fields, h)
    assert chain.is_mirror_symmetric


def test_chain_validation():
    with pytest.raises(InvalidLength):
        ChainSpec(3, [1.0], [0, 0, 0])
    with pytest.raises(InvalidLength):
        ChainSpec(3, [1.0, 1.0], [0, 0])
    with pytest.raises(InvalidLength):
        ChainSpec(1, [], [0])
    with pytest.raises(NonPositivePerturbation):
        ChainSpec(3, [1.0, 0.0], [0, 0, 0])
    with pytest.raises(NonPositivePerturbation):
        protocol_chain("weak-edge-1q", 6, -0.1)
    with pytest.raises(InvalidLength):
        protocol_chain("weak-block-2q", 3, 0.1)


def test_chain_is_immutable_and_hashable():
    chain = protocol_chain("uniform", 4)
    with pytest.raises(ValueError):
        chain.couplings[0] = 5.0
    assert chain == protocol_chain("uniform", 4)
    assert len({chain, protocol_chain("uniform", 4)}) == 1


def test_kind_parsing():
    assert ProtocolKind.parse("WEAK_BLOCK_2Q") is ProtocolKind.WEAK_BLOCK_2Q
    assert ProtocolKind.parse("barrier-nn-1q").qubits == 1
    with pytest.raises(ValueError):
        ProtocolKind.parse("ballistic")


@pytest.mark.parametrize(
    "t,v,f,k,delta",
    [(1, 0, 0.5, 2, 0), (0.5, 1, 0.5, 1, 1), (2, 3, 1.5, 8, 0.375)],
)
def test_bose_hubbard_examples(t, v, f, k, delta):
    params = bose_hubbard_to_xxz(t, v, f)
    assert params.coupling_k == pytest.approx(k, abs=1e-15)
    assert params.anisotropy_delta == pytest.approx(delta, abs=1e-15)


def test_bose_hubbard_rejects_bad_filling():
    with pytest.raises(NonHalfIntegerFilling):
        bose_hubbard_to_xxz(1, 1, 1.0)
    with pytest.raises(ValueError):
        bose_hubbard_to_xxz(0, 1, 0.5)


@given(
    t=st.floats(0.01, 100),
    v=st.floats(-100, 100),
    twice_f=st.integers(0, 20).map(lambda m: 2 * m + 1),
    scale=st.floats(0.1, 10),
)
def test_bose_hubbard_linear_and_consistent(t, v, twice_f, scale):
    f = twice_f / 2
    p = bose_hubbard_to_xxz(t, v, f)
    q = bose_hubbard_to_xxz(scale * t, v, f)
    assert q.coupling_k == pytest.approx(scale * p.coupling_k, rel=1e-14)
    assert p.anisotropy_delta * p.coupling_k == pytest.approx(v, rel=1e-14, abs=1e-14)
