import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gossip_consensus.errors import CapExceededError, SingularMatrixError, StructuralError
from gossip_consensus.graph import from_edge_list, generate, has_directed_spanning_tree, is_directed_ring
from gossip_consensus.linalg import inverse, solve
from gossip_consensus.markov import (
    analyze,
    build_chain,
    canonicalize,
    distribution_at_time,
    enumerate_states,
    is_absorbing_chain,
    markov_tail_bound,
    quantile_bound,
    state_index,
)

from conftest import all_digraphs, first_step_times
from goldens import K3_B, K3_M, K3_N, K4_TABLE


@pytest.fixture(scope="module")
def k3():
    chain = build_chain(generate("complete", 3), 2)
    return chain, analyze(chain)


def test_state_order():
    states = enumerate_states(3, 2)
    assert states[0] == (1, 1, 1) and states[1] == (1, 1, 2) and states[-1] == (2, 2, 2)
    assert all(state_index(s, 2) == i for i, s in enumerate(states))
    assert enumerate_states(2, 3)[5] == (2, 3)


def test_k3_transition_matrix(k3):
    chain, _ = k3
    assert chain.adoption_count == 11
    scaled = chain.M * 11
    assert np.allclose(scaled, np.round(scaled), atol=1e-12)
    assert np.abs(chain.M - np.array(K3_M)).max() <= 0.005
    assert np.allclose(chain.M.sum(axis=1), 1.0, atol=1e-12)


def test_k3_absorption(k3):
    _, rep = k3
    assert np.abs(rep.N - np.array(K3_N)).max() <= 1e-3
    assert np.abs(rep.B - np.array(K3_B)).max() <= 1e-3
    assert np.allclose(rep.t_A, 5.5, atol=1e-9)


def test_k3_variance_geometric(k3):
    # from every transient state K3 hits consensus with probability 2/11 per tick
    chain, rep = k3
    tr = list(chain.transient_indices)
    ab = list(chain.absorbing_indices)
    p = chain.M[np.ix_(tr, ab)].sum(axis=1)
    assert np.allclose(p, 2 / 11)
    assert np.allclose(rep.variance, (1 - 2 / 11) / (2 / 11) ** 2, atol=1e-9)


def test_k4_tables():
    rep = analyze(build_chain(generate("complete", 4), 2))
    assert build_chain(generate("complete", 4), 2).adoption_count == 95
    for i, h in enumerate(rep.transient_states):
        p1, p2, t = K4_TABLE["".join(map(str, h))]
        assert rep.B[i] == pytest.approx([p1, p2], abs=0.005)
        assert rep.t_A[i] == pytest.approx(t, abs=0.01)


def test_label_swap_symmetry():
    chain = build_chain(generate("star", 4), 2)
    rep = analyze(chain)
    for i, h in enumerate(rep.transient_states):
        j = rep.row(tuple(3 - v for v in h))
        assert rep.t_A[i] == pytest.approx(rep.t_A[j], abs=1e-9)
        assert rep.B[i, 0] == pytest.approx(rep.B[j, 1], abs=1e-9)


@pytest.mark.parametrize("family,n,k", [("complete", 3, 3), ("star", 4, 2), ("ring-bidirectional", 4, 2)])
def test_fundamental_identities(family, n, k):
    chain = build_chain(generate(family, n), k)
    cf = canonicalize(chain)
    rep = analyze(chain)
    assert np.allclose((np.eye(cf.n_transient) - cf.Q) @ rep.N, np.eye(cf.n_transient), atol=1e-9)
    assert np.allclose(rep.B.sum(axis=1), 1.0, atol=1e-9)
    assert np.allclose(chain.M.sum(axis=1), 1.0, atol=1e-9)
    assert np.allclose(rep.t_A, first_step_times(chain.M, list(chain.transient_indices)), atol=1e-9)
    assert (rep.variance >= 0).all()


def test_canonical_form_layout():
    chain = build_chain(generate("complete", 3), 2)
    cf = canonicalize(chain)
    assert list(cf.order) == [1, 2, 3, 4, 5, 6, 0, 7]
    m = cf.matrix()
    assert np.allclose(m, chain.M[np.ix_(cf.order, cf.order)])
    assert np.array_equal(cf.permutation[cf.order], np.arange(8))


def test_directed_ring_not_absorbing():
    chain = build_chain(generate("ring-directed", 3), 2)
    assert not is_absorbing_chain(canonicalize(chain))
    with pytest.raises(StructuralError):
        analyze(chain)


def test_no_spanning_tree_not_absorbing():
    g = from_edge_list(3, [(0, 1), (2, 1)])
    assert not is_absorbing_chain(canonicalize(build_chain(g, 2)))


def test_absorbing_iff_tree_and_not_ring_all_small_digraphs():
    for n in (2, 3):
        for g in all_digraphs(n):
            expected = has_directed_spanning_tree(g) and not is_directed_ring(g)
            assert is_absorbing_chain(canonicalize(build_chain(g, 2))) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=(1 << 12) - 1))
def test_absorbing_iff_tree_and_not_ring_n4(mask):
    pairs = [(u, v) for u in range(4) for v in range(4) if u != v]
    g = from_edge_list(4, [p for b, p in enumerate(pairs) if mask >> b & 1])
    expected = has_directed_spanning_tree(g) and not is_directed_ring(g)
    assert is_absorbing_chain(canonicalize(build_chain(g, 2))) == expected


def test_first_step_oracle_all_n3_k2():
    for g in all_digraphs(3):
        chain = build_chain(g, 2)
        if not is_absorbing_chain(canonicalize(chain)):
            continue
        rep = analyze(chain)
        oracle = first_step_times(chain.M, list(chain.transient_indices))
        assert np.abs(rep.t_A - oracle).max() <= 1e-9


def test_distribution_at_time(k3):
    chain, _ = k3
    z = np.zeros(8)
    z[1] = 1.0
    assert np.array_equal(distribution_at_time(z, chain, 0), z)
    z1 = distribution_at_time(z, chain, 1)
    assert np.allclose(z1, chain.M[1])
    z50 = distribution_at_time(z, chain, 200)
    assert z50[0] == pytest.approx(2 / 3, abs=1e-9) and z50[7] == pytest.approx(1 / 3, abs=1e-9)
    with pytest.raises(ValueError):
        distribution_at_time(np.ones(3), chain, 1)


def test_bounds():
    assert markov_tail_bound(5.5, 11.0) == 0.5
    assert markov_tail_bound(5.5, 2.0) == 1.0
    assert quantile_bound(5.5) == pytest.approx(110.0)
    with pytest.raises(ValueError):
        markov_tail_bound(5.5, 0.0)


def test_chain_caps():
    with pytest.raises(CapExceededError):
        build_chain(generate("complete", 5), 6)
    with pytest.raises(CapExceededError):
        build_chain(generate("complete", 4), 2, cap=10)


def test_linalg_against_numpy(rng):
    for size in (1, 4, 17):
        a = rng.normal(size=(size, size)) + size * np.eye(size)
        b = rng.normal(size=(size, 3))
        assert np.allclose(solve(a, b), np.linalg.solve(a, b), atol=1e-10)
        assert np.allclose(inverse(a) @ a, np.eye(size), atol=1e-10)
    with pytest.raises(SingularMatrixError):
        inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))
