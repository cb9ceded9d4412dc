import math

import numpy as np
import pytest

from gossip_consensus.errors import CapExceededError
from gossip_consensus.gossip import (
    PROPORTIONAL,
    AdoptionMatrix,
    TransmissionMatrix,
    apply_adoption,
    check_state,
    count_transmissions,
    enumerate_adoptions,
    enumerate_transmissions,
    is_consensus,
    proportional_select,
    sample_transmission,
)
from gossip_consensus.graph import from_edge_list, generate
from gossip_consensus.markov import enumerate_states

from conftest import brute_force_adoptions


@pytest.mark.parametrize(
    "family,n,expected",
    [("complete", 3, 11), ("complete", 4, 95), ("star", 3, None), ("ring-bidirectional", 4, None)],
)
def test_adoptions_match_brute_force(family, n, expected):
    g = generate(family, n)
    ours = enumerate_adoptions(enumerate_transmissions(g))
    oracle = brute_force_adoptions(g)
    assert {a.key() for a in ours} == oracle
    assert len(ours) == len(oracle)
    if expected is not None:
        assert len(ours) == expected


def test_adoption_matrices_are_row_stochastic():
    for a in enumerate_adoptions(enumerate_transmissions(generate("complete", 4))):
        m = a.matrix
        assert set(np.unique(m)) <= {0, 1}
        assert (m.sum(axis=1) == 1).all()


def test_star_transmissions():
    g = generate("star", 3)
    ts = enumerate_transmissions(g)
    assert count_transmissions(g) == 2 == len(ts)
    for w in ts:
        assert (w.matrix.sum(axis=0) == 1).all()


def test_transmission_cap():
    with pytest.raises(CapExceededError):
        enumerate_transmissions(generate("complete", 5), cap=100)


def test_matrix_round_trips():
    g = generate("complete", 3)
    for w in enumerate_transmissions(g):
        assert TransmissionMatrix.from_matrix(w.matrix, g) == w
    for a in enumerate_adoptions(enumerate_transmissions(g)):
        assert AdoptionMatrix.from_matrix(a.matrix) == a
    with pytest.raises(ValueError):
        AdoptionMatrix.from_matrix(np.zeros((3, 3), dtype=int))
    with pytest.raises(ValueError):
        TransmissionMatrix.from_matrix(np.ones((3, 3), dtype=int))


def test_sample_transmission_respects_edges(rng):
    g = generate("star", 5)
    for _ in range(50):
        w = sample_transmission(g, rng)
        for j, i in enumerate(w.targets):
            assert i in g.out_neighbors(j)


def test_proportional_select_frequencies(rng):
    # nodes 0, 1, 2 all send to node 3; node 3 sends to node 0
    w = TransmissionMatrix((3, 3, 3, 0))
    draws = 30000
    counts = np.zeros(4)
    for _ in range(draws):
        a = proportional_select(w, rng)
        assert a.sources[:3] == (3, 1, 2)
        assert a.sources[3] != 3
        counts[a.sources[3]] += 1
    p = 1 / 3
    sigma = math.sqrt(draws * p * (1 - p))
    for j in range(3):
        assert abs(counts[j] - draws * p) < 3 * sigma


def test_value_proportional_adoption(rng):
    # incoming values {2, 2, 3}: value 2 should be adopted with probability 2/3
    w = TransmissionMatrix((3, 3, 3, 0))
    x = (2, 2, 3, 1)
    draws = 30000
    hits = sum(apply_adoption(proportional_select(w, rng), x)[3] == 2 for _ in range(draws))
    p = 2 / 3
    assert abs(hits - draws * p) < 3 * math.sqrt(draws * p * (1 - p))


def test_enumerate_covers_sample(rng):
    g = generate("complete", 4)
    allowed = {a.sources for a in enumerate_adoptions(enumerate_transmissions(g))}
    for _ in range(300):
        assert PROPORTIONAL.sample(sample_transmission(g, rng), rng).sources in allowed


@pytest.mark.parametrize("family,n", [("complete", 4), ("star", 4), ("ring-bidirectional", 4)])
def test_consensus_is_fixed_point(family, n):
    adoptions = enumerate_adoptions(enumerate_transmissions(generate(family, n)))
    for c in range(1, 4):
        x = (c,) * n
        assert all(apply_adoption(a, x) == x for a in adoptions)


def test_apply_adoption_equals_matrix_product():
    g = from_edge_list(4, [(0, 1), (1, 2), (2, 0), (3, 0)])
    adoptions = enumerate_adoptions(enumerate_transmissions(g))
    for x in enumerate_states(4, 2):
        for a in adoptions:
            assert apply_adoption(a, x) == tuple(int(v) for v in a.matrix @ np.array(x))


def test_is_consensus_and_check_state():
    assert is_consensus((2, 2, 2))
    assert not is_consensus((1, 2, 2))
    with pytest.raises(ValueError):
        check_state((1, 3), 2, 2)
    with pytest.raises(ValueError):
        check_state((1, 1, 1), 2, 2)
