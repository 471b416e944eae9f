import math

import numpy as np
import pytest

from contralign.corpus import SentencePair, TTable
from contralign.exact import exact_expectation, feature_table, posterior
from contralign.features import K, LINKS, AlignStats, pair_context
from contralign.gibbs import gibbs_expectation, gibbs_trajectory, on_probability

from conftest import random_pair

EMPTY = TTable({}, {})


def test_uniform_weights_link_count():
    pair = SentencePair(("a", "b"), ("x", "y"))
    sweeps = 10_000
    e = gibbs_expectation(pair, np.zeros(K), EMPTY, sweeps, seed=3)
    # under theta = 0 every sweep-end sample is uniform: Var(link count) = 4 * 1/4
    assert abs(e[LINKS] - 2.0) < 3 * math.sqrt(1.0 / sweeps)


@pytest.mark.parametrize("value", [-1.5, 0.3, 2.0])
def test_single_link_marginal(value, ttable):
    pair = SentencePair(("s0",), ("t1",))
    w = np.zeros(K)
    w[LINKS] = value
    sweeps = 4000
    on = gibbs_expectation(pair, w, ttable, sweeps, seed=11)[LINKS]
    exact = posterior(pair, w, ttable)[frozenset({(0, 0)})]
    assert abs(on - exact) < 3 / math.sqrt(sweeps)


def test_table_path_replays_incremental_chain(rng, ttable):
    for _ in range(20):
        pair = random_pair(rng, 3, 3)
        w = rng.standard_normal(K)
        seed = int(rng.integers(1 << 30))
        slow = gibbs_expectation(pair, w, ttable, 30, burn_in=5, seed=seed)
        fast = gibbs_expectation(pair, w, ttable, 30, burn_in=5, seed=seed,
                                 table=feature_table(pair, ttable))
        np.testing.assert_allclose(fast, slow, atol=1e-9)


def test_trajectory_is_reproducible(rng, ttable):
    pair = random_pair(rng, 3, 3)
    w = rng.standard_normal(K)
    a = gibbs_trajectory(pair, w, ttable, 12, seed=5)
    assert a == gibbs_trajectory(pair, w, ttable, 12, seed=5)
    assert len(a) == 12
    assert all(isinstance(y, frozenset) for y in a)


def test_error_shrinks_with_sweeps(ttable):
    rng = np.random.default_rng(2024)
    sweeps = (1, 10, 200)
    errors = np.zeros(len(sweeps))
    for t in range(100):
        pair = random_pair(rng, 3, 3, max_cells=6)
        w = rng.standard_normal(K)
        table = feature_table(pair, ttable)
        exact = exact_expectation(pair, w, ttable, table)
        for k, s in enumerate(sweeps):
            est = gibbs_expectation(pair, w, ttable, s, seed=[t, k], table=table)
            errors[k] += np.abs(est - exact).sum()
    assert errors[0] > errors[1] > errors[2]


def test_on_probability_restores_state(ttable):
    pair = SentencePair(("s0", "s1"), ("t0", "t2"))
    ctx = pair_context(pair, ttable)
    stats = AlignStats.from_links(ctx, {(0, 0), (1, 1)})
    before = stats.features.copy()
    p = on_probability(stats, (0, 0), np.ones(K) * 0.1)
    assert 0.0 < p < 1.0
    assert stats.links == {(0, 0), (1, 1)}
    np.testing.assert_array_equal(stats.features, before)


def test_argument_checks(ttable):
    pair = SentencePair(("s0",), ("t0",))
    with pytest.raises(ValueError):
        gibbs_expectation(pair, np.zeros(K), ttable, 0)
    with pytest.raises(ValueError):
        gibbs_expectation(pair, np.zeros(K), ttable, 1, burn_in=-1)
