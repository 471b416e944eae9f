import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contralign.corpus import SentencePair, TTable
from contralign.features import (CROSS, FEATURE_NAMES, INTEGER_FEATURES, K, LOCAL, NONLOCAL,
                                 AlignmentError, AlignStats, apply_add, delta_add, delta_all,
                                 extract_features, pair_context, score)

from conftest import random_alignment, random_pair, random_ttable, SRC_VOCAB, TGT_VOCAB

EMPTY_TABLE = TTable({}, {})


def _expected(**values):
    phi = np.zeros(K)
    for name, v in values.items():
        phi[FEATURE_NAMES.index(name)] = v
    return phi


def test_catalog_layout():
    assert K == 16
    assert FEATURE_NAMES[0] == "tprob" and FEATURE_NAMES[15] == "many_to_many"
    assert LOCAL == (0, 1, 2, 3, 4)
    assert NONLOCAL == tuple(range(5, 16))


def test_empty_alignment_is_zero():
    pair = SentencePair(("a", "b"), ("x", "y"))
    assert np.array_equal(extract_features(pair, set(), EMPTY_TABLE), np.zeros(K))


def test_hand_computed_one_to_one_with_swap():
    pair = SentencePair(("a", "b", "c"), ("x", "y", "z"))
    phi = extract_features(pair, {(0, 0), (1, 2), (2, 1)}, EMPTY_TABLE)
    expected = _expected(tprob=3 * 2 * math.log(1e-9), relpos=2 / 3, link_count=3,
                         swap_neighbors=1, cross_count=1, src_linked=3, tgt_linked=3,
                         src_max_fertility=1, tgt_max_fertility=1, one_to_one=3)
    np.testing.assert_allclose(phi, expected, rtol=1e-12, atol=1e-12)


def test_hand_computed_fertility_and_link_types():
    pair = SentencePair(("a", "b"), ("x", "y", "z"))
    table = TTable({("a", "x"): 0.5}, {("x", "a"): 0.25})
    phi = extract_features(pair, {(0, 0), (0, 2), (1, 2)}, table)
    tp = (math.log(0.5 + 1e-9) + math.log(0.25 + 1e-9)) + 2 * 2 * math.log(1e-9)
    expected = _expected(tprob=tp, relpos=2 / 3, link_count=3, src_linked=2, tgt_linked=2,
                         src_sibling_distance=1, src_max_fertility=2, tgt_max_fertility=2,
                         one_to_many=1, many_to_one=1, many_to_many=1)
    np.testing.assert_allclose(phi, expected, rtol=1e-12, atol=1e-12)


def test_monotone_neighbours_and_no_crossing_on_diagonal():
    pair = SentencePair(("a", "b", "c"), ("x", "y", "z"))
    phi = extract_features(pair, {(0, 0), (1, 1), (2, 2)}, EMPTY_TABLE)
    assert phi[FEATURE_NAMES.index("monotone_neighbors")] == 2
    assert phi[CROSS] == 0
    assert phi[FEATURE_NAMES.index("relpos")] == 0


def test_full_alignment_cross_count():
    # the 2x2 full grid has exactly one crossing pair: (0,1) with (1,0)
    pair = SentencePair(("a", "b"), ("x", "y"))
    full = {(0, 0), (0, 1), (1, 0), (1, 1)}
    phi = extract_features(pair, full, EMPTY_TABLE)
    assert phi[CROSS] == 1
    assert phi[FEATURE_NAMES.index("many_to_many")] == 4


def test_out_of_bounds_link():
    pair = SentencePair(("a",), ("x",))
    with pytest.raises(AlignmentError):
        extract_features(pair, {(0, 1)}, EMPTY_TABLE)


def test_score_is_dot_product():
    w = np.arange(K, dtype=float)
    phi = np.ones(K)
    assert score(w, phi) == pytest.approx(sum(range(K)))


def test_integer_features_are_integral(rng, ttable):
    for _ in range(200):
        pair = random_pair(rng, 4, 4)
        phi = extract_features(pair, random_alignment(rng, pair), ttable)
        ints = phi[list(INTEGER_FEATURES)]
        assert np.array_equal(ints, np.round(ints))


def _check_delta(pair, links, link, table):
    ctx = pair_context(pair, table)
    stats = AlignStats.from_links(ctx, links)
    delta = delta_add(stats, link)
    after = apply_add(stats, link, delta)
    truth = extract_features(pair, set(links) | {link}, table, ctx)
    ints = list(INTEGER_FEATURES)
    assert np.array_equal(after.features[ints], truth[ints])
    np.testing.assert_allclose(after.features, truth, rtol=0, atol=1e-9)
    # apply_add leaves the original untouched
    np.testing.assert_allclose(stats.features, extract_features(pair, links, table, ctx),
                               atol=1e-9)
    return stats, delta


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_incremental_update_matches_full_extraction(l, m, seed):
    rng = np.random.default_rng(seed)
    table = random_ttable(rng, SRC_VOCAB, TGT_VOCAB)
    pair = SentencePair(tuple(rng.choice(SRC_VOCAB, l)), tuple(rng.choice(TGT_VOCAB, m)))
    links = random_alignment(rng, pair)
    absent = [(i, j) for i in range(l) for j in range(m) if (i, j) not in links]
    if not absent:
        return
    link = absent[rng.integers(len(absent))]
    _check_delta(pair, links, link, table)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_vectorised_deltas_match_scalar(l, m, seed):
    rng = np.random.default_rng(seed)
    table = random_ttable(rng, SRC_VOCAB, TGT_VOCAB)
    pair = SentencePair(tuple(rng.choice(SRC_VOCAB, l)), tuple(rng.choice(TGT_VOCAB, m)))
    stats = AlignStats.from_links(pair_context(pair, table), random_alignment(rng, pair))
    D = delta_all(stats)
    for i in range(l):
        for j in range(m):
            if (i, j) not in stats:
                np.testing.assert_allclose(D[i, j], delta_add(stats, (i, j)), atol=1e-9)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_remove_inverts_add(l, m, seed):
    rng = np.random.default_rng(seed)
    table = random_ttable(rng, SRC_VOCAB, TGT_VOCAB)
    pair = SentencePair(tuple(rng.choice(SRC_VOCAB, l)), tuple(rng.choice(TGT_VOCAB, m)))
    links = random_alignment(rng, pair, 0.6)
    if not links:
        return
    ctx = pair_context(pair, table)
    stats = AlignStats.from_links(ctx, links)
    link = sorted(links)[rng.integers(len(links))]
    delta = stats.remove(link)
    np.testing.assert_allclose(stats.features,
                               extract_features(pair, links - {link}, table, ctx), atol=1e-9)
    assert stats.links == links - {link}
    stats.add(link, delta)
    np.testing.assert_allclose(stats.features, extract_features(pair, links, table, ctx),
                               atol=1e-9)


def test_add_existing_link_rejected(ttable):
    pair = SentencePair(("s0",), ("t0",))
    stats = AlignStats.from_links(pair_context(pair, ttable), {(0, 0)})
    with pytest.raises(AlignmentError):
        stats.add((0, 0), np.zeros(K))
    with pytest.raises(AlignmentError):
        AlignStats(pair_context(pair, ttable)).remove((0, 0))


def test_mask_tracks_links(rng, ttable):
    pair = random_pair(rng, 4, 4)
    links = random_alignment(rng, pair, 0.5)
    stats = AlignStats.from_links(pair_context(pair, ttable), links)
    assert stats.mask == sum(1 << (i * pair.m + j) for i, j in links)
