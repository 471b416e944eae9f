import math
from collections import defaultdict

import pytest

from contralign.corpus import CorpusError, make_corpus
from contralign.lexicon import log_likelihood, train_model1, train_ttable

CORPUS = make_corpus([
    (("das", "haus"), ("the", "house")),
    (("das", "buch"), ("the", "book")),
    (("ein", "buch"), ("a", "book")),
])


def model1_reference(pairs, iterations):
    """Textbook Model 1 EM written independently of the package."""
    t = defaultdict(float)
    cooc = defaultdict(set)
    for f, e in pairs:
        for fw in f:
            cooc[fw] |= set(e)
    for fw, es in cooc.items():
        for ew in es:
            t[(fw, ew)] = 1.0 / len(es)
    for _ in range(iterations):
        count = defaultdict(float)
        total = defaultdict(float)
        for f, e in pairs:
            for ew in e:
                norm = sum(t[(fw, ew)] for fw in f)
                for fw in f:
                    c = t[(fw, ew)] / norm
                    count[(fw, ew)] += c
                    total[fw] += c
        t = defaultdict(float, {k: max(v / total[k[0]], 1e-12) for k, v in count.items()})
    return dict(t)


def test_matches_reference_em():
    pairs = [(p.source, p.target) for p in CORPUS]
    for iters in (1, 3, 7):
        ours = train_model1(CORPUS, iters)
        ref = model1_reference(pairs, iters)
        assert ours.keys() == ref.keys()
        for key in ref:
            assert ours[key] == pytest.approx(ref[key], rel=1e-12)


def test_backward_is_forward_of_swapped_corpus():
    swapped = make_corpus([(p.target, p.source) for p in CORPUS])
    assert train_model1(CORPUS, 4, "backward") == train_model1(swapped, 4, "forward")


def test_distributions_normalised():
    table = train_model1(CORPUS, 5)
    sums = defaultdict(float)
    for (cond, _w), p in table.items():
        sums[cond] += p
    for total in sums.values():
        assert total == pytest.approx(1.0, abs=1e-9)


def test_em_learns_the_classic_example():
    table = train_model1(CORPUS, 20)
    assert table[("haus", "house")] > 0.9
    assert table[("das", "the")] > 0.9


def test_log_likelihood_non_decreasing():
    values = [log_likelihood(CORPUS, train_model1(CORPUS, k), "forward") for k in range(1, 10)]
    for a, b in zip(values, values[1:]):
        assert b >= a - 1e-12


def test_log_likelihood_hand_value():
    corpus = make_corpus([(("a",), ("x", "y"))])
    table = {("a", "x"): 0.5, ("a", "y"): 0.5}
    assert log_likelihood(corpus, table, "forward") == pytest.approx(2 * math.log(0.5))


def test_train_ttable_builds_both_directions():
    tt = train_ttable(CORPUS, 5)
    assert tt.fwd("haus", "house") > 0.5
    assert tt.bwd("haus", "house") > 0.5
    assert ("house", "haus") in tt.backward


def test_errors():
    with pytest.raises(CorpusError):
        train_model1(make_corpus([]), 1)
    with pytest.raises(ValueError):
        train_model1(CORPUS, 0)
    with pytest.raises(ValueError):
        train_model1(CORPUS, 1, "sideways")
