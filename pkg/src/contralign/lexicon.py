"""IBM Model 1 lexical translation tables.

Model 1 here has no NULL word and is initialised uniformly over the word
pairs that co-occur somewhere in the corpus.
"""

from __future__ import annotations

import math
from collections import defaultdict

from .corpus import Corpus, CorpusError, TTable

FLOOR = 1e-12


def _sides(corpus: Corpus, direction: str):
    if direction == "forward":
        return [(p.source, p.target) for p in corpus]
    if direction == "backward":
        return [(p.target, p.source) for p in corpus]
    raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")


def train_model1(corpus: Corpus, iterations: int, direction: str = "forward"
                 ) -> dict[tuple[str, str], float]:
    """Run Model 1 EM and return ``{(cond, word): t(word|cond)}``.

    ``forward`` conditions on source words and generates target words;
    ``backward`` the reverse.  Keys match the TTable convention for the
    corresponding direction.
    """
    if len(corpus) == 0:
        raise CorpusError("cannot train Model 1 on an empty corpus")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    pairs = _sides(corpus, direction)

    cooc: dict[str, set[str]] = defaultdict(set)
    for cond, gen in pairs:
        for c in cond:
            cooc[c].update(gen)
    t = {}
    for c in sorted(cooc):
        words = sorted(cooc[c])
        for w in words:
            t[(c, w)] = 1.0 / len(words)

    for _ in range(iterations):
        counts: dict[tuple[str, str], float] = defaultdict(float)
        for cond, gen in pairs:
            for w in gen:
                z = sum(t[(c, w)] for c in cond)
                for c in cond:
                    counts[(c, w)] += t[(c, w)] / z
        totals: dict[str, float] = defaultdict(float)
        for (c, _w), v in counts.items():
            totals[c] += v
        t = {key: max(v / totals[key[0]], FLOOR) for key, v in sorted(counts.items())}
    return t


def log_likelihood(corpus: Corpus, table: dict[tuple[str, str], float],
                   direction: str = "forward") -> float:
    """Corpus log-likelihood under Model 1 (uniform alignment prior, no NULL)."""
    total = 0.0
    for cond, gen in _sides(corpus, direction):
        for w in gen:
            total += math.log(sum(table.get((c, w), 0.0) for c in cond) / len(cond))
    return total


def train_ttable(corpus: Corpus, iterations: int = 5) -> TTable:
    return TTable(forward=train_model1(corpus, iterations, "forward"),
                  backward=train_model1(corpus, iterations, "backward"))
