"""Noisy counterparts of observed sentence pairs.

Each side of a pair is corrupted independently.  ``shuffle`` permutes the
tokens; ``delete``, ``insert`` and ``replace`` touch ceil(rate * len)
positions; ``mixed`` picks one of the four strategies per side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Corpus, SentencePair
from .seeding import NOISE, substream

STRATEGIES = ("shuffle", "delete", "insert", "replace")
DEFAULT_RATE = 0.25


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseSpec:
    strategy: str = "shuffle"
    rate: float = DEFAULT_RATE
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES + ("mixed",):
            raise NoiseError(f"unknown noise strategy {self.strategy!r}")
        if not (0.0 < self.rate <= 1.0):
            raise NoiseError(f"noise rate {self.rate} outside (0, 1]")


def _corrupt(tokens: tuple[str, ...], strategy: str, rate: float,
             vocab: Sequence[str], rng: np.random.Generator) -> tuple[str, ...]:
    toks = list(tokens)
    k = math.ceil(rate * len(toks))
    if strategy == "shuffle":
        return tuple(toks[i] for i in rng.permutation(len(toks)))
    if strategy in ("insert", "replace") and not vocab:
        raise NoiseError(f"{strategy} noise needs a non-empty vocabulary")
    if strategy == "delete":
        k = min(k, len(toks) - 1)
        drop = set(rng.choice(len(toks), size=k, replace=False).tolist())
        return tuple(t for i, t in enumerate(toks) if i not in drop)
    if strategy == "replace":
        for i in rng.choice(len(toks), size=k, replace=False).tolist():
            toks[i] = vocab[rng.integers(len(vocab))]
        return tuple(toks)
    if strategy == "insert":
        for _ in range(k):
            toks.insert(int(rng.integers(len(toks) + 1)), vocab[rng.integers(len(vocab))])
        return tuple(toks)
    raise NoiseError(f"unknown noise strategy {strategy!r}")


def make_noise(pair: SentencePair, spec: NoiseSpec,
               vocabulary: tuple[Sequence[str], Sequence[str]],
               rng: np.random.Generator | None = None) -> SentencePair:
    """Corrupt both sides of ``pair``; ``rng`` defaults to one seeded by ``spec.seed``."""
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    sides = []
    for tokens, vocab in zip((pair.source, pair.target), vocabulary):
        strategy = spec.strategy
        if strategy == "mixed":
            strategy = STRATEGIES[rng.integers(len(STRATEGIES))]
        sides.append(_corrupt(tokens, strategy, spec.rate, vocab, rng))
    return SentencePair(sides[0], sides[1], pair.id)


def make_noisy_corpus(corpus: Corpus, spec: NoiseSpec, epoch: int | None = None) -> Corpus:
    """One noisy pair per observed pair, index-aligned.

    Each pair draws from its own substream keyed by the pair id (and the
    epoch when noise is resampled), so results do not depend on order.
    """
    vocab = corpus.vocabulary()
    extra = () if epoch is None else (epoch,)
    return Corpus(tuple(
        make_noise(p, spec, vocab, substream(spec.seed, NOISE, p.id, *extra))
        for p in corpus))
