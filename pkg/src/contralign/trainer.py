"""Contrastive SGD training of alignment feature weights.

The objective sums, over (observed, noisy) pairs, the log of the summed
exp-scores of all observed alignments minus the same quantity for the noisy
pair.  Its gradient for one pair is the difference of the two posterior
feature expectations, each approximated over the n best alignments found by
beam search (or computed exactly for short pairs).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import Corpus, CorpusError, SentencePair, TTable
from .exact import exact_expectation, log_marginal, MAX_CELLS
from .features import FEATURE_NAMES, K, LINKS, TPROB, PairContext, pair_context
from .noise import NoiseSpec, make_noisy_corpus
from .search import DEFAULT_BEAM, TopN, beam_search, viterbi
from .seeding import ORDER, substream

log = logging.getLogger(__name__)

# link iff t_f * t_b > 1/4 under the lexical starting point
LEXICAL_INIT = {TPROB: 1.0, LINKS: 2.0 * math.log(2.0)}


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    n: int = 1
    beam: int = DEFAULT_BEAM
    lr: float = 0.05
    epochs: int = 5
    l2: float = 0.0
    seed: int = 0
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    features: tuple[int, ...] = tuple(range(K))
    init: str = "lexical"
    expectation: str = "topn"
    resample_noise: bool = False

    def __post_init__(self):
        if self.n < 1 or self.beam < 1 or self.epochs < 1:
            raise ValueError("n, beam and epochs must be positive")
        if not self.lr > 0 or self.l2 < 0:
            raise ValueError("lr must be positive and l2 non-negative")
        if self.init not in ("lexical", "zeros"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.expectation not in ("topn", "exact"):
            raise ValueError(f"unknown expectation mode {self.expectation!r}")
        if not self.features or not set(self.features) <= set(range(K)):
            raise ValueError("features must be a non-empty subset of 0..15")

    @property
    def active(self) -> np.ndarray:
        mask = np.zeros(K)
        mask[list(self.features)] = 1.0
        return mask


def initial_weights(config: TrainConfig) -> np.ndarray:
    w = np.zeros(K)
    if config.init == "lexical":
        for idx, value in LEXICAL_INIT.items():
            w[idx] = value
    return w * config.active


def topn_expectation(topn: TopN, weights) -> np.ndarray:
    """Feature expectation under the posterior renormalised over ``topn``."""
    if len(topn) == 0:
        raise ValueError("empty n-best list")
    feats = topn.feature_matrix()
    scores = feats @ np.asarray(weights, dtype=float)
    p = np.exp(scores - scores.max())
    return (p / p.sum()) @ feats


def expectation(pair: SentencePair, weights, ttable: TTable, config: TrainConfig,
                context: PairContext | None = None) -> np.ndarray:
    if config.expectation == "exact":
        return exact_expectation(pair, weights, ttable)
    top = beam_search(pair, weights, ttable, config.beam, config.n, context)
    return topn_expectation(top, weights)


def pair_gradient(observed: SentencePair, noisy: SentencePair, weights, ttable: TTable,
                  config: TrainConfig, contexts: tuple | None = None) -> np.ndarray:
    ctx_obs, ctx_noisy = contexts if contexts is not None else (None, None)
    return (expectation(observed, weights, ttable, config, ctx_obs)
            - expectation(noisy, weights, ttable, config, ctx_noisy))


def exact_objective(corpus: Sequence[SentencePair], noisy_corpus: Sequence[SentencePair],
                    weights, ttable: TTable, tables: Sequence | None = None) -> float:
    """Contrastive objective by full enumeration (short pairs only)."""
    total = 0.0
    for idx, (obs, noisy) in enumerate(zip(corpus, noisy_corpus)):
        t_obs, t_noisy = tables[idx] if tables is not None else (None, None)
        total += (log_marginal(obs, weights, ttable, t_obs)
                  - log_marginal(noisy, weights, ttable, t_noisy))
    return total


@dataclass
class EpochLog:
    epoch: int
    updates: int
    grad_l1: float
    probe_j: float | None = None
    probe_aer: float | None = None


def _probe_pairs(probe: Corpus | None, config: TrainConfig):
    if probe is None:
        return None
    short = Corpus(tuple(p for p in probe if p.cells <= MAX_CELLS // 2))
    noisy = make_noisy_corpus(short, config.noise)
    keep = [(o, n) for o, n in zip(short, noisy) if n.cells <= MAX_CELLS // 2]
    return keep or None


def train(corpus: Corpus, ttable: TTable, config: TrainConfig = TrainConfig(),
          probe: Corpus | None = None, heldout: Corpus | None = None
          ) -> tuple[np.ndarray, list[EpochLog]]:
    """Run contrastive SGD; returns the weights and one log entry per epoch.

    ``probe`` pairs short enough for enumeration report the exact objective
    per epoch; ``heldout`` with gold alignments reports corpus AER.
    """
    if len(corpus) == 0:
        raise CorpusError("cannot train on an empty corpus")
    from .metrics import corpus_aer

    active = config.active
    w = initial_weights(config)
    obs_ctx = [pair_context(p, ttable) for p in corpus]
    noisy = make_noisy_corpus(corpus, config.noise)
    noisy_ctx = [pair_context(p, ttable) for p in noisy]
    probe_pairs = _probe_pairs(probe, config)
    history = []
    for epoch in range(config.epochs):
        if config.resample_noise and epoch > 0:
            noisy = make_noisy_corpus(corpus, config.noise, epoch)
            noisy_ctx = [pair_context(p, ttable) for p in noisy]
        eta = config.lr / (1.0 + epoch)
        order = substream(config.seed, ORDER, epoch).permutation(len(corpus))
        grad_l1 = 0.0
        for idx in order.tolist():
            g = pair_gradient(corpus[idx], noisy[idx], w, ttable, config,
                              (obs_ctx[idx], noisy_ctx[idx]))
            g *= active
            grad_l1 += float(np.abs(g).sum())
            w = w + eta * (g - config.l2 * w)
        if not np.all(np.isfinite(w)):
            raise TrainingError(f"weights diverged in epoch {epoch + 1}")
        entry = EpochLog(epoch + 1, len(corpus), grad_l1 / len(corpus))
        if probe_pairs:
            entry.probe_j = exact_objective([o for o, _ in probe_pairs],
                                            [n for _, n in probe_pairs], w, ttable)
        if heldout is not None and heldout.gold is not None:
            preds = [viterbi(p, w, ttable, config.beam).alignment for p in heldout]
            entry.probe_aer = corpus_aer(preds, heldout.gold)
        log.info("epoch %d: mean |grad| %.4f", entry.epoch, entry.grad_l1)
        history.append(entry)
    return w, history


def align_corpus(corpus: Corpus, weights, ttable: TTable, beam: int = DEFAULT_BEAM) -> list:
    return [viterbi(p, weights, ttable, beam).alignment for p in corpus]


def save_weights(weights, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for idx, (name, value) in enumerate(zip(FEATURE_NAMES, weights)):
            fh.write(f"{idx} {name} {float(value)!r}\n")


def load_weights(path) -> np.ndarray:
    w = np.zeros(K)
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 3 or not parts[0].isdigit() or int(parts[0]) >= K:
                raise ValueError(f"{path}:{lineno}: expected 'index name value'")
            idx = int(parts[0])
            if parts[1] != FEATURE_NAMES[idx]:
                raise ValueError(f"{path}:{lineno}: index {idx} is {FEATURE_NAMES[idx]}, "
                                 f"not {parts[1]}")
            w[idx] = float(parts[2])
            seen.add(idx)
    if len(seen) != K:
        raise ValueError(f"{path}: expected {K} weights, found {len(seen)}")
    return w


def write_log(history: Sequence[EpochLog], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "grad_l1", "probe_j", "probe_aer"])
        for e in history:
            writer.writerow([e.epoch, f"{e.grad_l1:.10g}",
                             "" if e.probe_j is None else f"{e.probe_j:.10g}",
                             "" if e.probe_aer is None else f"{e.probe_aer:.6f}"])
