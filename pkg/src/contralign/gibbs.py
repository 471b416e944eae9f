"""Gibbs sampling of alignment posteriors, one binary variable per link.

A sweep visits every link once in a freshly drawn random order and
resamples it from P(link | rest), whose log-odds is
``theta . (phi(y + link) - phi(y - link))``.  The chain starts from a
uniformly random alignment; samples are taken at the end of each sweep
after burn-in.
"""

from __future__ import annotations

import math

import numpy as np

from .corpus import SentencePair, TTable
from .features import AlignStats, delta_add, pair_context


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def on_probability(stats: AlignStats, link, weights: np.ndarray) -> float:
    """P(link on | all other links) for the alignment held by ``stats``."""
    if link in stats:
        delta = stats.remove(link)
        stats.add(link, delta)
    else:
        delta = delta_add(stats, link)
    return _sigmoid(float(weights @ delta))


def gibbs_expectation(pair: SentencePair, weights, ttable: TTable, sweeps: int,
                      burn_in: int = 0, seed=0, table: np.ndarray | None = None
                      ) -> np.ndarray:
    """Mean feature vector over ``sweeps`` post-burn-in sweep-end samples.

    ``table`` (from :func:`contralign.exact.feature_table`) switches to a
    lookup of precomputed alignment scores; the random stream and the
    resulting chain are the same as on the incremental path.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    w = np.asarray(weights, dtype=float)
    rng = np.random.default_rng(seed)
    lm, m = pair.cells, pair.m
    start = rng.random(lm) < 0.5
    if table is not None:
        return _gibbs_table(table @ w, table, start, rng, sweeps, burn_in, lm)

    total = np.zeros(len(w))
    for sweep, stats in enumerate(_chain(pair, w, ttable, start, rng, burn_in + sweeps)):
        if sweep >= burn_in:
            total += stats.features
    return total / sweeps


def _chain(pair, w, ttable, start, rng, n_sweeps):
    """Yield the (shared, mutated) AlignStats at the end of each sweep."""
    lm, m = pair.cells, pair.m
    stats = AlignStats(pair_context(pair, ttable))
    for k in np.flatnonzero(start).tolist():
        link = divmod(k, m)
        stats.add(link, delta_add(stats, link))
    for _ in range(n_sweeps):
        order = rng.permutation(lm)
        draws = rng.random(lm)
        for k, u in zip(order.tolist(), draws.tolist()):
            link = divmod(k, m)
            delta = stats.remove(link) if link in stats else delta_add(stats, link)
            if u < _sigmoid(float(w @ delta)):
                stats.add(link, delta)
        yield stats


def _gibbs_table(scores, table, start, rng, sweeps, burn_in, lm):
    mask = 0
    for k in np.flatnonzero(start).tolist():
        mask |= 1 << k
    visits = np.zeros(len(scores))
    for sweep in range(burn_in + sweeps):
        order = rng.permutation(lm)
        draws = rng.random(lm)
        for k, u in zip(order.tolist(), draws.tolist()):
            bit = 1 << k
            on, off = mask | bit, mask & ~bit
            if u < _sigmoid(float(scores[on] - scores[off])):
                mask = on
            else:
                mask = off
        if sweep >= burn_in:
            visits[mask] += 1
    return (visits / sweeps) @ table


def gibbs_trajectory(pair: SentencePair, weights, ttable: TTable, sweeps: int,
                     seed=0) -> list[frozenset]:
    """Sweep-end alignments of the incremental chain (burn-in 0)."""
    w = np.asarray(weights, dtype=float)
    rng = np.random.default_rng(seed)
    start = rng.random(pair.cells) < 0.5
    return [stats.links for stats in _chain(pair, w, ttable, start, rng, sweeps)]
