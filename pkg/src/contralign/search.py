"""Beam search for the n best alignments by greedy link addition.

Starting from the empty alignment, every state in the beam is expanded by
each absent link.  Children whose score gain is strictly positive compete
for the next beam (top ``b`` by score, duplicates merged); a state with no
improving child is a local maximum.  Every alignment scored on the way,
including non-improving children, is offered to the n-best accumulator.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .corpus import SentencePair, TTable
from .exact import canonical_key, mask_to_links
from .features import AlignStats, PairContext, delta_all, pair_context

DEFAULT_BEAM = 8


@dataclass(frozen=True)
class ScoredAlignment:
    alignment: frozenset
    score: float
    features: np.ndarray
    mask: int = -1


class TopN:
    """The n best distinct alignments seen so far.

    Ordered by score descending, then by ascending sorted link list.
    """

    def __init__(self, n: int, m: int | None = None):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.m = m
        self._keys: list[tuple] = []
        self._entries: list[tuple[int, float, np.ndarray]] = []
        self._masks: set[int] = set()
        self._items: list[ScoredAlignment] | None = None

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def threshold(self) -> float:
        return self._entries[-1][1] if len(self._entries) >= self.n else -np.inf

    def offer(self, mask: int, score: float, features: np.ndarray) -> bool:
        if mask in self._masks:
            return False
        full = len(self._entries) >= self.n
        if full and score < self._entries[-1][1]:
            return False
        key = (-score, canonical_key(mask))
        if full and key >= self._keys[-1]:
            return False
        pos = bisect.bisect_right(self._keys, key)
        self._keys.insert(pos, key)
        self._entries.insert(pos, (mask, score, features))
        self._masks.add(mask)
        if len(self._entries) > self.n:
            self._keys.pop()
            self._masks.discard(self._entries.pop()[0])
        self._items = None
        return True

    @property
    def items(self) -> list[ScoredAlignment]:
        if self._items is None:
            if self.m is None and self._entries:
                raise ValueError("TopN needs the target length to decode masks")
            self._items = [ScoredAlignment(mask_to_links(mask, self.m), score, feats, mask)
                           for mask, score, feats in self._entries]
        return self._items

    def scores(self) -> np.ndarray:
        return np.array([e[1] for e in self._entries])

    def feature_matrix(self) -> np.ndarray:
        return np.array([e[2] for e in self._entries]).reshape(len(self._entries), -1)


def _select(pool: dict[int, tuple], b: int) -> list[tuple[int, tuple]]:
    ranked = sorted(pool.items(), key=lambda kv: -kv[1][0])
    if len(ranked) <= b:
        return ranked
    edge = ranked[b - 1][1][0]
    head = [kv for kv in ranked if kv[1][0] > edge]
    ties = sorted((kv for kv in ranked if kv[1][0] == edge), key=lambda kv: canonical_key(kv[0]))
    return head + ties[:b - len(head)]


def beam_search(pair: SentencePair, weights, ttable: TTable, beam_size: int = DEFAULT_BEAM,
                n: int = 1, context: PairContext | None = None) -> TopN:
    if beam_size < 1 or n < 1:
        raise ValueError("beam_size and n must be >= 1")
    w = np.asarray(weights, dtype=float)
    ctx = context if context is not None else pair_context(pair, ttable)
    lm, m = ctx.l * ctx.m, ctx.m
    top = TopN(n, m)

    root = AlignStats(ctx)
    top.offer(0, 0.0, root.features.copy())
    beam, beam_scores = [root], [0.0]
    while beam:
        pool: dict[int, tuple] = {}
        deltas = []
        for s_idx, (state, base) in enumerate(zip(beam, beam_scores)):
            D = delta_all(state).reshape(lm, -1)
            deltas.append(D)
            gains = D @ w
            absent = ~state.present.ravel()
            child = base + gains
            for k in np.flatnonzero(absent & (child >= top.threshold - 1e-9)).tolist():
                feats = state.features + D[k]
                top.offer(state.mask | (1 << k), float(feats @ w), feats)
            for k in np.flatnonzero(absent & (gains > 0)).tolist():
                mask = state.mask | (1 << k)
                if mask not in pool:
                    pool[mask] = (float(child[k]), s_idx, k)
        if not pool:
            break
        new_beam, new_scores = [], []
        for _mask, (_s, s_idx, k) in _select(pool, beam_size):
            child_state = beam[s_idx].copy()
            child_state.add(divmod(k, m), deltas[s_idx][k])
            new_beam.append(child_state)
            new_scores.append(float(child_state.features @ w))
        beam, beam_scores = new_beam, new_scores
    return top


def viterbi(pair: SentencePair, weights, ttable: TTable, beam_size: int = DEFAULT_BEAM,
            context: PairContext | None = None) -> ScoredAlignment:
    return beam_search(pair, weights, ttable, beam_size, 1, context).items[0]
