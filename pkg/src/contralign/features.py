"""Alignment feature map, linear scoring and incremental updates.

An alignment is a ``frozenset`` of 0-based ``(i, j)`` links, ``i`` indexing
the source side and ``j`` the target side.  Feature vectors and weight
vectors are float64 arrays of length :data:`K`.

Feature catalog (index: name)

====  ======================  ==============================================
0     tprob                   sum of ln(t_f+eps) + ln(t_b+eps) over links
1     relpos                  sum of |(i+1)/l - (j+1)/m| over links
2     link_count              number of links
3     monotone_neighbors      link pairs (i, j), (i+1, j+1)
4     swap_neighbors          link pairs (i, j), (i+1, j-1)
5     cross_count             unordered link pairs with (i-i')(j-j') < 0
6     src_linked              source words with fertility >= 1
7     tgt_linked              target words with fertility >= 1
8     src_sibling_distance    gaps between consecutive targets of a source word
9     tgt_sibling_distance    gaps between consecutive sources of a target word
10    src_max_fertility       largest source fertility
11    tgt_max_fertility       largest target fertility
12    one_to_one              links with source fert 1 and target fert 1
13    one_to_many             links with source fert >= 2 and target fert 1
14    many_to_one             links with source fert 1 and target fert >= 2
15    many_to_many            links with source fert >= 2 and target fert >= 2
====  ======================  ==============================================

Indices 0-4 are the local group, 5-15 the non-local group.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .corpus import Link, SentencePair, TTable

FEATURE_NAMES = (
    "tprob", "relpos", "link_count", "monotone_neighbors", "swap_neighbors",
    "cross_count", "src_linked", "tgt_linked", "src_sibling_distance",
    "tgt_sibling_distance", "src_max_fertility", "tgt_max_fertility",
    "one_to_one", "one_to_many", "many_to_one", "many_to_many",
)
K = len(FEATURE_NAMES)
LOCAL = tuple(range(5))
NONLOCAL = tuple(range(5, K))
INTEGER_FEATURES = tuple(range(2, K))  # all but tprob and relpos
EPS = 1e-9

(TPROB, RELPOS, LINKS, MONO, SWAP, CROSS, SRC_LINKED, TGT_LINKED, SRC_SIB,
 TGT_SIB, SRC_MAXF, TGT_MAXF, O2O, O2M, M2O, M2M) = range(K)

Alignment = frozenset  # frozenset[Link]


class AlignmentError(ValueError):
    pass


def canonical(alignment: Iterable[Link]) -> tuple[Link, ...]:
    return tuple(sorted(alignment))


def check_bounds(pair: SentencePair, alignment: Iterable[Link]) -> None:
    for i, j in alignment:
        if not (0 <= i < pair.l and 0 <= j < pair.m):
            raise AlignmentError(f"link ({i}, {j}) outside {pair.l}x{pair.m} pair")


@dataclass(frozen=True)
class PairContext:
    """Per-link lexical and positional values of one sentence pair."""

    pair: SentencePair
    tprob: np.ndarray   # (l, m)
    relpos: np.ndarray  # (l, m)

    @property
    def l(self) -> int:
        return self.pair.l

    @property
    def m(self) -> int:
        return self.pair.m


def pair_context(pair: SentencePair, ttable: TTable) -> PairContext:
    l, m = pair.l, pair.m
    tp = np.empty((l, m))
    for i, s in enumerate(pair.source):
        for j, t in enumerate(pair.target):
            tp[i, j] = np.log(ttable.fwd(s, t) + EPS) + np.log(ttable.bwd(s, t) + EPS)
    rel = np.abs((np.arange(1, l + 1)[:, None] / l) - (np.arange(1, m + 1)[None, :] / m))
    tp.flags.writeable = False
    rel.flags.writeable = False
    return PairContext(pair, tp, rel)


def extract_features(pair: SentencePair, alignment: Iterable[Link], ttable: TTable,
                     context: PairContext | None = None) -> np.ndarray:
    """Compute the feature vector of ``alignment`` from scratch."""
    links = canonical(set(alignment))
    check_bounds(pair, links)
    ctx = context if context is not None else pair_context(pair, ttable)
    l, m = pair.l, pair.m
    linkset = set(links)
    phi = np.zeros(K)

    src_t: list[list[int]] = [[] for _ in range(l)]
    tgt_s: list[list[int]] = [[] for _ in range(m)]
    for i, j in links:
        src_t[i].append(j)
        tgt_s[j].append(i)

    for i, j in links:
        phi[TPROB] += ctx.tprob[i, j]
        phi[RELPOS] += abs((i + 1) / l - (j + 1) / m)
        phi[MONO] += (i + 1, j + 1) in linkset
        phi[SWAP] += (i + 1, j - 1) in linkset
    phi[LINKS] = len(links)
    for a in range(len(links)):
        i, j = links[a]
        for b in range(a + 1, len(links)):
            i2, j2 = links[b]
            phi[CROSS] += (i - i2) * (j - j2) < 0

    fs = [len(ts) for ts in src_t]
    ft = [len(ss) for ss in tgt_s]
    phi[SRC_LINKED] = sum(f >= 1 for f in fs)
    phi[TGT_LINKED] = sum(f >= 1 for f in ft)
    for lists, idx in ((src_t, SRC_SIB), (tgt_s, TGT_SIB)):
        for pos in lists:
            pos = sorted(pos)
            phi[idx] += sum(b - a - 1 for a, b in zip(pos, pos[1:]))
    phi[SRC_MAXF] = max(fs)
    phi[TGT_MAXF] = max(ft)
    for i, j in links:
        many_src, many_tgt = fs[i] >= 2, ft[j] >= 2
        phi[(O2O, M2O, O2M, M2M)[2 * many_src + many_tgt]] += 1
    return phi


def score(weights: np.ndarray, features: np.ndarray) -> float:
    weights = np.asarray(weights, dtype=float)
    features = np.asarray(features, dtype=float)
    if weights.shape != features.shape:
        raise ValueError(f"shape mismatch {weights.shape} vs {features.shape}")
    return float(weights @ features)


class AlignStats:
    """Mutable summary of one alignment supporting O(|y|) link deltas.

    ``features`` always equals :func:`extract_features` of ``links``.
    """

    __slots__ = ("ctx", "present", "src_fert", "tgt_fert", "src_links", "tgt_links",
                 "src_lo", "src_hi", "tgt_lo", "tgt_hi", "max_src", "max_tgt",
                 "features", "mask")

    def __init__(self, ctx: PairContext):
        l, m = ctx.l, ctx.m
        self.ctx = ctx
        self.present = np.zeros((l, m), dtype=bool)
        self.src_fert = np.zeros(l, dtype=np.int64)
        self.tgt_fert = np.zeros(m, dtype=np.int64)
        self.src_links: list[list[int]] = [[] for _ in range(l)]
        self.tgt_links: list[list[int]] = [[] for _ in range(m)]
        self.src_lo = np.full(l, m, dtype=np.int64)
        self.src_hi = np.full(l, -1, dtype=np.int64)
        self.tgt_lo = np.full(m, l, dtype=np.int64)
        self.tgt_hi = np.full(m, -1, dtype=np.int64)
        self.max_src = 0
        self.max_tgt = 0
        self.features = np.zeros(K)
        self.mask = 0

    @classmethod
    def empty(cls, pair: SentencePair, ttable: TTable) -> "AlignStats":
        return cls(pair_context(pair, ttable))

    @classmethod
    def from_links(cls, ctx: PairContext, links: Iterable[Link]) -> "AlignStats":
        stats = cls(ctx)
        for link in canonical(set(links)):
            stats.add(link, delta_add(stats, link))
        return stats

    @property
    def links(self) -> frozenset:
        rows, cols = np.nonzero(self.present)
        return frozenset(zip(rows.tolist(), cols.tolist()))

    def copy(self) -> "AlignStats":
        new = AlignStats.__new__(AlignStats)
        new.ctx = self.ctx
        for name in ("present", "src_fert", "tgt_fert", "src_lo", "src_hi",
                     "tgt_lo", "tgt_hi", "features"):
            setattr(new, name, getattr(self, name).copy())
        new.src_links = [r[:] for r in self.src_links]
        new.tgt_links = [c[:] for c in self.tgt_links]
        new.max_src, new.max_tgt, new.mask = self.max_src, self.max_tgt, self.mask
        return new

    def __contains__(self, link) -> bool:
        i, j = link
        return bool(self.present[i, j])

    def _set(self, i: int, j: int) -> None:
        self.present[i, j] = True
        self.mask |= 1 << (i * self.ctx.m + j)
        self.src_fert[i] += 1
        self.tgt_fert[j] += 1
        bisect.insort(self.src_links[i], j)
        bisect.insort(self.tgt_links[j], i)
        self.src_lo[i] = self.src_links[i][0]
        self.src_hi[i] = self.src_links[i][-1]
        self.tgt_lo[j] = self.tgt_links[j][0]
        self.tgt_hi[j] = self.tgt_links[j][-1]
        self.max_src = max(self.max_src, int(self.src_fert[i]))
        self.max_tgt = max(self.max_tgt, int(self.tgt_fert[j]))

    def add(self, link: Link, delta: np.ndarray) -> None:
        """In-place counterpart of :func:`apply_add`."""
        i, j = link
        if self.present[i, j]:
            raise AlignmentError(f"link {link} already present")
        self._set(i, j)
        self.features += delta

    def remove(self, link: Link) -> np.ndarray:
        """Remove ``link`` in place and return phi(y) - phi(y without link)."""
        i, j = link
        if not self.present[i, j]:
            raise AlignmentError(f"link {link} not present")
        self.present[i, j] = False
        self.mask &= ~(1 << (i * self.ctx.m + j))
        self.src_fert[i] -= 1
        self.tgt_fert[j] -= 1
        self.src_links[i].remove(j)
        self.tgt_links[j].remove(i)
        r, c = self.src_links[i], self.tgt_links[j]
        self.src_lo[i], self.src_hi[i] = (r[0], r[-1]) if r else (self.ctx.m, -1)
        self.tgt_lo[j], self.tgt_hi[j] = (c[0], c[-1]) if c else (self.ctx.l, -1)
        self.max_src = int(self.src_fert.max())
        self.max_tgt = int(self.tgt_fert.max())
        delta = delta_add(self, link)
        self.features -= delta
        return delta


def _sibling_gain(sorted_pos: list[int], new: int) -> int:
    if not sorted_pos:
        return 0
    lo, hi = sorted_pos[0], sorted_pos[-1]
    return (max(hi, new) - min(lo, new)) - (hi - lo) - 1


def delta_add(stats: AlignStats, link: Link) -> np.ndarray:
    """phi(y + link) - phi(y) for the alignment summarised by ``stats``."""
    i, j = link
    ctx = stats.ctx
    l, m = ctx.l, ctx.m
    if not (0 <= i < l and 0 <= j < m):
        raise AlignmentError(f"link ({i}, {j}) outside {l}x{m} pair")
    present = stats.present
    if present[i, j]:
        raise AlignmentError(f"link {link} already present")
    d = np.zeros(K)
    d[TPROB] = ctx.tprob[i, j]
    d[RELPOS] = ctx.relpos[i, j]
    d[LINKS] = 1.0
    d[MONO] = (int(i > 0 and j > 0 and present[i - 1, j - 1])
               + int(i + 1 < l and j + 1 < m and present[i + 1, j + 1]))
    d[SWAP] = (int(i > 0 and j + 1 < m and present[i - 1, j + 1])
               + int(i + 1 < l and j > 0 and present[i + 1, j - 1]))
    cross = 0
    for i2, row in enumerate(stats.src_links):
        if i2 == i or not row:
            continue
        # links in row i2 crossing (i, j): targets above j for earlier rows, below j for later
        k = bisect.bisect_right(row, j)
        cross += (len(row) - k) if i2 < i else bisect.bisect_left(row, j)
    d[CROSS] = cross

    a, b = int(stats.src_fert[i]), int(stats.tgt_fert[j])
    d[SRC_LINKED] = a == 0
    d[TGT_LINKED] = b == 0
    d[SRC_SIB] = _sibling_gain(stats.src_links[i], j)
    d[TGT_SIB] = _sibling_gain(stats.tgt_links[j], i)
    d[SRC_MAXF] = max(stats.max_src, a + 1) - stats.max_src
    d[TGT_MAXF] = max(stats.max_tgt, b + 1) - stats.max_tgt

    d[(O2O, M2O, O2M, M2M)[2 * (a >= 1) + (b >= 1)]] += 1
    if a == 1:
        # the lone link of source i gains a sibling
        other_tgt = int(stats.tgt_fert[stats.src_links[i][0]])
        if other_tgt == 1:
            d[O2O] -= 1
            d[O2M] += 1
        else:
            d[M2O] -= 1
            d[M2M] += 1
    if b == 1:
        other_src = int(stats.src_fert[stats.tgt_links[j][0]])
        if other_src == 1:
            d[O2O] -= 1
            d[M2O] += 1
        else:
            d[O2M] -= 1
            d[M2M] += 1
    return d


def apply_add(stats: AlignStats, link: Link, delta: np.ndarray) -> AlignStats:
    """Return a new AlignStats with ``link`` added; ``stats`` is left untouched."""
    new = stats.copy()
    new.add(link, delta)
    return new


def delta_all(stats: AlignStats) -> np.ndarray:
    """Deltas for adding every link at once, shape ``(l, m, K)``.

    Entries at links already present are meaningless and must be masked by
    the caller.
    """
    ctx = stats.ctx
    l, m = ctx.l, ctx.m
    M = stats.present
    C = M.astype(np.int64)
    D = np.zeros((l, m, K))
    D[..., TPROB] = ctx.tprob
    D[..., RELPOS] = ctx.relpos
    D[..., LINKS] = 1.0

    P = np.zeros((l + 2, m + 2), dtype=np.int64)
    P[1:-1, 1:-1] = C
    D[..., MONO] = P[:-2, :-2] + P[2:, 2:]
    D[..., SWAP] = P[:-2, 2:] + P[2:, :-2]

    above = np.cumsum(C, axis=0) - C          # links in rows i' < i, per column
    below = C.sum(axis=0)[None, :] - np.cumsum(C, axis=0)  # rows i' > i
    right_of = above.sum(axis=1, keepdims=True) - np.cumsum(above, axis=1)  # j' > j
    left_of = np.cumsum(below, axis=1) - below  # j' < j
    D[..., CROSS] = right_of + left_of

    fs, ft = stats.src_fert, stats.tgt_fert
    D[..., SRC_LINKED] = (fs == 0)[:, None]
    D[..., TGT_LINKED] = (ft == 0)[None, :]

    jj = np.arange(m)[None, :]
    lo, hi = stats.src_lo[:, None], stats.src_hi[:, None]
    D[..., SRC_SIB] = np.where((fs >= 1)[:, None],
                               np.maximum(hi, jj) - np.minimum(lo, jj) - (hi - lo) - 1, 0)
    ii = np.arange(l)[:, None]
    lo, hi = stats.tgt_lo[None, :], stats.tgt_hi[None, :]
    D[..., TGT_SIB] = np.where((ft >= 1)[None, :],
                               np.maximum(hi, ii) - np.minimum(lo, ii) - (hi - lo) - 1, 0)

    D[..., SRC_MAXF] = (np.maximum(stats.max_src, fs + 1) - stats.max_src)[:, None]
    D[..., TGT_MAXF] = (np.maximum(stats.max_tgt, ft + 1) - stats.max_tgt)[None, :]

    a = fs[:, None]
    b = ft[None, :]
    D[..., O2O] = (a == 0) & (b == 0)
    D[..., O2M] = (a >= 1) & (b == 0)
    D[..., M2O] = (a == 0) & (b >= 1)
    D[..., M2M] = (a >= 1) & (b >= 1)

    # the lone link of a fertility-1 source/target word changes type
    row1 = fs == 1
    if row1.any():
        partner_single = np.zeros(l, dtype=bool)
        partner_single[row1] = ft[stats.src_lo[row1]] == 1
        shift_a = (row1 & partner_single)[:, None]
        shift_b = (row1 & ~partner_single)[:, None]
        D[..., O2O] -= shift_a
        D[..., O2M] += shift_a
        D[..., M2O] -= shift_b
        D[..., M2M] += shift_b
    col1 = ft == 1
    if col1.any():
        partner_single = np.zeros(m, dtype=bool)
        partner_single[col1] = fs[stats.tgt_lo[col1]] == 1
        shift_a = (col1 & partner_single)[None, :]
        shift_b = (col1 & ~partner_single)[None, :]
        D[..., O2O] -= shift_a
        D[..., M2O] += shift_a
        D[..., O2M] -= shift_b
        D[..., M2M] += shift_b
    return D
