"""Exhaustive enumeration over all 2^(l*m) alignments of short sentence pairs.

Alignments are numbered by bitmask: bit ``k`` is link ``(k // m, k % m)``,
so counting masks upward enumerates subsets of the canonically sorted link
grid in binary order.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .corpus import SentencePair, TTable
from .features import (CROSS, K, LINKS, M2M, M2O, MONO, O2M, O2O, RELPOS,
                       SRC_LINKED, SRC_MAXF, SRC_SIB, SWAP, TGT_LINKED, TGT_MAXF,
                       TGT_SIB, TPROB, pair_context)

MAX_CELLS = 24
_CHUNK = 1 << 15


class EnumerationError(ValueError):
    pass


def check_guard(pair: SentencePair, max_cells: int = MAX_CELLS) -> None:
    if pair.cells > max_cells:
        raise EnumerationError(
            f"pair {pair.id} has {pair.l}x{pair.m}={pair.cells} cells; "
            f"enumeration is limited to l*m <= {max_cells}")


def mask_to_links(mask: int, m: int) -> frozenset:
    links, k = [], 0
    while mask:
        if mask & 1:
            links.append(divmod(k, m))
        mask >>= 1
        k += 1
    return frozenset(links)


def links_to_mask(links, m: int) -> int:
    mask = 0
    for i, j in links:
        mask |= 1 << (i * m + j)
    return mask


def canonical_key(mask: int) -> tuple[int, ...]:
    """Sort key equivalent to the ascending sorted link list of ``mask``."""
    out, k = [], 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def enumerate_alignments(pair: SentencePair) -> Iterator[frozenset]:
    check_guard(pair)
    for mask in range(1 << pair.cells):
        yield mask_to_links(mask, pair.m)


def _batch_features(masks: np.ndarray, tprob: np.ndarray, relpos: np.ndarray) -> np.ndarray:
    l, m = tprob.shape
    n = len(masks)
    bits = ((masks[:, None] >> np.arange(l * m, dtype=np.int64)) & 1).astype(bool)
    B = bits.reshape(n, l, m)
    Bi = B.astype(np.int64)
    phi = np.zeros((n, K))
    phi[:, TPROB] = np.einsum("nij,ij->n", Bi.astype(float), tprob)
    phi[:, RELPOS] = np.einsum("nij,ij->n", Bi.astype(float), relpos)
    phi[:, LINKS] = Bi.sum(axis=(1, 2))
    phi[:, MONO] = (B[:, :-1, :-1] & B[:, 1:, 1:]).sum(axis=(1, 2))
    phi[:, SWAP] = (B[:, :-1, 1:] & B[:, 1:, :-1]).sum(axis=(1, 2))
    # pairs with i' < i and j' > j
    above = np.cumsum(Bi, axis=1) - Bi
    right = above.sum(axis=2, keepdims=True) - np.cumsum(above, axis=2)
    phi[:, CROSS] = (Bi * right).sum(axis=(1, 2))

    fs = Bi.sum(axis=2)  # (n, l)
    ft = Bi.sum(axis=1)  # (n, m)
    phi[:, SRC_LINKED] = (fs >= 1).sum(axis=1)
    phi[:, TGT_LINKED] = (ft >= 1).sum(axis=1)

    first_j = B.argmax(axis=2)
    last_j = m - 1 - B[:, :, ::-1].argmax(axis=2)
    phi[:, SRC_SIB] = np.where(fs >= 1, last_j - first_j - fs + 1, 0).sum(axis=1)
    first_i = B.argmax(axis=1)
    last_i = l - 1 - B[:, ::-1, :].argmax(axis=1)
    phi[:, TGT_SIB] = np.where(ft >= 1, last_i - first_i - ft + 1, 0).sum(axis=1)

    phi[:, SRC_MAXF] = fs.max(axis=1)
    phi[:, TGT_MAXF] = ft.max(axis=1)

    s1, s2 = (fs == 1)[:, :, None], (fs >= 2)[:, :, None]
    t1, t2 = (ft == 1)[:, None, :], (ft >= 2)[:, None, :]
    phi[:, O2O] = (B & s1 & t1).sum(axis=(1, 2))
    phi[:, O2M] = (B & s2 & t1).sum(axis=(1, 2))
    phi[:, M2O] = (B & s1 & t2).sum(axis=(1, 2))
    phi[:, M2M] = (B & s2 & t2).sum(axis=(1, 2))
    return phi


def feature_table(pair: SentencePair, ttable: TTable) -> np.ndarray:
    """Feature vectors of every alignment, row ``mask``; shape (2^(l*m), K)."""
    check_guard(pair)
    ctx = pair_context(pair, ttable)
    total = 1 << pair.cells
    out = np.empty((total, K))
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        out[start:start + len(masks)] = _batch_features(masks, ctx.tprob, ctx.relpos)
    return out


def _table(pair, ttable, table):
    return feature_table(pair, ttable) if table is None else table


def log_partition(scores: np.ndarray) -> float:
    top = scores.max()
    return float(top + np.log(np.exp(scores - top).sum()))


def posterior_array(pair: SentencePair, weights, ttable: TTable,
                    table: np.ndarray | None = None) -> np.ndarray:
    """Posterior probabilities indexed by alignment mask."""
    check_guard(pair)
    scores = _table(pair, ttable, table) @ np.asarray(weights, dtype=float)
    p = np.exp(scores - scores.max())
    return p / p.sum()


def posterior(pair: SentencePair, weights, ttable: TTable,
              table: np.ndarray | None = None) -> dict[frozenset, float]:
    probs = posterior_array(pair, weights, ttable, table)
    return {mask_to_links(k, pair.m): float(p) for k, p in enumerate(probs)}


def exact_expectation(pair: SentencePair, weights, ttable: TTable,
                      table: np.ndarray | None = None) -> np.ndarray:
    table = _table(pair, ttable, table)
    return posterior_array(pair, weights, ttable, table) @ table


def log_marginal(pair: SentencePair, weights, ttable: TTable,
                 table: np.ndarray | None = None) -> float:
    """log of the sum of exp(theta . phi) over all alignments of ``pair``."""
    check_guard(pair)
    return log_partition(_table(pair, ttable, table) @ np.asarray(weights, dtype=float))


def ranked_masks(scores: np.ndarray, n: int) -> list[int]:
    """Indices of the ``n`` best scores, ties broken by canonical link list."""
    n = min(n, len(scores))
    if n <= 0:
        return []
    if n < len(scores):
        kth = np.partition(-scores, n - 1)[n - 1]
        cand = np.flatnonzero(-scores <= kth)
    else:
        cand = np.arange(len(scores))
    order = sorted(cand.tolist(), key=lambda k: (-scores[k], canonical_key(k)))
    return order[:n]


def exact_topn(pair: SentencePair, weights, ttable: TTable, n: int,
               table: np.ndarray | None = None):
    from .search import TopN

    check_guard(pair)
    table = _table(pair, ttable, table)
    scores = table @ np.asarray(weights, dtype=float)
    top = TopN(n, pair.m)
    for k in ranked_masks(scores, n):
        top.offer(k, float(scores[k]), table[k].copy())
    return top


def mass_curve(pair: SentencePair, weights, ttable: TTable, k_max: int,
               table: np.ndarray | None = None) -> np.ndarray:
    """Cumulative posterior mass of the k most probable alignments, k = 1..k_max."""
    probs = np.sort(posterior_array(pair, weights, ttable, table))[::-1]
    curve = np.minimum(np.cumsum(probs), 1.0)
    if k_max <= len(curve):
        return curve[:k_max].copy()
    return np.concatenate([curve, np.ones(k_max - len(curve))])
