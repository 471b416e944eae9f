"""Synthetic parallel corpora with known word alignments.

Sentences are drawn from a 50-entry bilingual dictionary.  The source side
places the prepositional phrase before the verb phrase, the target side
after it, and some source prepositions are circumpositions whose two
tokens both align to one target preposition.  Target determiners have no
source counterpart and stay unaligned.

A second generator produces short pairs over a synonym-rich lexicon, the
regime in which exhaustive enumeration is affordable.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, GoldAlignment, SentencePair

N_NOUNS, N_VERBS, N_ADJS, N_PREPS = 20, 12, 12, 6
N_CIRCUM = 3  # prepositions realised as two source tokens


def dictionary() -> dict[str, list[tuple[tuple[str, ...], str]]]:
    """Category -> list of (source tokens, target token)."""
    entries = {
        "noun": [((f"mu{k}",), f"noun{k}") for k in range(N_NOUNS)],
        "verb": [((f"ka{k}",), f"verb{k}") for k in range(N_VERBS)],
        "adj": [((f"si{k}",), f"adj{k}") for k in range(N_ADJS)],
        "prep": [],
    }
    for k in range(N_PREPS):
        src = (f"zai{k}", f"shang{k}") if k < N_CIRCUM else (f"zai{k}",)
        entries["prep"].append((src, f"prep{k}"))
    return entries


def _phrase(rng, entries, adj_prob):
    noun = entries["noun"][rng.integers(N_NOUNS)]
    adj = entries["adj"][rng.integers(N_ADJS)] if rng.random() < adj_prob else None
    return adj, noun


def toy_pair(rng: np.random.Generator, pid: int = 0, determiners: bool = True,
             pp_prob: float = 0.7, adj_prob: float = 0.4,
             entries=None) -> tuple[SentencePair, GoldAlignment]:
    entries = entries or dictionary()
    subj = _phrase(rng, entries, adj_prob)
    verb = entries["verb"][rng.integers(N_VERBS)]
    obj = _phrase(rng, entries, adj_prob)
    pp = None
    if rng.random() < pp_prob:
        pp = (entries["prep"][rng.integers(N_PREPS)], _phrase(rng, entries, 0.0)[1])

    src: list[str] = []
    tgt: list[str] = []
    src_pos: dict[str, list[int]] = {}
    tgt_pos: dict[str, int] = {}

    def put_src(tag, toks):
        src_pos[tag] = list(range(len(src), len(src) + len(toks)))
        src.extend(toks)

    def put_tgt(tag, tok):
        tgt_pos[tag] = len(tgt)
        tgt.append(tok)

    def np_src(tag, phrase):
        adj, noun = phrase
        if adj:
            put_src(tag + "a", adj[0])
        put_src(tag + "n", noun[0])

    def np_tgt(tag, phrase):
        adj, noun = phrase
        if determiners:
            tgt.append("the")
        if adj:
            put_tgt(tag + "a", adj[1])
        put_tgt(tag + "n", noun[1])

    # source: SUBJ [PP] VERB OBJ, with PP = prep-first-token NOUN [prep-second-token]
    np_src("s", subj)
    if pp:
        (p_src, _p_tgt), pnoun = pp
        src_pos["p"] = [len(src)]
        src.append(p_src[0])
        put_src("pn", pnoun[0])
        if len(p_src) > 1:
            src_pos["p"].append(len(src))
            src.append(p_src[1])
    put_src("v", verb[0])
    np_src("o", obj)

    # target: SUBJ VERB OBJ [PP]
    np_tgt("s", subj)
    put_tgt("v", verb[1])
    np_tgt("o", obj)
    if pp:
        (_p_src, p_tgt), pnoun = pp
        put_tgt("p", p_tgt)
        if determiners:
            tgt.append("the")
        put_tgt("pn", pnoun[1])

    links = set()
    for tag, j in tgt_pos.items():
        for i in src_pos[tag]:
            links.add((i, j))
    pair = SentencePair(tuple(src), tuple(tgt), pid)
    return pair, GoldAlignment(frozenset(links), frozenset(links))


def toy_corpus(size: int, seed: int = 0, **kwargs) -> Corpus:
    """``size`` pairs with gold alignments attached."""
    rng = np.random.default_rng(seed)
    entries = dictionary()
    pairs, golds = [], []
    for pid in range(size):
        pair, gold = toy_pair(rng, pid, entries=entries, **kwargs)
        pairs.append(pair)
        golds.append(gold)
    return Corpus(tuple(pairs), tuple(golds))


def short_corpus(size: int, seed: int = 0, concepts: int = 30, synonyms: int = 10,
                 max_words: int = 4, swap_prob: float = 0.5) -> Corpus:
    """Short pairs over a synonym-rich lexicon, 1 to ``max_words`` words per side.

    Each word realises one of ``concepts`` meanings through one of
    ``synonyms`` interchangeable forms drawn independently on each side, so
    lexical translation probabilities are spread over several candidates as
    in real bitext.  Pairs of three or more words move the second target word
    to the end with probability ``swap_prob``.
    """
    if max_words < 1 or concepts < 1 or synonyms < 1:
        raise ValueError("max_words, concepts and synonyms must be positive")
    rng = np.random.default_rng(seed)
    pairs, golds = [], []
    for pid in range(size):
        length = int(rng.integers(1, max_words + 1))
        meaning = rng.integers(0, concepts, length)
        src = [f"s{c}_{rng.integers(synonyms)}" for c in meaning]
        tgt = [f"t{c}_{rng.integers(synonyms)}" for c in meaning]
        order = list(range(length))
        if length >= 3 and rng.random() < swap_prob:
            order = order[:1] + order[2:] + order[1:2]
        tgt = [tgt[k] for k in order]
        links = frozenset((i, j) for j, i in enumerate(order))
        pairs.append(SentencePair(tuple(src), tuple(tgt), pid))
        golds.append(GoldAlignment(links, links))
    return Corpus(tuple(pairs), tuple(golds))
