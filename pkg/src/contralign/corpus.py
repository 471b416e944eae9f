"""Parallel corpora, gold alignments and lexical translation tables.

File formats
------------
Parallel text
    Two UTF-8 files, one sentence per line, tokens separated by runs of
    whitespace.
Gold alignments
    One line per sentence pair.  Items are ``s-t`` (sure link) or ``s?t``
    (possible-only link) with 1-based positions.  An empty line is an empty
    alignment.
Translation table
    One entry per line: ``direction src tgt prob`` where direction is ``F``
    (``t(tgt|src)``) or ``B`` (``t(src|tgt)``, stored under key
    ``(tgt, src)``).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Link = tuple[int, int]


class CorpusError(ValueError):
    """Malformed or inconsistent corpus input."""


@dataclass(frozen=True)
class SentencePair:
    source: tuple[str, ...]
    target: tuple[str, ...]
    id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        if not self.source or not self.target:
            raise CorpusError(f"pair {self.id}: both sides need at least one token")
        for tok in self.source + self.target:
            if not tok or any(c.isspace() for c in tok):
                raise CorpusError(f"pair {self.id}: invalid token {tok!r}")
        if self.id < 0:
            raise CorpusError("pair id must be non-negative")

    @property
    def l(self) -> int:
        return len(self.source)

    @property
    def m(self) -> int:
        return len(self.target)

    @property
    def cells(self) -> int:
        return len(self.source) * len(self.target)

    def transposed(self) -> "SentencePair":
        return SentencePair(self.target, self.source, self.id)


@dataclass(frozen=True)
class GoldAlignment:
    sure: frozenset[Link] = frozenset()
    possible: frozenset[Link] = frozenset()

    def __post_init__(self):
        sure = frozenset(self.sure)
        object.__setattr__(self, "sure", sure)
        object.__setattr__(self, "possible", frozenset(self.possible) | sure)

    def check_bounds(self, pair: SentencePair) -> None:
        for i, j in self.possible:
            if not (0 <= i < pair.l and 0 <= j < pair.m):
                raise CorpusError(f"link ({i}, {j}) outside {pair.l}x{pair.m} pair {pair.id}")


@dataclass(frozen=True)
class TTable:
    """Bidirectional lexical table.

    ``forward[(s, t)]`` is t(t|s); ``backward[(t, s)]`` is t(s|t).
    """

    forward: dict[tuple[str, str], float] = field(default_factory=dict)
    backward: dict[tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        for name, table in (("forward", self.forward), ("backward", self.backward)):
            totals: dict[str, float] = {}
            for key, p in table.items():
                if not (0.0 < p <= 1.0) or math.isnan(p):
                    raise CorpusError(f"{name} probability {p} for {key} outside (0, 1]")
                totals[key[0]] = totals.get(key[0], 0.0) + p
            for word, total in totals.items():
                if total > 1.0 + 1e-6:
                    raise CorpusError(f"{name} distribution of {word!r} sums to {total}")

    def fwd(self, src: str, tgt: str) -> float:
        return self.forward.get((src, tgt), 0.0)

    def bwd(self, src: str, tgt: str) -> float:
        return self.backward.get((tgt, src), 0.0)

    def transposed(self) -> "TTable":
        return TTable(forward=dict(self.backward), backward=dict(self.forward))


@dataclass(frozen=True)
class Corpus:
    pairs: tuple[SentencePair, ...]
    gold: tuple[GoldAlignment, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if self.gold is not None:
            object.__setattr__(self, "gold", tuple(self.gold))
            if len(self.gold) != len(self.pairs):
                raise CorpusError(
                    f"gold has {len(self.gold)} entries for {len(self.pairs)} pairs")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, idx):
        return self.pairs[idx]

    def with_gold(self, gold: Sequence[GoldAlignment]) -> "Corpus":
        return Corpus(self.pairs, tuple(gold))

    def vocabulary(self) -> tuple[list[str], list[str]]:
        """Sorted per-side vocabularies."""
        src = sorted({w for p in self.pairs for w in p.source})
        tgt = sorted({w for p in self.pairs for w in p.target})
        return src, tgt


def make_corpus(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> Corpus:
    """Build a corpus from (source tokens, target tokens) tuples; ids follow order."""
    return Corpus(tuple(SentencePair(tuple(s), tuple(t), k) for k, (s, t) in enumerate(pairs)))


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def load_parallel(source_path, target_path) -> Corpus:
    src_lines = _read_lines(source_path)
    tgt_lines = _read_lines(target_path)
    if len(src_lines) != len(tgt_lines):
        raise CorpusError(
            f"line-count mismatch: {source_path} has {len(src_lines)} lines, "
            f"{target_path} has {len(tgt_lines)}")
    pairs = []
    for k, (s, t) in enumerate(zip(src_lines, tgt_lines)):
        src, tgt = s.split(), t.split()
        if not src or not tgt:
            side = source_path if not src else target_path
            raise CorpusError(f"empty line {k + 1} in {side}")
        pairs.append(SentencePair(tuple(src), tuple(tgt), k))
    return Corpus(tuple(pairs))


def write_parallel(corpus: Corpus, source_path, target_path) -> None:
    with open(source_path, "w", encoding="utf-8") as fs, \
            open(target_path, "w", encoding="utf-8") as ft:
        for pair in corpus:
            fs.write(" ".join(pair.source) + "\n")
            ft.write(" ".join(pair.target) + "\n")


def parse_gold_line(line: str, pair: SentencePair, lineno: int = 0) -> GoldAlignment:
    sure, possible = set(), set()
    for item in line.split():
        sep = "-" if "-" in item else "?" if "?" in item else None
        parts = item.split(sep) if sep else []
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise CorpusError(f"line {lineno}: malformed alignment item {item!r}")
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        if not (0 <= i < pair.l and 0 <= j < pair.m):
            raise CorpusError(
                f"line {lineno}: link {item!r} out of bounds for {pair.l}x{pair.m} pair")
        (sure if sep == "-" else possible).add((i, j))
    return GoldAlignment(frozenset(sure), frozenset(possible))


def load_gold(path, corpus: Corpus) -> Corpus:
    lines = _read_lines(path)
    if len(lines) != len(corpus):
        raise CorpusError(f"{path} has {len(lines)} lines for {len(corpus)} pairs")
    gold = [parse_gold_line(line, pair, k + 1) for k, (line, pair) in enumerate(zip(lines, corpus))]
    return corpus.with_gold(gold)


def format_alignment(links: Iterable[Link], possible: Iterable[Link] = ()) -> str:
    """Render links in the gold format; ``possible`` links not in ``links`` use ``?``."""
    links = set(links)
    items = [(i, j, "-") for i, j in links]
    items += [(i, j, "?") for i, j in set(possible) - links]
    return " ".join(f"{i + 1}{sep}{j + 1}" for i, j, sep in sorted(items))


def write_gold(golds: Iterable[GoldAlignment], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for g in golds:
            fh.write(format_alignment(g.sure, g.possible) + "\n")


def load_ttable(path) -> TTable:
    forward: dict[tuple[str, str], float] = {}
    backward: dict[tuple[str, str], float] = {}
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("F", "B"):
            raise CorpusError(f"{path}:{lineno}: expected 'F|B src tgt prob'")
        direction, src, tgt, raw = parts
        try:
            prob = float(raw)
        except ValueError:
            raise CorpusError(f"{path}:{lineno}: bad probability {raw!r}") from None
        if not (0.0 < prob <= 1.0):
            raise CorpusError(f"{path}:{lineno}: probability {prob} outside (0, 1]")
        table, key = (forward, (src, tgt)) if direction == "F" else (backward, (tgt, src))
        if key in table:
            raise CorpusError(f"{path}:{lineno}: duplicate entry {direction} {src} {tgt}")
        table[key] = prob
    return TTable(forward, backward)


def save_ttable(ttable: TTable, path) -> None:
    lines = [f"F {s} {t} {p!r}" for (s, t), p in sorted(ttable.forward.items())]
    lines += [f"B {s} {t} {p!r}" for (t, s), p in sorted(ttable.backward.items(),
                                                       key=lambda kv: (kv[0][1], kv[0][0]))]
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("".join(line + "\n" for line in lines))
    os.replace(tmp, path)
