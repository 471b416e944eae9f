import numpy as np
import pytest

from contralign.corpus import SentencePair, TTable

ACCEPTANCE_LINES: list[str] = []


def random_ttable(rng, src_vocab, tgt_vocab, density=0.6):
    """Sparse random bidirectional table whose distributions sum to at most 1."""
    forward, backward = {}, {}
    for s in src_vocab:
        keep = [t for t in tgt_vocab if rng.random() < density] or [tgt_vocab[0]]
        p = rng.dirichlet(np.ones(len(keep))) * rng.uniform(0.5, 1.0)
        forward.update({(s, t): float(max(v, 1e-6)) for t, v in zip(keep, p)})
    for t in tgt_vocab:
        keep = [s for s in src_vocab if rng.random() < density] or [src_vocab[0]]
        p = rng.dirichlet(np.ones(len(keep))) * rng.uniform(0.5, 1.0)
        backward.update({(t, s): float(max(v, 1e-6)) for s, v in zip(keep, p)})
    return TTable(forward, backward)


SRC_VOCAB = [f"s{k}" for k in range(6)]
TGT_VOCAB = [f"t{k}" for k in range(6)]


def random_pair(rng, max_l=3, max_m=3, max_cells=None, pid=0):
    while True:
        l, m = int(rng.integers(1, max_l + 1)), int(rng.integers(1, max_m + 1))
        if max_cells is None or l * m <= max_cells:
            break
    src = [SRC_VOCAB[k] for k in rng.integers(len(SRC_VOCAB), size=l)]
    tgt = [TGT_VOCAB[k] for k in rng.integers(len(TGT_VOCAB), size=m)]
    return SentencePair(tuple(src), tuple(tgt), pid)


def random_alignment(rng, pair, p=None):
    p = rng.random() if p is None else p
    return frozenset((i, j) for i in range(pair.l) for j in range(pair.m) if rng.random() < p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ttable():
    return random_ttable(np.random.default_rng(7), SRC_VOCAB, TGT_VOCAB)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
