import pytest

from contralign.corpus import (Corpus, CorpusError, GoldAlignment, SentencePair, TTable,
                               format_alignment, load_gold, load_parallel, load_ttable,
                               make_corpus, parse_gold_line, save_ttable, write_gold,
                               write_parallel)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_pair_shape_and_transpose():
    pair = SentencePair(("a", "b", "c"), ("x", "y"), 3)
    assert (pair.l, pair.m, pair.cells) == (3, 2, 6)
    flipped = pair.transposed()
    assert flipped.source == ("x", "y") and flipped.id == 3


@pytest.mark.parametrize("src,tgt", [((), ("x",)), (("a",), ()), (("a b",), ("x",))])
def test_pair_rejects_bad_sides(src, tgt):
    with pytest.raises(CorpusError):
        SentencePair(src, tgt)


def test_gold_possible_contains_sure():
    gold = GoldAlignment(frozenset({(0, 0)}), frozenset({(1, 1)}))
    assert gold.possible == {(0, 0), (1, 1)}


def test_load_parallel_roundtrip(tmp_path):
    src = _write(tmp_path / "s", "a b\nc  d e\n")
    tgt = _write(tmp_path / "t", "x\ny z\n")
    corpus = load_parallel(src, tgt)
    assert corpus[1].source == ("c", "d", "e")
    assert [p.id for p in corpus] == [0, 1]
    write_parallel(corpus, tmp_path / "s2", tmp_path / "t2")
    again = load_parallel(tmp_path / "s2", tmp_path / "t2")
    assert again.pairs == corpus.pairs


def test_load_parallel_line_mismatch(tmp_path):
    src = _write(tmp_path / "s", "a\nb\n")
    tgt = _write(tmp_path / "t", "x\n")
    with pytest.raises(CorpusError, match="mismatch"):
        load_parallel(src, tgt)


def test_load_parallel_empty_line(tmp_path):
    src = _write(tmp_path / "s", "a\n\n")
    tgt = _write(tmp_path / "t", "x\ny\n")
    with pytest.raises(CorpusError, match="empty line 2"):
        load_parallel(src, tgt)


def test_gold_line_parsing():
    pair = SentencePair(("a", "b"), ("x", "y", "z"))
    gold = parse_gold_line("1-1 2?3", pair)
    assert gold.sure == {(0, 0)}
    assert gold.possible == {(0, 0), (1, 2)}
    assert parse_gold_line("", pair) == GoldAlignment()


@pytest.mark.parametrize("line", ["3-1", "1-4", "1:2", "a-b", "0-1"])
def test_gold_line_errors(line):
    pair = SentencePair(("a", "b"), ("x", "y", "z"))
    with pytest.raises(CorpusError):
        parse_gold_line(line, pair)


def test_gold_file_roundtrip(tmp_path):
    corpus = make_corpus([(("a", "b"), ("x", "y")), (("c",), ("z",))])
    golds = [GoldAlignment(frozenset({(0, 1)}), frozenset({(1, 0)})), GoldAlignment()]
    write_gold(golds, tmp_path / "g")
    assert (tmp_path / "g").read_text() == "1-2 2?1\n\n"
    loaded = load_gold(tmp_path / "g", corpus)
    assert list(loaded.gold) == golds


def test_format_alignment_sorted_one_based():
    assert format_alignment({(1, 0), (0, 2)}) == "1-3 2-1"
    assert format_alignment(set()) == ""


def test_ttable_validation():
    with pytest.raises(CorpusError):
        TTable({("a", "x"): 0.0}, {})
    with pytest.raises(CorpusError):
        TTable({("a", "x"): 0.7, ("a", "y"): 0.6}, {})
    table = TTable({("a", "x"): 0.5}, {("x", "a"): 0.25})
    assert table.fwd("a", "x") == 0.5
    assert table.bwd("a", "x") == 0.25
    assert table.fwd("a", "nope") == 0.0


def test_ttable_file_roundtrip(tmp_path):
    table = TTable({("a", "x"): 0.1, ("b", "x"): 1.0}, {("x", "a"): 0.3, ("x", "b"): 0.7})
    save_ttable(table, tmp_path / "tt")
    loaded = load_ttable(tmp_path / "tt")
    assert loaded.forward == table.forward
    assert loaded.backward == table.backward
    assert (tmp_path / "tt").read_text().splitlines()[0] == "F a x 0.1"


@pytest.mark.parametrize("text,msg", [
    ("F a x\n", "expected"),
    ("Q a x 0.5\n", "expected"),
    ("F a x 1.5\n", "outside"),
    ("F a x nan?\n", "bad probability"),
    ("F a x 0.5\nF a x 0.2\n", "duplicate"),
])
def test_ttable_file_errors(tmp_path, text, msg):
    with pytest.raises(CorpusError, match=msg):
        load_ttable(_write(tmp_path / "tt", text))


def test_vocabulary_sorted():
    corpus = make_corpus([(("b", "a"), ("y",)), (("a",), ("x", "y"))])
    assert corpus.vocabulary() == (["a", "b"], ["x", "y"])


def test_gold_length_must_match():
    with pytest.raises(CorpusError):
        Corpus((SentencePair(("a",), ("x",)),), (GoldAlignment(), GoldAlignment()))
