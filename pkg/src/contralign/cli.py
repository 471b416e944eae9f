"""Command-line interface: ``contralign <command> [options]``.

Every command is deterministic given ``--seed``; all randomness is drawn
from named substreams of that one seed.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .corpus import (Corpus, CorpusError, format_alignment, load_gold, load_parallel,
                     load_ttable, save_ttable, write_gold, write_parallel)
from .exact import EnumerationError, mass_curve
from .features import K, LOCAL
from .lexicon import train_ttable
from .metrics import (GibbsEstimator, TopNEstimator, avg_approx_error, build_tables,
                      corpus_aer, random_weights, write_reports)
from .noise import STRATEGIES, NoiseError, NoiseSpec, make_noisy_corpus
from .search import DEFAULT_BEAM
from .synthetic import short_corpus, toy_corpus
from .trainer import (TrainConfig, TrainingError, align_corpus, load_weights, save_weights,
                      train, write_log)

log = logging.getLogger("contralign")

DEFAULT_MAX_CELLS = 16


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {text}")
    return value


def _rate(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"rate must be in (0, 1], got {text}")
    return value


def _int_list(text: str) -> list[int]:
    """Parse '1,5,10' or '1-15' (or a mix) into a list of positive integers."""
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        values = range(int(lo), int(hi) + 1) if sep else [int(lo)]
        for v in values:
            if v < 1:
                raise argparse.ArgumentTypeError(f"values must be positive: {text}")
            out.append(v)
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _short_pairs(corpus: Corpus, max_words: int) -> Corpus:
    keep = [p for p in corpus if p.l <= max_words and p.m <= max_words]
    if not keep:
        raise CorpusError(f"no sentence pair has at most {max_words} words per side")
    return Corpus(tuple(keep))


def cmd_make_toy(args) -> None:
    if args.kind == "reorder":
        corpus = toy_corpus(args.size, args.seed)
    else:
        corpus = short_corpus(args.size, args.seed, max_words=args.max_words)
    write_parallel(corpus, args.out_source, args.out_target)
    write_gold(corpus.gold, args.out_gold)


def cmd_train_lexicon(args) -> None:
    corpus = load_parallel(args.source, args.target)
    save_ttable(train_ttable(corpus, args.iters), args.out)


def cmd_train(args) -> None:
    corpus = load_parallel(args.source, args.target)
    ttable = load_ttable(args.ttable)
    heldout = None
    if args.gold is not None:
        if args.gold_source is None or args.gold_target is None:
            raise CorpusError("--gold needs --gold-source and --gold-target")
        heldout = load_gold(args.gold, load_parallel(args.gold_source, args.gold_target))
    config = TrainConfig(n=args.n, beam=args.beam, lr=args.lr, epochs=args.epochs, l2=args.l2,
                         seed=args.seed, noise=NoiseSpec(args.noise, args.rate, args.seed),
                         features=tuple(LOCAL) if args.features == "local" else tuple(range(K)),
                         init=args.init, resample_noise=args.resample_noise)
    weights, history = train(corpus, ttable, config, heldout=heldout)
    save_weights(weights, args.weights_out)
    if args.log_out:
        write_log(history, args.log_out)
    if history and history[-1].probe_aer is not None:
        print(f"AER {history[-1].probe_aer:.4f}")


def cmd_align(args) -> None:
    corpus = load_parallel(args.source, args.target)
    ttable = load_ttable(args.ttable)
    weights = load_weights(args.weights)
    lines = [format_alignment(a) for a in align_corpus(corpus, weights, ttable, args.beam)]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("".join(line + "\n" for line in lines))


def cmd_eval_aer(args) -> None:
    corpus = load_parallel(args.source, args.target)
    gold = load_gold(args.gold, corpus).gold
    pred = load_gold(args.pred, corpus).gold
    print(f"AER {corpus_aer([p.possible for p in pred], gold):.4f}")


def _approx_pairs(args):
    corpus = _short_pairs(load_parallel(args.source, args.target), args.max_words)
    noisy = make_noisy_corpus(corpus, NoiseSpec("mixed", args.rate, args.seed))
    pairs = [(o, n) for o, n in zip(corpus, noisy)
             if o.cells <= args.max_cells and n.cells <= args.max_cells]
    if args.max_pairs:
        pairs = pairs[:args.max_pairs]
    if not pairs:
        raise CorpusError(f"no pair fits within {args.max_cells} cells after noising")
    log.info("%d pairs kept for approximation-error measurement", len(pairs))
    return pairs


def cmd_approx_error(args) -> None:
    ttable = load_ttable(args.ttable)
    pairs = _approx_pairs(args)
    tables = build_tables(pairs, ttable)
    if args.estimator == "topn":
        estimators = [TopNEstimator(n, args.beam) for n in args.n]
    else:
        estimators = [GibbsEstimator(s, args.seed) for s in args.sweeps]
    reports = []
    for est in estimators:
        rep = avg_approx_error(pairs, args.trials, est, args.seed, ttable, tables)
        log.info("%s %d: %.6f", rep.estimator, rep.param, rep.average)
        reports.append(rep)
    write_reports(reports, args.out)


def cmd_concentration(args) -> None:
    ttable = load_ttable(args.ttable)
    corpus = _short_pairs(load_parallel(args.source, args.target), args.max_words)
    thetas = random_weights(args.trials, args.seed)
    columns = [f"mass{k}" for k in range(1, args.k_max + 1)]
    rows, curves = [], []
    for t, theta in enumerate(thetas):
        pair = corpus[t % len(corpus)]
        curve = mass_curve(pair, theta, ttable, args.k_max)
        curves.append(curve)
        rows.append([t, pair.id, *curve])
    median = np.median(np.array(curves), axis=0)
    first = corpus[0]
    uniform = mass_curve(first, np.zeros(K), ttable, args.k_max)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "pair", *columns])
        for t, pid, *curve in rows:
            writer.writerow([t, pid, *(f"{v:.10g}" for v in curve)])
        writer.writerow(["median", "", *(f"{v:.10g}" for v in median)])
        writer.writerow(["uniform", first.id, *(f"{v:.10g}" for v in uniform)])
    print(f"median mass{args.k_max} {median[-1]:.6f}")


def cmd_make_noise(args) -> None:
    corpus = load_parallel(args.source, args.target)
    noisy = make_noisy_corpus(corpus, NoiseSpec(args.strategy, args.rate, args.seed))
    write_parallel(noisy, args.out_source, args.out_target)


def _parallel_args(p) -> None:
    p.add_argument("--source", required=True, help="source side, one sentence per line")
    p.add_argument("--target", required=True, help="target side, one sentence per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contralign",
        description="Contrastive unsupervised word alignment with non-local features.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-toy", help="write a synthetic parallel corpus with gold links")
    p.add_argument("--kind", choices=("reorder", "short"), default="reorder")
    p.add_argument("--size", type=_positive, default=500)
    p.add_argument("--max-words", type=_positive, default=4)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out-source", required=True)
    p.add_argument("--out-target", required=True)
    p.add_argument("--out-gold", required=True)
    p.set_defaults(func=cmd_make_toy)

    p = sub.add_parser("train-lexicon", help="IBM Model 1 tables in both directions")
    _parallel_args(p)
    p.add_argument("--iters", type=_positive, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lexicon)

    p = sub.add_parser("train", help="contrastive training of the feature weights")
    _parallel_args(p)
    p.add_argument("--ttable", required=True)
    p.add_argument("--noise", choices=STRATEGIES + ("mixed",), default="shuffle")
    p.add_argument("--rate", type=_rate, default=0.25)
    p.add_argument("--n", type=_positive, default=1, help="size of the n-best list")
    p.add_argument("--beam", type=_positive, default=DEFAULT_BEAM)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=_positive, default=5)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--features", choices=("all", "local"), default="all")
    p.add_argument("--init", choices=("lexical", "zeros"), default="lexical")
    p.add_argument("--resample-noise", action="store_true",
                   help="draw fresh noisy pairs every epoch")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--weights-out", required=True)
    p.add_argument("--log-out")
    p.add_argument("--gold-source", help="held-out source side for per-epoch AER")
    p.add_argument("--gold-target", help="held-out target side for per-epoch AER")
    p.add_argument("--gold", help="held-out gold alignments")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("align", help="Viterbi alignments under trained weights")
    _parallel_args(p)
    p.add_argument("--ttable", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--beam", type=_positive, default=DEFAULT_BEAM)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("eval-aer", help="corpus alignment error rate")
    _parallel_args(p)
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.set_defaults(func=cmd_eval_aer)

    p = sub.add_parser("approx-error", help="expectation approximation error on short pairs")
    _parallel_args(p)
    p.add_argument("--ttable", required=True)
    p.add_argument("--estimator", choices=("topn", "gibbs"), default="topn")
    p.add_argument("--n", type=_int_list, default=[1, 5, 10, 15],
                   help="n values, e.g. '1,5,10,15' or '1-15'")
    p.add_argument("--sweeps", type=_int_list, default=[1, 5, 10, 50, 100, 500])
    p.add_argument("--beam", type=_positive, default=DEFAULT_BEAM)
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--rate", type=_rate, default=0.25, help="noise rate for the contrast pairs")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--max-words", type=_positive, default=4)
    p.add_argument("--max-cells", type=_positive, default=DEFAULT_MAX_CELLS)
    p.add_argument("--max-pairs", type=_positive, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_approx_error)

    p = sub.add_parser("concentration", help="posterior mass of the k best alignments")
    _parallel_args(p)
    p.add_argument("--ttable", required=True)
    p.add_argument("--trials", type=_positive, default=200)
    p.add_argument("--k-max", type=_positive, default=5)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--max-words", type=_positive, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_concentration)

    p = sub.add_parser("make-noise", help="write a corrupted copy of a parallel corpus")
    _parallel_args(p)
    p.add_argument("--strategy", choices=STRATEGIES + ("mixed",), default="shuffle")
    p.add_argument("--rate", type=_rate, default=0.25)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out-source", required=True)
    p.add_argument("--out-target", required=True)
    p.set_defaults(func=cmd_make_noise)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (OSError, CorpusError, EnumerationError, NoiseError, TrainingError,
            ValueError) as exc:
        print(f"contralign {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
