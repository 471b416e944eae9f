"""Alignment error rate and approximation-error measurements.

The approximation error of an estimator on a set D of (observed, noisy)
pairs is the L1 distance between the exact and estimated differences of
posterior feature expectations, averaged over pairs and features.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import GoldAlignment, SentencePair, TTable
from .exact import MAX_CELLS, exact_expectation, exact_topn, feature_table
from .features import K
from .gibbs import gibbs_expectation
from .search import DEFAULT_BEAM, beam_search
from .seeding import GIBBS, THETA, substream
from .trainer import topn_expectation


def aer(predicted, gold: GoldAlignment) -> float:
    a = set(predicted)
    if not a and not gold.sure:
        return 0.0
    return 1.0 - (len(a & gold.sure) + len(a & gold.possible)) / (len(a) + len(gold.sure))


def corpus_aer(predictions: Sequence, golds: Sequence[GoldAlignment]) -> float:
    """Micro-averaged AER: counts are summed over the corpus before the ratio."""
    if len(predictions) != len(golds):
        raise ValueError(f"{len(predictions)} predictions for {len(golds)} gold alignments")
    a_s = a_p = n_a = n_s = 0
    for pred, gold in zip(predictions, golds):
        a = set(pred)
        a_s += len(a & gold.sure)
        a_p += len(a & gold.possible)
        n_a += len(a)
        n_s += len(gold.sure)
    if n_a + n_s == 0:
        return 0.0
    return 1.0 - (a_s + a_p) / (n_a + n_s)


@dataclass(frozen=True)
class TopNEstimator:
    n: int
    beam: int = DEFAULT_BEAM
    kind = "topn"

    @property
    def param(self) -> int:
        return self.n


@dataclass(frozen=True)
class ExactTopNEstimator:
    """Top-n over the true n best alignments (enumeration, not search)."""

    n: int
    kind = "exact-topn"

    @property
    def param(self) -> int:
        return self.n


@dataclass(frozen=True)
class GibbsEstimator:
    sweeps: int
    seed: int = 0
    burn_in: int = 0
    kind = "gibbs"

    @property
    def param(self) -> int:
        return self.sweeps


def estimate(estimator, pair: SentencePair, weights, ttable: TTable,
             table: np.ndarray | None = None, stream: tuple = ()) -> np.ndarray:
    """Approximate posterior feature expectation of ``pair``.

    ``stream`` keys the Gibbs random substream so chains for different
    (weight vector, pair, side) triples are independent.
    """
    if isinstance(estimator, TopNEstimator):
        if pair.cells <= MAX_CELLS and estimator.n >= 1 << pair.cells:
            # the n best of the whole space are the whole space
            return exact_expectation(pair, weights, ttable, table)
        top = beam_search(pair, weights, ttable, estimator.beam, estimator.n)
        return topn_expectation(top, weights)
    if isinstance(estimator, ExactTopNEstimator):
        return topn_expectation(exact_topn(pair, weights, ttable, estimator.n, table), weights)
    if isinstance(estimator, GibbsEstimator):
        return gibbs_expectation(pair, weights, ttable, estimator.sweeps, estimator.burn_in,
                                 seed=[estimator.seed, GIBBS, *stream], table=table)
    raise TypeError(f"unknown estimator {estimator!r}")


def delta_true(observed: SentencePair, noisy: SentencePair, weights, ttable: TTable,
               tables: tuple | None = None) -> np.ndarray:
    t_obs, t_noisy = tables if tables is not None else (None, None)
    return (exact_expectation(observed, weights, ttable, t_obs)
            - exact_expectation(noisy, weights, ttable, t_noisy))


def delta_approx(observed: SentencePair, noisy: SentencePair, weights, ttable: TTable,
                 estimator, tables: tuple | None = None, stream: tuple = ()) -> np.ndarray:
    t_obs, t_noisy = tables if tables is not None else (None, None)
    return (estimate(estimator, observed, weights, ttable, t_obs, (*stream, 0))
            - estimate(estimator, noisy, weights, ttable, t_noisy, (*stream, 1)))


def build_tables(pairs: Sequence[tuple[SentencePair, SentencePair]], ttable: TTable) -> list:
    return [(feature_table(o, ttable), feature_table(n, ttable)) for o, n in pairs]


def approx_error(pairs: Sequence[tuple[SentencePair, SentencePair]], weights, ttable: TTable,
                 estimator, tables: Sequence | None = None, stream: tuple = ()) -> float:
    if not pairs:
        raise ValueError("approximation error needs at least one pair")
    tables = tables if tables is not None else build_tables(pairs, ttable)
    total = 0.0
    for idx, ((obs, noisy), tabs) in enumerate(zip(pairs, tables)):
        exact = delta_true(obs, noisy, weights, ttable, tabs)
        approx = delta_approx(obs, noisy, weights, ttable, estimator, tabs, (*stream, idx))
        total += float(np.abs(exact - approx).sum())
    return total / (len(pairs) * K)


@dataclass
class ApproxErrorReport:
    estimator: str
    param: int
    errors: list[float]
    seed: int
    num_pairs: int
    k: int = K
    metadata: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return len(self.errors)

    @property
    def average(self) -> float:
        return float(np.mean(self.errors))


def random_weights(T: int, seed: int) -> np.ndarray:
    """T standard-normal weight vectors drawn from the THETA substream of ``seed``."""
    return substream(seed, THETA).standard_normal((T, K))


def avg_approx_error(pairs: Sequence[tuple[SentencePair, SentencePair]], T: int, estimator,
                     seed: int, ttable: TTable, tables: Sequence | None = None
                     ) -> ApproxErrorReport:
    if T < 1:
        raise ValueError("T must be >= 1")
    tables = tables if tables is not None else build_tables(pairs, ttable)
    thetas = random_weights(T, seed)
    errors = [approx_error(pairs, theta, ttable, estimator, tables, (t,))
              for t, theta in enumerate(thetas)]
    return ApproxErrorReport(estimator.kind, estimator.param, errors, seed, len(pairs),
                             metadata={"estimator": repr(estimator)})


def write_reports(reports: Sequence[ApproxErrorReport], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["estimator", "param", "t", "error"])
        for rep in reports:
            for t, err in enumerate(rep.errors):
                writer.writerow([rep.estimator, rep.param, t, f"{err:.10g}"])
        for rep in reports:
            writer.writerow([rep.estimator, rep.param, "mean", f"{rep.average:.10g}"])
